//! Shared fixtures for the criterion benchmarks.

use std::sync::Arc;

use starweil_core::group::{enumerate, StarGroup};
use starweil_core::rep::WeilRepresentation;
use starweil_core::{FqField, GroupTable, InvolutiveRing, WeilDatum};

pub struct BenchSetup {
    pub ring: Arc<InvolutiveRing>,
    pub datum: Arc<WeilDatum>,
    pub group: Arc<StarGroup>,
    pub table: Arc<GroupTable>,
}

impl BenchSetup {
    pub fn rep(&self) -> WeilRepresentation {
        WeilRepresentation::new(self.datum.clone(), self.group.clone(), self.table.clone(), 10_000)
            .unwrap()
    }
}

/// The truncated-polynomial configuration m = 3, q = 3 (|M| = 27).
pub fn trunc_3_3() -> BenchSetup {
    let ring = Arc::new(InvolutiveRing::truncated_poly(3, FqField::new(3, 1).unwrap()).unwrap());
    let datum = Arc::new(WeilDatum::truncated_poly(ring.clone(), None).unwrap());
    let group = Arc::new(StarGroup::new(ring.clone(), -1).unwrap());
    let table = Arc::new(enumerate(&group, 1_000_000).unwrap());
    BenchSetup { ring, datum, group, table }
}

/// The rank-one matrix configuration over F_5 (|M| = 5, |G| = 120).
pub fn matrix_1_1_5() -> BenchSetup {
    let ring = Arc::new(InvolutiveRing::matrix(1, FqField::new(5, 1).unwrap()).unwrap());
    let datum = Arc::new(WeilDatum::matrix_ring(ring.clone(), 1, None, None).unwrap());
    let group = Arc::new(StarGroup::new(ring.clone(), -1).unwrap());
    let table = Arc::new(enumerate(&group, 1_000_000).unwrap());
    BenchSetup { ring, datum, group, table }
}

/// M_2(F_3), whose group is Sp(4,3) of order 51840.
pub fn sp4_ring() -> Arc<InvolutiveRing> {
    Arc::new(InvolutiveRing::matrix(2, FqField::new(3, 1).unwrap()).unwrap())
}
