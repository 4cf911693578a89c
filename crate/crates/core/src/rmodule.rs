//! Finite right A-modules with fully tabled structure: addition, negation,
//! and the right action M x A -> M.
//!
//! Module elements are dense coordinate vectors over the base field, indexed
//! like ring elements (lexicographic coordinate order = numeric id). Two
//! constructions cover the built-in data: the regular module M = A, and the
//! hom space M = Hom_k(k^n, E) = E + ... + E for the matrix ring M_n(k),
//! E = k^m, with (x.t)_i = sum_j x_j t_ji.

use std::sync::Arc;

use crate::error::{Error, Result};
use crate::fq::Felt;
use crate::ring::{ElemId, InvolutiveRing, RingDescriptor};

/// Index of a module element in the enumeration.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct MId(pub u32);

pub const DEFAULT_MODULE_BUDGET: u64 = 1_000_000;

pub struct ModuleM {
    ring: Arc<InvolutiveRing>,
    dim: usize,
    size: u64,
    /// act[x * |A| + a] = id of x.a
    act: Vec<u32>,
    /// add[x * |M| + y]
    add: Vec<u32>,
    neg: Vec<u32>,
}

impl ModuleM {
    /// The ring acting on itself by right multiplication.
    pub fn regular(ring: Arc<InvolutiveRing>) -> Result<ModuleM> {
        let dim = ring.dim();
        Self::build(ring.clone(), dim, |x, a| {
            let xe = crate::ring::RingElement { coords: x.to_vec() };
            ring.mul(&xe, a).coords
        })
    }

    /// M = E + ... + E (n copies), E = k^m, for the matrix ring M_n(k);
    /// the right action is (x.t)_i = sum_j x_j t_ji.
    pub fn hom_space(ring: Arc<InvolutiveRing>, m: usize) -> Result<ModuleM> {
        let RingDescriptor::Matrix { n, .. } = *ring.descriptor() else {
            return Err(Error::RingMismatch {
                expected: "matrix".into(),
                got: ring.descriptor().summary(),
            });
        };
        if m < 1 {
            return Err(Error::BadDescriptor("hom-space rank m must be >= 1".into()));
        }
        let field = ring.field().clone();
        let dim = n * m;
        Self::build(ring.clone(), dim, move |x, t| {
            // x in blocks of length m; t row-major n x n
            let mut out = vec![0u32; n * m];
            for i in 0..n {
                for e in 0..m {
                    let mut acc = field.zero();
                    for j in 0..n {
                        let tji = Felt(t.coords[j * n + i]);
                        acc = field.add(acc, field.mul(Felt(x[j * m + e]), tji));
                    }
                    out[i * m + e] = acc.0;
                }
            }
            out
        })
    }

    fn build(
        ring: Arc<InvolutiveRing>,
        dim: usize,
        act_fn: impl Fn(&[u32], &crate::ring::RingElement) -> Vec<u32>,
    ) -> Result<ModuleM> {
        if !ring.is_enumerated() {
            return Err(Error::NotEnumerated);
        }
        let q = ring.field().size();
        let size = q
            .checked_pow(dim as u32)
            .filter(|&s| s <= DEFAULT_MODULE_BUDGET)
            .ok_or(Error::BudgetExceeded { size: u64::MAX, budget: DEFAULT_MODULE_BUDGET })?;
        let asize = ring.size() as usize;
        let msize = size as usize;

        let coords_of = |id: u32| -> Vec<u32> {
            let mut coords = vec![0u32; dim];
            let mut rest = id as u64;
            for c in coords.iter_mut().rev() {
                *c = (rest % q) as u32;
                rest /= q;
            }
            coords
        };
        let id_of = |coords: &[u32]| -> u32 {
            let mut id = 0u64;
            for &c in coords {
                id = id * q + c as u64;
            }
            id as u32
        };

        let field = ring.field();
        let mut act = vec![0u32; msize * asize];
        let mut add = vec![0u32; msize * msize];
        let mut neg = vec![0u32; msize];
        for x in 0..msize as u32 {
            let xc = coords_of(x);
            for a in 0..asize as u32 {
                let ae = ring.element(ElemId(a));
                act[x as usize * asize + a as usize] = id_of(&act_fn(&xc, &ae));
            }
            for y in 0..msize as u32 {
                let yc = coords_of(y);
                let sum: Vec<u32> = xc
                    .iter()
                    .zip(&yc)
                    .map(|(&u, &v)| field.add(Felt(u), Felt(v)).0)
                    .collect();
                add[x as usize * msize + y as usize] = id_of(&sum);
            }
            let negc: Vec<u32> = xc.iter().map(|&u| field.neg(Felt(u)).0).collect();
            neg[x as usize] = id_of(&negc);
        }
        let module = ModuleM { ring, dim, size, act, add, neg };
        module.verify_axioms()?;
        Ok(module)
    }

    /// Right-module axioms plus compatibility of the k-structure with the
    /// action, checked over the full tables.
    fn verify_axioms(&self) -> Result<()> {
        let ring = &self.ring;
        let one = ring.one_id();
        for x in self.element_ids() {
            if self.act(x, one) != x {
                return Err(Error::DatumAxiom(format!("x.1 != x at x = {}", x.0)));
            }
            for a in ring.element_ids()? {
                // additivity in x: (x+y).a = x.a + y.a
                for y in self.element_ids() {
                    if self.act(self.add(x, y), a) != self.add(self.act(x, a), self.act(y, a)) {
                        return Err(Error::DatumAxiom("(x+y).a != x.a + y.a".into()));
                    }
                }
                for b in ring.element_ids()? {
                    // associativity: (x.a).b = x.(ab)
                    if self.act(self.act(x, a), b) != self.act(x, ring.mul_id(a, b)) {
                        return Err(Error::DatumAxiom("(x.a).b != x.(ab)".into()));
                    }
                    // additivity in a: x.(a+b) = x.a + x.b
                    if self.act(x, ring.add_id(a, b)) != self.add(self.act(x, a), self.act(x, b)) {
                        return Err(Error::DatumAxiom("x.(a+b) != x.a + x.b".into()));
                    }
                }
            }
        }
        Ok(())
    }

    pub fn ring(&self) -> &Arc<InvolutiveRing> {
        &self.ring
    }

    /// Dimension over the base field.
    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn size(&self) -> u64 {
        self.size
    }

    pub fn element_ids(&self) -> impl Iterator<Item = MId> {
        (0..self.size as u32).map(MId)
    }

    pub fn zero(&self) -> MId {
        MId(0)
    }

    pub fn coords(&self, x: MId) -> Vec<u32> {
        let q = self.ring.field().size();
        let mut coords = vec![0u32; self.dim];
        let mut rest = x.0 as u64;
        for c in coords.iter_mut().rev() {
            *c = (rest % q) as u32;
            rest /= q;
        }
        coords
    }

    pub fn id_of_coords(&self, coords: &[u32]) -> MId {
        let q = self.ring.field().size();
        let mut id = 0u64;
        for &c in coords {
            id = id * q + c as u64;
        }
        MId(id as u32)
    }

    pub fn act(&self, x: MId, a: ElemId) -> MId {
        MId(self.act[x.0 as usize * self.ring.size() as usize + a.0 as usize])
    }

    pub fn add(&self, x: MId, y: MId) -> MId {
        MId(self.add[x.0 as usize * self.size as usize + y.0 as usize])
    }

    pub fn neg(&self, x: MId) -> MId {
        MId(self.neg[x.0 as usize])
    }

    pub fn sub(&self, x: MId, y: MId) -> MId {
        self.add(x, self.neg(y))
    }

    /// Scales by a base-field element (coordinatewise).
    pub fn scale(&self, x: MId, lambda: Felt) -> MId {
        let field = self.ring.field();
        let coords: Vec<u32> = self.coords(x).iter().map(|&c| field.mul(Felt(c), lambda).0).collect();
        self.id_of_coords(&coords)
    }

    /// The action matrix R of a ring element: x.a = x R in the row-vector
    /// convention, entries over the base field, row-major dim x dim.
    pub fn action_matrix(&self, a: ElemId) -> Vec<Felt> {
        let mut mat = vec![self.ring.field().zero(); self.dim * self.dim];
        for i in 0..self.dim {
            let mut basis = vec![0u32; self.dim];
            basis[i] = 1;
            let image = self.coords(self.act(self.id_of_coords(&basis), a));
            for (j, &c) in image.iter().enumerate() {
                mat[i * self.dim + j] = Felt(c);
            }
        }
        mat
    }

    pub fn format_element(&self, x: MId) -> String {
        let field = self.ring.field();
        let parts: Vec<String> = self
            .coords(x)
            .iter()
            .map(|&c| field.format_element(Felt(c)))
            .collect();
        format!("({})", parts.join(","))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fq::FqField;

    #[test]
    fn regular_module_over_truncated_poly() {
        let ring = Arc::new(InvolutiveRing::truncated_poly(3, FqField::new(3, 1).unwrap()).unwrap());
        let m = ModuleM::regular(ring.clone()).unwrap();
        assert_eq!(m.size(), 27);
        assert_eq!(m.dim(), 3);
        // action agrees with ring multiplication
        for x in m.element_ids() {
            for a in ring.element_ids().unwrap() {
                let expected = ring.mul_id(ElemId(x.0), a);
                assert_eq!(m.act(x, a).0, expected.0);
            }
        }
    }

    #[test]
    fn hom_space_module_axioms() {
        let ring = Arc::new(InvolutiveRing::matrix(2, FqField::new(3, 1).unwrap()).unwrap());
        let m = ModuleM::hom_space(ring, 1).unwrap();
        assert_eq!(m.size(), 9);
        assert_eq!(m.dim(), 2);
    }

    #[test]
    fn hom_space_requires_matrix_ring() {
        let ring = Arc::new(InvolutiveRing::truncated_poly(3, FqField::new(3, 1).unwrap()).unwrap());
        assert!(ModuleM::hom_space(ring, 1).is_err());
    }

    #[test]
    fn action_matrices_realize_the_action() {
        let ring = Arc::new(InvolutiveRing::matrix(2, FqField::new(3, 1).unwrap()).unwrap());
        let m = ModuleM::hom_space(ring.clone(), 2).unwrap();
        let field = ring.field();
        for a in ring.element_ids().unwrap() {
            let mat = m.action_matrix(a);
            for x in m.element_ids() {
                let xc = m.coords(x);
                let mut image = vec![field.zero(); m.dim()];
                for j in 0..m.dim() {
                    for i in 0..m.dim() {
                        image[j] = field.add(image[j], field.mul(Felt(xc[i]), mat[i * m.dim() + j]));
                    }
                }
                let via_mat = m.id_of_coords(&image.iter().map(|f| f.0).collect::<Vec<_>>());
                assert_eq!(via_mat, m.act(x, a));
            }
        }
    }
}
