//! Generalized classical groups `SL*^e(2,A)` over finite involutive rings,
//! Weil representations built from verified data `(M, chi, gamma, alpha, c)`,
//! and their first decomposition under the intertwiner group `U(gamma, chi)`.
//!
//! Everything on the verification path is exact: character values live in
//! the cyclotomic field Q(zeta_p) with arbitrary-precision rational
//! coefficients, and every identity is checked as a strict equality.
//! Floating point appears only in the decomposition eigensolver and in
//! report rendering.

// index loops over flat matrix storage are the house style here
#![allow(clippy::needless_range_loop)]

pub mod chartab;
pub mod cyclo;
pub mod cyclomat;
pub mod datum;
pub mod decomp;
pub mod error;
pub mod fastop;
pub mod fq;
pub mod group;
pub mod rep;
pub mod ring;
pub mod rmodule;

pub use chartab::{CharacterTable, SmallGroup};
pub use cyclo::CycloNumber;
pub use cyclomat::CycloMatrix;
pub use datum::{AxiomCheck, DatumReport, Provenance, QuadraticStructure, WeilDatum};
pub use decomp::{DecompositionReport, IntertwinerGroup, IntertwinerScan};
pub use error::{Error, Result};
pub use fq::{Felt, FqField};
pub use group::{GenToken, GroupTable, Mat2, PresentationReport, StarGroup};
pub use rep::{WeilOperator, WeilRepresentation};
pub use ring::{ElemId, InvolutiveRing, RingDescriptor, RingElement};
pub use rmodule::{MId, ModuleM};
