//! Integer-cyclotomic fast path for large-scale operator checks.
//!
//! Every Weil operator built from a datum whose chi/gamma/alpha tables and
//! c|M| have integer cyclotomic coefficients can be written as
//! rho = |M|^{-d} N with N over Z[zeta_p]; products and equality tests then
//! stay in 64-bit integer arithmetic (128-bit accumulators) with the
//! |M|-power bookkeeping handled by cross-multiplication. The verdicts are
//! exactly those of the big-rational path, which stays the reference
//! implementation; the two are compared in tests.

use std::collections::HashMap;
use std::sync::{Arc, OnceLock};

use num::{BigInt, BigRational, ToPrimitive};

use crate::cyclo::CycloNumber;
use crate::datum::WeilDatum;
use crate::error::Result;
use crate::group::{GenToken, GroupTable, StarGroup};
use crate::rmodule::MId;

/// Element of Z[zeta_p] in the canonical power basis, i64 coefficients.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IntCyclo {
    p: u64,
    coeffs: Vec<i64>,
}

impl IntCyclo {
    pub fn zero(p: u64) -> Self {
        IntCyclo { p, coeffs: vec![0; (p - 1) as usize] }
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(|&c| c == 0)
    }

    /// Converts when all coefficients are integers fitting i64.
    pub fn from_cyclo(x: &CycloNumber) -> Option<Self> {
        let p = x.order();
        let mut coeffs = Vec::with_capacity((p - 1) as usize);
        for c in x.coeffs() {
            if !c.is_integer() {
                return None;
            }
            coeffs.push(c.numer().to_i64()?);
        }
        Some(IntCyclo { p, coeffs })
    }

    pub fn to_cyclo(&self) -> CycloNumber {
        let mut out = CycloNumber::zero(self.p);
        for (i, &c) in self.coeffs.iter().enumerate() {
            if c != 0 {
                out = out.add(
                    &CycloNumber::root_of_unity(self.p, i as i64)
                        .scale(&BigRational::from_integer(BigInt::from(c))),
                );
            }
        }
        out
    }

    fn from_accumulator(p: u64, acc: &[i128]) -> Self {
        let top = acc[(p - 1) as usize];
        let coeffs = acc[..(p - 1) as usize]
            .iter()
            .map(|&c| {
                i64::try_from(c - top).expect("integer-cyclotomic coefficient overflow; use the exact path")
            })
            .collect();
        IntCyclo { p, coeffs }
    }

    pub fn add(&self, other: &Self) -> Self {
        IntCyclo {
            p: self.p,
            coeffs: self
                .coeffs
                .iter()
                .zip(&other.coeffs)
                .map(|(a, b)| a.checked_add(*b).expect("overflow"))
                .collect(),
        }
    }

    pub fn mul(&self, other: &Self) -> Self {
        let p = self.p as usize;
        let mut acc = vec![0i128; p];
        for (i, &a) in self.coeffs.iter().enumerate() {
            if a == 0 {
                continue;
            }
            for (j, &b) in other.coeffs.iter().enumerate() {
                if b == 0 {
                    continue;
                }
                acc[(i + j) % p] += a as i128 * b as i128;
            }
        }
        Self::from_accumulator(self.p, &acc)
    }

    pub fn conj(&self) -> Self {
        let p = self.p as usize;
        let mut acc = vec![0i128; p];
        for (i, &c) in self.coeffs.iter().enumerate() {
            acc[(p - i) % p] += c as i128;
        }
        Self::from_accumulator(self.p, &acc)
    }

    fn scaled_eq(&self, other: &Self, self_scale: i128, other_scale: i128) -> bool {
        self.coeffs
            .iter()
            .zip(&other.coeffs)
            .all(|(&a, &b)| a as i128 * self_scale == b as i128 * other_scale)
    }
}

#[derive(Debug, Clone)]
enum FastForm {
    /// op(e_x) = scale[x] e_{perm[x]}
    Monomial { perm: Vec<u32>, scale: Vec<IntCyclo> },
    /// row-major |M| x |M|
    Dense(Vec<IntCyclo>),
}

/// An operator stored as |M|^{-denom_pow} times an integer matrix.
#[derive(Debug, Clone)]
pub struct FastOp {
    p: u64,
    dim: usize,
    denom_pow: u32,
    form: FastForm,
}

impl FastOp {
    pub fn identity(p: u64, dim: usize) -> Self {
        let one = {
            let mut c = IntCyclo::zero(p);
            c.coeffs[0] = 1;
            c
        };
        FastOp {
            p,
            dim,
            denom_pow: 0,
            form: FastForm::Monomial {
                perm: (0..dim as u32).collect(),
                scale: vec![one; dim],
            },
        }
    }

    fn dense_entries(&self) -> Vec<IntCyclo> {
        match &self.form {
            FastForm::Dense(d) => d.clone(),
            FastForm::Monomial { perm, scale } => {
                let mut out = vec![IntCyclo::zero(self.p); self.dim * self.dim];
                for x in 0..self.dim {
                    out[perm[x] as usize * self.dim + x] = scale[x].clone();
                }
                out
            }
        }
    }

    /// Matrix product self * other.
    pub fn mul(&self, other: &Self) -> Self {
        let dim = self.dim;
        let p = self.p;
        let denom_pow = self.denom_pow + other.denom_pow;
        let form = match (&self.form, &other.form) {
            (
                FastForm::Monomial { perm: pa, scale: sa },
                FastForm::Monomial { perm: pb, scale: sb },
            ) => {
                let mut perm = vec![0u32; dim];
                let mut scale = Vec::with_capacity(dim);
                for x in 0..dim {
                    let mid = pb[x] as usize;
                    perm[x] = pa[mid];
                    scale.push(sb[x].mul(&sa[mid]));
                }
                FastForm::Monomial { perm, scale }
            }
            (FastForm::Monomial { perm: pa, scale: sa }, FastForm::Dense(b)) => {
                let mut out = vec![IntCyclo::zero(p); dim * dim];
                for y in 0..dim {
                    let r = pa[y] as usize;
                    for x in 0..dim {
                        out[r * dim + x] = sa[y].mul(&b[y * dim + x]);
                    }
                }
                FastForm::Dense(out)
            }
            (FastForm::Dense(a), FastForm::Monomial { perm: pb, scale: sb }) => {
                let mut out = vec![IntCyclo::zero(p); dim * dim];
                for x in 0..dim {
                    let col = pb[x] as usize;
                    for r in 0..dim {
                        out[r * dim + x] = a[r * dim + col].mul(&sb[x]);
                    }
                }
                FastForm::Dense(out)
            }
            (FastForm::Dense(a), FastForm::Dense(b)) => {
                let plen = (p - 1) as usize;
                let mut out = vec![IntCyclo::zero(p); dim * dim];
                let mut acc = vec![0i128; p as usize];
                for r in 0..dim {
                    for x in 0..dim {
                        acc.iter_mut().for_each(|v| *v = 0);
                        for k in 0..dim {
                            let u = &a[r * dim + k];
                            let v = &b[k * dim + x];
                            for i in 0..plen {
                                let uc = u.coeffs[i];
                                if uc == 0 {
                                    continue;
                                }
                                for j in 0..plen {
                                    let vc = v.coeffs[j];
                                    if vc == 0 {
                                        continue;
                                    }
                                    acc[(i + j) % p as usize] += uc as i128 * vc as i128;
                                }
                            }
                        }
                        out[r * dim + x] = IntCyclo::from_accumulator(p, &acc);
                    }
                }
                FastForm::Dense(out)
            }
        };
        FastOp { p, dim, denom_pow, form }
    }

    /// Exact operator equality with |M|-power cross-multiplication.
    pub fn op_eq(&self, other: &Self, msize: u64) -> bool {
        let (lo, hi, swapped) = if self.denom_pow <= other.denom_pow {
            (self, other, false)
        } else {
            (other, self, true)
        };
        let scale = (msize as i128).pow(hi.denom_pow - lo.denom_pow);
        let (lo_scale, hi_scale) = (scale, 1i128);
        let a = lo.dense_entries();
        let b = hi.dense_entries();
        let _ = swapped;
        a.iter().zip(&b).all(|(x, y)| x.scaled_eq(y, lo_scale, hi_scale))
    }

    /// U U+ = I, i.e. N N+ = |M|^{2d} I over the integers.
    pub fn is_unitary(&self, msize: u64) -> bool {
        let n = self.dense_entries();
        let dim = self.dim;
        let target = (msize as i128).pow(2 * self.denom_pow);
        for r in 0..dim {
            for c in 0..dim {
                let mut acc = IntCyclo::zero(self.p);
                for k in 0..dim {
                    acc = acc.add(&n[r * dim + k].mul(&n[c * dim + k].conj()));
                }
                let expected = if r == c { target } else { 0 };
                let ok = acc.coeffs[0] as i128 == expected && acc.coeffs[1..].iter().all(|&v| v == 0);
                if !ok {
                    return false;
                }
            }
        }
        true
    }

    /// The exact cyclotomic matrix |M|^{-d} N, for cross-validation.
    pub fn to_cyclo_matrix(&self, msize: u64) -> crate::cyclomat::CycloMatrix {
        let scale = BigRational::new(BigInt::from(1), BigInt::from(msize).pow(self.denom_pow));
        let entries = self.dense_entries();
        crate::cyclomat::CycloMatrix::from_fn(self.p, self.dim, self.dim, |r, c| {
            entries[r * self.dim + c].to_cyclo().scale(&scale)
        })
    }
}

/// The fast-path representation: generator operators over Z[zeta_p] plus the
/// word table. Available whenever the datum's tables are integral, which
/// covers both built-in families.
pub struct FastRep {
    datum: Arc<WeilDatum>,
    group: Arc<StarGroup>,
    table: Arc<GroupTable>,
    gen_ops: HashMap<GenToken, FastOp>,
    msize: u64,
    /// per-element cache (populated lazily along parent chains); empty when
    /// the group is larger than the cache cap
    cache: Vec<OnceLock<FastOp>>,
}

impl FastRep {
    /// Returns None when some table value is not an integer cyclotomic
    /// (possible for custom data), in which case callers fall back to the
    /// exact big-rational path.
    pub fn try_new(
        datum: Arc<WeilDatum>,
        group: Arc<StarGroup>,
        table: Arc<GroupTable>,
    ) -> Result<Option<FastRep>> {
        let ring = datum.ring();
        let module = datum.module();
        let p = datum.cyclotomic_order();
        let dim = module.size() as usize;
        let msize = module.size();
        let neg_eps_one = ring.signed_one_id(-datum.eps());

        let c_num = match IntCyclo::from_cyclo(
            &datum
                .c()
                .scale(&BigRational::from_integer(BigInt::from(msize as i64))),
        ) {
            Some(v) => v,
            None => return Ok(None),
        };

        let mut gen_ops = HashMap::new();
        for &t in ring.units()? {
            let alpha = match IntCyclo::from_cyclo(datum.alpha(t)?) {
                Some(v) => v,
                None => return Ok(None),
            };
            let tinv = ring.inv_id(t)?;
            let perm: Vec<u32> = (0..dim as u32).map(|x| module.act(MId(x), tinv).0).collect();
            gen_ops.insert(
                GenToken::H(t),
                FastOp {
                    p,
                    dim,
                    denom_pow: 0,
                    form: FastForm::Monomial { perm, scale: vec![alpha; dim] },
                },
            );
        }
        for &b in datum.sym_elements() {
            let mut scale = Vec::with_capacity(dim);
            for x in 0..dim as u32 {
                match IntCyclo::from_cyclo(datum.gamma(b, MId(x))?) {
                    Some(v) => scale.push(v),
                    None => return Ok(None),
                }
            }
            gen_ops.insert(
                GenToken::U(b),
                FastOp {
                    p,
                    dim,
                    denom_pow: 0,
                    form: FastForm::Monomial { perm: (0..dim as u32).collect(), scale },
                },
            );
        }
        // w: entry (y, x) = c chi(-eps x, y); stored as c|M| chi with d = 1
        let mut w = vec![IntCyclo::zero(p); dim * dim];
        for x in 0..dim as u32 {
            let negx = module.act(MId(x), neg_eps_one);
            for y in 0..dim as u32 {
                let chi = match IntCyclo::from_cyclo(datum.chi(negx, MId(y))) {
                    Some(v) => v,
                    None => return Ok(None),
                };
                w[y as usize * dim + x as usize] = c_num.mul(&chi);
            }
        }
        gen_ops.insert(GenToken::W, FastOp { p, dim, denom_pow: 1, form: FastForm::Dense(w) });

        let cache = if table.order() <= crate::rep::DEFAULT_OPERATOR_CACHE_CAP {
            (0..table.order()).map(|_| OnceLock::new()).collect()
        } else {
            vec![]
        };
        Ok(Some(FastRep { datum, group, table, gen_ops, msize, cache }))
    }

    pub fn msize(&self) -> u64 {
        self.msize
    }

    pub fn datum(&self) -> &Arc<WeilDatum> {
        &self.datum
    }

    pub fn gen_op(&self, tok: GenToken) -> &FastOp {
        &self.gen_ops[&tok]
    }

    /// rho(g) along the stored word, monomial-composed until the first
    /// dense factor; cached per element (one generator product each) when
    /// the group fits the cache cap.
    pub fn rho(&self, id: u32) -> FastOp {
        if self.cache.is_empty() {
            let word = self.table.word_of(id);
            let mut acc = FastOp::identity(self.datum.cyclotomic_order(), self.msize as usize);
            for tok in word {
                acc = acc.mul(&self.gen_ops[&tok]);
            }
            return acc;
        }
        self.cache[id as usize]
            .get_or_init(|| match self.table.parent_of(id) {
                None => FastOp::identity(self.datum.cyclotomic_order(), self.msize as usize),
                Some((parent, tok)) => self.gen_ops[&tok].mul(&self.rho(parent)),
            })
            .clone()
    }

    pub fn group(&self) -> &Arc<StarGroup> {
        &self.group
    }

    pub fn table(&self) -> &Arc<GroupTable> {
        &self.table
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn int_cyclo_matches_exact_arithmetic() {
        let p = 5u64;
        let a = CycloNumber::root_of_unity(p, 1)
            .scale(&BigRational::from_integer(BigInt::from(3)))
            .add(&CycloNumber::from_int(p, -2));
        let b = CycloNumber::root_of_unity(p, 3).add(&CycloNumber::root_of_unity(p, 4));
        let fa = IntCyclo::from_cyclo(&a).unwrap();
        let fb = IntCyclo::from_cyclo(&b).unwrap();
        assert_eq!(fa.mul(&fb).to_cyclo(), a.mul(&b));
        assert_eq!(fa.add(&fb).to_cyclo(), a.add(&b));
        assert_eq!(fa.conj().to_cyclo(), a.conj());
        // non-integral values are refused
        let half = CycloNumber::from_rational(p, BigRational::new(BigInt::from(1), BigInt::from(2)));
        assert!(IntCyclo::from_cyclo(&half).is_none());
    }
}
