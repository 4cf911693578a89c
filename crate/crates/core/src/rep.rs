//! The generalized Weil representation (L^2(M), rho): generator operators
//! on the Dirac basis {e_x}, word-based extension to the whole group, and
//! exact verification of the defining relations, unitarity, and the
//! homomorphism property.
//!
//! Matrix convention: the column index is the input basis element, so
//! rho(w) has entry (y, x) = c chi(-eps x, y) and compositions read as
//! ordinary matrix products. Torus and unipotent operators are kept in
//! compressed monomial form (permutation plus diagonal scale) and expand
//! only when multiplied against a dense factor.

use std::collections::HashMap;
use std::sync::{Arc, OnceLock};

use rand::Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::cyclo::CycloNumber;
use crate::cyclomat::CycloMatrix;
use crate::datum::{AxiomCheck, WeilDatum};
use crate::error::{Error, Result};
use crate::fastop::FastRep;
use crate::group::{GenToken, GroupTable, StarGroup};
use crate::rmodule::MId;

/// Operators beyond this group order are not cached per element; products
/// are recomputed along words instead.
pub const DEFAULT_OPERATOR_CACHE_CAP: usize = 10_000;

/// Groups up to this order get the exhaustive homomorphism table; larger
/// ones are sampled.
pub const HOMOMORPHISM_EXHAUSTIVE_BOUND: usize = 200;

#[derive(Debug, Clone, PartialEq, Eq)]
enum OpForm {
    /// op(e_x) = scale[x] e_{perm[x]}
    Monomial { perm: Vec<u32>, scale: Vec<CycloNumber> },
    Dense(CycloMatrix),
}

/// A |M| x |M| operator over Q(zeta_p), exactly unitary for every group
/// element of a verified datum.
#[derive(Debug, Clone)]
pub struct WeilOperator {
    p: u64,
    dim: usize,
    form: OpForm,
}

impl WeilOperator {
    pub fn identity(p: u64, dim: usize) -> Self {
        WeilOperator {
            p,
            dim,
            form: OpForm::Monomial {
                perm: (0..dim as u32).collect(),
                scale: vec![CycloNumber::one(p); dim],
            },
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// The permutation operator e_x -> e_{perm[x]}.
    pub fn permutation(p: u64, perm: &[u32]) -> Self {
        WeilOperator {
            p,
            dim: perm.len(),
            form: OpForm::Monomial {
                perm: perm.to_vec(),
                scale: vec![CycloNumber::one(p); perm.len()],
            },
        }
    }

    pub fn is_monomial(&self) -> bool {
        matches!(self.form, OpForm::Monomial { .. })
    }

    pub fn to_dense(&self) -> CycloMatrix {
        match &self.form {
            OpForm::Dense(m) => m.clone(),
            OpForm::Monomial { perm, scale } => {
                let mut m = CycloMatrix::zero(self.p, self.dim, self.dim);
                for x in 0..self.dim {
                    m.set(perm[x] as usize, x, scale[x].clone());
                }
                m
            }
        }
    }

    pub fn entry(&self, r: usize, c: usize) -> CycloNumber {
        match &self.form {
            OpForm::Dense(m) => m.get(r, c).clone(),
            OpForm::Monomial { perm, scale } => {
                if perm[c] as usize == r {
                    scale[c].clone()
                } else {
                    CycloNumber::zero(self.p)
                }
            }
        }
    }

    /// Matrix product self * other (other acts first).
    pub fn mul(&self, other: &Self) -> Self {
        debug_assert_eq!(self.dim, other.dim);
        let form = match (&self.form, &other.form) {
            (
                OpForm::Monomial { perm: pa, scale: sa },
                OpForm::Monomial { perm: pb, scale: sb },
            ) => {
                let mut perm = vec![0u32; self.dim];
                let mut scale = Vec::with_capacity(self.dim);
                for x in 0..self.dim {
                    let mid = pb[x] as usize;
                    perm[x] = pa[mid];
                    scale.push(sb[x].mul(&sa[mid]));
                }
                OpForm::Monomial { perm, scale }
            }
            (OpForm::Monomial { perm: pa, scale: sa }, OpForm::Dense(b)) => {
                let mut out = CycloMatrix::zero(self.p, self.dim, self.dim);
                for y in 0..self.dim {
                    let r = pa[y] as usize;
                    for x in 0..self.dim {
                        out.set(r, x, sa[y].mul(b.get(y, x)));
                    }
                }
                OpForm::Dense(out)
            }
            (OpForm::Dense(a), OpForm::Monomial { perm: pb, scale: sb }) => {
                let mut out = CycloMatrix::zero(self.p, self.dim, self.dim);
                for x in 0..self.dim {
                    let col = pb[x] as usize;
                    for r in 0..self.dim {
                        out.set(r, x, a.get(r, col).mul(&sb[x]));
                    }
                }
                OpForm::Dense(out)
            }
            (OpForm::Dense(a), OpForm::Dense(b)) => OpForm::Dense(a.mul(b).expect("square")),
        };
        WeilOperator { p: self.p, dim: self.dim, form }
    }

    /// Conjugate transpose.
    pub fn adjoint(&self) -> Self {
        let form = match &self.form {
            OpForm::Dense(m) => OpForm::Dense(m.adjoint()),
            OpForm::Monomial { perm, scale } => {
                let mut inv_perm = vec![0u32; self.dim];
                let mut new_scale = vec![CycloNumber::zero(self.p); self.dim];
                for x in 0..self.dim {
                    inv_perm[perm[x] as usize] = x as u32;
                    new_scale[perm[x] as usize] = scale[x].conj();
                }
                OpForm::Monomial { perm: inv_perm, scale: new_scale }
            }
        };
        WeilOperator { p: self.p, dim: self.dim, form }
    }

    pub fn trace(&self) -> CycloNumber {
        match &self.form {
            OpForm::Dense(m) => m.trace().expect("square"),
            OpForm::Monomial { perm, scale } => {
                let mut t = CycloNumber::zero(self.p);
                for x in 0..self.dim {
                    if perm[x] as usize == x {
                        t = t.add(&scale[x]);
                    }
                }
                t
            }
        }
    }

    /// Exact unitarity: U adj(U) = I.
    pub fn is_unitary(&self) -> bool {
        match &self.form {
            OpForm::Monomial { scale, .. } => scale.iter().all(|s| s.mul(&s.conj()).is_one()),
            OpForm::Dense(m) => m.mul(&m.adjoint()).expect("square").is_identity(),
        }
    }

    pub fn is_identity(&self) -> bool {
        match &self.form {
            OpForm::Monomial { perm, scale } => {
                perm.iter().enumerate().all(|(i, &p)| p as usize == i) && scale.iter().all(|s| s.is_one())
            }
            OpForm::Dense(m) => m.is_identity(),
        }
    }

    /// First entry where the two operators differ.
    pub fn first_difference(&self, other: &Self) -> Option<(usize, usize, CycloNumber, CycloNumber)> {
        for r in 0..self.dim {
            for c in 0..self.dim {
                let a = self.entry(r, c);
                let b = other.entry(r, c);
                if a != b {
                    return Some((r, c, a, b));
                }
            }
        }
        None
    }

    pub fn op_eq(&self, other: &Self) -> bool {
        match (&self.form, &other.form) {
            (
                OpForm::Monomial { perm: pa, scale: sa },
                OpForm::Monomial { perm: pb, scale: sb },
            ) => pa == pb && sa == sb,
            _ => self.first_difference(other).is_none(),
        }
    }

    pub fn to_complex(&self) -> ndarray::Array2<num::complex::Complex64> {
        self.to_dense().to_complex()
    }
}

impl PartialEq for WeilOperator {
    fn eq(&self, other: &Self) -> bool {
        self.op_eq(other)
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct OperatorRelationReport {
    pub checks: Vec<AxiomCheck>,
}

impl OperatorRelationReport {
    pub fn all_passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed())
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct HomomorphismReport {
    pub mode: String,
    pub pairs_checked: u64,
    pub failed: u64,
    pub witness: Option<String>,
}

impl HomomorphismReport {
    pub fn passed(&self) -> bool {
        self.failed == 0
    }
}

/// One row of the character of rho: a conjugacy class with the exact trace.
#[derive(Debug, Clone, Serialize)]
pub struct CharacterEntry {
    pub class_index: usize,
    pub rep_word: String,
    pub class_size: usize,
    pub value_coeffs: Vec<String>,
    pub value_display: String,
    pub value_re: f64,
    pub value_im: f64,
}

pub struct RhoCharacter {
    pub entries: Vec<CharacterEntry>,
    pub values: Vec<CycloNumber>,
}

/// The representation: generator operators plus the BFS word table, with an
/// optional per-element operator cache (lazy, write-once per slot).
pub struct WeilRepresentation {
    datum: Arc<WeilDatum>,
    group: Arc<StarGroup>,
    table: Arc<GroupTable>,
    gen_ops: Vec<(GenToken, WeilOperator)>,
    gen_index: HashMap<GenToken, usize>,
    cache: Vec<OnceLock<WeilOperator>>,
}

impl WeilRepresentation {
    pub fn new(
        datum: Arc<WeilDatum>,
        group: Arc<StarGroup>,
        table: Arc<GroupTable>,
        cache_cap: usize,
    ) -> Result<WeilRepresentation> {
        if !Arc::ptr_eq(datum.ring(), group.ring()) || datum.eps() != group.eps() {
            return Err(Error::RingMismatch {
                expected: format!("{} (eps = {})", datum.ring().descriptor().summary(), datum.eps()),
                got: format!("{} (eps = {})", group.ring().descriptor().summary(), group.eps()),
            });
        }
        let mut rep = WeilRepresentation {
            datum,
            group: group.clone(),
            table: table.clone(),
            gen_ops: vec![],
            gen_index: HashMap::new(),
            cache: vec![],
        };
        let mut gen_ops = vec![];
        for (tok, _) in group.generators() {
            let op = match *tok {
                GenToken::H(t) => rep.op_h(t)?,
                GenToken::U(s) => rep.op_u(s)?,
                GenToken::W => rep.op_w(),
            };
            gen_ops.push((*tok, op));
        }
        rep.gen_index = gen_ops.iter().enumerate().map(|(i, (t, _))| (*t, i)).collect();
        rep.gen_ops = gen_ops;
        if table.order() <= cache_cap {
            rep.cache = (0..table.order()).map(|_| OnceLock::new()).collect();
        }
        Ok(rep)
    }

    pub fn datum(&self) -> &Arc<WeilDatum> {
        &self.datum
    }

    pub fn group(&self) -> &Arc<StarGroup> {
        &self.group
    }

    pub fn table(&self) -> &Arc<GroupTable> {
        &self.table
    }

    /// Representation dimension |M|.
    pub fn dim(&self) -> usize {
        self.datum.module().size() as usize
    }

    /// Generator operators in token order.
    pub fn generator_ops(&self) -> &[(GenToken, WeilOperator)] {
        &self.gen_ops
    }

    pub fn op_token(&self, tok: GenToken) -> &WeilOperator {
        &self.gen_ops[self.gen_index[&tok]].1
    }

    /// rho(h_t): the monomial operator e_x -> alpha(t) e_{x t^{-1}}.
    pub fn op_h(&self, t: crate::ring::ElemId) -> Result<WeilOperator> {
        let module = self.datum.module();
        let tinv = self.group.ring().inv_id(t)?;
        let alpha = self.datum.alpha(t)?.clone();
        let dim = self.dim();
        let perm: Vec<u32> = (0..dim as u32).map(|x| module.act(MId(x), tinv).0).collect();
        Ok(WeilOperator {
            p: self.datum.cyclotomic_order(),
            dim,
            form: OpForm::Monomial { perm, scale: vec![alpha; dim] },
        })
    }

    /// rho(u_b): the diagonal operator e_x -> gamma(b, x) e_x.
    pub fn op_u(&self, b: crate::ring::ElemId) -> Result<WeilOperator> {
        let dim = self.dim();
        let mut scale = Vec::with_capacity(dim);
        for x in 0..dim as u32 {
            scale.push(self.datum.gamma(b, MId(x))?.clone());
        }
        Ok(WeilOperator {
            p: self.datum.cyclotomic_order(),
            dim,
            form: OpForm::Monomial { perm: (0..dim as u32).collect(), scale },
        })
    }

    /// rho(w): the dense operator with entry (y, x) = c chi(-eps x, y).
    pub fn op_w(&self) -> WeilOperator {
        let module = self.datum.module();
        let neg_eps_one = self.group.ring().signed_one_id(-self.datum.eps());
        let c = self.datum.c();
        let dim = self.dim();
        let m = CycloMatrix::from_fn(self.datum.cyclotomic_order(), dim, dim, |y, x| {
            let negx = module.act(MId(x as u32), neg_eps_one);
            c.mul(self.datum.chi(negx, MId(y as u32)))
        });
        WeilOperator { p: self.datum.cyclotomic_order(), dim, form: OpForm::Dense(m) }
    }

    /// rho(g) for an enumerated element, as the product of generator
    /// operators along its stored word (cached when the cache is enabled).
    pub fn rho(&self, id: u32) -> WeilOperator {
        if self.cache.is_empty() {
            let word = self.table.word_of(id);
            let mut acc = WeilOperator::identity(self.datum.cyclotomic_order(), self.dim());
            for tok in word {
                acc = acc.mul(self.op_token(tok));
            }
            return acc;
        }
        self.cache[id as usize]
            .get_or_init(|| match self.table.parent_of(id) {
                None => WeilOperator::identity(self.datum.cyclotomic_order(), self.dim()),
                Some((parent, tok)) => self.op_token(tok).mul(&self.rho(parent)),
            })
            .clone()
    }

    pub fn rho_of(&self, g: &crate::group::Mat2) -> Result<WeilOperator> {
        Ok(self.rho(self.table.id_of(g)?))
    }

    /// The fast-path twin of this representation, when the datum tables are
    /// integral.
    pub fn fast_rep(&self) -> Result<Option<FastRep>> {
        FastRep::try_new(self.datum.clone(), self.group.clone(), self.table.clone())
    }

    /// The operator forms of the defining relations, checked as exact matrix
    /// identities: (i) torus multiplicativity, (ii) unipotent additivity,
    /// (iii) w^2, (iv) torus-unipotent twist, (v) weyl-torus exchange,
    /// (vi) the braid identity in its four-factor form, plus the direct
    /// three-w form of relation (5). The braid checks quantify over every
    /// invertible eps-symmetric t.
    pub fn verify_operator_relations(&self) -> Result<OperatorRelationReport> {
        let ring = self.group.ring();
        let units = ring.units()?.to_vec();
        let sym = self.datum.sym_elements().to_vec();
        let sym_units: Vec<_> = sym.iter().copied().filter(|&s| ring.is_unit_id(s)).collect();
        let eps = self.datum.eps();
        let eps_id = ring.signed_one_id(eps);
        let neg_eps_one = ring.signed_one_id(-eps);
        let w = self.op_w();
        let mut checks = vec![];

        let fmt = |e: crate::ring::ElemId| ring.format_element(&ring.element(e));
        let diff_witness = |label: String, a: &WeilOperator, b: &WeilOperator| -> String {
            match a.first_difference(b) {
                Some((r, c, x, y)) => format!("{label}; first differing entry ({r},{c}): {x} vs {y}"),
                None => label,
            }
        };

        {
            let mut check = AxiomCheck::new("op_i_torus_multiplicative");
            for &t in &units {
                let ht = self.op_h(t)?;
                for &t2 in &units {
                    let lhs = ht.mul(&self.op_h(t2)?);
                    let rhs = self.op_h(ring.mul_id(t, t2))?;
                    check.record_with(lhs.op_eq(&rhs), || {
                        diff_witness(format!("t = {}, t' = {}", fmt(t), fmt(t2)), &lhs, &rhs)
                    });
                }
            }
            checks.push(check);
        }

        {
            let mut check = AxiomCheck::new("op_ii_unipotent_additive");
            for &b in &sym {
                let ub = self.op_u(b)?;
                for &b2 in &sym {
                    let lhs = ub.mul(&self.op_u(b2)?);
                    let rhs = self.op_u(ring.add_id(b, b2))?;
                    check.record_with(lhs.op_eq(&rhs), || {
                        diff_witness(format!("b = {}, b' = {}", fmt(b), fmt(b2)), &lhs, &rhs)
                    });
                }
            }
            checks.push(check);
        }

        {
            let mut check = AxiomCheck::new("op_iii_weyl_square");
            let lhs = w.mul(&w);
            let rhs = self.op_h(eps_id)?;
            check.record_with(lhs.op_eq(&rhs), || diff_witness("w^2 vs h_eps".into(), &lhs, &rhs));
            checks.push(check);
        }

        {
            let mut check = AxiomCheck::new("op_iv_torus_unipotent");
            for &t in &units {
                let ht = self.op_h(t)?;
                for &b in &sym {
                    let lhs = ht.mul(&self.op_u(b)?);
                    let tbt = ring.mul_id(ring.mul_id(t, b), ring.star_id(t));
                    let rhs = self.op_u(tbt)?.mul(&ht);
                    check.record_with(lhs.op_eq(&rhs), || {
                        diff_witness(format!("t = {}, b = {}", fmt(t), fmt(b)), &lhs, &rhs)
                    });
                }
            }
            checks.push(check);
        }

        {
            let mut check = AxiomCheck::new("op_v_weyl_torus");
            for &t in &units {
                let lhs = w.mul(&self.op_h(t)?);
                let rhs = self.op_h(ring.inv_id(ring.star_id(t))?)?.mul(&w);
                check.record_with(lhs.op_eq(&rhs), || diff_witness(format!("t = {}", fmt(t)), &lhs, &rhs));
            }
            checks.push(check);
        }

        {
            let mut check = AxiomCheck::new("op_vi_braid");
            check.vacuous = sym_units.is_empty();
            for &t in &sym_units {
                let tinv = ring.inv_id(t)?;
                let neg_eps_t = ring.mul_id(neg_eps_one, t);
                let lhs = w
                    .mul(&self.op_u(tinv)?)
                    .mul(&w)
                    .mul(&self.op_u(neg_eps_t)?);
                let rhs = self
                    .op_h(neg_eps_t)?
                    .mul(&self.op_u(ring.neg_id(tinv))?)
                    .mul(&w)
                    .mul(&self.op_h(eps_id)?);
                check.record_with(lhs.op_eq(&rhs), || diff_witness(format!("t = {}", fmt(t)), &lhs, &rhs));
            }
            checks.push(check);
        }

        {
            let mut check = AxiomCheck::new("op_r5_direct");
            check.vacuous = sym_units.is_empty();
            for &t in &sym_units {
                let tinv = ring.inv_id(t)?;
                let neg_eps_t = ring.mul_id(neg_eps_one, t);
                let u1 = self.op_u(tinv)?;
                let lhs = w
                    .mul(&u1)
                    .mul(&w)
                    .mul(&self.op_u(neg_eps_t)?)
                    .mul(&w)
                    .mul(&u1);
                let rhs = self.op_h(neg_eps_t)?;
                check.record_with(lhs.op_eq(&rhs), || diff_witness(format!("t = {}", fmt(t)), &lhs, &rhs));
            }
            checks.push(check);
        }

        Ok(OperatorRelationReport { checks })
    }

    /// Exact unitarity of the generator operators.
    pub fn verify_unitary_generators(&self) -> AxiomCheck {
        let mut check = AxiomCheck::new("unitarity_generators");
        for (tok, op) in &self.gen_ops {
            check.record_with(op.is_unitary(), || tok.format(self.group.ring()));
        }
        check
    }

    /// Exact unitarity of rho(g) over every enumerated element (use at
    /// small group orders) or a seeded sample.
    pub fn verify_unitary_elements(&self, sample: Option<(usize, &mut dyn FnMut() -> u32)>) -> AxiomCheck {
        let mut check = AxiomCheck::new("unitarity_elements");
        match sample {
            None => {
                for id in 0..self.table.order() as u32 {
                    check.record_with(self.rho(id).is_unitary(), || format!("element id {id}"));
                }
            }
            Some((n, next_id)) => {
                for _ in 0..n {
                    let id = next_id();
                    check.record_with(self.rho(id).is_unitary(), || format!("element id {id}"));
                }
            }
        }
        check
    }

    /// The homomorphism property rho(g) rho(h) = rho(gh): the executable
    /// shadow of word-consistency, since both sides evaluate different words
    /// for the same element. Exhaustive when |G| <= exhaustive_bound, else
    /// `sample_size` seeded pairs. Uses the integer fast path when the datum
    /// tables are integral; the exact path otherwise.
    pub fn homomorphism_check(
        &self,
        exhaustive_bound: usize,
        sample_size: usize,
        rng: &mut impl Rng,
    ) -> Result<HomomorphismReport> {
        let order = self.table.order();
        let exhaustive = order <= exhaustive_bound;
        let pairs: Vec<(u32, u32)> = if exhaustive {
            (0..order as u32)
                .flat_map(|g| (0..order as u32).map(move |h| (g, h)))
                .collect()
        } else {
            (0..sample_size)
                .map(|_| (rng.gen_range(0..order) as u32, rng.gen_range(0..order) as u32))
                .collect()
        };

        let fast = self.fast_rep()?;
        let failures: Vec<(usize, u32, u32)> = match &fast {
            Some(fast) => {
                let msize = fast.msize();
                pairs
                    .par_iter()
                    .enumerate()
                    .filter_map(|(i, &(g, h))| {
                        let gh = self
                            .table
                            .id_of(&self.group.mul(&self.table.element(g), &self.table.element(h)))
                            .expect("closed");
                        let lhs = fast.rho(g).mul(&fast.rho(h));
                        if lhs.op_eq(&fast.rho(gh), msize) {
                            None
                        } else {
                            Some((i, g, h))
                        }
                    })
                    .collect()
            }
            None => pairs
                .par_iter()
                .enumerate()
                .filter_map(|(i, &(g, h))| {
                    let gh = self
                        .table
                        .id_of(&self.group.mul(&self.table.element(g), &self.table.element(h)))
                        .expect("closed");
                    let lhs = self.rho(g).mul(&self.rho(h));
                    if lhs.op_eq(&self.rho(gh)) {
                        None
                    } else {
                        Some((i, g, h))
                    }
                })
                .collect(),
        };

        let witness = failures
            .iter()
            .min_by_key(|(i, _, _)| *i)
            .map(|(_, g, h)| format!("rho(g)rho(h) != rho(gh) at ids g = {g}, h = {h}"));
        Ok(HomomorphismReport {
            mode: if exhaustive { "exhaustive".into() } else { format!("sampled:{sample_size}") },
            pairs_checked: pairs.len() as u64,
            failed: failures.len() as u64,
            witness,
        })
    }

    /// The character of rho: the exact trace at one representative per
    /// conjugacy class. chi_rho(1) = |M|.
    pub fn character(&self) -> RhoCharacter {
        let classes = self.table.conjugacy_classes(&self.group);
        let mut entries = vec![];
        let mut values = vec![];
        for (i, class) in classes.iter().enumerate() {
            let rep = class[0];
            let value = self.rho(rep).trace();
            let z = value.to_complex();
            let word = self.table.word_of(rep);
            let word_str = if word.is_empty() {
                "1".to_string()
            } else {
                word.iter()
                    .map(|t| t.format(self.group.ring()))
                    .collect::<Vec<_>>()
                    .join("*")
            };
            entries.push(CharacterEntry {
                class_index: i,
                rep_word: word_str,
                class_size: class.len(),
                value_coeffs: value.coeff_strings(),
                value_display: value.to_string(),
                value_re: z.re,
                value_im: z.im,
            });
            values.push(value);
        }
        RhoCharacter { entries, values }
    }

    /// Class-function spot check: the trace agrees across up to
    /// `samples_per_class` random members of each class.
    pub fn verify_class_function(&self, samples_per_class: usize, rng: &mut impl Rng) -> AxiomCheck {
        let classes = self.table.conjugacy_classes(&self.group);
        let mut check = AxiomCheck::new("character_is_class_function");
        for class in classes {
            let base = self.rho(class[0]).trace();
            for _ in 0..samples_per_class.min(class.len()) {
                let pick = class[rng.gen_range(0..class.len())];
                check.record_with(self.rho(pick).trace() == base, || format!("class of id {}", class[0]));
            }
        }
        check
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::datum::WeilDatum;
    use crate::fq::FqField;
    use crate::group::enumerate;
    use crate::ring::InvolutiveRing;
    use rand::SeedableRng;

    fn build(
        ring: InvolutiveRing,
        mk: impl FnOnce(Arc<InvolutiveRing>) -> WeilDatum,
    ) -> WeilRepresentation {
        let ring = Arc::new(ring);
        let datum = Arc::new(mk(ring.clone()));
        let group = Arc::new(StarGroup::new(ring, -1).unwrap());
        let table = Arc::new(enumerate(&group, 1_000_000).unwrap());
        WeilRepresentation::new(datum, group, table, DEFAULT_OPERATOR_CACHE_CAP).unwrap()
    }

    fn rep_1_1_5() -> WeilRepresentation {
        build(
            InvolutiveRing::matrix(1, FqField::new(5, 1).unwrap()).unwrap(),
            |r| WeilDatum::matrix_ring(r, 1, None, None).unwrap(),
        )
    }

    fn rep_trunc_3_3() -> WeilRepresentation {
        build(
            InvolutiveRing::truncated_poly(3, FqField::new(3, 1).unwrap()).unwrap(),
            |r| WeilDatum::truncated_poly(r, None).unwrap(),
        )
    }

    fn rep_trunc_1_3() -> WeilRepresentation {
        build(
            InvolutiveRing::truncated_poly(1, FqField::new(3, 1).unwrap()).unwrap(),
            |r| WeilDatum::truncated_poly(r, None).unwrap(),
        )
    }

    #[test]
    fn op_h_is_scaled_permutation() {
        let rep = rep_1_1_5();
        let ring = rep.group().ring().clone();
        // t = 1: identity
        assert!(rep.op_h(ring.one_id()).unwrap().is_identity());
        // t = 2 over F_5: x -> 3x scaled by alpha(2) = -1 (2 is a non-square)
        let op = rep.op_h(crate::ring::ElemId(2)).unwrap();
        let minus_one = CycloNumber::from_int(5, -1);
        for x in 0u32..5 {
            let target = (3 * x) % 5;
            assert_eq!(op.entry(target as usize, x as usize), minus_one);
        }
    }

    #[test]
    fn op_u_zero_is_identity_and_products_add() {
        let rep = rep_trunc_3_3();
        let ring = rep.group().ring().clone();
        assert!(rep.op_u(ring.zero_id()).unwrap().is_identity());
        for &b in rep.datum().sym_elements() {
            for &b2 in rep.datum().sym_elements() {
                let lhs = rep.op_u(b).unwrap().mul(&rep.op_u(b2).unwrap());
                let rhs = rep.op_u(ring.add_id(b, b2)).unwrap();
                assert!(lhs.op_eq(&rhs));
            }
        }
    }

    #[test]
    fn op_w_square_and_entries() {
        let rep = rep_1_1_5();
        let ring = rep.group().ring().clone();
        let w = rep.op_w();
        let h_eps = rep.op_h(ring.signed_one_id(-1)).unwrap();
        assert!(w.mul(&w).op_eq(&h_eps));
        // entry (y, x) = c psi(2xy)
        let f = ring.field();
        let c = rep.datum().c().clone();
        for x in 0u32..5 {
            for y in 0u32..5 {
                let e = f.mul(f.from_int(2), f.mul(crate::fq::Felt(x), crate::fq::Felt(y)));
                assert_eq!(w.entry(y as usize, x as usize), c.mul(&f.psi(e)));
            }
        }
        // w^4 = h_eps^2
        let w4 = w.mul(&w).mul(&w).mul(&w);
        assert!(w4.op_eq(&h_eps.mul(&h_eps)));
    }

    #[test]
    fn rho_extends_along_words() {
        let rep = rep_1_1_5();
        assert!(rep.rho(0).is_identity());
        // one-letter extension: rho(w * u_1) = op_w * op_u(1)
        let g = rep.group();
        let w_u = g.mul(&g.gen_w(), &g.gen_u(crate::ring::ElemId(1)).unwrap());
        let id = rep.table().id_of(&w_u).unwrap();
        let expected = rep.op_w().mul(&rep.op_u(crate::ring::ElemId(1)).unwrap());
        assert!(rep.rho(id).op_eq(&expected));
    }

    #[test]
    fn operator_relations_pass() {
        for rep in [rep_1_1_5(), rep_trunc_3_3(), rep_trunc_1_3()] {
            let report = rep.verify_operator_relations().unwrap();
            assert!(report.all_passed(), "{report:?}");
        }
    }

    #[test]
    fn perturbed_c_breaks_odd_degree_relations() {
        // flipping the sign of c leaves the c^2-homogeneous relations (iii)
        // intact but breaks the braid identity, whose two sides differ by an
        // odd power of c
        let ring = Arc::new(InvolutiveRing::truncated_poly(3, FqField::new(3, 1).unwrap()).unwrap());
        let datum = WeilDatum::truncated_poly(ring.clone(), None).unwrap();
        let broken = Arc::new(datum.with_c(WeilDatum::truncated_poly(ring.clone(), None).unwrap().c().neg()));
        let group = Arc::new(StarGroup::new(ring, -1).unwrap());
        let table = Arc::new(enumerate(&group, 1_000_000).unwrap());
        let rep = WeilRepresentation::new(broken, group, table, DEFAULT_OPERATOR_CACHE_CAP).unwrap();
        let report = rep.verify_operator_relations().unwrap();
        let by_name = |n: &str| report.checks.iter().find(|c| c.name == n).unwrap();
        assert!(by_name("op_iii_weyl_square").passed());
        assert!(!by_name("op_vi_braid").passed());
        assert!(!by_name("op_r5_direct").passed());
        assert!(by_name("op_vi_braid").witness.is_some());
    }

    #[test]
    fn unitarity_exact() {
        for rep in [rep_1_1_5(), rep_trunc_3_3()] {
            assert!(rep.verify_unitary_generators().passed());
        }
        // all 120 operators of SL(2,5)
        let rep = rep_1_1_5();
        let check = rep.verify_unitary_elements(None);
        assert!(check.passed());
        assert_eq!(check.checked, 120);
    }

    #[test]
    fn homomorphism_exhaustive_small() {
        let rep = rep_trunc_1_3();
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(7);
        let report = rep.homomorphism_check(200, 0, &mut rng).unwrap();
        assert_eq!(report.mode, "exhaustive");
        assert_eq!(report.pairs_checked, 24 * 24);
        assert!(report.passed());
    }

    #[test]
    fn fast_path_matches_exact_path() {
        let rep = rep_trunc_1_3();
        let fast = rep.fast_rep().unwrap().expect("built-in data are integral");
        for id in 0..rep.table().order() as u32 {
            let exact = rep.rho(id).to_dense();
            let via_fast = fast.rho(id).to_cyclo_matrix(fast.msize());
            assert_eq!(exact, via_fast, "id {id}");
        }
    }

    #[test]
    fn character_values() {
        let rep = rep_1_1_5();
        let ch = rep.character();
        // value at the identity class = |M|
        assert_eq!(ch.values[0], CycloNumber::from_int(5, 5));
        // value at the class of w: trace(op_w) = c S(2)
        let g = rep.group();
        let w_id = rep.table().id_of(&g.gen_w()).unwrap();
        let classes = rep.table().conjugacy_classes(g);
        let w_class = classes.iter().position(|c| c.contains(&w_id)).unwrap();
        let s2 = rep.datum().gauss_sum(crate::ring::ElemId(2)).unwrap();
        let expected = rep.datum().c().mul(&s2);
        assert_eq!(ch.values[w_class], expected);

        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(11);
        assert!(rep.verify_class_function(10, &mut rng).passed());
    }
}
