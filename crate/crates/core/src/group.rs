//! The groups SL*^eps(2,A): membership, Bruhat generators, Cayley-BFS
//! enumeration with shortest-word tracking, relation verification, and
//! conjugacy classes.
//!
//! Elements are 2x2 matrices over the ring satisfying the five membership
//! conditions; equivalently, T J_eps T* = J_eps for J_eps = (0,1;eps,0).

use std::collections::HashMap;
use std::sync::Arc;
use std::sync::OnceLock;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::ring::{ElemId, InvolutiveRing};

/// A 2x2 matrix (a,b;c,d) over the ring, by element ids.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Mat2 {
    pub a: ElemId,
    pub b: ElemId,
    pub c: ElemId,
    pub d: ElemId,
}

/// Generator tokens, ordered H < U < W with coordinate order inside a kind.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum GenToken {
    H(ElemId),
    U(ElemId),
    W,
}

impl GenToken {
    pub fn format(&self, ring: &InvolutiveRing) -> String {
        match self {
            GenToken::H(t) => format!("H({})", ring.format_element(&ring.element(*t))),
            GenToken::U(s) => format!("U({})", ring.format_element(&ring.element(*s))),
            GenToken::W => "W".to_string(),
        }
    }
}

/// The group SL*^eps(2,A) together with its Bruhat generator set
/// {h_t : t unit} + {u_s : s eps-symmetric} + {w}.
pub struct StarGroup {
    ring: Arc<InvolutiveRing>,
    eps: i8,
    eps_id: ElemId,
    generators: Vec<(GenToken, Mat2)>,
}

impl StarGroup {
    pub fn new(ring: Arc<InvolutiveRing>, eps: i8) -> Result<Self> {
        assert!(eps == 1 || eps == -1, "eps must be +1 or -1");
        if !ring.is_enumerated() {
            return Err(Error::NotEnumerated);
        }
        let eps_id = ring.signed_one_id(eps);
        let mut group = StarGroup {
            ring,
            eps,
            eps_id,
            generators: vec![],
        };
        let mut gens = vec![];
        for &t in group.ring.units()? {
            gens.push((GenToken::H(t), group.gen_h(t)?));
        }
        for s in group.ring.eps_symmetric_elements(eps)? {
            gens.push((GenToken::U(s), group.gen_u(s)?));
        }
        gens.push((GenToken::W, group.gen_w()));
        gens.sort_by_key(|(tok, _)| *tok);
        group.generators = gens;
        Ok(group)
    }

    pub fn ring(&self) -> &Arc<InvolutiveRing> {
        &self.ring
    }

    pub fn eps(&self) -> i8 {
        self.eps
    }

    pub fn generators(&self) -> &[(GenToken, Mat2)] {
        &self.generators
    }

    pub fn identity(&self) -> Mat2 {
        let one = self.ring.one_id();
        let zero = self.ring.zero_id();
        Mat2 { a: one, b: zero, c: zero, d: one }
    }

    /// Multiplies by -eps (the identity map when eps = -1).
    fn neg_eps(&self, x: ElemId) -> ElemId {
        if self.eps < 0 {
            x
        } else {
            self.ring.neg_id(x)
        }
    }

    /// The five defining conditions, checked literally.
    pub fn is_member_def(&self, g: &Mat2) -> bool {
        let r = &self.ring;
        let st = |x| r.star_id(x);
        let mul = |x, y| r.mul_id(x, y);
        let (a, b, c, d) = (g.a, g.b, g.c, g.d);
        // a b* = -eps b a*
        if mul(a, st(b)) != self.neg_eps(mul(b, st(a))) {
            return false;
        }
        // c d* = -eps d c*
        if mul(c, st(d)) != self.neg_eps(mul(d, st(c))) {
            return false;
        }
        // a* c = -eps c* a
        if mul(st(a), c) != self.neg_eps(mul(st(c), a)) {
            return false;
        }
        // b* d = -eps d* b
        if mul(st(b), d) != self.neg_eps(mul(st(d), b)) {
            return false;
        }
        // a d* + eps b c* = a* d + eps c* b = 1
        let one = r.one_id();
        let eps_scale = |x| if self.eps < 0 { r.neg_id(x) } else { x };
        let lhs1 = r.add_id(mul(a, st(d)), eps_scale(mul(b, st(c))));
        let lhs2 = r.add_id(mul(st(a), d), eps_scale(mul(st(c), b)));
        lhs1 == one && lhs2 == one
    }

    /// The form characterization: T J_eps T* = J_eps, where T* is the
    /// entrywise star followed by the transpose.
    pub fn is_member_form(&self, g: &Mat2) -> bool {
        let r = &self.ring;
        let st = |x| r.star_id(x);
        let mul = |x, y| r.mul_id(x, y);
        let add = |x, y| r.add_id(x, y);
        let eps = self.eps_id;
        // T J = (b eps, a; d eps, c)
        let tj = Mat2 {
            a: mul(g.b, eps),
            b: g.a,
            c: mul(g.d, eps),
            d: g.c,
        };
        // T* = (a*, c*; b*, d*); product (T J) T*
        let p = Mat2 {
            a: add(mul(tj.a, st(g.a)), mul(tj.b, st(g.b))),
            b: add(mul(tj.a, st(g.c)), mul(tj.b, st(g.d))),
            c: add(mul(tj.c, st(g.a)), mul(tj.d, st(g.b))),
            d: add(mul(tj.c, st(g.c)), mul(tj.d, st(g.d))),
        };
        p.a == r.zero_id() && p.b == r.one_id() && p.c == eps && p.d == r.zero_id()
    }

    /// h_t = (t, 0; 0, (t*)^{-1}) for a unit t.
    pub fn gen_h(&self, t: ElemId) -> Result<Mat2> {
        let d = self.ring.inv_id(self.ring.star_id(t))?;
        let g = Mat2 {
            a: t,
            b: self.ring.zero_id(),
            c: self.ring.zero_id(),
            d,
        };
        debug_assert!(self.is_member_def(&g));
        Ok(g)
    }

    /// w = (0, 1; eps, 0).
    pub fn gen_w(&self) -> Mat2 {
        let g = Mat2 {
            a: self.ring.zero_id(),
            b: self.ring.one_id(),
            c: self.eps_id,
            d: self.ring.zero_id(),
        };
        debug_assert!(self.is_member_def(&g));
        g
    }

    /// u_s = (1, s; 0, 1) for an eps-symmetric s.
    pub fn gen_u(&self, s: ElemId) -> Result<Mat2> {
        let starred = self.ring.star_id(s);
        let target = if self.eps < 0 { s } else { self.ring.neg_id(s) };
        if starred != target {
            return Err(Error::NotSymmetric(
                self.ring.format_element(&self.ring.element(s)),
            ));
        }
        let g = Mat2 {
            a: self.ring.one_id(),
            b: s,
            c: self.ring.zero_id(),
            d: self.ring.one_id(),
        };
        debug_assert!(self.is_member_def(&g));
        Ok(g)
    }

    pub fn mul(&self, x: &Mat2, y: &Mat2) -> Mat2 {
        let r = &self.ring;
        let mul = |a, b| r.mul_id(a, b);
        let add = |a, b| r.add_id(a, b);
        Mat2 {
            a: add(mul(x.a, y.a), mul(x.b, y.c)),
            b: add(mul(x.a, y.b), mul(x.b, y.d)),
            c: add(mul(x.c, y.a), mul(x.d, y.c)),
            d: add(mul(x.c, y.b), mul(x.d, y.d)),
        }
    }

    /// g^{-1} = J_eps g* J_eps^{-1} = (d*, eps b*; eps c*, a*).
    pub fn inverse(&self, g: &Mat2) -> Mat2 {
        let r = &self.ring;
        let st = |x| r.star_id(x);
        let eps_scale = |x| r.mul_id(self.eps_id, x);
        let inv = Mat2 {
            a: st(g.d),
            b: eps_scale(st(g.b)),
            c: eps_scale(st(g.c)),
            d: st(g.a),
        };
        debug_assert_eq!(self.mul(g, &inv), self.identity(), "membership bug: inverse failed");
        inv
    }

    pub fn apply_token(&self, tok: GenToken) -> Mat2 {
        match tok {
            GenToken::H(t) => self.gen_h(t).expect("token holds a unit"),
            GenToken::U(s) => self.gen_u(s).expect("token holds a symmetric element"),
            GenToken::W => self.gen_w(),
        }
    }

    pub fn evaluate_word(&self, word: &[GenToken]) -> Mat2 {
        word.iter()
            .fold(self.identity(), |acc, &t| self.mul(&acc, &self.apply_token(t)))
    }

    /// Brute-force membership scan over all |A|^4 matrices. Feasible only at
    /// small ring sizes; the independent oracle for BFS closures.
    pub fn brute_force_members(&self) -> Result<Vec<Mat2>> {
        let n = self.ring.size();
        let total = n.checked_pow(4).ok_or(Error::BudgetExceeded {
            size: u64::MAX,
            budget: 100_000_000,
        })?;
        if total > 100_000_000 {
            return Err(Error::BudgetExceeded { size: total, budget: 100_000_000 });
        }
        let mut out = vec![];
        for a in 0..n as u32 {
            for b in 0..n as u32 {
                for c in 0..n as u32 {
                    for d in 0..n as u32 {
                        let g = Mat2 {
                            a: ElemId(a),
                            b: ElemId(b),
                            c: ElemId(c),
                            d: ElemId(d),
                        };
                        if self.is_member_def(&g) {
                            out.push(g);
                        }
                    }
                }
            }
        }
        Ok(out)
    }
}

/// BFS closure of the generator set, with one shortest, lexicographically
/// smallest word per element. Element 0 is the identity.
pub struct GroupTable {
    elements: Vec<Mat2>,
    index: HashMap<Mat2, u32>,
    parent: Vec<u32>,
    token: Vec<Option<GenToken>>,
    classes: OnceLock<Vec<Vec<u32>>>,
}

impl GroupTable {
    /// Rebuilds a table from dumped parts (the BFS cache path), validating
    /// that entry 0 is the identity and that every element reproduces as
    /// token * parent.
    pub fn from_parts(
        group: &StarGroup,
        elements: Vec<Mat2>,
        parent: Vec<u32>,
        token: Vec<Option<GenToken>>,
    ) -> Result<GroupTable> {
        if elements.is_empty()
            || elements.len() != parent.len()
            || elements.len() != token.len()
            || elements[0] != group.identity()
            || token[0].is_some()
        {
            return Err(Error::BadDescriptor("corrupt group table dump".into()));
        }
        let mut index = HashMap::with_capacity(elements.len());
        for (i, &g) in elements.iter().enumerate() {
            if index.insert(g, i as u32).is_some() {
                return Err(Error::BadDescriptor("duplicate element in group table dump".into()));
            }
        }
        for id in 1..elements.len() as u32 {
            let Some(tok) = token[id as usize] else {
                return Err(Error::BadDescriptor("missing token in group table dump".into()));
            };
            let p = parent[id as usize];
            if p >= id {
                return Err(Error::BadDescriptor("non-BFS parent order in group table dump".into()));
            }
            let gen = match tok {
                GenToken::H(t) => group.gen_h(t),
                GenToken::U(s) => group.gen_u(s),
                GenToken::W => Ok(group.gen_w()),
            }
            .map_err(|_| Error::BadDescriptor("invalid generator token in group table dump".into()))?;
            let rebuilt = group.mul(&gen, &elements[p as usize]);
            if rebuilt != elements[id as usize] {
                return Err(Error::BadDescriptor("group table dump fails re-evaluation".into()));
            }
        }
        Ok(GroupTable {
            elements,
            index,
            parent,
            token,
            classes: OnceLock::new(),
        })
    }

    pub fn order(&self) -> usize {
        self.elements.len()
    }

    pub fn element(&self, id: u32) -> Mat2 {
        self.elements[id as usize]
    }

    pub fn elements(&self) -> &[Mat2] {
        &self.elements
    }

    pub fn id_of(&self, g: &Mat2) -> Result<u32> {
        self.index.get(g).copied().ok_or(Error::NotInGroup)
    }

    /// BFS predecessor: the element and last generator token such that
    /// g = token * parent. None for the identity.
    pub fn parent_of(&self, id: u32) -> Option<(u32, GenToken)> {
        self.token[id as usize].map(|t| (self.parent[id as usize], t))
    }

    /// Word in product order: g = word[0] * word[1] * ... * word[k-1].
    pub fn word_of(&self, id: u32) -> Vec<GenToken> {
        let mut out = vec![];
        let mut cur = id;
        while let Some(tok) = self.token[cur as usize] {
            out.push(tok);
            cur = self.parent[cur as usize];
        }
        out
    }

    pub fn word_length(&self, id: u32) -> usize {
        let mut len = 0;
        let mut cur = id;
        while self.token[cur as usize].is_some() {
            len += 1;
            cur = self.parent[cur as usize];
        }
        len
    }

    /// Orbit partition under conjugation, computed by closing each element
    /// under conjugation by the generators. Classes are listed by their
    /// minimal element id; each class is sorted.
    pub fn conjugacy_classes(&self, group: &StarGroup) -> &Vec<Vec<u32>> {
        self.classes.get_or_init(|| {
            let gens: Vec<(Mat2, Mat2)> = group
                .generators()
                .iter()
                .map(|(_, g)| (*g, group.inverse(g)))
                .collect();
            let mut assigned = vec![false; self.elements.len()];
            let mut classes = vec![];
            for start in 0..self.elements.len() as u32 {
                if assigned[start as usize] {
                    continue;
                }
                let mut class = vec![start];
                assigned[start as usize] = true;
                let mut frontier = vec![start];
                while let Some(x) = frontier.pop() {
                    let gx = self.elements[x as usize];
                    for (g, ginv) in &gens {
                        let y = group.mul(&group.mul(g, &gx), ginv);
                        let yid = self.index[&y];
                        if !assigned[yid as usize] {
                            assigned[yid as usize] = true;
                            class.push(yid);
                            frontier.push(yid);
                        }
                    }
                }
                class.sort_unstable();
                classes.push(class);
            }
            classes
        })
    }

    /// Histogram of word lengths, for reports.
    pub fn word_stats(&self) -> Vec<(usize, usize)> {
        let mut hist: Vec<usize> = vec![];
        for id in 0..self.elements.len() as u32 {
            let l = self.word_length(id);
            if hist.len() <= l {
                hist.resize(l + 1, 0);
            }
            hist[l] += 1;
        }
        hist.into_iter().enumerate().collect()
    }
}

/// Breadth-first closure with per-level lexicographic discovery order:
/// within a level, generators are applied in token order to frontier
/// elements in word order, so the first discovery of an element carries its
/// lexicographically smallest shortest word.
pub fn enumerate(group: &StarGroup, max_size: usize) -> Result<GroupTable> {
    let identity = group.identity();
    let mut elements = vec![identity];
    let mut index = HashMap::new();
    index.insert(identity, 0u32);
    let mut parent = vec![0u32];
    let mut token: Vec<Option<GenToken>> = vec![None];
    let mut frontier = vec![0u32];
    while !frontier.is_empty() {
        let mut next = vec![];
        for (tok, gen) in group.generators() {
            for &cur in &frontier {
                let g = group.mul(gen, &elements[cur as usize]);
                if index.contains_key(&g) {
                    continue;
                }
                if elements.len() >= max_size {
                    return Err(Error::ClosureBudget {
                        max_size,
                        frontier: frontier.len() + next.len(),
                    });
                }
                let id = elements.len() as u32;
                elements.push(g);
                index.insert(g, id);
                parent.push(cur);
                token.push(Some(*tok));
                next.push(id);
            }
        }
        frontier = next;
    }
    Ok(GroupTable {
        elements,
        index,
        parent,
        token,
        classes: OnceLock::new(),
    })
}

#[derive(Debug, Clone, Serialize)]
pub struct RelationCheck {
    pub name: String,
    pub checked: u64,
    pub failed: u64,
    pub vacuous: bool,
    pub witness: Option<String>,
}

impl RelationCheck {
    pub fn passed(&self) -> bool {
        self.failed == 0
    }

    pub fn verdict(&self) -> &'static str {
        if self.vacuous {
            "vacuous"
        } else if self.failed == 0 {
            "pass"
        } else {
            "fail"
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct WordCheck {
    pub checked: u64,
    pub failed: u64,
}

/// Per-relation verification report for the five universal relations,
/// plus the word-reproduction check when a table is supplied.
#[derive(Debug, Clone, Serialize)]
pub struct PresentationReport {
    pub relations: Vec<RelationCheck>,
    pub word_check: Option<WordCheck>,
}

impl PresentationReport {
    pub fn all_passed(&self) -> bool {
        self.relations.iter().all(|r| r.passed())
            && self.word_check.as_ref().is_none_or(|w| w.failed == 0)
    }
}

/// Verifies the five universal relations as identities of group elements,
/// quantified over all units t, t', all eps-symmetric b, b', and (for
/// relation 5) all invertible eps-symmetric t. When a table is given, also
/// re-evaluates every stored word and compares with the stored element.
pub fn verify_presentation(group: &StarGroup, table: Option<&GroupTable>) -> Result<PresentationReport> {
    let ring = group.ring();
    let units = ring.units()?.to_vec();
    let sym = ring.eps_symmetric_elements(group.eps())?;
    let sym_units = ring.eps_symmetric_units(group.eps())?;
    let w = group.gen_w();
    let mut relations = vec![];

    // (1a) h_t h_t' = h_{tt'}
    {
        let mut check = RelationCheck {
            name: "r1_torus: h_t h_t' = h_tt'".into(),
            checked: 0,
            failed: 0,
            vacuous: false,
            witness: None,
        };
        for &t in &units {
            let ht = group.gen_h(t)?;
            for &t2 in &units {
                check.checked += 1;
                let lhs = group.mul(&ht, &group.gen_h(t2)?);
                let rhs = group.gen_h(ring.mul_id(t, t2))?;
                if lhs != rhs {
                    check.failed += 1;
                    check.witness.get_or_insert_with(|| {
                        format!(
                            "t = {}, t' = {}",
                            ring.format_element(&ring.element(t)),
                            ring.format_element(&ring.element(t2))
                        )
                    });
                }
            }
        }
        relations.push(check);
    }

    // (1b) u_b u_b' = u_{b+b'}
    {
        let mut check = RelationCheck {
            name: "r1_unipotent: u_b u_b' = u_b+b'".into(),
            checked: 0,
            failed: 0,
            vacuous: false,
            witness: None,
        };
        for &b in &sym {
            let ub = group.gen_u(b)?;
            for &b2 in &sym {
                check.checked += 1;
                let lhs = group.mul(&ub, &group.gen_u(b2)?);
                let rhs = group.gen_u(ring.add_id(b, b2))?;
                if lhs != rhs {
                    check.failed += 1;
                    check.witness.get_or_insert_with(|| {
                        format!(
                            "b = {}, b' = {}",
                            ring.format_element(&ring.element(b)),
                            ring.format_element(&ring.element(b2))
                        )
                    });
                }
            }
        }
        relations.push(check);
    }

    // (2) w^2 = h_eps
    {
        let lhs = group.mul(&w, &w);
        let rhs = group.gen_h(ring.signed_one_id(group.eps()))?;
        relations.push(RelationCheck {
            name: "r2_weyl: w^2 = h_eps".into(),
            checked: 1,
            failed: u64::from(lhs != rhs),
            vacuous: false,
            witness: (lhs != rhs).then(|| "w^2 != h_eps".into()),
        });
    }

    // (3) h_t u_b = u_{t b t*} h_t
    {
        let mut check = RelationCheck {
            name: "r3_torus_unipotent: h_t u_b = u_tbt* h_t".into(),
            checked: 0,
            failed: 0,
            vacuous: false,
            witness: None,
        };
        for &t in &units {
            let ht = group.gen_h(t)?;
            for &b in &sym {
                check.checked += 1;
                let lhs = group.mul(&ht, &group.gen_u(b)?);
                let tbt = ring.mul_id(ring.mul_id(t, b), ring.star_id(t));
                let rhs = group.mul(&group.gen_u(tbt)?, &ht);
                if lhs != rhs {
                    check.failed += 1;
                    check.witness.get_or_insert_with(|| {
                        format!(
                            "t = {}, b = {}",
                            ring.format_element(&ring.element(t)),
                            ring.format_element(&ring.element(b))
                        )
                    });
                }
            }
        }
        relations.push(check);
    }

    // (4) w h_t = h_{(t*)^{-1}} w
    {
        let mut check = RelationCheck {
            name: "r4_weyl_torus: w h_t = h_(t*)^-1 w".into(),
            checked: 0,
            failed: 0,
            vacuous: false,
            witness: None,
        };
        for &t in &units {
            check.checked += 1;
            let lhs = group.mul(&w, &group.gen_h(t)?);
            let rhs = group.mul(&group.gen_h(ring.inv_id(ring.star_id(t))?)?, &w);
            if lhs != rhs {
                check.failed += 1;
                check
                    .witness
                    .get_or_insert_with(|| format!("t = {}", ring.format_element(&ring.element(t))));
            }
        }
        relations.push(check);
    }

    // (5) w u_{t^-1} w u_{-eps t} w u_{t^-1} = h_{-eps t}, t symmetric unit
    {
        let mut check = RelationCheck {
            name: "r5_braid: w u_t^-1 w u_-eps.t w u_t^-1 = h_-eps.t".into(),
            checked: 0,
            failed: 0,
            vacuous: sym_units.is_empty(),
            witness: None,
        };
        for &t in &sym_units {
            check.checked += 1;
            let tinv = ring.inv_id(t)?;
            let neg_eps_t = if group.eps() < 0 { t } else { ring.neg_id(t) };
            let u1 = group.gen_u(tinv)?;
            let u2 = group.gen_u(neg_eps_t)?;
            let mut lhs = group.mul(&w, &u1);
            lhs = group.mul(&lhs, &w);
            lhs = group.mul(&lhs, &u2);
            lhs = group.mul(&lhs, &w);
            lhs = group.mul(&lhs, &u1);
            let rhs = group.gen_h(neg_eps_t)?;
            if lhs != rhs {
                check.failed += 1;
                check
                    .witness
                    .get_or_insert_with(|| format!("t = {}", ring.format_element(&ring.element(t))));
            }
        }
        relations.push(check);
    }

    let word_check = match table {
        Some(table) => {
            let mut failed = 0;
            for id in 0..table.order() as u32 {
                let word = table.word_of(id);
                if group.evaluate_word(&word) != table.element(id) {
                    failed += 1;
                }
            }
            Some(WordCheck { checked: table.order() as u64, failed })
        }
        None => None,
    };

    Ok(PresentationReport { relations, word_check })
}
