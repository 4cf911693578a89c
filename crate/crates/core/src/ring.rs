//! Finite unital rings with involution.
//!
//! Three kinds are supported: the full matrix ring M_n(F_q) with the
//! transpose involution, the truncated polynomial ring A_m = F_q[x]/(x^m)
//! with x -> -x, and finite direct products of these with the componentwise
//! involution. Elements are dense coordinate vectors over the base field in
//! a fixed basis (matrix units e_ij, monomials x^i); the enumeration order
//! is lexicographic on coordinates, so an element's id doubles as its
//! mixed-radix coordinate encoding.

use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fq::{Felt, FqField};

/// Rings up to this size get full add/mul tables (BFS group enumeration is
/// multiplication-bound).
const TABLE_BOUND: u64 = 4096;

/// Default cap on ring enumeration.
pub const DEFAULT_ENUMERATION_BUDGET: u64 = 1_000_000;

/// JSON-facing description of a ring.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum RingDescriptor {
    Matrix { n: usize, q: u64 },
    TruncatedPoly { m: usize, q: u64 },
    Product { factors: Vec<RingDescriptor> },
}

impl RingDescriptor {
    pub fn from_json(s: &str) -> Result<Self> {
        serde_json::from_str(s).map_err(|e| Error::BadDescriptor(e.to_string()))
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("descriptor serialization cannot fail")
    }

    fn base_q(&self) -> Result<u64> {
        match self {
            RingDescriptor::Matrix { q, .. } | RingDescriptor::TruncatedPoly { q, .. } => Ok(*q),
            RingDescriptor::Product { factors } => {
                let qs: BTreeSet<u64> = factors
                    .iter()
                    .map(|f| f.base_q())
                    .collect::<Result<_>>()?;
                match qs.len() {
                    1 => Ok(*qs.iter().next().unwrap()),
                    _ => Err(Error::MixedBaseFields),
                }
            }
        }
    }

    pub fn summary(&self) -> String {
        match self {
            RingDescriptor::Matrix { n, q } => format!("M_{n}(F_{q})"),
            RingDescriptor::TruncatedPoly { m, q } => format!("F_{q}[x]/(x^{m})"),
            RingDescriptor::Product { factors } => factors
                .iter()
                .map(|f| f.summary())
                .collect::<Vec<_>>()
                .join(" x "),
        }
    }
}

/// Splits q into (p, k) with p prime.
fn factor_prime_power(q: u64) -> Result<(u64, usize)> {
    if q < 2 {
        return Err(Error::BadDescriptor(format!("q = {q} is not a prime power")));
    }
    let mut p = 2u64;
    while p * p <= q {
        if q.is_multiple_of(p) {
            break;
        }
        p += 1;
    }
    if !q.is_multiple_of(p) {
        p = q; // q itself prime
    }
    let mut k = 0usize;
    let mut rest = q;
    while rest.is_multiple_of(p) {
        rest /= p;
        k += 1;
    }
    if rest != 1 {
        return Err(Error::BadDescriptor(format!("q = {q} is not a prime power")));
    }
    Ok((p, k))
}

/// An element as a dense coordinate vector of base-field indices; it
/// serializes as the bare coordinate array.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct RingElement {
    pub coords: Vec<u32>,
}

/// Index of an element in the ring enumeration.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct ElemId(pub u32);

#[derive(Debug, Clone)]
enum Kind {
    /// n x n matrices, coords row-major.
    Matrix { n: usize },
    /// Coefficients of 1, x, ..., x^{m-1}.
    TruncatedPoly { m: usize },
    /// Concatenated coordinate blocks.
    Product { parts: Vec<(Kind, usize)> },
}

impl Kind {
    fn dim(&self) -> usize {
        match self {
            Kind::Matrix { n } => n * n,
            Kind::TruncatedPoly { m } => *m,
            Kind::Product { parts } => parts.iter().map(|(_, d)| d).sum(),
        }
    }

    fn from_descriptor(desc: &RingDescriptor) -> Result<Kind> {
        Ok(match desc {
            RingDescriptor::Matrix { n, .. } => {
                if *n < 1 {
                    return Err(Error::BadDescriptor("matrix size n must be >= 1".into()));
                }
                Kind::Matrix { n: *n }
            }
            RingDescriptor::TruncatedPoly { m, .. } => {
                if *m < 1 {
                    return Err(Error::BadDescriptor("truncation length m must be >= 1".into()));
                }
                Kind::TruncatedPoly { m: *m }
            }
            RingDescriptor::Product { factors } => {
                if factors.is_empty() {
                    return Err(Error::BadDescriptor("empty product".into()));
                }
                let parts = factors
                    .iter()
                    .map(|f| Kind::from_descriptor(f).map(|k| {
                        let d = k.dim();
                        (k, d)
                    }))
                    .collect::<Result<Vec<_>>>()?;
                Kind::Product { parts }
            }
        })
    }
}

struct Enumeration {
    star: Vec<u32>,
    neg: Vec<u32>,
    units: Vec<ElemId>,
    /// u32::MAX for non-units.
    unit_pos: Vec<u32>,
    inv: Vec<u32>,
    add_table: Option<Vec<u32>>,
    mul_table: Option<Vec<u32>>,
}

/// A finite unital ring with involution, optionally with full element
/// enumeration (ids, unit list, op tables).
pub struct InvolutiveRing {
    desc: RingDescriptor,
    kind: Kind,
    field: FqField,
    dim: usize,
    size: u64,
    enumeration: Option<Enumeration>,
}

impl InvolutiveRing {
    /// Builds M_n(F_q) with the transpose involution.
    pub fn matrix(n: usize, field: FqField) -> Result<Self> {
        Self::from_descriptor_with_field(
            RingDescriptor::Matrix { n, q: field.size() },
            field,
            DEFAULT_ENUMERATION_BUDGET,
        )
    }

    /// Builds A_m = F_q[x]/(x^m) with the involution x -> -x.
    pub fn truncated_poly(m: usize, field: FqField) -> Result<Self> {
        Self::from_descriptor_with_field(
            RingDescriptor::TruncatedPoly { m, q: field.size() },
            field,
            DEFAULT_ENUMERATION_BUDGET,
        )
    }

    pub fn from_descriptor(desc: &RingDescriptor) -> Result<Self> {
        Self::from_descriptor_budget(desc, DEFAULT_ENUMERATION_BUDGET)
    }

    pub fn from_descriptor_budget(desc: &RingDescriptor, budget: u64) -> Result<Self> {
        let q = desc.base_q()?;
        let (p, k) = factor_prime_power(q)?;
        let field = FqField::new(p, k)?;
        Self::from_descriptor_with_field(desc.clone(), field, budget)
    }

    fn from_descriptor_with_field(desc: RingDescriptor, field: FqField, budget: u64) -> Result<Self> {
        let q = desc.base_q()?;
        if q != field.size() {
            return Err(Error::BadDescriptor("field size does not match descriptor".into()));
        }
        let kind = Kind::from_descriptor(&desc)?;
        let dim = kind.dim();
        let size = (field.size() as f64).powi(dim as i32);
        let size = if size > (u64::MAX / 2) as f64 {
            u64::MAX
        } else {
            field.size().pow(dim as u32)
        };
        let mut ring = InvolutiveRing {
            desc,
            kind,
            field,
            dim,
            size,
            enumeration: None,
        };
        if size <= budget {
            ring.build_enumeration();
        }
        Ok(ring)
    }

    pub fn descriptor(&self) -> &RingDescriptor {
        &self.desc
    }

    pub fn field(&self) -> &FqField {
        &self.field
    }

    /// Coordinate dimension over the base field.
    pub fn dim(&self) -> usize {
        self.dim
    }

    /// |A| = q^dim.
    pub fn size(&self) -> u64 {
        self.size
    }

    pub fn is_enumerated(&self) -> bool {
        self.enumeration.is_some()
    }

    fn enumeration(&self) -> Result<&Enumeration> {
        self.enumeration.as_ref().ok_or(Error::NotEnumerated)
    }

    // ---- coordinate-level arithmetic (always available) ----

    pub fn zero(&self) -> RingElement {
        RingElement { coords: vec![0; self.dim] }
    }

    pub fn one(&self) -> RingElement {
        let mut e = self.zero();
        self.write_one(&self.kind, &mut e.coords);
        e
    }

    fn write_one(&self, kind: &Kind, coords: &mut [u32]) {
        match kind {
            Kind::Matrix { n } => {
                for i in 0..*n {
                    coords[i * n + i] = 1;
                }
            }
            Kind::TruncatedPoly { .. } => coords[0] = 1,
            Kind::Product { parts } => {
                let mut off = 0;
                for (k, d) in parts {
                    self.write_one(k, &mut coords[off..off + d]);
                    off += d;
                }
            }
        }
    }

    pub fn add(&self, a: &RingElement, b: &RingElement) -> RingElement {
        let coords = a
            .coords
            .iter()
            .zip(&b.coords)
            .map(|(&x, &y)| self.field.add(Felt(x), Felt(y)).0)
            .collect();
        RingElement { coords }
    }

    pub fn neg(&self, a: &RingElement) -> RingElement {
        let coords = a.coords.iter().map(|&x| self.field.neg(Felt(x)).0).collect();
        RingElement { coords }
    }

    pub fn sub(&self, a: &RingElement, b: &RingElement) -> RingElement {
        self.add(a, &self.neg(b))
    }

    pub fn mul(&self, a: &RingElement, b: &RingElement) -> RingElement {
        let mut out = vec![0u32; self.dim];
        self.mul_into(&self.kind, &a.coords, &b.coords, &mut out);
        RingElement { coords: out }
    }

    fn mul_into(&self, kind: &Kind, a: &[u32], b: &[u32], out: &mut [u32]) {
        let f = &self.field;
        match kind {
            Kind::Matrix { n } => {
                let n = *n;
                for i in 0..n {
                    for j in 0..n {
                        let mut acc = f.zero();
                        for l in 0..n {
                            acc = f.add(acc, f.mul(Felt(a[i * n + l]), Felt(b[l * n + j])));
                        }
                        out[i * n + j] = acc.0;
                    }
                }
            }
            Kind::TruncatedPoly { m } => {
                for l in 0..*m {
                    let mut acc = f.zero();
                    for i in 0..=l {
                        acc = f.add(acc, f.mul(Felt(a[i]), Felt(b[l - i])));
                    }
                    out[l] = acc.0;
                }
            }
            Kind::Product { parts } => {
                let mut off = 0;
                for (k, d) in parts {
                    self.mul_into(k, &a[off..off + d], &b[off..off + d], &mut out[off..off + d]);
                    off += d;
                }
            }
        }
    }

    /// The involution: transpose on matrices (the base-field involution is
    /// trivial), x -> -x on truncated polynomials, componentwise on products.
    pub fn star(&self, a: &RingElement) -> RingElement {
        let mut out = vec![0u32; self.dim];
        self.star_into(&self.kind, &a.coords, &mut out);
        RingElement { coords: out }
    }

    fn star_into(&self, kind: &Kind, a: &[u32], out: &mut [u32]) {
        match kind {
            Kind::Matrix { n } => {
                let n = *n;
                for i in 0..n {
                    for j in 0..n {
                        out[i * n + j] = a[j * n + i];
                    }
                }
            }
            Kind::TruncatedPoly { m } => {
                for i in 0..*m {
                    out[i] = if i % 2 == 0 {
                        a[i]
                    } else {
                        self.field.neg(Felt(a[i])).0
                    };
                }
            }
            Kind::Product { parts } => {
                let mut off = 0;
                for (k, d) in parts {
                    self.star_into(k, &a[off..off + d], &mut out[off..off + d]);
                    off += d;
                }
            }
        }
    }

    pub fn is_unit(&self, a: &RingElement) -> bool {
        self.is_unit_kind(&self.kind, &a.coords)
    }

    fn is_unit_kind(&self, kind: &Kind, a: &[u32]) -> bool {
        match kind {
            Kind::Matrix { n } => self.matrix_det(*n, a) != self.field.zero(),
            Kind::TruncatedPoly { .. } => a[0] != 0,
            Kind::Product { parts } => {
                let mut off = 0;
                parts.iter().all(|(k, d)| {
                    let ok = self.is_unit_kind(k, &a[off..off + *d]);
                    off += d;
                    ok
                })
            }
        }
    }

    fn matrix_det(&self, n: usize, a: &[u32]) -> Felt {
        let f = &self.field;
        let mut m: Vec<Felt> = a.iter().map(|&x| Felt(x)).collect();
        let mut det = f.one();
        for col in 0..n {
            let pivot = (col..n).find(|&r| m[r * n + col] != f.zero());
            let Some(pivot) = pivot else { return f.zero() };
            if pivot != col {
                for j in 0..n {
                    m.swap(pivot * n + j, col * n + j);
                }
                det = f.neg(det);
            }
            let pv = m[col * n + col];
            det = f.mul(det, pv);
            let pinv = f.inv(pv).expect("pivot is nonzero");
            for r in (col + 1)..n {
                let factor = f.mul(m[r * n + col], pinv);
                if factor == f.zero() {
                    continue;
                }
                for j in col..n {
                    let sub = f.mul(factor, m[col * n + j]);
                    m[r * n + j] = f.sub(m[r * n + j], sub);
                }
            }
        }
        det
    }

    /// Determinant of a matrix-ring element (matrix kind only).
    pub fn det(&self, a: &RingElement) -> Result<Felt> {
        match &self.kind {
            Kind::Matrix { n } => Ok(self.matrix_det(*n, &a.coords)),
            _ => Err(Error::BadDescriptor("det is defined on the matrix kind".into())),
        }
    }

    pub fn inverse(&self, a: &RingElement) -> Result<RingElement> {
        if !self.is_unit(a) {
            return Err(Error::NotAUnit(self.format_element(a)));
        }
        let mut out = vec![0u32; self.dim];
        self.inverse_kind(&self.kind, &a.coords, &mut out);
        Ok(RingElement { coords: out })
    }

    fn inverse_kind(&self, kind: &Kind, a: &[u32], out: &mut [u32]) {
        let f = &self.field;
        match kind {
            Kind::Matrix { n } => {
                // Gauss-Jordan against the identity
                let n = *n;
                let mut m: Vec<Felt> = a.iter().map(|&x| Felt(x)).collect();
                let mut inv: Vec<Felt> = vec![f.zero(); n * n];
                for i in 0..n {
                    inv[i * n + i] = f.one();
                }
                for col in 0..n {
                    let pivot = (col..n)
                        .find(|&r| m[r * n + col] != f.zero())
                        .expect("unit matrix has a pivot in every column");
                    if pivot != col {
                        for j in 0..n {
                            m.swap(pivot * n + j, col * n + j);
                            inv.swap(pivot * n + j, col * n + j);
                        }
                    }
                    let pinv = f.inv(m[col * n + col]).unwrap();
                    for j in 0..n {
                        m[col * n + j] = f.mul(m[col * n + j], pinv);
                        inv[col * n + j] = f.mul(inv[col * n + j], pinv);
                    }
                    for r in 0..n {
                        if r == col || m[r * n + col] == f.zero() {
                            continue;
                        }
                        let factor = m[r * n + col];
                        for j in 0..n {
                            let s1 = f.mul(factor, m[col * n + j]);
                            m[r * n + j] = f.sub(m[r * n + j], s1);
                            let s2 = f.mul(factor, inv[col * n + j]);
                            inv[r * n + j] = f.sub(inv[r * n + j], s2);
                        }
                    }
                }
                for (o, v) in out.iter_mut().zip(inv) {
                    *o = v.0;
                }
            }
            Kind::TruncatedPoly { m } => {
                // a = a0 (1 + nu) with nu nilpotent:
                // a^{-1} = a0^{-1} sum_j (-nu)^j, truncated at degree m
                let m = *m;
                let a0inv = f.inv(Felt(a[0])).unwrap();
                let mut nu = vec![f.zero(); m];
                for i in 1..m {
                    nu[i] = f.mul(Felt(a[i]), a0inv);
                }
                let mut acc = vec![f.zero(); m]; // running (-nu)^j
                acc[0] = f.one();
                let mut sum = vec![f.zero(); m];
                for _ in 0..m {
                    for i in 0..m {
                        sum[i] = f.add(sum[i], acc[i]);
                    }
                    // acc *= -nu
                    let mut next = vec![f.zero(); m];
                    for l in 0..m {
                        let mut v = f.zero();
                        for i in 0..=l {
                            v = f.add(v, f.mul(acc[i], nu[l - i]));
                        }
                        next[l] = f.neg(v);
                    }
                    acc = next;
                }
                for (o, v) in out.iter_mut().zip(sum) {
                    *o = f.mul(v, a0inv).0;
                }
            }
            Kind::Product { parts } => {
                let mut off = 0;
                for (k, d) in parts {
                    self.inverse_kind(k, &a[off..off + d], &mut out[off..off + d]);
                    off += d;
                }
            }
        }
    }

    /// Ring basis elements (one-hot coordinates), in coordinate order.
    pub fn basis_elements(&self) -> Vec<RingElement> {
        (0..self.dim)
            .map(|i| {
                let mut e = self.zero();
                e.coords[i] = 1;
                e
            })
            .collect()
    }

    /// Embeds +1 or -1.
    pub fn signed_one(&self, sign: i8) -> RingElement {
        if sign >= 0 {
            self.one()
        } else {
            self.neg(&self.one())
        }
    }

    /// Matrix trace to the base field (matrix kind only).
    pub fn matrix_trace(&self, a: &RingElement) -> Result<Felt> {
        match &self.kind {
            Kind::Matrix { n } => {
                let mut acc = self.field.zero();
                for i in 0..*n {
                    acc = self.field.add(acc, Felt(a.coords[i * n + i]));
                }
                Ok(acc)
            }
            _ => Err(Error::BadDescriptor("matrix_trace is defined on the matrix kind".into())),
        }
    }

    /// The linear form tr(sum a_i x^i) = a_{m-1} (truncated-poly kind only).
    pub fn jet_trace(&self, a: &RingElement) -> Result<Felt> {
        match &self.kind {
            Kind::TruncatedPoly { m } => Ok(Felt(a.coords[m - 1])),
            _ => Err(Error::BadDescriptor("jet_trace is defined on the truncated-poly kind".into())),
        }
    }

    /// Constant coefficient (truncated-poly kind only).
    pub fn jet_constant(&self, a: &RingElement) -> Result<Felt> {
        match &self.kind {
            Kind::TruncatedPoly { .. } => Ok(Felt(a.coords[0])),
            _ => Err(Error::BadDescriptor("jet_constant is defined on the truncated-poly kind".into())),
        }
    }

    pub fn format_element(&self, a: &RingElement) -> String {
        let coords: Vec<String> = a
            .coords
            .iter()
            .map(|&c| self.field.format_element(Felt(c)))
            .collect();
        format!("[{}]", coords.join(","))
    }

    // ---- enumeration (id-level) API ----

    fn build_enumeration(&mut self) {
        let size = self.size as usize;
        let mut star = vec![0u32; size];
        let mut neg = vec![0u32; size];
        let mut units = vec![];
        let mut unit_pos = vec![u32::MAX; size];
        for id in 0..size as u32 {
            let e = self.element(ElemId(id));
            star[id as usize] = self.raw_id(&self.star(&e));
            neg[id as usize] = self.raw_id(&self.neg(&e));
            if self.is_unit(&e) {
                unit_pos[id as usize] = units.len() as u32;
                units.push(ElemId(id));
            }
        }
        let mut inv = vec![u32::MAX; size];
        for &u in &units {
            let e = self.element(u);
            inv[u.0 as usize] = self.raw_id(&self.inverse(&e).expect("unit has an inverse"));
        }
        let (add_table, mul_table) = if self.size <= TABLE_BOUND {
            let mut addt = vec![0u32; size * size];
            let mut mult = vec![0u32; size * size];
            for a in 0..size as u32 {
                let ea = self.element(ElemId(a));
                for b in 0..size as u32 {
                    let eb = self.element(ElemId(b));
                    addt[a as usize * size + b as usize] = self.raw_id(&self.add(&ea, &eb));
                    mult[a as usize * size + b as usize] = self.raw_id(&self.mul(&ea, &eb));
                }
            }
            (Some(addt), Some(mult))
        } else {
            (None, None)
        };
        self.enumeration = Some(Enumeration {
            star,
            neg,
            units,
            unit_pos,
            inv,
            add_table,
            mul_table,
        });
    }

    /// Mixed-radix encoding: coords[0] is the most significant digit, so ids
    /// sort exactly like coordinate vectors.
    fn raw_id(&self, a: &RingElement) -> u32 {
        let q = self.field.size();
        let mut id = 0u64;
        for &c in &a.coords {
            id = id * q + c as u64;
        }
        id as u32
    }

    pub fn id_of(&self, a: &RingElement) -> Result<ElemId> {
        self.enumeration()?;
        Ok(ElemId(self.raw_id(a)))
    }

    pub fn element(&self, id: ElemId) -> RingElement {
        let q = self.field.size();
        let mut coords = vec![0u32; self.dim];
        let mut rest = id.0 as u64;
        for c in coords.iter_mut().rev() {
            *c = (rest % q) as u32;
            rest /= q;
        }
        RingElement { coords }
    }

    pub fn zero_id(&self) -> ElemId {
        ElemId(0)
    }

    pub fn one_id(&self) -> ElemId {
        ElemId(self.raw_id(&self.one()))
    }

    pub fn signed_one_id(&self, sign: i8) -> ElemId {
        ElemId(self.raw_id(&self.signed_one(sign)))
    }

    pub fn add_id(&self, a: ElemId, b: ElemId) -> ElemId {
        if let Some(e) = &self.enumeration {
            if let Some(t) = &e.add_table {
                return ElemId(t[a.0 as usize * self.size as usize + b.0 as usize]);
            }
        }
        ElemId(self.raw_id(&self.add(&self.element(a), &self.element(b))))
    }

    pub fn mul_id(&self, a: ElemId, b: ElemId) -> ElemId {
        if let Some(e) = &self.enumeration {
            if let Some(t) = &e.mul_table {
                return ElemId(t[a.0 as usize * self.size as usize + b.0 as usize]);
            }
        }
        ElemId(self.raw_id(&self.mul(&self.element(a), &self.element(b))))
    }

    pub fn star_id(&self, a: ElemId) -> ElemId {
        match &self.enumeration {
            Some(e) => ElemId(e.star[a.0 as usize]),
            None => ElemId(self.raw_id(&self.star(&self.element(a)))),
        }
    }

    pub fn neg_id(&self, a: ElemId) -> ElemId {
        match &self.enumeration {
            Some(e) => ElemId(e.neg[a.0 as usize]),
            None => ElemId(self.raw_id(&self.neg(&self.element(a)))),
        }
    }

    pub fn is_unit_id(&self, a: ElemId) -> bool {
        match &self.enumeration {
            Some(e) => e.unit_pos[a.0 as usize] != u32::MAX,
            None => self.is_unit(&self.element(a)),
        }
    }

    pub fn inv_id(&self, a: ElemId) -> Result<ElemId> {
        match &self.enumeration {
            Some(e) => {
                let v = e.inv[a.0 as usize];
                if v == u32::MAX {
                    Err(Error::NotAUnit(self.format_element(&self.element(a))))
                } else {
                    Ok(ElemId(v))
                }
            }
            None => Ok(ElemId(self.raw_id(&self.inverse(&self.element(a))?))),
        }
    }

    /// All elements, in enumeration (lexicographic coordinate) order.
    pub fn element_ids(&self) -> Result<impl Iterator<Item = ElemId>> {
        self.enumeration()?;
        Ok((0..self.size as u32).map(ElemId))
    }

    /// The unit group A^x, in enumeration order.
    pub fn units(&self) -> Result<&[ElemId]> {
        Ok(&self.enumeration()?.units)
    }

    /// Position of a unit in `units()`, for unit-indexed tables.
    pub fn unit_position(&self, a: ElemId) -> Result<usize> {
        let e = self.enumeration()?;
        match e.unit_pos[a.0 as usize] {
            u32::MAX => Err(Error::NotAUnit(self.format_element(&self.element(a)))),
            pos => Ok(pos as usize),
        }
    }

    /// The set {a in A : a* = -eps a}, closed under addition, containing 0.
    pub fn eps_symmetric_elements(&self, eps: i8) -> Result<Vec<ElemId>> {
        let e = self.enumeration()?;
        let mut out = vec![];
        for id in 0..self.size as u32 {
            let starred = e.star[id as usize];
            let target = if eps < 0 { id } else { e.neg[id as usize] };
            if starred == target {
                out.push(ElemId(id));
            }
        }
        Ok(out)
    }

    /// Invertible eps-symmetric elements, in enumeration order.
    pub fn eps_symmetric_units(&self, eps: i8) -> Result<Vec<ElemId>> {
        Ok(self
            .eps_symmetric_elements(eps)?
            .into_iter()
            .filter(|&s| self.is_unit_id(s))
            .collect())
    }

    /// Orbit partition of A^x intersect A^sym under s -> a s a*, with the
    /// minimal element of each orbit first. An empty input set is reported
    /// as an empty partition.
    pub fn symmetric_unit_orbits(&self, eps: i8) -> Result<Vec<Vec<ElemId>>> {
        let sym_units = self.eps_symmetric_units(eps)?;
        let units = self.units()?.to_vec();
        let mut seen = std::collections::HashSet::new();
        let mut orbits = vec![];
        for &s in &sym_units {
            if seen.contains(&s) {
                continue;
            }
            let mut orbit = vec![s];
            seen.insert(s);
            let mut frontier = vec![s];
            while let Some(x) = frontier.pop() {
                for &a in &units {
                    let y = self.mul_id(self.mul_id(a, x), self.star_id(a));
                    if seen.insert(y) {
                        orbit.push(y);
                        frontier.push(y);
                    }
                }
            }
            orbit.sort();
            orbits.push(orbit);
        }
        Ok(orbits)
    }
}

/// Exhaustively (or, above 10^4 elements, by seeded sampling) checks the
/// involution axioms on the enumerated ring: (a*)* = a, (a+b)* = a*+b*,
/// (ab)* = b*a*, 1* = 1.
pub fn verify_involution_axioms(ring: &InvolutiveRing, rng: &mut impl rand::Rng) -> Result<()> {
    if ring.star(&ring.one()) != ring.one() {
        return Err(Error::DatumAxiom("1* != 1".into()));
    }
    let size = ring.size();
    let check_pair = |a: &RingElement, b: &RingElement| -> Result<()> {
        if ring.star(&ring.star(a)) != *a {
            return Err(Error::DatumAxiom(format!("(a*)* != a at a = {}", ring.format_element(a))));
        }
        if ring.star(&ring.add(a, b)) != ring.add(&ring.star(a), &ring.star(b)) {
            return Err(Error::DatumAxiom("(a+b)* != a* + b*".into()));
        }
        if ring.star(&ring.mul(a, b)) != ring.mul(&ring.star(b), &ring.star(a)) {
            return Err(Error::DatumAxiom(format!(
                "(ab)* != b*a* at a = {}, b = {}",
                ring.format_element(a),
                ring.format_element(b)
            )));
        }
        Ok(())
    };
    if size <= 10_000 && ring.is_enumerated() {
        for a in ring.element_ids()? {
            let ea = ring.element(a);
            for b in ring.element_ids()? {
                check_pair(&ea, &ring.element(b))?;
            }
        }
    } else {
        for _ in 0..10_000 {
            let a = RingElement {
                coords: (0..ring.dim()).map(|_| rng.gen_range(0..ring.field().size() as u32)).collect(),
            };
            let b = RingElement {
                coords: (0..ring.dim()).map(|_| rng.gen_range(0..ring.field().size() as u32)).collect(),
            };
            check_pair(&a, &b)?;
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn f(q: u64) -> FqField {
        let (p, k) = factor_prime_power(q).unwrap();
        FqField::new(p, k).unwrap()
    }

    #[test]
    fn matrix_ring_m1_is_the_field() {
        let r = InvolutiveRing::matrix(1, f(3)).unwrap();
        assert_eq!(r.size(), 3);
        for id in r.element_ids().unwrap() {
            assert_eq!(r.star_id(id), id, "transpose of 1x1 is the identity involution");
        }
    }

    #[test]
    fn m2_f3_has_81_elements_and_48_units() {
        let r = InvolutiveRing::matrix(2, f(3)).unwrap();
        assert_eq!(r.size(), 81);
        // oracle: brute-force invertibility scan, ab = ba = 1 for some b
        let mut unit_count = 0;
        for a in r.element_ids().unwrap() {
            let invertible = r.element_ids().unwrap().any(|b| {
                r.mul_id(a, b) == r.one_id() && r.mul_id(b, a) == r.one_id()
            });
            if invertible {
                unit_count += 1;
                assert!(r.is_unit_id(a));
            } else {
                assert!(!r.is_unit_id(a));
            }
        }
        assert_eq!(unit_count, 48);
        assert_eq!(r.units().unwrap().len(), 48);
        // |GL(n,q)| = prod (q^n - q^i)
        assert_eq!((9 - 1) * (9 - 3), 48);
    }

    #[test]
    fn transpose_antihomomorphism_witness() {
        let r = InvolutiveRing::matrix(2, f(3)).unwrap();
        let a = RingElement { coords: vec![0, 1, 0, 0] };
        let b = RingElement { coords: vec![0, 0, 1, 0] };
        assert_eq!(r.star(&r.mul(&a, &b)), r.mul(&r.star(&b), &r.star(&a)));
    }

    #[test]
    fn truncated_poly_basics() {
        let r = InvolutiveRing::truncated_poly(1, f(3)).unwrap();
        assert_eq!(r.size(), 3);
        for id in r.element_ids().unwrap() {
            assert_eq!(r.star_id(id), id);
        }

        let r3 = InvolutiveRing::truncated_poly(3, f(3)).unwrap();
        assert_eq!(r3.size(), 27);
        assert_eq!(r3.units().unwrap().len(), 18); // nonzero constant term: 2 * 9
        let x = RingElement { coords: vec![0, 1, 0] };
        let x2 = RingElement { coords: vec![0, 0, 1] };
        assert_eq!(r3.star(&x), r3.neg(&x));
        assert_eq!(r3.star(&x2), x2);
        // x^m = 0
        assert_eq!(r3.mul(&r3.mul(&x, &x), &x), r3.zero());
        // unit iff nonzero constant term
        for id in r3.element_ids().unwrap() {
            let e = r3.element(id);
            assert_eq!(r3.is_unit(&e), e.coords[0] != 0);
        }
    }

    #[test]
    fn inverses_are_two_sided() {
        for r in [
            InvolutiveRing::matrix(2, f(3)).unwrap(),
            InvolutiveRing::truncated_poly(3, f(3)).unwrap(),
        ] {
            for &u in r.units().unwrap() {
                let v = r.inv_id(u).unwrap();
                assert_eq!(r.mul_id(u, v), r.one_id());
                assert_eq!(r.mul_id(v, u), r.one_id());
            }
        }
    }

    #[test]
    fn eps_symmetric_sets() {
        let r1 = InvolutiveRing::matrix(1, f(3)).unwrap();
        assert_eq!(r1.eps_symmetric_elements(-1).unwrap().len(), 3);

        let r2 = InvolutiveRing::matrix(2, f(3)).unwrap();
        let sym = r2.eps_symmetric_elements(-1).unwrap();
        assert_eq!(sym.len(), 27); // 3^(n(n+1)/2)
        // brute-force filter oracle
        for id in r2.element_ids().unwrap() {
            let e = r2.element(id);
            let expected = r2.star(&e) == e;
            assert_eq!(sym.contains(&id), expected);
        }
        // closed under addition, contains 0
        assert!(sym.contains(&r2.zero_id()));
        for &a in &sym {
            for &b in &sym {
                assert!(sym.contains(&r2.add_id(a, b)));
            }
        }

        let r3 = InvolutiveRing::truncated_poly(3, f(3)).unwrap();
        let sym3 = r3.eps_symmetric_elements(-1).unwrap();
        assert_eq!(sym3.len(), 9); // even part a0 + a2 x^2
        for &s in &sym3 {
            let e = r3.element(s);
            assert_eq!(e.coords[1], 0);
        }
    }

    #[test]
    fn symmetric_unit_orbits_m1_f5() {
        let r = InvolutiveRing::matrix(1, f(5)).unwrap();
        let orbits = r.symmetric_unit_orbits(-1).unwrap();
        // squares {1,4} and non-squares {2,3}: s -> a^2 s
        assert_eq!(orbits.len(), 2);
        let as_sets: Vec<Vec<u32>> = orbits.iter().map(|o| o.iter().map(|e| e.0).collect()).collect();
        assert!(as_sets.contains(&vec![1, 4]));
        assert!(as_sets.contains(&vec![2, 3]));
    }

    #[test]
    fn symmetric_unit_orbits_m2_f3() {
        let r = InvolutiveRing::matrix(2, f(3)).unwrap();
        let orbits = r.symmetric_unit_orbits(-1).unwrap();
        assert_eq!(orbits.len(), 2, "two GL-orbits of invertible symmetric matrices");
        let total: usize = orbits.iter().map(|o| o.len()).sum();
        assert_eq!(total, r.eps_symmetric_units(-1).unwrap().len());
        // closure sanity: s -> asa* stays in the symmetric units
        for orbit in &orbits {
            for &s in orbit {
                assert!(r.is_unit_id(s));
                assert_eq!(r.star_id(s), s);
            }
        }
    }

    #[test]
    fn truncated_poly_orbits_are_closed() {
        let r = InvolutiveRing::truncated_poly(3, f(3)).unwrap();
        let orbits = r.symmetric_unit_orbits(-1).unwrap();
        let total: usize = orbits.iter().map(|o| o.len()).sum();
        assert_eq!(total, 6); // even-part units: a0 in {1,2}, a2 free
        for orbit in &orbits {
            for &s in orbit {
                for &a in r.units().unwrap() {
                    let y = r.mul_id(r.mul_id(a, s), r.star_id(a));
                    assert!(orbit.contains(&y));
                }
            }
        }
    }

    #[test]
    fn involution_axioms_hold() {
        let mut rng = rand::thread_rng();
        for r in [
            InvolutiveRing::matrix(2, f(3)).unwrap(),
            InvolutiveRing::truncated_poly(3, f(3)).unwrap(),
            InvolutiveRing::matrix(1, f(9)).unwrap(),
        ] {
            verify_involution_axioms(&r, &mut rng).unwrap();
        }
    }

    #[test]
    fn product_ring_componentwise() {
        let desc = RingDescriptor::Product {
            factors: vec![
                RingDescriptor::Matrix { n: 1, q: 3 },
                RingDescriptor::TruncatedPoly { m: 2, q: 3 },
            ],
        };
        let r = InvolutiveRing::from_descriptor(&desc).unwrap();
        assert_eq!(r.size(), 27);
        assert_eq!(r.units().unwrap().len(), 2 * 6);
        let mut rng = rand::thread_rng();
        verify_involution_axioms(&r, &mut rng).unwrap();

        let mixed = RingDescriptor::Product {
            factors: vec![
                RingDescriptor::Matrix { n: 1, q: 3 },
                RingDescriptor::Matrix { n: 1, q: 5 },
            ],
        };
        assert!(matches!(
            InvolutiveRing::from_descriptor(&mixed),
            Err(Error::MixedBaseFields)
        ));
    }

    #[test]
    fn budget_disables_enumeration() {
        let desc = RingDescriptor::Matrix { n: 2, q: 3 };
        let r = InvolutiveRing::from_descriptor_budget(&desc, 10).unwrap();
        assert!(!r.is_enumerated());
        assert!(r.units().is_err());
        // coordinate arithmetic still works symbolically
        let one = r.one();
        assert_eq!(r.mul(&one, &one), one);
    }

    #[test]
    fn descriptor_json_round_trip() {
        let d = RingDescriptor::from_json(r#"{"kind":"matrix","n":2,"q":3}"#).unwrap();
        assert_eq!(d, RingDescriptor::Matrix { n: 2, q: 3 });
        let d2 = RingDescriptor::from_json(r#"{"kind":"truncated_poly","m":3,"q":3}"#).unwrap();
        assert_eq!(d2, RingDescriptor::TruncatedPoly { m: 3, q: 3 });
        assert_eq!(RingDescriptor::from_json(&d.to_json()).unwrap(), d);
        assert!(RingDescriptor::from_json(r#"{"kind":"nope"}"#).is_err());
    }
}
