//! Exact arithmetic in the cyclotomic field Q(zeta_p), p an odd prime.
//!
//! Elements are stored in the power basis {1, z, ..., z^{p-2}} with the
//! relation z^{p-1} = -(1 + z + ... + z^{p-2}). This is a basis, so the
//! representation is a normal form: two values are equal iff their
//! coefficient vectors are equal. Coefficients are arbitrary-precision
//! rationals; nothing in this module rounds.

use num::complex::Complex64;
use num::{BigInt, BigRational, One, Signed, Zero};

use crate::error::{Error, Result};

/// An element of Q(zeta_p) in canonical power-basis form.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CycloNumber {
    p: u64,
    /// length p-1; coeffs[i] multiplies zeta^i
    coeffs: Vec<BigRational>,
}

fn big(n: i64) -> BigRational {
    BigRational::from_integer(BigInt::from(n))
}

impl CycloNumber {
    pub fn zero(p: u64) -> Self {
        CycloNumber {
            p,
            coeffs: vec![BigRational::zero(); (p - 1) as usize],
        }
    }

    pub fn one(p: u64) -> Self {
        Self::from_rational(p, BigRational::one())
    }

    pub fn from_rational(p: u64, r: BigRational) -> Self {
        let mut x = Self::zero(p);
        x.coeffs[0] = r;
        x
    }

    pub fn from_int(p: u64, n: i64) -> Self {
        Self::from_rational(p, big(n))
    }

    /// zeta_p^e for any exponent (reduced mod p, then canonicalized).
    pub fn root_of_unity(p: u64, e: i64) -> Self {
        let e = e.rem_euclid(p as i64) as u64;
        let mut acc = vec![BigRational::zero(); p as usize];
        acc[e as usize] = BigRational::one();
        Self::from_exponent_accumulator(p, acc)
    }

    /// Collapses a coefficient vector indexed by exponents 0..p into the
    /// power basis using 1 + z + ... + z^{p-1} = 0.
    fn from_exponent_accumulator(p: u64, acc: Vec<BigRational>) -> Self {
        debug_assert_eq!(acc.len(), p as usize);
        let top = acc[(p - 1) as usize].clone();
        let coeffs = acc[..(p - 1) as usize]
            .iter()
            .map(|c| c - &top)
            .collect();
        CycloNumber { p, coeffs }
    }

    pub fn order(&self) -> u64 {
        self.p
    }

    pub fn coeffs(&self) -> &[BigRational] {
        &self.coeffs
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(|c| c.is_zero())
    }

    pub fn is_one(&self) -> bool {
        self.coeffs[0].is_one() && self.coeffs[1..].iter().all(|c| c.is_zero())
    }

    /// Some(r) iff the value lies in Q.
    pub fn as_rational(&self) -> Option<BigRational> {
        if self.coeffs[1..].iter().all(|c| c.is_zero()) {
            Some(self.coeffs[0].clone())
        } else {
            None
        }
    }

    pub fn add(&self, other: &Self) -> Self {
        assert_eq!(self.p, other.p, "mixed cyclotomic orders");
        CycloNumber {
            p: self.p,
            coeffs: self
                .coeffs
                .iter()
                .zip(&other.coeffs)
                .map(|(a, b)| a + b)
                .collect(),
        }
    }

    pub fn sub(&self, other: &Self) -> Self {
        assert_eq!(self.p, other.p, "mixed cyclotomic orders");
        CycloNumber {
            p: self.p,
            coeffs: self
                .coeffs
                .iter()
                .zip(&other.coeffs)
                .map(|(a, b)| a - b)
                .collect(),
        }
    }

    pub fn neg(&self) -> Self {
        CycloNumber {
            p: self.p,
            coeffs: self.coeffs.iter().map(|c| -c).collect(),
        }
    }

    pub fn mul(&self, other: &Self) -> Self {
        assert_eq!(self.p, other.p, "mixed cyclotomic orders");
        let p = self.p as usize;
        let mut acc = vec![BigRational::zero(); p];
        for (i, a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in other.coeffs.iter().enumerate() {
                if b.is_zero() {
                    continue;
                }
                let e = (i + j) % p;
                acc[e] += a * b;
            }
        }
        Self::from_exponent_accumulator(self.p, acc)
    }

    pub fn scale(&self, r: &BigRational) -> Self {
        CycloNumber {
            p: self.p,
            coeffs: self.coeffs.iter().map(|c| c * r).collect(),
        }
    }

    /// Applies the Galois automorphism zeta -> zeta^j, gcd(j, p) = 1.
    pub fn galois(&self, j: u64) -> Self {
        let p = self.p as usize;
        let j = (j % self.p) as usize;
        debug_assert!(j != 0);
        let mut acc = vec![BigRational::zero(); p];
        for (i, c) in self.coeffs.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            acc[(i * j) % p] += c;
        }
        Self::from_exponent_accumulator(self.p, acc)
    }

    /// Complex conjugation, zeta -> zeta^{-1}.
    pub fn conj(&self) -> Self {
        self.galois(self.p - 1)
    }

    /// Exact inverse via the product of Galois conjugates: the norm
    /// x * prod_{j=2}^{p-1} sigma_j(x) is a nonzero rational.
    pub fn invert(&self) -> Result<Self> {
        if self.is_zero() {
            return Err(Error::DivisionByZero);
        }
        let mut cof = Self::one(self.p);
        for j in 2..self.p {
            cof = cof.mul(&self.galois(j));
        }
        let norm = self
            .mul(&cof)
            .as_rational()
            .expect("field norm of a cyclotomic number is rational");
        debug_assert!(!norm.is_zero());
        Ok(cof.scale(&norm.recip()))
    }

    pub fn pow(&self, e: u32) -> Self {
        let mut acc = Self::one(self.p);
        let mut base = self.clone();
        let mut e = e;
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.mul(&base);
            }
            base = base.mul(&base);
            e >>= 1;
        }
        acc
    }

    /// Floating-point image under zeta -> exp(2 pi i / p). Reporting and the
    /// decomposition eigensolver only; never used for exact verdicts.
    pub fn to_complex(&self) -> Complex64 {
        let p = self.p as f64;
        let mut z = Complex64::new(0.0, 0.0);
        for (i, c) in self.coeffs.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            let theta = 2.0 * std::f64::consts::PI * (i as f64) / p;
            let cf = rational_to_f64(c);
            z += Complex64::new(cf * theta.cos(), cf * theta.sin());
        }
        z
    }

    /// Coefficients as exact "n/d" strings, for reports.
    pub fn coeff_strings(&self) -> Vec<String> {
        self.coeffs.iter().map(|c| c.to_string()).collect()
    }
}

pub fn rational_to_f64(r: &BigRational) -> f64 {
    // good enough for display and for the float-only decomposition path:
    // numerators/denominators stay far below 2^52 at desk scale
    let n = r.numer();
    let d = r.denom();
    let nf = n.to_string().parse::<f64>().unwrap_or(f64::NAN);
    let df = d.to_string().parse::<f64>().unwrap_or(f64::NAN);
    nf / df
}

impl std::fmt::Display for CycloNumber {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let mut parts: Vec<String> = vec![];
        for (i, c) in self.coeffs.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            let mag = c.abs();
            let body = match i {
                0 => mag.to_string(),
                1 if mag.is_one() => "z".to_string(),
                1 => format!("{mag}*z"),
                _ if mag.is_one() => format!("z^{i}"),
                _ => format!("{mag}*z^{i}"),
            };
            if parts.is_empty() {
                parts.push(if c.is_negative() { format!("-{body}") } else { body });
            } else {
                parts.push(if c.is_negative() { format!("- {body}") } else { format!("+ {body}") });
            }
        }
        if parts.is_empty() {
            write!(f, "0")
        } else {
            write!(f, "{}", parts.join(" "))
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn zeta(p: u64) -> CycloNumber {
        CycloNumber::root_of_unity(p, 1)
    }

    #[test]
    fn canonical_reduction_of_high_powers() {
        // reduce(z^{p-1+j}) == reduce(-sum_i z^{i+j}) for 0 <= j < p-1
        for p in [3u64, 5, 7] {
            for j in 0..(p - 1) as i64 {
                let lhs = CycloNumber::root_of_unity(p, (p - 1) as i64 + j);
                let mut rhs = CycloNumber::zero(p);
                for i in 0..(p - 1) as i64 {
                    rhs = rhs.sub(&CycloNumber::root_of_unity(p, i + j));
                }
                assert_eq!(lhs, rhs);
            }
        }
    }

    #[test]
    fn product_identity_in_q_zeta3() {
        // (1 + z)(1 + z^2) = 2 + z + z^2 = 1
        let one = CycloNumber::one(3);
        let a = one.add(&zeta(3));
        let b = one.add(&CycloNumber::root_of_unity(3, 2));
        assert!(a.mul(&b).is_one());
    }

    #[test]
    fn conjugation_is_inverse_root() {
        assert_eq!(zeta(5).conj(), CycloNumber::root_of_unity(5, 4));
        for p in [3u64, 5, 7] {
            for e in 0..p as i64 {
                let x = CycloNumber::root_of_unity(p, e);
                assert_eq!(x.conj().conj(), x);
                assert!(x.mul(&x.conj()).is_one());
            }
        }
    }

    #[test]
    fn rational_inverse() {
        let two = CycloNumber::from_int(5, 2);
        let half = two.invert().unwrap();
        assert_eq!(
            half.as_rational(),
            Some(BigRational::new(BigInt::from(1), BigInt::from(2)))
        );
        assert!(CycloNumber::zero(5).invert().is_err());
    }

    #[test]
    fn root_sum_vanishes() {
        for p in [3u64, 5, 7, 11] {
            let mut s = CycloNumber::zero(p);
            for e in 0..p as i64 {
                s = s.add(&CycloNumber::root_of_unity(p, e));
            }
            assert!(s.is_zero());
        }
    }

    #[test]
    fn display_forms() {
        let x = zeta(3).scale(&BigRational::new(BigInt::from(-1), BigInt::from(3)));
        assert_eq!(x.to_string(), "-1/3*z");
        assert_eq!(CycloNumber::zero(3).to_string(), "0");
        let y = CycloNumber::from_int(5, 2).add(&CycloNumber::root_of_unity(5, 2));
        assert_eq!(y.to_string(), "2 + z^2");
    }

    proptest::proptest! {
        #[test]
        fn mul_is_commutative_and_conj_multiplicative(
            ac in proptest::collection::vec(-20i64..20, 4),
            bc in proptest::collection::vec(-20i64..20, 4),
        ) {
            let p = 5u64;
            let mk = |v: &Vec<i64>| {
                let mut x = CycloNumber::zero(p);
                for (i, &n) in v.iter().enumerate() {
                    x = x.add(&CycloNumber::root_of_unity(p, i as i64).scale(&big(n)));
                }
                x
            };
            let a = mk(&ac);
            let b = mk(&bc);
            proptest::prop_assert_eq!(a.mul(&b), b.mul(&a));
            proptest::prop_assert_eq!(a.mul(&b).conj(), a.conj().mul(&b.conj()));
        }

        #[test]
        fn invert_is_exact_inverse(ac in proptest::collection::vec(-9i64..9, 6)) {
            let p = 7u64;
            let mut a = CycloNumber::zero(p);
            for (i, &n) in ac.iter().enumerate() {
                a = a.add(&CycloNumber::root_of_unity(p, i as i64).scale(&big(n)));
            }
            if !a.is_zero() {
                let inv = a.invert().unwrap();
                proptest::prop_assert!(a.mul(&inv).is_one());
            }
        }

        #[test]
        fn to_complex_is_multiplicative(
            ac in proptest::collection::vec(-1000i64..1000, 2),
            bc in proptest::collection::vec(-1000i64..1000, 2),
        ) {
            let p = 3u64;
            let mk = |v: &Vec<i64>| {
                let mut x = CycloNumber::zero(p);
                for (i, &n) in v.iter().enumerate() {
                    x = x.add(&CycloNumber::root_of_unity(p, i as i64).scale(&big(n)));
                }
                x
            };
            let a = mk(&ac);
            let b = mk(&bc);
            let lhs = a.mul(&b).to_complex();
            let rhs = a.to_complex() * b.to_complex();
            let scale = 1.0_f64.max(lhs.norm()).max(rhs.norm());
            proptest::prop_assert!((lhs - rhs).norm() / scale < 1e-12);
        }
    }
}
