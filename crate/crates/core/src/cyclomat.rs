//! Dense matrices over Q(zeta_p), with the conjugate-transpose adjoint.

use ndarray::Array2;
use num::complex::Complex64;
use num::BigRational;

use crate::cyclo::CycloNumber;
use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CycloMatrix {
    p: u64,
    rows: usize,
    cols: usize,
    /// row-major
    data: Vec<CycloNumber>,
}

impl CycloMatrix {
    pub fn zero(p: u64, rows: usize, cols: usize) -> Self {
        CycloMatrix {
            p,
            rows,
            cols,
            data: vec![CycloNumber::zero(p); rows * cols],
        }
    }

    pub fn identity(p: u64, n: usize) -> Self {
        let mut m = Self::zero(p, n, n);
        for i in 0..n {
            m.set(i, i, CycloNumber::one(p));
        }
        m
    }

    pub fn from_fn(p: u64, rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> CycloNumber) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for r in 0..rows {
            for c in 0..cols {
                data.push(f(r, c));
            }
        }
        CycloMatrix { p, rows, cols, data }
    }

    pub fn order(&self) -> u64 {
        self.p
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, r: usize, c: usize) -> &CycloNumber {
        &self.data[r * self.cols + c]
    }

    pub fn set(&mut self, r: usize, c: usize, v: CycloNumber) {
        self.data[r * self.cols + c] = v;
    }

    pub fn mul(&self, other: &Self) -> Result<Self> {
        if self.cols != other.rows {
            return Err(Error::DimensionMismatch(format!(
                "{}x{} * {}x{}",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        let mut out = Self::zero(self.p, self.rows, other.cols);
        for r in 0..self.rows {
            for k in 0..self.cols {
                let a = self.get(r, k);
                if a.is_zero() {
                    continue;
                }
                for c in 0..other.cols {
                    let b = other.get(k, c);
                    if b.is_zero() {
                        continue;
                    }
                    let cur = out.get(r, c).add(&a.mul(b));
                    out.set(r, c, cur);
                }
            }
        }
        Ok(out)
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        if self.rows != other.rows || self.cols != other.cols {
            return Err(Error::DimensionMismatch(format!(
                "{}x{} + {}x{}",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        let data = self.data.iter().zip(&other.data).map(|(a, b)| a.add(b)).collect();
        Ok(CycloMatrix { p: self.p, rows: self.rows, cols: self.cols, data })
    }

    pub fn scalar_mul(&self, s: &CycloNumber) -> Self {
        CycloMatrix {
            p: self.p,
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|a| a.mul(s)).collect(),
        }
    }

    pub fn scale_rational(&self, r: &BigRational) -> Self {
        CycloMatrix {
            p: self.p,
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|a| a.scale(r)).collect(),
        }
    }

    /// Conjugate transpose.
    pub fn adjoint(&self) -> Self {
        Self::from_fn(self.p, self.cols, self.rows, |r, c| self.get(c, r).conj())
    }

    pub fn trace(&self) -> Result<CycloNumber> {
        if self.rows != self.cols {
            return Err(Error::DimensionMismatch(format!("trace of {}x{}", self.rows, self.cols)));
        }
        let mut t = CycloNumber::zero(self.p);
        for i in 0..self.rows {
            t = t.add(self.get(i, i));
        }
        Ok(t)
    }

    pub fn is_identity(&self) -> bool {
        self.rows == self.cols
            && (0..self.rows).all(|r| {
                (0..self.cols).all(|c| {
                    let e = self.get(r, c);
                    if r == c {
                        e.is_one()
                    } else {
                        e.is_zero()
                    }
                })
            })
    }

    /// Float image for the decomposition path and reports.
    pub fn to_complex(&self) -> Array2<Complex64> {
        Array2::from_shape_fn((self.rows, self.cols), |(r, c)| self.get(r, c).to_complex())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn diag(p: u64, entries: &[CycloNumber]) -> CycloMatrix {
        let n = entries.len();
        let mut m = CycloMatrix::zero(p, n, n);
        for (i, e) in entries.iter().enumerate() {
            m.set(i, i, e.clone());
        }
        m
    }

    #[test]
    fn identity_is_neutral() {
        let z = CycloNumber::root_of_unity(3, 1);
        let m = CycloMatrix::from_fn(3, 3, 3, |r, c| z.pow((r + 2 * c) as u32));
        let id = CycloMatrix::identity(3, 3);
        assert_eq!(id.mul(&m).unwrap(), m);
        assert_eq!(m.mul(&id).unwrap(), m);
    }

    #[test]
    fn adjoint_conjugates_diagonals() {
        let z1 = CycloNumber::root_of_unity(3, 1);
        let z2 = CycloNumber::root_of_unity(3, 2);
        let m = diag(3, &[z1.clone(), z2.clone()]);
        assert_eq!(m.adjoint(), diag(3, &[z2, z1]));
        assert_eq!(m.adjoint().adjoint(), m);
    }

    #[test]
    fn trace_of_identity() {
        for n in 1..5usize {
            let id = CycloMatrix::identity(5, n);
            assert_eq!(id.trace().unwrap(), CycloNumber::from_int(5, n as i64));
        }
        assert!(CycloMatrix::zero(5, 2, 3).trace().is_err());
    }

    #[test]
    fn dimension_mismatch_is_an_error() {
        let a = CycloMatrix::zero(3, 2, 3);
        let b = CycloMatrix::zero(3, 2, 3);
        assert!(a.mul(&b).is_err());
    }

    proptest::proptest! {
        #[test]
        fn trace_commutes_and_adjoint_reverses(seed in 0u64..1000) {
            // pseudo-random small matrices over Q(zeta_5) from a counter
            let p = 5u64;
            let n = 3usize;
            let mk = |off: u64| {
                CycloMatrix::from_fn(p, n, n, |r, c| {
                    let e = (seed * 31 + off * 7 + (r * n + c) as u64 * 13) % 11;
                    if e >= 5 && e.is_multiple_of(3) {
                        CycloNumber::zero(p)
                    } else {
                        CycloNumber::root_of_unity(p, e as i64)
                    }
                })
            };
            let a = mk(1);
            let b = mk(2);
            let ab = a.mul(&b).unwrap();
            let ba = b.mul(&a).unwrap();
            proptest::prop_assert_eq!(ab.trace().unwrap(), ba.trace().unwrap());
            proptest::prop_assert_eq!(ab.adjoint(), b.adjoint().mul(&a.adjoint()).unwrap());
        }
    }
}
