//! Character tables of small finite groups by the class-matrix (Burnside)
//! method: the simultaneous eigenvectors of the class-sum multiplication
//! matrices are the central characters; degrees follow from the first
//! orthogonality relation.
//!
//! The table is computed over complex floats and validated against both
//! orthogonality relations at 1e-9. A random linear combination of class
//! matrices separates the eigenspaces; degenerate draws are retried with
//! fresh coefficients.

use ndarray::{Array1, Array2};
use ndarray_linalg::Eig;
use num::complex::Complex64;
use rand::Rng;

use crate::error::{Error, Result};

pub const ORTHOGONALITY_TOL: f64 = 1e-9;
const EIG_SEPARATION_TOL: f64 = 1e-8;
pub const MAX_EIG_ATTEMPTS: usize = 10;

/// A finite group given by its full multiplication table.
pub struct SmallGroup {
    order: usize,
    mul: Vec<u32>,
    inv: Vec<u32>,
    identity: u32,
}

impl SmallGroup {
    /// Accepts a multiplication table (row i, column j holds i*j), locates
    /// the identity and checks that every element has a two-sided inverse.
    /// Associativity is the caller's obligation; for groups of maps under
    /// composition it holds by construction.
    pub fn from_mul_table(order: usize, mul: Vec<u32>) -> Result<SmallGroup> {
        assert_eq!(mul.len(), order * order);
        let identity = (0..order as u32)
            .find(|&e| {
                (0..order as u32).all(|x| {
                    mul[e as usize * order + x as usize] == x && mul[x as usize * order + e as usize] == x
                })
            })
            .ok_or_else(|| Error::DatumAxiom("multiplication table has no identity".into()))?;
        let mut inv = vec![u32::MAX; order];
        for x in 0..order as u32 {
            let found = (0..order as u32).find(|&y| {
                mul[x as usize * order + y as usize] == identity
                    && mul[y as usize * order + x as usize] == identity
            });
            match found {
                Some(y) => inv[x as usize] = y,
                None => {
                    return Err(Error::DatumAxiom(format!("element {x} has no two-sided inverse")));
                }
            }
        }
        Ok(SmallGroup { order, mul, inv, identity })
    }

    pub fn trivial() -> SmallGroup {
        SmallGroup { order: 1, mul: vec![0], inv: vec![0], identity: 0 }
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn identity(&self) -> u32 {
        self.identity
    }

    pub fn mul(&self, x: u32, y: u32) -> u32 {
        self.mul[x as usize * self.order + y as usize]
    }

    pub fn inv(&self, x: u32) -> u32 {
        self.inv[x as usize]
    }

    /// Conjugacy classes, each sorted, listed by minimal member, with the
    /// identity class first.
    pub fn conjugacy_classes(&self) -> Vec<Vec<u32>> {
        let mut assigned = vec![false; self.order];
        let mut classes = vec![];
        // identity first
        let mut seeds: Vec<u32> = vec![self.identity];
        seeds.extend((0..self.order as u32).filter(|&x| x != self.identity));
        for seed in seeds {
            if assigned[seed as usize] {
                continue;
            }
            let mut class: Vec<u32> = (0..self.order as u32)
                .map(|g| self.mul(self.mul(g, seed), self.inv(g)))
                .collect();
            class.sort_unstable();
            class.dedup();
            for &x in &class {
                assigned[x as usize] = true;
            }
            classes.push(class);
        }
        classes
    }
}

/// Irreducible characters as complex-valued class functions, with degrees.
pub struct CharacterTable {
    pub classes: Vec<Vec<u32>>,
    /// element -> class index
    pub class_of: Vec<u32>,
    pub degrees: Vec<u32>,
    /// values[irrep][class]
    pub values: Vec<Vec<Complex64>>,
}

impl CharacterTable {
    pub fn num_classes(&self) -> usize {
        self.classes.len()
    }

    pub fn value_at_element(&self, irrep: usize, element: u32) -> Complex64 {
        self.values[irrep][self.class_of[element as usize] as usize]
    }
}

/// Computes the character table. The class matrices are exact integer
/// matrices; only the eigensolve and the final character values are floats,
/// and the result is accepted only if both orthogonality relations hold
/// within 1e-9 and the degrees reproduce |G| exactly.
pub fn character_table(group: &SmallGroup, rng: &mut impl Rng) -> Result<CharacterTable> {
    let order = group.order();
    let classes = group.conjugacy_classes();
    let k = classes.len();
    let mut class_of = vec![0u32; order];
    for (ci, class) in classes.iter().enumerate() {
        for &x in class {
            class_of[x as usize] = ci as u32;
        }
    }

    // a_ijl = #{x in C_i : x^{-1} z_l in C_j} for a fixed z_l in C_l;
    // then (M_i)_{j,l} = a_ijl and the central characters are the common
    // eigenvectors: M_i w = w_i w
    let mut class_matrices = vec![Array2::<f64>::zeros((k, k)); k];
    for (l, class_l) in classes.iter().enumerate() {
        let z = class_l[0];
        for i in 0..k {
            for &x in &classes[i] {
                let j = class_of[group.mul(group.inv(x), z) as usize] as usize;
                class_matrices[i][[j, l]] += 1.0;
            }
        }
    }

    let mut last_err = Error::EigenDegenerate(MAX_EIG_ATTEMPTS);
    for _attempt in 0..MAX_EIG_ATTEMPTS {
        let coeffs: Vec<f64> = (0..k).map(|_| rng.gen_range(-1.0..1.0)).collect();
        let mut combo = Array2::<Complex64>::zeros((k, k));
        for (i, m) in class_matrices.iter().enumerate() {
            for j in 0..k {
                for l in 0..k {
                    combo[[j, l]] += Complex64::new(coeffs[i] * m[[j, l]], 0.0);
                }
            }
        }
        let (eigvals, eigvecs) = combo
            .eig()
            .map_err(|e| Error::Linalg(format!("eigensolver: {e}")))?;
        // require well-separated eigenvalues so each eigenvector is a
        // simultaneous eigenvector of every class matrix
        let scale = eigvals.iter().map(|z| z.norm()).fold(1.0f64, f64::max);
        let mut separated = true;
        for i in 0..k {
            for j in (i + 1)..k {
                if (eigvals[i] - eigvals[j]).norm() < EIG_SEPARATION_TOL * scale {
                    separated = false;
                }
            }
        }
        if !separated {
            last_err = Error::EigenDegenerate(MAX_EIG_ATTEMPTS);
            continue;
        }

        match extract_characters(group, &classes, &class_of, &eigvecs) {
            Ok(table) => return Ok(table),
            Err(e) => last_err = e,
        }
    }
    Err(last_err)
}

fn extract_characters(
    group: &SmallGroup,
    classes: &[Vec<u32>],
    class_of: &[u32],
    eigvecs: &Array2<Complex64>,
) -> Result<CharacterTable> {
    let order = group.order();
    let k = classes.len();
    let id_class = class_of[group.identity() as usize] as usize;

    let mut rows: Vec<(u32, Vec<Complex64>)> = vec![];
    for v in 0..k {
        let col: Array1<Complex64> = eigvecs.column(v).to_owned();
        let pivot = col[id_class];
        if pivot.norm() < 1e-12 {
            return Err(Error::EigenDegenerate(1));
        }
        // central character omega, normalized at the identity class
        let omega: Vec<Complex64> = col.iter().map(|z| z / pivot).collect();
        // degree from sum_i |C_i| |chi_i|^2 = |G| with chi_i = d omega_i / |C_i|
        let s: f64 = (0..k)
            .map(|i| omega[i].norm_sqr() / classes[i].len() as f64)
            .sum();
        let d = (order as f64 / s).sqrt();
        let degree = d.round();
        if (d - degree).abs() > 1e-6 || degree < 1.0 {
            return Err(Error::EigenDegenerate(1));
        }
        let chi: Vec<Complex64> = (0..k)
            .map(|i| omega[i] * Complex64::new(degree / classes[i].len() as f64, 0.0))
            .collect();
        rows.push((degree as u32, chi));
    }

    // deterministic row order: by degree, then by value tuples
    rows.sort_by(|a, b| {
        a.0.cmp(&b.0).then_with(|| {
            for (x, y) in a.1.iter().zip(&b.1) {
                let quant = |v: f64| (v * 1e6).round();
                let ordq = quant(x.re)
                    .partial_cmp(&quant(y.re))
                    .unwrap()
                    .then(quant(x.im).partial_cmp(&quant(y.im)).unwrap());
                if ordq != std::cmp::Ordering::Equal {
                    return ordq;
                }
            }
            std::cmp::Ordering::Equal
        })
    });

    let degrees: Vec<u32> = rows.iter().map(|(d, _)| *d).collect();
    let values: Vec<Vec<Complex64>> = rows.into_iter().map(|(_, v)| v).collect();

    // completeness: sum of squared degrees must be exactly |G|
    let degree_sum: u64 = degrees.iter().map(|&d| (d as u64) * (d as u64)).sum();
    if degree_sum != order as u64 {
        return Err(Error::EigenDegenerate(1));
    }

    // first orthogonality: <chi_a, chi_b> = delta_ab
    for a in 0..k {
        for b in 0..k {
            let mut acc = Complex64::new(0.0, 0.0);
            for i in 0..k {
                acc += Complex64::new(classes[i].len() as f64, 0.0) * values[a][i] * values[b][i].conj();
            }
            acc /= order as f64;
            let expected = if a == b { 1.0 } else { 0.0 };
            if (acc - expected).norm() > ORTHOGONALITY_TOL {
                return Err(Error::EigenDegenerate(1));
            }
        }
    }
    // second orthogonality: sum_chi chi(g_i) conj(chi(g_j)) = delta_ij |G| / |C_i|
    for i in 0..k {
        for j in 0..k {
            let mut acc = Complex64::new(0.0, 0.0);
            for a in 0..k {
                acc += values[a][i] * values[a][j].conj();
            }
            let expected = if i == j { order as f64 / classes[i].len() as f64 } else { 0.0 };
            if (acc - expected).norm() > ORTHOGONALITY_TOL * (order as f64) {
                return Err(Error::EigenDegenerate(1));
            }
        }
    }

    Ok(CharacterTable {
        classes: classes.to_vec(),
        class_of: class_of.to_vec(),
        degrees,
        values,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn cyclic(n: usize) -> SmallGroup {
        let mul: Vec<u32> = (0..n)
            .flat_map(|i| (0..n).map(move |j| ((i + j) % n) as u32))
            .collect();
        SmallGroup::from_mul_table(n, mul).unwrap()
    }

    /// Dihedral group of order 2n: elements 0..n rotations, n..2n reflections.
    fn dihedral(n: usize) -> SmallGroup {
        let order = 2 * n;
        let mut mul = vec![0u32; order * order];
        for i in 0..order {
            for j in 0..order {
                let (ri, fi) = (i % n, i >= n);
                let (rj, fj) = (j % n, j >= n);
                let (r, f) = if !fi {
                    ((ri + rj) % n, fj)
                } else {
                    ((ri + n - rj) % n, !fj)
                };
                mul[i * order + j] = (r + if f { n } else { 0 }) as u32;
            }
        }
        SmallGroup::from_mul_table(order, mul).unwrap()
    }

    #[test]
    fn two_element_group() {
        let g = cyclic(2);
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let t = character_table(&g, &mut rng).unwrap();
        assert_eq!(t.degrees, vec![1, 1]);
        assert_eq!(t.num_classes(), 2);
        // trivial and sign characters: values at the non-identity class are
        // +1 and -1, one each
        assert!((t.values[0][1].re - 1.0).abs() < 1e-9 || (t.values[0][1].re + 1.0).abs() < 1e-9);
        let prod: f64 = t.values.iter().map(|r| r[1].re).product();
        assert!((prod + 1.0).abs() < 1e-9, "one trivial, one sign");
    }

    #[test]
    fn cyclic_six_has_six_linear_characters() {
        let g = cyclic(6);
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let t = character_table(&g, &mut rng).unwrap();
        assert_eq!(t.degrees, vec![1; 6]);
        // each character is a power of a sixth root of unity on a generator
        for row in &t.values {
            for v in row {
                assert!((v.norm() - 1.0).abs() < 1e-9);
                let sixth = v.powu(6);
                assert!((sixth - Complex64::new(1.0, 0.0)).norm() < 1e-7);
            }
        }
    }

    #[test]
    fn dihedral_eight_degrees() {
        let g = dihedral(4); // order 8
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let t = character_table(&g, &mut rng).unwrap();
        assert_eq!(t.degrees, vec![1, 1, 1, 1, 2]);
        let sum: u64 = t.degrees.iter().map(|&d| d as u64 * d as u64).sum();
        assert_eq!(sum, 8);
    }

    #[test]
    fn symmetric_three_via_dihedral() {
        let g = dihedral(3); // S_3
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let t = character_table(&g, &mut rng).unwrap();
        assert_eq!(t.degrees, vec![1, 1, 2]);
    }

    #[test]
    fn trivial_group() {
        let g = SmallGroup::trivial();
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let t = character_table(&g, &mut rng).unwrap();
        assert_eq!(t.degrees, vec![1]);
        assert_eq!(t.values[0][0], Complex64::new(1.0, 0.0));
    }

    #[test]
    fn rejects_non_group_table() {
        // a table without identity
        let mul = vec![1u32, 1, 1, 1];
        assert!(SmallGroup::from_mul_table(2, mul).is_err());
    }
}
