//! The intertwiner group U(gamma, chi) of a datum and the first
//! decomposition of L^2(M) into its isotypic components.
//!
//! U(gamma, chi) consists of the A-linear automorphisms of M preserving
//! gamma and chi; each member acts on the Dirac basis as a permutation,
//! the action commutes with every Weil operator (checked exactly on the
//! generators), and the isotypic projectors built from the character table
//! of the group split L^2(M) into rho-invariant blocks. Projector ranks and
//! invariance are the float side of the pipeline; commutation and the
//! membership filters stay exact.

use ndarray::Array2;
use ndarray_linalg::SVD;
use num::complex::Complex64;
use serde::Serialize;

use crate::chartab::{CharacterTable, SmallGroup};
use crate::datum::{AxiomCheck, WeilDatum};
use crate::error::{Error, Result};
use crate::fq::Felt;
use crate::rep::{WeilOperator, WeilRepresentation};
use crate::rmodule::{MId, ModuleM};

pub const RANK_THRESHOLD: f64 = 1e-6;
pub const PROJECTOR_TOL: f64 = 1e-8;
pub const INVARIANCE_TOL: f64 = 1e-8;
pub const DEFAULT_INTERTWINER_BUDGET: u64 = 10_000;

/// Base-field basis of End_A(M) = {F : R_a F = F R_a for all a}, computed
/// by solving the commutant system against the ring-basis action matrices.
/// Matrices act on row vectors, stored row-major dim x dim.
pub fn a_linear_endomorphism_basis(module: &ModuleM) -> Vec<Vec<Felt>> {
    let ring = module.ring();
    let field = ring.field();
    let d = module.dim();
    let vars = d * d;
    // rows of the homogeneous system over k
    let mut rows: Vec<Vec<Felt>> = vec![];
    for basis_idx in 0..ring.dim() {
        let mut e = ring.zero();
        e.coords[basis_idx] = 1;
        let r = module.action_matrix(ring.id_of(&e).expect("enumerated"));
        // (R F - F R)_{ij} = sum_k R_ik F_kj - F_ik R_kj = 0
        for i in 0..d {
            for j in 0..d {
                let mut row = vec![field.zero(); vars];
                for k in 0..d {
                    row[k * d + j] = field.add(row[k * d + j], r[i * d + k]);
                    row[i * d + k] = field.sub(row[i * d + k], r[k * d + j]);
                }
                rows.push(row);
            }
        }
    }
    null_space(field, &rows, vars)
        .into_iter()
        .map(|v| v.into_iter().collect())
        .collect()
}

/// Null space of a homogeneous system over the base field, by Gaussian
/// elimination; basis vectors come out in a deterministic order.
fn null_space(field: &crate::fq::FqField, rows: &[Vec<Felt>], vars: usize) -> Vec<Vec<Felt>> {
    let mut mat: Vec<Vec<Felt>> = rows.to_vec();
    let mut pivots: Vec<usize> = vec![];
    let mut rank = 0usize;
    for col in 0..vars {
        let Some(pr) = (rank..mat.len()).find(|&r| mat[r][col] != field.zero()) else {
            continue;
        };
        mat.swap(rank, pr);
        let pinv = field.inv(mat[rank][col]).unwrap();
        for c in 0..vars {
            mat[rank][c] = field.mul(mat[rank][c], pinv);
        }
        for r in 0..mat.len() {
            if r != rank && mat[r][col] != field.zero() {
                let f = mat[r][col];
                for c in 0..vars {
                    let s = field.mul(f, mat[rank][c]);
                    mat[r][c] = field.sub(mat[r][c], s);
                }
            }
        }
        pivots.push(col);
        rank += 1;
        if rank == mat.len() {
            break;
        }
    }
    let free: Vec<usize> = (0..vars).filter(|c| !pivots.contains(c)).collect();
    let mut basis = vec![];
    for &fc in &free {
        let mut v = vec![field.zero(); vars];
        v[fc] = field.one();
        for (prow, &pcol) in pivots.iter().enumerate() {
            v[pcol] = field.neg(mat[prow][fc]);
        }
        basis.push(v);
    }
    basis
}

/// An A-linear automorphism of M, as a base-field matrix and the induced
/// permutation of module elements.
#[derive(Debug, Clone, Serialize)]
pub struct Intertwiner {
    pub mat: Vec<u32>,
    pub perm: Vec<u32>,
}

/// U(gamma, chi) with its composition table.
pub struct IntertwinerGroup {
    pub members: Vec<Intertwiner>,
    group: SmallGroup,
}

impl IntertwinerGroup {
    pub fn order(&self) -> usize {
        self.members.len()
    }

    pub fn small_group(&self) -> &SmallGroup {
        &self.group
    }

    /// The trivial group on a module of the given size.
    pub fn trivial(msize: usize) -> IntertwinerGroup {
        IntertwinerGroup {
            members: vec![Intertwiner { mat: vec![], perm: (0..msize as u32).collect() }],
            group: SmallGroup::trivial(),
        }
    }

    /// The permutation operator L(phi): e_y -> e_{phi(y)}, exact.
    pub fn permutation_operator(&self, member: usize, p: u64) -> WeilOperator {
        WeilOperator::permutation(p, &self.members[member].perm)
    }

    /// L(phi) over complex floats.
    pub fn permutation_matrix_complex(&self, member: usize) -> Array2<Complex64> {
        let perm = &self.members[member].perm;
        let n = perm.len();
        let mut m = Array2::zeros((n, n));
        for y in 0..n {
            m[[perm[y] as usize, y]] = Complex64::new(1.0, 0.0);
        }
        m
    }
}

/// Outcome of the intertwiner scan: the group itself plus the two filtered
/// sets whose equality is the content of the remark implication
/// (gamma-preservation already forces chi-preservation once an invertible
/// symmetric element exists).
pub struct IntertwinerScan {
    pub group: IntertwinerGroup,
    /// permutations of invertible A-linear maps preserving gamma
    pub gamma_preserving: Vec<Vec<u32>>,
    /// permutations preserving both gamma and chi (= the group members)
    pub both_preserving: Vec<Vec<u32>>,
    /// no invertible eps-symmetric element exists (the peculiar case where
    /// condition (2) is genuinely needed)
    pub implication_vacuous: bool,
}

impl IntertwinerScan {
    /// Whether gamma-preservation implies chi-preservation on this datum;
    /// None in the vacuous case.
    pub fn implication_holds(&self) -> Option<bool> {
        if self.implication_vacuous {
            None
        } else {
            Some(self.gamma_preserving == self.both_preserving)
        }
    }
}

/// Enumerates U(gamma, chi): all invertible elements of End_A(M) that
/// preserve gamma, with chi-preservation checked independently rather than
/// assumed from the remark implication.
pub fn enumerate_intertwiners(datum: &WeilDatum, budget: u64) -> Result<IntertwinerScan> {
    let module = datum.module();
    let ring = datum.ring();
    let field = ring.field();
    let d = module.dim();
    let msize = module.size() as usize;
    let basis = a_linear_endomorphism_basis(module);
    let count = field.size()
        .checked_pow(basis.len() as u32)
        .filter(|&c| c <= budget)
        .ok_or(Error::BudgetExceeded { size: u64::MAX, budget })?;

    let mut gamma_preserving: Vec<Vec<u32>> = vec![];
    let mut members: Vec<Intertwiner> = vec![];
    let sym = datum.sym_elements().to_vec();
    for idx in 0..count {
        // coefficients of the candidate in the endomorphism basis
        let mut rest = idx;
        let mut mat = vec![field.zero(); d * d];
        for b in &basis {
            let lambda = Felt((rest % field.size()) as u32);
            rest /= field.size();
            if lambda == field.zero() {
                continue;
            }
            for (m, &bv) in mat.iter_mut().zip(b) {
                *m = field.add(*m, field.mul(lambda, bv));
            }
        }
        // the induced map on module points; invertible iff a permutation
        let mut perm = vec![0u32; msize];
        let mut seen = vec![false; msize];
        let mut bijective = true;
        for x in 0..msize as u32 {
            let xc = module.coords(MId(x));
            let mut img = vec![field.zero(); d];
            for j in 0..d {
                for i in 0..d {
                    img[j] = field.add(img[j], field.mul(Felt(xc[i]), mat[i * d + j]));
                }
            }
            let y = module.id_of_coords(&img.iter().map(|f| f.0).collect::<Vec<_>>()).0;
            perm[x as usize] = y;
            if seen[y as usize] {
                bijective = false;
                break;
            }
            seen[y as usize] = true;
        }
        if !bijective {
            continue;
        }
        let preserves_gamma = sym.iter().all(|&b| {
            (0..msize as u32).all(|x| {
                datum.gamma(b, MId(perm[x as usize])).unwrap() == datum.gamma(b, MId(x)).unwrap()
            })
        });
        if !preserves_gamma {
            continue;
        }
        gamma_preserving.push(perm.clone());
        let preserves_chi = (0..msize as u32).all(|x| {
            (0..msize as u32).all(|y| {
                datum.chi(MId(perm[x as usize]), MId(perm[y as usize])) == datum.chi(MId(x), MId(y))
            })
        });
        if preserves_chi {
            members.push(Intertwiner { mat: mat.iter().map(|f| f.0).collect(), perm });
        }
    }

    // composition table; closure and inverses are verified by construction
    // of the SmallGroup
    let index: std::collections::HashMap<Vec<u32>, u32> = members
        .iter()
        .enumerate()
        .map(|(i, m)| (m.perm.clone(), i as u32))
        .collect();
    let n = members.len();
    let mut mul = vec![0u32; n * n];
    for (i, a) in members.iter().enumerate() {
        for (j, b) in members.iter().enumerate() {
            // (a . b)(x) = a(b(x))
            let composed: Vec<u32> = (0..msize).map(|x| a.perm[b.perm[x] as usize]).collect();
            let Some(&cid) = index.get(&composed) else {
                return Err(Error::DatumAxiom(
                    "intertwiner set is not closed under composition".into(),
                ));
            };
            mul[i * n + j] = cid;
        }
    }
    let group = SmallGroup::from_mul_table(n, mul)?;
    let both_preserving: Vec<Vec<u32>> = members.iter().map(|m| m.perm.clone()).collect();
    let implication_vacuous = !sym.iter().any(|&s| ring.is_unit_id(s));
    Ok(IntertwinerScan {
        group: IntertwinerGroup { members, group },
        gamma_preserving,
        both_preserving,
        implication_vacuous,
    })
}

/// L(phi) rho(g) = rho(g) L(phi), exactly, for every member and every
/// generator operator; by word extension this covers all of G.
pub fn verify_commuting_action(rep: &WeilRepresentation, gamma: &IntertwinerGroup) -> AxiomCheck {
    let mut check = AxiomCheck::new("intertwiners_commute_with_rho");
    let p = rep.datum().cyclotomic_order();
    for (mi, _) in gamma.members.iter().enumerate() {
        let l = gamma.permutation_operator(mi, p);
        for (tok, op) in rep.generator_ops() {
            let lhs = l.mul(op);
            let rhs = op.mul(&l);
            check.record_with(lhs.op_eq(&rhs), || {
                format!("member {mi}, generator {}", tok.format(rep.group().ring()))
            });
        }
    }
    check
}

#[derive(Debug, Clone, Serialize)]
pub struct ComponentReport {
    pub pi_index: usize,
    pub pi_degree: u32,
    pub rank: usize,
    pub multiplicity_dim: usize,
    pub rank_ambiguous: bool,
    pub invariant: bool,
    pub max_invariance_residual: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct DecompositionReport {
    pub gamma_order: usize,
    pub num_irreducibles: usize,
    pub m_size: usize,
    pub components: Vec<ComponentReport>,
    pub rank_sum: usize,
    pub rank_sum_matches: bool,
    pub max_idempotence_residual: f64,
    pub max_orthogonality_residual: f64,
    pub multiplicities_integral: bool,
}

impl DecompositionReport {
    pub fn all_passed(&self) -> bool {
        self.rank_sum_matches
            && self.multiplicities_integral
            && self.max_idempotence_residual <= PROJECTOR_TOL
            && self.max_orthogonality_residual <= PROJECTOR_TOL
            && self.components.iter().all(|c| c.invariant && !c.rank_ambiguous)
    }
}

fn frobenius(a: &Array2<Complex64>) -> f64 {
    a.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

/// Builds the isotypic projectors P_pi = (dim pi / |Gamma|)
/// sum_phi conj(chi_pi(phi)) L(phi), reports their ranks (singular values
/// above 1e-6, with ambiguity surfaced rather than resolved), verifies
/// idempotence and mutual orthogonality within 1e-8, that the ranks sum to
/// |M|, and that every image is invariant under each generator operator
/// within 1e-8.
pub fn isotypic_decomposition(
    rep: &WeilRepresentation,
    gamma: &IntertwinerGroup,
    table: &CharacterTable,
) -> Result<DecompositionReport> {
    let msize = rep.dim();
    let order = gamma.order();
    let k = table.values.len();
    let ls: Vec<Array2<Complex64>> = (0..order).map(|m| gamma.permutation_matrix_complex(m)).collect();
    let gen_complex: Vec<Array2<Complex64>> = rep
        .generator_ops()
        .iter()
        .map(|(_, op)| op.to_complex())
        .collect();
    let eye = Array2::<Complex64>::eye(msize);

    let mut projectors = vec![];
    for pi in 0..k {
        let mut p = Array2::<Complex64>::zeros((msize, msize));
        for (m, l) in ls.iter().enumerate() {
            let chi = table.value_at_element(pi, m as u32).conj();
            p = p + l.mapv(|v| v * chi);
        }
        let scale = Complex64::new(table.degrees[pi] as f64 / order as f64, 0.0);
        projectors.push(p.mapv(|v| v * scale));
    }

    let mut components = vec![];
    let mut rank_sum = 0usize;
    let mut max_idem = 0.0f64;
    let mut max_orth = 0.0f64;
    let mut mult_ok = true;
    for (pi, p) in projectors.iter().enumerate() {
        let (_, svals, _) = p
            .svd(false, false)
            .map_err(|e| Error::Linalg(format!("svd: {e}")))?;
        let rank = svals.iter().filter(|&&s| s > RANK_THRESHOLD).count();
        // ambiguity: a singular value within a decade of the threshold
        let rank_ambiguous = svals
            .iter()
            .any(|&s| s > RANK_THRESHOLD / 10.0 && s < RANK_THRESHOLD * 10.0);
        rank_sum += rank;

        let idem = frobenius(&(p.dot(p) - p));
        max_idem = max_idem.max(idem);

        let mut invariant = true;
        let mut max_res = 0.0f64;
        for g in &gen_complex {
            let res = frobenius(&(&eye - p).dot(&g.dot(p)));
            max_res = max_res.max(res);
            if res > INVARIANCE_TOL {
                invariant = false;
            }
        }

        let degree = table.degrees[pi] as usize;
        let multiplicity_dim = rank / degree;
        if multiplicity_dim * degree != rank {
            mult_ok = false;
        }
        components.push(ComponentReport {
            pi_index: pi,
            pi_degree: table.degrees[pi],
            rank,
            multiplicity_dim,
            rank_ambiguous,
            invariant,
            max_invariance_residual: max_res,
        });
    }
    for a in 0..k {
        for b in 0..k {
            if a == b {
                continue;
            }
            let res = frobenius(&projectors[a].dot(&projectors[b]));
            max_orth = max_orth.max(res);
        }
    }

    Ok(DecompositionReport {
        gamma_order: order,
        num_irreducibles: k,
        m_size: msize,
        rank_sum,
        rank_sum_matches: rank_sum == msize,
        components,
        max_idempotence_residual: max_idem,
        max_orthogonality_residual: max_orth,
        multiplicities_integral: mult_ok,
    })
}
