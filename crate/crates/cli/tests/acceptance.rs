//! Acceptance suite: every criterion as its own test, printing one
//! pass/fail line (visible with --nocapture; the test verdicts themselves
//! mirror the lines). Exact checks are exact equalities in Q(zeta_p);
//! float tolerances are pinned constants in the decomposition criteria.

use std::sync::{Arc, OnceLock};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use starweil_core::datum::{gamma_chi_recovery_check, verify_datum};
use starweil_core::decomp::{self, DEFAULT_INTERTWINER_BUDGET};
use starweil_core::group::{enumerate, verify_presentation, StarGroup};
use starweil_core::rep::{WeilRepresentation, HOMOMORPHISM_EXHAUSTIVE_BOUND};
use starweil_core::{
    chartab, CycloNumber, ElemId, FqField, InvolutiveRing, Mat2, WeilDatum,
};

const SEED: u64 = 20_260_810;

fn field(q: u64) -> FqField {
    let (p, k) = match q {
        3 => (3, 1),
        5 => (5, 1),
        9 => (3, 2),
        _ => (q, 1),
    };
    FqField::new(p, k).unwrap()
}

struct Fixture {
    name: &'static str,
    ring: Arc<InvolutiveRing>,
    datum: Arc<WeilDatum>,
    group: Arc<StarGroup>,
    table: Arc<starweil_core::GroupTable>,
}

impl Fixture {
    fn rep(&self) -> WeilRepresentation {
        WeilRepresentation::new(
            self.datum.clone(),
            self.group.clone(),
            self.table.clone(),
            starweil_core::rep::DEFAULT_OPERATOR_CACHE_CAP,
        )
        .unwrap()
    }
}

/// The five data of criterion 4, shared across criteria.
fn fixtures() -> &'static Vec<Fixture> {
    static FIXTURES: OnceLock<Vec<Fixture>> = OnceLock::new();
    FIXTURES.get_or_init(|| {
        let mut out = vec![];
        let matrix_cases: [(&'static str, usize, usize, u64); 3] = [
            ("example1(n=1,m=1,q=5)", 1, 1, 5),
            ("example1(n=1,m=2,q=3)", 1, 2, 3),
            ("example1(n=2,m=1,q=3)", 2, 1, 3),
        ];
        for (name, n, m, q) in matrix_cases {
            let ring = Arc::new(InvolutiveRing::matrix(n, field(q)).unwrap());
            let datum = Arc::new(WeilDatum::matrix_ring(ring.clone(), m, None, None).unwrap());
            let group = Arc::new(StarGroup::new(ring.clone(), -1).unwrap());
            let table = Arc::new(enumerate(&group, 1_000_000).unwrap());
            out.push(Fixture { name, ring, datum, group, table });
        }
        let trunc_cases: [(&'static str, usize, u64); 2] =
            [("example2(m=1,q=3)", 1, 3), ("example2(m=3,q=3)", 3, 3)];
        for (name, m, q) in trunc_cases {
            let ring = Arc::new(InvolutiveRing::truncated_poly(m, field(q)).unwrap());
            let datum = Arc::new(WeilDatum::truncated_poly(ring.clone(), None).unwrap());
            let group = Arc::new(StarGroup::new(ring.clone(), -1).unwrap());
            let table = Arc::new(enumerate(&group, 1_000_000).unwrap());
            out.push(Fixture { name, ring, datum, group, table });
        }
        out
    })
}

fn criterion_rings() -> Vec<(&'static str, Arc<InvolutiveRing>)> {
    vec![
        ("M_1(F_3)", Arc::new(InvolutiveRing::matrix(1, field(3)).unwrap())),
        ("M_1(F_5)", Arc::new(InvolutiveRing::matrix(1, field(5)).unwrap())),
        ("A_3/F_3", Arc::new(InvolutiveRing::truncated_poly(3, field(3)).unwrap())),
    ]
}

/// Criterion 1: is_member_def <=> is_member_form over every 2x2 matrix of
/// M_1(F_3), M_1(F_5), A_3/F_3, for eps = +1 and -1. Exact, exhaustive.
#[test]
fn acceptance_01_membership_equivalence() {
    for (name, ring) in criterion_rings() {
        for eps in [-1i8, 1] {
            let group = StarGroup::new(ring.clone(), eps).unwrap();
            let n = ring.size() as u32;
            let mut disagreements = 0u64;
            for a in 0..n {
                for b in 0..n {
                    for c in 0..n {
                        for d in 0..n {
                            let g = Mat2 {
                                a: ElemId(a),
                                b: ElemId(b),
                                c: ElemId(c),
                                d: ElemId(d),
                            };
                            if group.is_member_def(&g) != group.is_member_form(&g) {
                                disagreements += 1;
                            }
                        }
                    }
                }
            }
            assert_eq!(disagreements, 0, "{name}, eps = {eps}: definitions disagree");
        }
    }
    println!("criterion 01 membership equivalence: pass");
}

/// Criterion 2: group orders 24, 120 (exhaustive membership oracles) and
/// 51840 for M_2(F_3) by BFS, cross-checked against the seeded membership
/// density of the 81^4 candidate space.
#[test]
fn acceptance_02_group_orders() {
    let expectations = [("M_1(F_3)", 24usize), ("M_1(F_5)", 120)];
    for ((name, ring), (_, expected)) in criterion_rings().into_iter().zip(expectations) {
        let group = StarGroup::new(ring, -1).unwrap();
        let table = enumerate(&group, 1_000_000).unwrap();
        assert_eq!(table.order(), expected, "{name} BFS order");
        let brute = group.brute_force_members().unwrap();
        assert_eq!(brute.len(), expected, "{name} brute-force order");
        for g in brute {
            table.id_of(&g).expect("oracle member missing from closure");
        }
    }

    let ring = Arc::new(InvolutiveRing::matrix(2, field(3)).unwrap());
    let group = StarGroup::new(ring.clone(), -1).unwrap();
    let table = enumerate(&group, 1_000_000).unwrap();
    assert_eq!(table.order(), 51840, "|Sp(4,3)|");
    // every BFS element is a member
    for id in 0..table.order() as u32 {
        assert!(group.is_member_def(&table.element(id)));
    }
    // seeded density cross-check over the 81^4 candidate space: the hit
    // count of a 10^6 sample must sit within 5 sigma of the BFS density
    let n = ring.size();
    let total = (n * n * n * n) as f64;
    let sample = 1_000_000u64;
    let mut rng = ChaCha8Rng::seed_from_u64(SEED);
    let mut hits = 0u64;
    for _ in 0..sample {
        let g = Mat2 {
            a: ElemId(rng.gen_range(0..n) as u32),
            b: ElemId(rng.gen_range(0..n) as u32),
            c: ElemId(rng.gen_range(0..n) as u32),
            d: ElemId(rng.gen_range(0..n) as u32),
        };
        if group.is_member_def(&g) {
            hits += 1;
        }
    }
    let p = 51840.0 / total;
    let expected = sample as f64 * p;
    let sigma = (sample as f64 * p * (1.0 - p)).sqrt();
    assert!(
        (hits as f64 - expected).abs() <= 5.0 * sigma,
        "density cross-check: {hits} hits vs expected {expected:.1} (sigma {sigma:.1})"
    );
    println!("criterion 02 group orders: pass (24, 120, 51840; density within 5 sigma)");
}

/// Criterion 3: the five universal relations hold as exact group identities
/// on every configuration of criterion 1, quantified over all units, all
/// symmetric elements, and all invertible symmetric t.
#[test]
fn acceptance_03_universal_relations() {
    for (name, ring) in criterion_rings() {
        for eps in [-1i8, 1] {
            let group = StarGroup::new(ring.clone(), eps).unwrap();
            let report = verify_presentation(&group, None).unwrap();
            assert!(report.all_passed(), "{name}, eps = {eps}: {report:?}");
        }
    }
    println!("criterion 03 universal relations: pass");
}

/// Criterion 4: the datum axioms pass exhaustively and exactly for all five
/// configurations, including the gamma-shift lemma, both sum formulations,
/// and their equivalence.
#[test]
fn acceptance_04_datum_axioms() {
    for f in fixtures() {
        let report = verify_datum(&f.datum);
        assert!(report.all_passed(), "{}: {report:?}", f.name);
        for needed in [
            "2a_alpha_balanced",
            "2b_eps_symmetric",
            "2c_nondegenerate",
            "3a_additive_in_b",
            "3b_unit_twist",
            "3c_quadratic_companion",
            "c_squared_normalization",
            "eq1_defining_sum",
            "lemma_gamma_shift",
            "gauss_reformulation",
            "formulations_agree",
        ] {
            let c = report.checks.iter().find(|c| c.name == needed).unwrap();
            assert!(c.passed(), "{}: {needed} failed", f.name);
        }
    }
    println!("criterion 04 datum axioms: pass (5 data, exhaustive)");
}

/// Criterion 5: Gauss identities. S(1)^2 = alpha(-1)|M| on the example-2
/// instances; S(s) conj(S(s)) = |M| for all symmetric units; S constant on
/// unit orbits; and for F_3, Q = x^2: S(1) = 1 + 2 zeta_3 with square -3.
#[test]
fn acceptance_05_gauss_identities() {
    for f in fixtures() {
        let ring = &f.ring;
        let msize = CycloNumber::from_int(f.datum.cyclotomic_order(), f.datum.module().size() as i64);
        let s1 = f.datum.gauss_sum(ring.one_id()).unwrap();
        let alpha_m1 = f.datum.alpha(ring.signed_one_id(-1)).unwrap();
        assert_eq!(s1.mul(&s1), alpha_m1.mul(&msize), "{}: S(1)^2 = alpha(-1)|M|", f.name);
        for &s in f.datum.sym_elements() {
            if !ring.is_unit_id(s) {
                continue;
            }
            let v = f.datum.gauss_sum(s).unwrap();
            assert_eq!(v.mul(&v.conj()), msize, "{}: |S(s)|^2 = |M|", f.name);
        }
        for orbit in ring.symmetric_unit_orbits(-1).unwrap() {
            let v0 = f.datum.gauss_sum(orbit[0]).unwrap();
            for &s in &orbit[1..] {
                assert_eq!(f.datum.gauss_sum(s).unwrap(), v0, "{}: orbit constancy", f.name);
            }
        }
    }
    // the frozen rank-one value over F_3, derived by the 3-term expansion
    // psi(0) + psi(1) + psi(4 = 1) = 1 + 2 zeta_3
    let ring = Arc::new(InvolutiveRing::matrix(1, field(3)).unwrap());
    let d = WeilDatum::matrix_ring(ring.clone(), 1, None, None).unwrap();
    let s1 = d.gauss_sum(ring.one_id()).unwrap();
    let zeta = CycloNumber::root_of_unity(3, 1);
    let expected = CycloNumber::one(3).add(&zeta).add(&zeta);
    assert_eq!(s1, expected, "S(1) = 1 + 2 zeta_3");
    assert_eq!(s1.mul(&s1), CycloNumber::from_int(3, -3), "S(1)^2 = -3");
    println!("criterion 05 gauss identities: pass");
}

/// Criterion 6: operator relations (i)-(vi) as exact matrix identities for
/// every datum of criterion 4; generator unitarity exact; the full 14400
/// homomorphism table for |G| = 120 with |M| = 5; 10^4 seeded pairs for
/// larger groups.
#[test]
fn acceptance_06_operator_verification() {
    let mut rng = ChaCha8Rng::seed_from_u64(SEED);
    for f in fixtures() {
        let rep = f.rep();
        let relations = rep.verify_operator_relations().unwrap();
        assert!(relations.all_passed(), "{}: {relations:?}", f.name);
        assert!(rep.verify_unitary_generators().passed(), "{}: generator unitarity", f.name);
        let hom = rep
            .homomorphism_check(HOMOMORPHISM_EXHAUSTIVE_BOUND, 10_000, &mut rng)
            .unwrap();
        assert!(hom.passed(), "{}: {hom:?}", f.name);
        if f.name == "example1(n=1,m=1,q=5)" {
            assert_eq!(hom.mode, "exhaustive");
            assert_eq!(hom.pairs_checked, 14_400, "full table for |G| = 120");
            // all 120 operators exactly unitary
            let unitary = rep.verify_unitary_elements(None);
            assert!(unitary.passed());
            assert_eq!(unitary.checked, 120);
        }
    }
    println!("criterion 06 operator verification: pass");
}

/// Criterion 7: decomposition. (1,1,5): Gamma = {+-1}, ranks 3 and 2
/// summing to 5. (3,3): |Gamma| = 6 with six components summing to 27.
/// Commutation exact; projector idempotence/orthogonality and rho-invariance
/// within 1e-8.
#[test]
fn acceptance_07_intertwiner_decomposition() {
    let mut rng = ChaCha8Rng::seed_from_u64(SEED);
    for f in fixtures() {
        if f.name != "example1(n=1,m=1,q=5)" && f.name != "example2(m=3,q=3)" {
            continue;
        }
        let rep = f.rep();
        let scan = decomp::enumerate_intertwiners(&f.datum, DEFAULT_INTERTWINER_BUDGET).unwrap();
        let commuting = decomp::verify_commuting_action(&rep, &scan.group);
        assert!(commuting.passed(), "{}: exact commutation", f.name);
        let table = chartab::character_table(scan.group.small_group(), &mut rng).unwrap();
        let report = decomp::isotypic_decomposition(&rep, &scan.group, &table).unwrap();
        assert!(report.max_idempotence_residual <= 1e-8, "{}: idempotence", f.name);
        assert!(report.max_orthogonality_residual <= 1e-8, "{}: orthogonality", f.name);
        assert!(report.components.iter().all(|c| c.invariant), "{}: invariance within 1e-8", f.name);
        assert!(report.components.iter().all(|c| !c.rank_ambiguous), "{}: ranks unambiguous", f.name);
        if f.name == "example1(n=1,m=1,q=5)" {
            assert_eq!(scan.group.order(), 2, "Gamma = {{+1, -1}}");
            let mut ranks: Vec<usize> = report.components.iter().map(|c| c.rank).collect();
            ranks.sort_unstable();
            assert_eq!(ranks, vec![2, 3], "parity split of L^2(F_5)");
            assert_eq!(report.rank_sum, 5);
        } else {
            assert_eq!(scan.group.order(), 6, "norm-one units of A_3");
            assert_eq!(report.components.len(), 6);
            assert_eq!(report.rank_sum, 27);
        }
    }
    println!("criterion 07 intertwiner decomposition: pass");
}

/// Criterion 8: on every tested datum with an invertible symmetric element,
/// the invertible A-linear maps preserving gamma are exactly those
/// preserving gamma and chi. Exact set equality.
#[test]
fn acceptance_08_remark_implication() {
    for f in fixtures() {
        let scan = decomp::enumerate_intertwiners(&f.datum, DEFAULT_INTERTWINER_BUDGET).unwrap();
        assert_eq!(
            scan.implication_holds(),
            Some(true),
            "{}: gamma-preservation must imply chi-preservation",
            f.name
        );
    }
    println!("criterion 08 remark implication: pass (5 data, exact set equality)");
}

/// Criterion 9: the recovery identities gamma(t,x) = chi(x 2^{-1} t*, x)
/// and the chi-from-gamma quotient hold for all x, y and all invertible
/// symmetric t, on every tested datum. Exact.
#[test]
fn acceptance_09_recovery_identities() {
    for f in fixtures() {
        let report = gamma_chi_recovery_check(&f.datum);
        assert!(!report.vacuous, "{}: symmetric units exist", f.name);
        assert!(report.all_passed(), "{}: {report:?}", f.name);
    }
    println!("criterion 09 recovery identities: pass");
}

/// Criterion 10: two runs of `starweil run` with identical config and seed
/// produce byte-identical reports.
#[test]
fn acceptance_10_determinism() {
    let dir = tempfile::tempdir().unwrap();
    let run = |out: &str| {
        let out_dir = dir.path().join(out);
        let output = std::process::Command::new(env!("CARGO_BIN_EXE_starweil"))
            .args([
                "run",
                "--ring",
                r#"{"kind":"matrix","n":1,"q":5}"#,
                "--datum",
                "example1",
                "--params",
                "m=1",
                "--seed",
                "42",
                "--depth",
                "exhaustive",
                "--out",
                out_dir.to_str().unwrap(),
            ])
            .output()
            .unwrap();
        assert!(output.status.success(), "{}", String::from_utf8_lossy(&output.stderr));
        out_dir
    };
    let a = run("a");
    let b = run("b");
    for f in ["report.json", "presentation.json", "decomposition.json", "character.csv"] {
        let fa = std::fs::read(a.join(f)).unwrap();
        let fb = std::fs::read(b.join(f)).unwrap();
        assert_eq!(fa, fb, "{f} must be byte-identical across runs");
    }
    println!("criterion 10 determinism: pass (byte-identical reports)");
}
