//! The verification pipeline: ring axioms, membership equivalence, group
//! enumeration, presentation, datum axioms, Gauss identities, operator
//! relations, homomorphism/unitarity, character, intertwiners, and the
//! isotypic decomposition, in that order, with per-stage verdicts.
//!
//! Reports are JSON values with sorted keys; wall-clock timings are kept
//! out of the main report so that identical (config, seed) runs produce
//! byte-identical report files.

use std::path::Path;
use std::sync::Arc;
use std::time::Instant;

use anyhow::{Context, Result};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::{json, Value};
use starweil_core::datum::{gamma_chi_recovery_check, verify_datum, AxiomCheck};
use starweil_core::group::{verify_presentation, GroupTable, StarGroup};
use starweil_core::rep::{WeilRepresentation, HOMOMORPHISM_EXHAUSTIVE_BOUND};
use starweil_core::{
    chartab, decomp, CycloNumber, ElemId, InvolutiveRing, Mat2, WeilDatum,
};

use crate::config::{Depth, RunConfig};

pub const MEMBERSHIP_EXHAUSTIVE_BOUND: u64 = 10_000_000;
pub const DEFAULT_MEMBERSHIP_SAMPLES: usize = 1_000_000;
pub const DEFAULT_PAIR_SAMPLES: usize = 10_000;
pub const DEFAULT_MAX_GROUP_SIZE: usize = 1_000_000;

pub fn axiom_to_json(c: &AxiomCheck) -> Value {
    json!({
        "checked": c.checked,
        "failed": c.failed,
        "verdict": c.verdict(),
        "witness": c.witness,
    })
}

fn checks_to_json(checks: &[AxiomCheck]) -> Value {
    Value::Object(
        checks
            .iter()
            .map(|c| (c.name.clone(), axiom_to_json(c)))
            .collect(),
    )
}

/// Ring construction + involution axioms.
pub fn stage_ring(ring: &Arc<InvolutiveRing>, rng: &mut ChaCha8Rng) -> (Value, bool) {
    let axioms = starweil_core::ring::verify_involution_axioms(ring, rng);
    let passed = axioms.is_ok();
    let sym_minus = ring.eps_symmetric_elements(-1).map(|v| v.len()).unwrap_or(0);
    let sym_plus = ring.eps_symmetric_elements(1).map(|v| v.len()).unwrap_or(0);
    (
        json!({
            "ring": ring.descriptor().summary(),
            "size": ring.size(),
            "dim": ring.dim(),
            "units": ring.units().map(|u| u.len() as u64).unwrap_or(0),
            "sym_elements_eps_minus": sym_minus,
            "sym_elements_eps_plus": sym_plus,
            "involution_axioms": if passed { "pass" } else { "fail" },
            "error": axioms.err().map(|e| e.to_string()),
        }),
        passed,
    )
}

/// is_member_def <=> is_member_form, exhaustive up to |A|^4 <= 10^7, seeded
/// sampling above.
pub fn stage_membership(group: &StarGroup, depth: Depth, rng: &mut ChaCha8Rng) -> (Value, bool) {
    let n = group.ring().size();
    let total = n.checked_pow(4);
    let exhaustive = matches!(total, Some(t) if t <= MEMBERSHIP_EXHAUSTIVE_BOUND);
    let mut checked = 0u64;
    let mut failed = 0u64;
    let mut members = 0u64;
    let mut witness = None;
    let mut verify = |g: Mat2| {
        checked += 1;
        let d = group.is_member_def(&g);
        let f = group.is_member_form(&g);
        if d {
            members += 1;
        }
        if d != f && witness.is_none() {
            failed += 1;
            witness = Some(format!(
                "def = {d}, form = {f} at ids ({}, {}, {}, {})",
                g.a.0, g.b.0, g.c.0, g.d.0
            ));
        } else if d != f {
            failed += 1;
        }
    };
    if exhaustive {
        for a in 0..n as u32 {
            for b in 0..n as u32 {
                for c in 0..n as u32 {
                    for d in 0..n as u32 {
                        verify(Mat2 {
                            a: ElemId(a),
                            b: ElemId(b),
                            c: ElemId(c),
                            d: ElemId(d),
                        });
                    }
                }
            }
        }
    } else {
        let samples = match depth {
            Depth::Sampled(k) => k,
            Depth::Exhaustive => DEFAULT_MEMBERSHIP_SAMPLES,
        };
        for _ in 0..samples {
            verify(Mat2 {
                a: ElemId(rng.gen_range(0..n) as u32),
                b: ElemId(rng.gen_range(0..n) as u32),
                c: ElemId(rng.gen_range(0..n) as u32),
                d: ElemId(rng.gen_range(0..n) as u32),
            });
        }
    }
    (
        json!({
            "mode": if exhaustive { "exhaustive".to_string() } else { format!("sampled:{checked}") },
            "candidates_checked": checked,
            "members_seen": members,
            "disagreements": failed,
            "verdict": if failed == 0 { "pass" } else { "fail" },
            "witness": witness,
        }),
        failed == 0,
    )
}

/// Group facts; the cache state is omitted here when the caller wants the
/// report independent of the cache (the `run` determinism contract) and
/// supplied for the standalone subcommand.
pub fn stage_group(table: &GroupTable, group: &StarGroup, cache_state: Option<&str>) -> (Value, bool) {
    let classes = table.conjugacy_classes(group);
    let word_stats: Vec<Value> = table
        .word_stats()
        .into_iter()
        .map(|(len, count)| json!([len, count]))
        .collect();
    let mut out = serde_json::Map::new();
    out.insert("order".into(), json!(table.order()));
    out.insert("num_classes".into(), json!(classes.len()));
    out.insert("word_stats".into(), json!(word_stats));
    out.insert("verdict".into(), json!("pass"));
    if let Some(state) = cache_state {
        out.insert("cache".into(), json!(state));
    }
    (Value::Object(out), true)
}

pub fn stage_presentation(group: &StarGroup, table: &GroupTable) -> Result<(Value, bool)> {
    let report = verify_presentation(group, Some(table))?;
    let relations: Value = Value::Object(
        report
            .relations
            .iter()
            .map(|r| {
                (
                    r.name.clone(),
                    json!({
                        "checked": r.checked,
                        "failed": r.failed,
                        "verdict": r.verdict(),
                        "witness": r.witness,
                    }),
                )
            })
            .collect(),
    );
    let passed = report.all_passed();
    Ok((
        json!({
            "relations": relations,
            "word_check": report.word_check.as_ref().map(|w| json!({
                "checked": w.checked,
                "failed": w.failed,
            })),
            "verdict": if passed { "pass" } else { "fail" },
        }),
        passed,
    ))
}

pub fn stage_datum(datum: &WeilDatum) -> (Value, bool) {
    let report = verify_datum(datum);
    let recovery = gamma_chi_recovery_check(datum);
    let passed = report.all_passed() && (recovery.vacuous || recovery.all_passed());
    (
        json!({
            "axioms": checks_to_json(&report.checks),
            "recovery": if recovery.vacuous {
                json!("vacuous: no invertible eps-symmetric element (peculiar case)")
            } else {
                checks_to_json(&recovery.checks)
            },
            "m_size": datum.module().size(),
            "c": datum.c().coeff_strings(),
            "verdict": if passed { "pass" } else { "fail" },
        }),
        passed,
    )
}

/// Gauss identities for data with a quadratic structure: S(s) conj(S(s)) =
/// |M| on symmetric units, orbit constancy, and S(1)^2 = alpha(-1) |M|.
pub fn stage_gauss(datum: &WeilDatum) -> (Value, bool) {
    let Some(_) = datum.quadratic_structure() else {
        return (json!({"verdict": "skipped", "reason": "custom datum has no quadratic structure"}), true);
    };
    let ring = datum.ring();
    let msize = CycloNumber::from_int(datum.cyclotomic_order(), datum.module().size() as i64);
    let mut check = AxiomCheck::new("gauss_norm_on_symmetric_units");
    for &s in datum.sym_elements() {
        if !ring.is_unit_id(s) {
            continue;
        }
        let v = datum.gauss_sum(s).expect("quad structure present");
        check.record_with(v.mul(&v.conj()) == msize, || {
            format!("s = {}", ring.format_element(&ring.element(s)))
        });
    }
    let mut orbit_check = AxiomCheck::new("gauss_constant_on_orbits");
    for orbit in ring.symmetric_unit_orbits(datum.eps()).expect("enumerated") {
        let v0 = datum.gauss_sum(orbit[0]).expect("quad");
        for &s in &orbit[1..] {
            orbit_check.record_with(datum.gauss_sum(s).expect("quad") == v0, || {
                format!("orbit of {}", ring.format_element(&ring.element(orbit[0])))
            });
        }
    }
    let mut square_check = AxiomCheck::new("gauss_square_identity");
    let s1 = datum.gauss_sum(ring.one_id()).expect("quad");
    let alpha_m1 = datum.alpha(ring.signed_one_id(-1)).expect("-1 is a unit");
    square_check.record_with(s1.mul(&s1) == alpha_m1.mul(&msize), || "S(1)^2 != alpha(-1)|M|".into());

    let checks = [check, orbit_check, square_check];
    let passed = checks.iter().all(|c| c.passed());
    (
        json!({
            "checks": checks_to_json(&checks),
            "s1": s1.coeff_strings(),
            "verdict": if passed { "pass" } else { "fail" },
        }),
        passed,
    )
}

pub fn stage_operators(rep: &WeilRepresentation) -> Result<(Value, bool)> {
    let relations = rep.verify_operator_relations()?;
    let unitarity = rep.verify_unitary_generators();
    let passed = relations.all_passed() && unitarity.passed();
    Ok((
        json!({
            "relations": checks_to_json(&relations.checks),
            "generator_unitarity": axiom_to_json(&unitarity),
            "dim": rep.dim(),
            "verdict": if passed { "pass" } else { "fail" },
        }),
        passed,
    ))
}

pub fn stage_homomorphism(
    rep: &WeilRepresentation,
    depth: Depth,
    rng: &mut ChaCha8Rng,
) -> Result<(Value, bool)> {
    let sample = match depth {
        Depth::Sampled(n) => n,
        Depth::Exhaustive => DEFAULT_PAIR_SAMPLES,
    };
    let hom = rep.homomorphism_check(HOMOMORPHISM_EXHAUSTIVE_BOUND, sample, rng)?;

    // unitarity of rho(g): every element at small orders, a seeded sample
    // otherwise (through the integer fast path when the datum is integral)
    let order = rep.table().order();
    let unitary = if order <= HOMOMORPHISM_EXHAUSTIVE_BOUND {
        rep.verify_unitary_elements(None)
    } else if let Some(fast) = rep.fast_rep()? {
        let mut check = AxiomCheck::new("unitarity_elements");
        for _ in 0..100 {
            let id = rng.gen_range(0..order) as u32;
            check.record_with(fast.rho(id).is_unitary(fast.msize()), || format!("element id {id}"));
        }
        check
    } else {
        let mut draw = || rng.gen_range(0..order) as u32;
        rep.verify_unitary_elements(Some((100, &mut draw)))
    };
    let passed = hom.passed() && unitary.passed();
    Ok((
        json!({
            "mode": hom.mode,
            "pairs_checked": hom.pairs_checked,
            "failed": hom.failed,
            "witness": hom.witness,
            "element_unitarity": axiom_to_json(&unitary),
            "verdict": if passed { "pass" } else { "fail" },
        }),
        passed,
    ))
}

pub fn stage_character(rep: &WeilRepresentation, rng: &mut ChaCha8Rng) -> (Value, bool, Vec<String>) {
    let ch = rep.character();
    let class_fn = rep.verify_class_function(10, rng);
    let dim_ok = ch.values[0] == CycloNumber::from_int(rep.datum().cyclotomic_order(), rep.dim() as i64);
    let passed = class_fn.passed() && dim_ok;

    let mut csv = vec!["class_index,rep_word,class_size,value_coeffs,value,re,im".to_string()];
    for e in &ch.entries {
        csv.push(format!(
            "{},{},{},{},{},{},{}",
            e.class_index,
            csv_quote(&e.rep_word),
            e.class_size,
            csv_quote(&e.value_coeffs.join(";")),
            csv_quote(&e.value_display),
            e.value_re,
            e.value_im,
        ));
    }
    (
        json!({
            "num_classes": ch.entries.len(),
            "value_at_identity": ch.entries[0].value_coeffs,
            "dimension_matches": dim_ok,
            "class_function_check": axiom_to_json(&class_fn),
            "verdict": if passed { "pass" } else { "fail" },
        }),
        passed,
        csv,
    )
}

fn csv_quote(s: &str) -> String {
    if s.contains(',') || s.contains('"') || s.contains('\n') {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}

pub struct DecompositionOutcome {
    pub report_json: Value,
    pub passed: bool,
    pub decomposition_file: Value,
}

pub fn stage_decomposition(
    rep: &WeilRepresentation,
    rng: &mut ChaCha8Rng,
) -> Result<DecompositionOutcome> {
    let scan = decomp::enumerate_intertwiners(rep.datum(), decomp::DEFAULT_INTERTWINER_BUDGET)?;
    let commuting = decomp::verify_commuting_action(rep, &scan.group);
    let implication = scan.implication_holds();
    let table = chartab::character_table(scan.group.small_group(), rng)?;
    let report = decomp::isotypic_decomposition(rep, &scan.group, &table)?;

    let components: Vec<Value> = report
        .components
        .iter()
        .map(|c| {
            json!({
                "pi_index": c.pi_index,
                "pi_degree": c.pi_degree,
                "rank": c.rank,
                "multiplicity_dim": c.multiplicity_dim,
                "invariant": c.invariant,
                "rank_ambiguous": c.rank_ambiguous,
                "max_invariance_residual": c.max_invariance_residual,
            })
        })
        .collect();
    let implication_json = match implication {
        None => json!("vacuous: no invertible symmetric element"),
        Some(v) => json!(v),
    };
    let passed = report.all_passed() && commuting.passed() && implication != Some(false);
    let decomposition_file = json!({
        "gamma_order": report.gamma_order,
        "num_irreducibles": report.num_irreducibles,
        "M_size": report.m_size,
        "components": components,
        "rank_sum": report.rank_sum,
        "irreducible_degrees": table.degrees,
        "max_idempotence_residual": report.max_idempotence_residual,
        "max_orthogonality_residual": report.max_orthogonality_residual,
        "commutation_exact": commuting.passed(),
        "gamma_preservation_implies_chi": implication_json,
    });
    let report_json = json!({
        "gamma_order": report.gamma_order,
        "num_irreducibles": report.num_irreducibles,
        "rank_sum": report.rank_sum,
        "M_size": report.m_size,
        "commutation": axiom_to_json(&commuting),
        "verdict": if passed { "pass" } else { "fail" },
    });
    Ok(DecompositionOutcome { report_json, passed, decomposition_file })
}

pub struct PipelineOutput {
    pub report: Value,
    pub timings: Value,
    pub all_passed: bool,
    pub presentation_json: Value,
    pub character_csv: Vec<String>,
    pub decomposition_json: Value,
}

/// Runs every stage in dependency order, short-circuiting when a hard failure
/// makes later stages meaningless; the partial report keeps the verdicts
/// gathered so far.
pub fn run_pipeline(config: &RunConfig, ring: Arc<InvolutiveRing>, datum: WeilDatum, cache_dir: Option<&Path>) -> Result<PipelineOutput> {
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    let mut stages = serde_json::Map::new();
    let mut timings = serde_json::Map::new();
    let mut failed_stages: Vec<String> = vec![];
    let total_start = Instant::now();

    macro_rules! record {
        ($name:expr, $value:expr, $passed:expr, $start:expr) => {{
            stages.insert($name.to_string(), $value);
            timings.insert($name.to_string(), json!($start.elapsed().as_secs_f64()));
            if !$passed {
                failed_stages.push($name.to_string());
            }
        }};
    }

    let t = Instant::now();
    let (v, ok) = stage_ring(&ring, &mut rng);
    record!("01_ring", v, ok, t);

    let group = Arc::new(StarGroup::new(ring.clone(), config.epsilon)?);

    let t = Instant::now();
    let (v, ok) = stage_membership(&group, config.depth, &mut rng);
    record!("02_membership", v, ok, t);

    let t = Instant::now();
    let (table, cache_state) =
        crate::cache::enumerate_with_cache(&group, config.max_group_size, cache_dir)?;
    let table = Arc::new(table);
    let (v, ok) = stage_group(&table, &group, None);
    timings.insert("group_cache".into(), json!(cache_state));
    record!("03_group", v, ok, t);

    let t = Instant::now();
    let (v, ok) = stage_presentation(&group, &table)?;
    let presentation_json = v.clone();
    record!("04_presentation", v, ok, t);

    let t = Instant::now();
    let (v, ok) = stage_datum(&datum);
    let datum_ok = ok;
    record!("05_datum", v, ok, t);

    let t = Instant::now();
    let (v, ok) = stage_gauss(&datum);
    record!("06_gauss", v, ok, t);

    let mut character_csv = vec![];
    let mut decomposition_json = json!(null);
    if datum_ok {
        let rep = WeilRepresentation::new(
            Arc::new(datum),
            group.clone(),
            table.clone(),
            config.operator_cache_cap,
        )?;

        let t = Instant::now();
        let (v, ok) = stage_operators(&rep)?;
        record!("07_operators", v, ok, t);

        let t = Instant::now();
        let (v, ok) = stage_homomorphism(&rep, config.depth, &mut rng)?;
        record!("08_homomorphism", v, ok, t);

        let t = Instant::now();
        let (v, ok, csv) = stage_character(&rep, &mut rng);
        character_csv = csv;
        record!("09_character", v, ok, t);

        let t = Instant::now();
        let outcome = stage_decomposition(&rep, &mut rng)?;
        decomposition_json = outcome.decomposition_file;
        record!("10_decomposition", outcome.report_json, outcome.passed, t);
    } else {
        stages.insert(
            "07_operators".into(),
            json!({"verdict": "skipped", "reason": "datum axioms failed"}),
        );
    }

    timings.insert("total".into(), json!(total_start.elapsed().as_secs_f64()));
    let all_passed = failed_stages.is_empty();
    let report = json!({
        "config": serde_json::to_value(config).context("config echo")?,
        "stages": Value::Object(stages),
        "summary": {
            "all_passed": all_passed,
            "failed_stages": failed_stages,
        },
        "versions": {"starweil": env!("CARGO_PKG_VERSION")},
    });
    Ok(PipelineOutput {
        report,
        timings: Value::Object(timings),
        all_passed,
        presentation_json,
        character_csv,
        decomposition_json,
    })
}
