//! starweil: build the generalized classical groups SL*^eps(2,A) over
//! finite involutive rings, construct the Weil representation from verified
//! data, check every defining identity exactly, and decompose under the
//! intertwiner group.

mod cache;
mod config;
mod pipeline;

use std::path::PathBuf;
use std::process::ExitCode;
use std::sync::Arc;

use anyhow::{Context, Result};
use clap::{Args, Parser, Subcommand};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde_json::{json, Value};
use starweil_core::group::StarGroup;
use starweil_core::rep::{WeilRepresentation, DEFAULT_OPERATOR_CACHE_CAP};

use config::{build_datum, load_ring, resolve_cache_dir, DatumParams, DatumSelector, Depth, RunConfig};

#[derive(Parser)]
#[command(name = "starweil", version, about = "Weil representations of SL*^eps(2,A) over finite involutive rings, with exact verification")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Clone)]
struct RingArgs {
    /// Ring descriptor: inline JSON (e.g. '{"kind":"matrix","n":1,"q":5}') or a file path
    #[arg(long)]
    ring: String,

    /// The sign epsilon defining the group (+1 or -1)
    #[arg(long, default_value_t = -1, allow_hyphen_values = true)]
    epsilon: i8,

    /// Enumeration budget for the ring
    #[arg(long, default_value_t = starweil_core::ring::DEFAULT_ENUMERATION_BUDGET)]
    ring_budget: u64,
}

#[derive(Args, Clone)]
struct DatumArgs {
    /// Datum selector: example1 (matrix ring), example2 (truncated
    /// polynomials), or a JSON table file
    #[arg(long)]
    datum: DatumSelector,

    /// Datum parameters, e.g. m=2,psi=1 (n is fixed by the ring)
    #[arg(long, default_value = "")]
    params: DatumParams,
}

#[derive(Args, Clone)]
struct VerifyArgs {
    /// Verification depth: exhaustive, or sampled:N for the randomized checks
    #[arg(long, default_value = "exhaustive")]
    depth: Depth,

    /// Seed for every sampled check
    #[arg(long, default_value_t = 1)]
    seed: u64,
}

#[derive(Args, Clone)]
struct CacheArgs {
    /// Cache directory for BFS tables (env STARWEIL_CACHE is the fallback)
    #[arg(long)]
    cache: Option<PathBuf>,

    /// Group closure budget
    #[arg(long, default_value_t = pipeline::DEFAULT_MAX_GROUP_SIZE)]
    max_size: usize,
}

#[derive(Subcommand)]
enum Command {
    /// Ring-level information and involution-axiom verification
    Ring {
        #[command(subcommand)]
        cmd: RingCmd,
    },
    /// Group enumeration and presentation checks
    Group {
        #[command(subcommand)]
        cmd: GroupCmd,
    },
    /// Weil datum and representation checks
    Weil {
        #[command(subcommand)]
        cmd: WeilCmd,
    },
    /// Intertwiner group and isotypic decomposition
    Decompose {
        #[command(flatten)]
        ring: RingArgs,
        #[command(flatten)]
        datum: DatumArgs,
        #[command(flatten)]
        verify: VerifyArgs,
        #[command(flatten)]
        cache: CacheArgs,
    },
    /// The full pipeline, writing report files to --out
    Run {
        #[command(flatten)]
        ring: RingArgs,
        #[command(flatten)]
        datum: DatumArgs,
        #[command(flatten)]
        verify: VerifyArgs,
        #[command(flatten)]
        cache: CacheArgs,
        /// Output directory for report.json, timings.json and tables
        #[arg(long, default_value = "out")]
        out: PathBuf,
    },
}

#[derive(Subcommand)]
enum RingCmd {
    /// Sizes, units, symmetric elements, involution axioms
    Info {
        #[command(flatten)]
        ring: RingArgs,
        #[command(flatten)]
        verify: VerifyArgs,
    },
}

#[derive(Subcommand)]
enum GroupCmd {
    /// BFS closure of the Bruhat generators, with word statistics
    Enumerate {
        #[command(flatten)]
        ring: RingArgs,
        #[command(flatten)]
        cache: CacheArgs,
    },
    /// The five universal relations plus word re-evaluation
    VerifyPresentation {
        #[command(flatten)]
        ring: RingArgs,
        #[command(flatten)]
        cache: CacheArgs,
    },
}

#[derive(Subcommand)]
enum WeilCmd {
    /// Datum axioms, recovery identities, Gauss identities
    VerifyData {
        #[command(flatten)]
        ring: RingArgs,
        #[command(flatten)]
        datum: DatumArgs,
    },
    /// Construct the representation; generator operators and their unitarity
    Build {
        #[command(flatten)]
        ring: RingArgs,
        #[command(flatten)]
        datum: DatumArgs,
        #[command(flatten)]
        cache: CacheArgs,
    },
    /// Operator relations, unitarity, homomorphism property
    Verify {
        #[command(flatten)]
        ring: RingArgs,
        #[command(flatten)]
        datum: DatumArgs,
        #[command(flatten)]
        verify: VerifyArgs,
        #[command(flatten)]
        cache: CacheArgs,
    },
    /// The character of rho as a CSV table
    Character {
        #[command(flatten)]
        ring: RingArgs,
        #[command(flatten)]
        datum: DatumArgs,
        #[command(flatten)]
        verify: VerifyArgs,
        #[command(flatten)]
        cache: CacheArgs,
        /// Output directory for character.csv
        #[arg(long, default_value = "out")]
        out: PathBuf,
    },
}

fn print_json(v: &Value) {
    println!("{}", serde_json::to_string_pretty(v).expect("serializable"));
}

fn write_json(path: &std::path::Path, v: &Value) -> Result<()> {
    let mut text = serde_json::to_string_pretty(v).expect("serializable");
    text.push('\n');
    std::fs::write(path, text).with_context(|| format!("writing {}", path.display()))
}

fn finish(passed: bool) -> ExitCode {
    if passed {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(1)
    }
}

fn build_group_and_table(
    ring_args: &RingArgs,
    cache_args: &CacheArgs,
) -> Result<(Arc<StarGroup>, Arc<starweil_core::GroupTable>, &'static str)> {
    let (_, ring) = load_ring(&ring_args.ring, ring_args.ring_budget)?;
    let group = Arc::new(StarGroup::new(ring, ring_args.epsilon)?);
    let cache_dir = resolve_cache_dir(cache_args.cache.as_deref());
    let (table, state) = cache::enumerate_with_cache(&group, cache_args.max_size, cache_dir.as_deref())?;
    Ok((group, Arc::new(table), state))
}

fn run() -> Result<ExitCode> {
    let cli = Cli::parse();
    match cli.command {
        Command::Ring { cmd: RingCmd::Info { ring, verify } } => {
            let (_, r) = load_ring(&ring.ring, ring.ring_budget)?;
            let mut rng = ChaCha8Rng::seed_from_u64(verify.seed);
            let (v, ok) = pipeline::stage_ring(&r, &mut rng);
            print_json(&v);
            Ok(finish(ok))
        }
        Command::Group { cmd } => match cmd {
            GroupCmd::Enumerate { ring, cache } => {
                let (group, table, state) = build_group_and_table(&ring, &cache)?;
                let (v, ok) = pipeline::stage_group(&table, &group, Some(state));
                print_json(&v);
                Ok(finish(ok))
            }
            GroupCmd::VerifyPresentation { ring, cache } => {
                let (group, table, _) = build_group_and_table(&ring, &cache)?;
                let (mut v, ok) = pipeline::stage_presentation(&group, &table)?;
                v["order"] = json!(table.order());
                v["num_classes"] = json!(table.conjugacy_classes(&group).len());
                print_json(&v);
                Ok(finish(ok))
            }
        },
        Command::Weil { cmd } => match cmd {
            WeilCmd::VerifyData { ring, datum } => {
                let (_, r) = load_ring(&ring.ring, ring.ring_budget)?;
                let d = build_datum(&r, &datum.datum, &datum.params, ring.epsilon, false)?;
                let (v, ok) = pipeline::stage_datum(&d);
                let (gv, gok) = pipeline::stage_gauss(&d);
                let combined = json!({"datum": v, "gauss": gv});
                print_json(&combined);
                Ok(finish(ok && gok))
            }
            WeilCmd::Build { ring, datum, cache } => {
                let (group, table, _) = build_group_and_table(&ring, &cache)?;
                let d = build_datum(group.ring(), &datum.datum, &datum.params, ring.epsilon, true)?;
                let rep = WeilRepresentation::new(Arc::new(d), group, table, DEFAULT_OPERATOR_CACHE_CAP)?;
                let unitarity = rep.verify_unitary_generators();
                let ok = unitarity.passed();
                print_json(&json!({
                    "dim": rep.dim(),
                    "group_order": rep.table().order(),
                    "generator_count": rep.generator_ops().len(),
                    "generator_unitarity": pipeline::axiom_to_json(&unitarity),
                    "verdict": if ok { "pass" } else { "fail" },
                }));
                Ok(finish(ok))
            }
            WeilCmd::Verify { ring, datum, verify, cache } => {
                let (group, table, _) = build_group_and_table(&ring, &cache)?;
                let d = build_datum(group.ring(), &datum.datum, &datum.params, ring.epsilon, true)?;
                let rep = WeilRepresentation::new(Arc::new(d), group, table, DEFAULT_OPERATOR_CACHE_CAP)?;
                let mut rng = ChaCha8Rng::seed_from_u64(verify.seed);
                let (ops, ops_ok) = pipeline::stage_operators(&rep)?;
                let (hom, hom_ok) = pipeline::stage_homomorphism(&rep, verify.depth, &mut rng)?;
                print_json(&json!({"operators": ops, "homomorphism": hom}));
                Ok(finish(ops_ok && hom_ok))
            }
            WeilCmd::Character { ring, datum, verify, cache, out } => {
                let (group, table, _) = build_group_and_table(&ring, &cache)?;
                let d = build_datum(group.ring(), &datum.datum, &datum.params, ring.epsilon, true)?;
                let rep = WeilRepresentation::new(Arc::new(d), group, table, DEFAULT_OPERATOR_CACHE_CAP)?;
                let mut rng = ChaCha8Rng::seed_from_u64(verify.seed);
                let (v, ok, csv) = pipeline::stage_character(&rep, &mut rng);
                std::fs::create_dir_all(&out)?;
                let path = out.join("character.csv");
                std::fs::write(&path, csv.join("\n") + "\n")?;
                let mut v = v;
                v["file"] = json!(path.display().to_string());
                print_json(&v);
                Ok(finish(ok))
            }
        },
        Command::Decompose { ring, datum, verify, cache } => {
            let (group, table, _) = build_group_and_table(&ring, &cache)?;
            let d = build_datum(group.ring(), &datum.datum, &datum.params, ring.epsilon, true)?;
            let rep = WeilRepresentation::new(Arc::new(d), group, table, DEFAULT_OPERATOR_CACHE_CAP)?;
            let mut rng = ChaCha8Rng::seed_from_u64(verify.seed);
            let outcome = pipeline::stage_decomposition(&rep, &mut rng)?;
            print_json(&outcome.decomposition_file);
            Ok(finish(outcome.passed))
        }
        Command::Run { ring, datum, verify, cache, out } => {
            let (desc, r) = load_ring(&ring.ring, ring.ring_budget)?;
            let d = build_datum(&r, &datum.datum, &datum.params, ring.epsilon, false)?;
            let config = RunConfig {
                ring: desc,
                epsilon: ring.epsilon,
                datum: match &datum.datum {
                    DatumSelector::Example1 => "example1".into(),
                    DatumSelector::Example2 => "example2".into(),
                    DatumSelector::File(p) => p.display().to_string(),
                },
                params: datum.params.clone(),
                depth: verify.depth,
                seed: verify.seed,
                max_group_size: cache.max_size,
                operator_cache_cap: DEFAULT_OPERATOR_CACHE_CAP,
            };
            let cache_dir = resolve_cache_dir(cache.cache.as_deref());
            let output = pipeline::run_pipeline(&config, r, d, cache_dir.as_deref())?;
            std::fs::create_dir_all(&out)?;
            write_json(&out.join("report.json"), &output.report)?;
            write_json(&out.join("timings.json"), &output.timings)?;
            write_json(&out.join("presentation.json"), &output.presentation_json)?;
            write_json(&out.join("decomposition.json"), &output.decomposition_json)?;
            if !output.character_csv.is_empty() {
                std::fs::write(out.join("character.csv"), output.character_csv.join("\n") + "\n")?;
            }
            print_json(&output.report);
            Ok(finish(output.all_passed))
        }
    }
}

fn main() -> ExitCode {
    // keep the LAPACK/BLAS side single-threaded so float outputs are
    // bit-stable across runs
    std::env::set_var("OPENBLAS_NUM_THREADS", "1");
    std::env::set_var("OMP_NUM_THREADS", "1");
    match run() {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
