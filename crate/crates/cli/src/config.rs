//! Run configuration: ring loading, datum selection, verification depth,
//! budgets, and the seeded generator threaded through every sampled check.

use std::path::{Path, PathBuf};
use std::str::FromStr;
use std::sync::Arc;

use anyhow::{bail, Context, Result};
use serde::Serialize;
use starweil_core::{InvolutiveRing, RingDescriptor, WeilDatum};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Depth {
    Exhaustive,
    Sampled(usize),
}

impl FromStr for Depth {
    type Err = anyhow::Error;

    fn from_str(s: &str) -> Result<Self> {
        if s == "exhaustive" {
            return Ok(Depth::Exhaustive);
        }
        if let Some(n) = s.strip_prefix("sampled:") {
            let n: usize = n.parse().context("sample count in 'sampled:N'")?;
            return Ok(Depth::Sampled(n));
        }
        bail!("depth must be 'exhaustive' or 'sampled:N', got '{s}'")
    }
}

impl std::fmt::Display for Depth {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Depth::Exhaustive => write!(f, "exhaustive"),
            Depth::Sampled(n) => write!(f, "sampled:{n}"),
        }
    }
}

/// Datum selector: one of the two built-in examples or a JSON table file.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub enum DatumSelector {
    Example1,
    Example2,
    File(PathBuf),
}

impl FromStr for DatumSelector {
    type Err = anyhow::Error;

    fn from_str(s: &str) -> Result<Self> {
        Ok(match s {
            "example1" => DatumSelector::Example1,
            "example2" => DatumSelector::Example2,
            path => DatumSelector::File(PathBuf::from(path)),
        })
    }
}

/// --params key=value list (n=, m=, psi=).
#[derive(Debug, Clone, Default, Serialize)]
pub struct DatumParams {
    pub n: Option<usize>,
    pub m: Option<usize>,
    pub psi: Option<u64>,
}

impl FromStr for DatumParams {
    type Err = anyhow::Error;

    fn from_str(s: &str) -> Result<Self> {
        let mut out = DatumParams::default();
        for part in s.split(',').filter(|p| !p.is_empty()) {
            let (k, v) = part
                .split_once('=')
                .with_context(|| format!("parameter '{part}' is not key=value"))?;
            match k {
                "n" => out.n = Some(v.parse()?),
                "m" => out.m = Some(v.parse()?),
                "psi" => out.psi = Some(v.parse()?),
                other => bail!("unknown datum parameter '{other}' (known: n, m, psi)"),
            }
        }
        Ok(out)
    }
}

/// Loads a ring from either an inline JSON object or a file path.
pub fn load_ring(source: &str, budget: u64) -> Result<(RingDescriptor, Arc<InvolutiveRing>)> {
    let json = if source.trim_start().starts_with('{') {
        source.to_string()
    } else {
        std::fs::read_to_string(source).with_context(|| format!("reading ring file '{source}'"))?
    };
    let desc = RingDescriptor::from_json(&json)?;
    let ring = Arc::new(InvolutiveRing::from_descriptor_budget(&desc, budget)?);
    Ok((desc, ring))
}

/// Builds the selected datum on a ring; example selectors validate the ring
/// kind and epsilon. In lenient mode a custom table file is parsed without
/// the axiom gate, so the verifying commands can report exactly what fails.
pub fn build_datum(
    ring: &Arc<InvolutiveRing>,
    selector: &DatumSelector,
    params: &DatumParams,
    eps: i8,
    strict_custom: bool,
) -> Result<WeilDatum> {
    if eps != -1 {
        bail!("the built-in and table data require epsilon = -1 (got {eps})");
    }
    match selector {
        DatumSelector::Example1 => {
            let m = params.m.unwrap_or(1);
            Ok(WeilDatum::matrix_ring(ring.clone(), m, None, params.psi)?)
        }
        DatumSelector::Example2 => Ok(WeilDatum::truncated_poly(ring.clone(), params.psi)?),
        DatumSelector::File(path) => {
            let text = std::fs::read_to_string(path)
                .with_context(|| format!("reading datum file '{}'", path.display()))?;
            let json: serde_json::Value = serde_json::from_str(&text)?;
            if strict_custom {
                Ok(WeilDatum::custom_from_json(ring.clone(), &json)?)
            } else {
                Ok(WeilDatum::custom_from_json_unverified(ring.clone(), &json)?)
            }
        }
    }
}

/// Cache directory resolution: STARWEIL_CACHE overrides the flag.
pub fn resolve_cache_dir(flag: Option<&Path>) -> Option<PathBuf> {
    std::env::var_os("STARWEIL_CACHE")
        .map(PathBuf::from)
        .or_else(|| flag.map(Path::to_path_buf))
}

/// The full configuration of a pipeline run, echoed into every report.
#[derive(Debug, Clone, Serialize)]
pub struct RunConfig {
    pub ring: RingDescriptor,
    pub epsilon: i8,
    pub datum: String,
    pub params: DatumParams,
    pub depth: Depth,
    pub seed: u64,
    pub max_group_size: usize,
    pub operator_cache_cap: usize,
}
