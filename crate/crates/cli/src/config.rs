//! Run configuration: optional TOML file plus command line flags, with flags
//! taking precedence. Unknown file keys are rejected, and the fully resolved
//! configuration is echoed into the output sidecars so every run is
//! reproducible from its artifacts.

use std::path::{Path, PathBuf};
use std::str::FromStr;

use anyhow::{anyhow, bail, Context, Result};
use serde::{Deserialize, Serialize};

use hoproc::roots::{Family, RootSystem};
use hoproc::verify::CheckId;

/// Process selector exposed on the command line.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ProcessKind {
    /// Full hyperbolic jump process.
    Ho,
    /// Full rational jump process (system is rescaled first).
    Dunkl,
    /// Full relativized process in the complex case.
    F0Complex,
    /// Radial parts only.
    HoRadial,
    DunklRadial,
    Intrinsic,
    /// Folded Brownian motion (no drift), a reference mode.
    Driftfree,
}

impl ProcessKind {
    pub fn is_skew(self) -> bool {
        matches!(
            self,
            ProcessKind::Ho | ProcessKind::Dunkl | ProcessKind::F0Complex
        )
    }
}

impl FromStr for ProcessKind {
    type Err = anyhow::Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "ho" => Ok(ProcessKind::Ho),
            "dunkl" => Ok(ProcessKind::Dunkl),
            "f0-complex" | "f0" => Ok(ProcessKind::F0Complex),
            "ho-radial" => Ok(ProcessKind::HoRadial),
            "dunkl-radial" => Ok(ProcessKind::DunklRadial),
            "intrinsic" => Ok(ProcessKind::Intrinsic),
            "driftfree" => Ok(ProcessKind::Driftfree),
            other => bail!(
                "unknown process `{other}` (expected ho, dunkl, f0-complex, ho-radial, \
                 dunkl-radial, intrinsic or driftfree)"
            ),
        }
    }
}

/// One custom root: coordinates plus multiplicity.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CustomRoot {
    pub vector: Vec<f64>,
    pub multiplicity: f64,
}

/// File-backed configuration; every key can be overridden by a flag.
#[derive(Debug, Clone, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FileConfig {
    pub system: Option<String>,
    pub k: Option<Vec<f64>>,
    pub custom_roots: Option<Vec<CustomRoot>>,
    pub process: Option<String>,
    pub dt: Option<f64>,
    pub t: Option<f64>,
    pub paths: Option<usize>,
    pub seed: Option<u64>,
    pub start: Option<Vec<f64>>,
    pub wall_floor: Option<f64>,
    pub drift_cap: Option<f64>,
    pub rate_cap: Option<f64>,
    pub stride: Option<usize>,
    pub out: Option<PathBuf>,
    pub events_out: Option<PathBuf>,
    pub checks: Option<Vec<String>>,
    pub scale: Option<f64>,
    pub report_out: Option<PathBuf>,
}

impl FileConfig {
    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .with_context(|| format!("cannot read config file {}", path.display()))?;
        toml::from_str(&text).with_context(|| format!("malformed config {}", path.display()))
    }
}

/// Fully resolved run configuration, echoed into sidecars.
#[derive(Debug, Clone, Serialize)]
pub struct ResolvedRun {
    pub system: String,
    pub k: Vec<f64>,
    pub process: ProcessKind,
    pub dt: f64,
    pub t: f64,
    pub paths: usize,
    pub seed: u64,
    pub start: Vec<f64>,
    pub wall_floor: Option<f64>,
    pub drift_cap: Option<f64>,
    pub rate_cap: f64,
    pub stride: Option<usize>,
}

/// Parses a family-rank token such as `A2` or `BC3`.
pub fn parse_system_token(token: &str) -> Result<(Family, usize)> {
    let split = token
        .char_indices()
        .find(|(_, c)| c.is_ascii_digit())
        .map(|(i, _)| i);
    let Some(split) = split else {
        bail!("system `{token}` is missing a rank (expected something like {token}2)");
    };
    let (letters, digits) = token.split_at(split);
    if letters.is_empty() {
        bail!("system `{token}` is missing a family letter (expected something like A2)");
    }
    let family: Family = letters.parse().map_err(|e| anyhow!("{e}"))?;
    let rank: usize = digits
        .parse()
        .with_context(|| format!("system `{token}` has a malformed rank"))?;
    Ok((family, rank))
}

/// Builds the root system from a resolved (system, k, custom) triple.
pub fn build_system(
    system: Option<&str>,
    k: Option<&[f64]>,
    custom: Option<&[CustomRoot]>,
) -> Result<(RootSystem, String)> {
    if let Some(custom) = custom {
        let listed: Vec<(Vec<f64>, f64)> = custom
            .iter()
            .map(|r| (r.vector.clone(), r.multiplicity))
            .collect();
        let sys = RootSystem::custom(&listed)?;
        return Ok((sys, "custom".to_string()));
    }
    let token = system.ok_or_else(|| {
        anyhow!("no root system given: pass --system (e.g. --system A2) or custom_roots in the config file")
    })?;
    let (family, rank) = parse_system_token(token)?;
    let k = k.ok_or_else(|| anyhow!("missing multiplicities: pass --k (one value per orbit)"))?;
    let sys = RootSystem::standard(family, rank, k)?;
    Ok((sys, token.to_uppercase()))
}

/// Parses a comma-separated list of floats.
pub fn parse_float_list(s: &str) -> Result<Vec<f64>> {
    s.split(',')
        .map(|tok| {
            tok.trim()
                .parse::<f64>()
                .with_context(|| format!("cannot parse `{tok}` as a number"))
        })
        .collect()
}

/// Parses a comma-separated list of check names.
pub fn parse_checks(items: &[String]) -> Result<Vec<CheckId>> {
    let mut out = Vec::new();
    for item in items {
        for tok in item.split(',') {
            let tok = tok.trim();
            if tok.is_empty() {
                continue;
            }
            out.push(tok.parse::<CheckId>().map_err(|e| anyhow!("{e}"))?);
        }
    }
    Ok(out)
}
