//! `hoproc`: seeded simulation and verification of Heckman-Opdam, Dunkl and
//! related jump processes on Weyl chambers.
//!
//! Subcommands: `roots` (system dump), `field` (drift / rate tables on a
//! ray), `simulate` (path and event CSVs with a provenance sidecar),
//! `verify` (the check registry, JSON report) and `registry` (check listing).

mod config;

use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{anyhow, bail, Context, Result};
use clap::{Args, Parser, Subcommand};
use serde_json::json;
use sha2::{Digest, Sha256};

use config::{build_system, parse_checks, parse_float_list, FileConfig, ProcessKind, ResolvedRun};
use hoproc::export;
use hoproc::fields;
use hoproc::jump::{simulate_skew_product, SkewConfig, SkewKind};
use hoproc::roots::RootSystem;
use hoproc::sde::{simulate_radial, RadialKind, SimConfig};
use hoproc::verify::{self, CheckId};

#[derive(Parser)]
#[command(
    name = "hoproc",
    about = "Simulation and Monte Carlo verification of chamber-valued jump diffusions",
    version
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Clone, Default)]
struct SystemArgs {
    /// Root system family and rank, e.g. A2, B3, BC1.
    #[arg(long)]
    system: Option<String>,
    /// Comma-separated multiplicities, one per orbit in increasing root
    /// length (e.g. `--k 1.0` for A2, `--k 1.0,0.5` for BC1).
    #[arg(long)]
    k: Option<String>,
    /// Optional TOML config file; flags override file keys.
    #[arg(long)]
    config: Option<PathBuf>,
}

#[derive(Subcommand)]
enum Command {
    /// Dump the root system (one root per line with multiplicity and orbit).
    Roots {
        #[command(flatten)]
        system: SystemArgs,
        /// Output file (stdout when omitted).
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Tabulate a drift field or jump rate along a chamber ray as CSV.
    Field {
        #[command(flatten)]
        system: SystemArgs,
        /// One of: ho-drift, ho-centered, dunkl-drift, intrinsic, girsanov,
        /// ho-rate, dunkl-rate.
        #[arg(long)]
        field: String,
        /// Ray parameter range.
        #[arg(long, default_value_t = 0.05)]
        from: f64,
        #[arg(long, default_value_t = 8.0)]
        to: f64,
        #[arg(long, default_value_t = 200)]
        points: usize,
        /// Ray direction (comma separated); defaults to rho.
        #[arg(long)]
        direction: Option<String>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Simulate paths and write CSVs plus a provenance sidecar.
    Simulate {
        #[command(flatten)]
        system: SystemArgs,
        /// ho | dunkl | f0-complex | ho-radial | dunkl-radial | intrinsic | driftfree
        #[arg(long)]
        process: Option<String>,
        #[arg(long)]
        dt: Option<f64>,
        /// Horizon.
        #[arg(long)]
        t: Option<f64>,
        #[arg(long)]
        paths: Option<usize>,
        #[arg(long)]
        seed: Option<u64>,
        /// Start point (comma separated); defaults to the origin.
        #[arg(long)]
        start: Option<String>,
        #[arg(long)]
        wall_floor: Option<f64>,
        #[arg(long)]
        drift_cap: Option<f64>,
        #[arg(long)]
        rate_cap: Option<f64>,
        /// Record every n-th grid point.
        #[arg(long)]
        stride: Option<usize>,
        /// Paths CSV destination.
        #[arg(long)]
        out: Option<PathBuf>,
        /// Event-log CSV destination (jump processes only).
        #[arg(long)]
        events_out: Option<PathBuf>,
    },
    /// Run verification checks and write the JSON report.
    Verify {
        #[command(flatten)]
        system: SystemArgs,
        /// Comma-separated check names (default: the full registry).
        #[arg(long)]
        checks: Vec<String>,
        /// Path-count scale relative to the standard budgets.
        #[arg(long)]
        scale: Option<f64>,
        #[arg(long)]
        seed: Option<u64>,
        /// Report destination (stdout when omitted).
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// List the verification registry.
    Registry,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => code,
        Err(err) => {
            eprintln!("error: {err:#}");
            ExitCode::from(2)
        }
    }
}

fn run(cli: Cli) -> Result<ExitCode> {
    match cli.command {
        Command::Roots { system, out } => {
            let (sys, _, _) = resolve_system(&system)?;
            let mut sink = open_sink(out.as_deref())?;
            export::write_roots_text(&mut sink, &sys)?;
            Ok(ExitCode::SUCCESS)
        }
        Command::Field {
            system,
            field,
            from,
            to,
            points,
            direction,
            out,
        } => {
            let (sys, _, _) = resolve_system(&system)?;
            let direction = match direction {
                Some(d) => parse_float_list(&d)?,
                None => sys.rho().to_vec(),
            };
            if direction.len() != sys.rank() {
                bail!(
                    "direction has dimension {}, need {}",
                    direction.len(),
                    sys.rank()
                );
            }
            let mut sink = open_sink(out.as_deref())?;
            write_field_table(&mut sink, &sys, &field, from, to, points, &direction)?;
            Ok(ExitCode::SUCCESS)
        }
        Command::Simulate {
            system,
            process,
            dt,
            t,
            paths,
            seed,
            start,
            wall_floor,
            drift_cap,
            rate_cap,
            stride,
            out,
            events_out,
        } => {
            let (sys, label, file) = resolve_system(&system)?;
            let file = file.unwrap_or_default();
            let process: ProcessKind = process
                .or(file.process.clone())
                .ok_or_else(|| anyhow!("missing --process"))?
                .parse()?;
            let start = match start {
                Some(s) => parse_float_list(&s)?,
                None => file.start.clone().unwrap_or_else(|| vec![0.0; sys.rank()]),
            };
            let resolved = ResolvedRun {
                system: label,
                k: sys.positive_roots().map(|r| r.multiplicity).collect(),
                process,
                dt: dt.or(file.dt).ok_or_else(|| anyhow!("missing --dt"))?,
                t: t.or(file.t)
                    .ok_or_else(|| anyhow!("missing --t (horizon)"))?,
                paths: paths
                    .or(file.paths)
                    .ok_or_else(|| anyhow!("missing --paths"))?,
                seed: seed.or(file.seed).unwrap_or(0),
                start,
                wall_floor: wall_floor.or(file.wall_floor),
                drift_cap: drift_cap.or(file.drift_cap),
                rate_cap: rate_cap.or(file.rate_cap).unwrap_or(1e6),
                stride: stride.or(file.stride),
            };
            let out = out
                .or(file.out)
                .ok_or_else(|| anyhow!("missing --out (paths CSV destination)"))?;
            let events_out = events_out.or(file.events_out);
            run_simulate(&sys, &resolved, &out, events_out.as_deref())?;
            Ok(ExitCode::SUCCESS)
        }
        Command::Verify {
            system,
            checks,
            scale,
            seed,
            out,
        } => {
            let (sys, label, file) = resolve_system(&system)?;
            let file = file.unwrap_or_default();
            let selection = {
                let mut items = checks;
                if items.is_empty() {
                    if let Some(from_file) = file.checks.clone() {
                        items = from_file;
                    }
                }
                if items.is_empty() {
                    CheckId::ALL.to_vec()
                } else {
                    parse_checks(&items)?
                }
            };
            let scale = scale.or(file.scale).unwrap_or(1.0);
            let seed = seed.or(file.seed);
            let echo = json!({
                "system": label,
                "k": sys.positive_roots().map(|r| r.multiplicity).collect::<Vec<_>>(),
                "scale": scale,
                "seed_override": seed,
                "checks": selection.iter().map(|c| c.info().name).collect::<Vec<_>>(),
            });
            let report = verify::run_all(&sys, &selection, scale, seed, echo);
            for entry in &report.entries {
                let verdict = match entry.pass {
                    Some(true) => "pass",
                    Some(false) => "FAIL",
                    None => "skipped",
                };
                eprintln!(
                    "{:<12} {:<8} {:.1}s  {}",
                    entry.id,
                    verdict,
                    entry.runtime_sec,
                    entry
                        .skip_reason
                        .clone()
                        .unwrap_or_else(|| entry.statement.clone())
                );
            }
            let rendered = serde_json::to_string_pretty(&report)?;
            let out_path = out.or(file.report_out);
            match out_path {
                Some(path) => {
                    std::fs::write(&path, rendered.as_bytes())
                        .with_context(|| format!("cannot write {}", path.display()))?;
                }
                None => println!("{rendered}"),
            }
            Ok(if report.all_passed() {
                ExitCode::SUCCESS
            } else {
                ExitCode::FAILURE
            })
        }
        Command::Registry => {
            println!("{} registered checks:", verify::REGISTRY.len());
            for info in &verify::REGISTRY {
                println!(
                    "  {:<12} seed {:<6} {}",
                    info.name, info.default_seed, info.statement
                );
            }
            Ok(ExitCode::SUCCESS)
        }
    }
}

fn resolve_system(args: &SystemArgs) -> Result<(RootSystem, String, Option<FileConfig>)> {
    let file = match &args.config {
        Some(path) => Some(FileConfig::load(path)?),
        None => None,
    };
    let defaults = FileConfig::default();
    let file_ref = file.as_ref().unwrap_or(&defaults);
    let k_flag = match &args.k {
        Some(s) => Some(parse_float_list(s)?),
        None => None,
    };
    let system = args.system.as_deref().or(file_ref.system.as_deref());
    let k = k_flag.or_else(|| file_ref.k.clone());
    let (sys, label) = build_system(system, k.as_deref(), file_ref.custom_roots.as_deref())?;
    Ok((sys, label, file))
}

fn open_sink(path: Option<&Path>) -> Result<Box<dyn Write>> {
    Ok(match path {
        Some(p) => Box::new(BufWriter::new(
            File::create(p).with_context(|| format!("cannot create {}", p.display()))?,
        )),
        None => Box::new(std::io::stdout().lock()),
    })
}

fn write_field_table(
    sink: &mut impl Write,
    sys: &RootSystem,
    field: &str,
    from: f64,
    to: f64,
    points: usize,
    direction: &[f64],
) -> Result<()> {
    if points < 2 || !(from > 0.0) || !(to > from) {
        bail!("need points >= 2 and 0 < from < to");
    }
    let n = sys.rank();
    let dunkl = sys.rescale_to_dunkl();
    enum Table {
        Vector(&'static str),
        Rates(&'static str),
    }
    let kind = match field {
        "ho-drift" | "ho-centered" | "dunkl-drift" | "intrinsic" | "girsanov" => Table::Vector("f"),
        "ho-rate" | "dunkl-rate" => Table::Rates("rate"),
        other => bail!(
            "unknown field `{other}` (expected ho-drift, ho-centered, dunkl-drift, intrinsic, \
             girsanov, ho-rate or dunkl-rate)"
        ),
    };
    write!(sink, "s")?;
    for i in 1..=n {
        write!(sink, ",x_{i}")?;
    }
    match &kind {
        Table::Vector(tag) => {
            for i in 1..=n {
                write!(sink, ",{tag}_{i}")?;
            }
        }
        Table::Rates(tag) => {
            let count = match field {
                "dunkl-rate" => dunkl.num_positive(),
                _ => sys.num_positive(),
            };
            for i in 0..count {
                write!(sink, ",{tag}_{i}")?;
            }
        }
    }
    writeln!(sink)?;
    for j in 0..points {
        let s = from + (to - from) * j as f64 / (points - 1) as f64;
        let x: Vec<f64> = direction.iter().map(|d| d * s).collect();
        write!(sink, "{s}")?;
        for xi in &x {
            write!(sink, ",{xi}")?;
        }
        match field {
            "ho-drift" => write_vec(sink, &fields::ho_radial_drift(sys, &x)?)?,
            "ho-centered" => write_vec(sink, &fields::ho_centered_drift(sys, &x)?)?,
            "dunkl-drift" => write_vec(sink, &fields::dunkl_radial_drift(&dunkl, &x)?)?,
            "intrinsic" => write_vec(sink, &fields::intrinsic_drift(sys, &x)?)?,
            "girsanov" => write_vec(sink, &fields::girsanov_integrand(sys, &x))?,
            "ho-rate" => {
                for a in 0..sys.num_positive() {
                    write!(sink, ",{}", fields::ho_jump_rate(sys, a, &x))?;
                }
                writeln!(sink)?;
            }
            "dunkl-rate" => {
                for a in 0..dunkl.num_positive() {
                    write!(sink, ",{}", fields::dunkl_jump_rate(&dunkl, a, &x))?;
                }
                writeln!(sink)?;
            }
            _ => unreachable!(),
        }
    }
    Ok(())
}

fn write_vec(sink: &mut impl Write, v: &[f64]) -> Result<()> {
    for x in v {
        write!(sink, ",{x}")?;
    }
    writeln!(sink)?;
    Ok(())
}

fn run_simulate(
    sys: &RootSystem,
    run: &ResolvedRun,
    out: &Path,
    events_out: Option<&Path>,
) -> Result<()> {
    let mut sim = SimConfig::new(
        radial_kind(run.process),
        run.start.clone(),
        run.dt,
        run.t,
        run.paths,
        run.seed,
    );
    sim.wall_floor = run.wall_floor;
    sim.drift_cap = run.drift_cap;
    sim.record_stride = run.stride;

    let mut outputs = Vec::new();
    if run.process.is_skew() {
        let skew_kind = match run.process {
            ProcessKind::Ho => SkewKind::HeckmanOpdam,
            ProcessKind::Dunkl => SkewKind::Dunkl,
            ProcessKind::F0Complex => SkewKind::F0Complex,
            _ => unreachable!(),
        };
        // the rational process runs on the rescaled system
        let owned;
        let target: &RootSystem = if skew_kind == SkewKind::Dunkl {
            owned = sys.rescale_to_dunkl();
            &owned
        } else {
            sys
        };
        let mut cfg = SkewConfig::new(skew_kind, sim);
        cfg.rate_cap = run.rate_cap;
        let batch = simulate_skew_product(target, &cfg)?;
        for w in &batch.warnings {
            eprintln!("warning: {w}");
        }
        let mut buf = Vec::new();
        export::write_skew_paths_csv(&mut buf, target, &batch.paths)?;
        outputs.push(write_artifact(out, &buf)?);
        if let Some(events_path) = events_out {
            let mut ebuf = Vec::new();
            export::write_events_csv(&mut ebuf, &batch.paths, target.rank())?;
            outputs.push(write_artifact(events_path, &ebuf)?);
        }
    } else {
        let owned;
        let target: &RootSystem = if run.process == ProcessKind::DunklRadial {
            owned = sys.rescale_to_dunkl();
            &owned
        } else {
            sys
        };
        let batch = simulate_radial(target, &sim)?;
        for w in &batch.warnings {
            eprintln!("warning: {w}");
        }
        let mut buf = Vec::new();
        export::write_radial_paths_csv(&mut buf, &batch.paths, target.rank())?;
        outputs.push(write_artifact(out, &buf)?);
        if events_out.is_some() {
            bail!("--events-out applies only to the jump processes (ho, dunkl, f0-complex)");
        }
    }

    let sidecar = json!({
        "config": run,
        "outputs": outputs,
    });
    let meta_path = sidecar_path(out);
    std::fs::write(&meta_path, serde_json::to_string_pretty(&sidecar)?)
        .with_context(|| format!("cannot write {}", meta_path.display()))?;
    Ok(())
}

fn radial_kind(process: ProcessKind) -> RadialKind {
    match process {
        ProcessKind::Ho | ProcessKind::HoRadial => RadialKind::HeckmanOpdam,
        ProcessKind::Dunkl | ProcessKind::DunklRadial => RadialKind::Dunkl,
        ProcessKind::F0Complex | ProcessKind::Intrinsic => RadialKind::Intrinsic,
        ProcessKind::Driftfree => RadialKind::DriftFree,
    }
}

fn sidecar_path(out: &Path) -> PathBuf {
    let mut name = out.file_name().unwrap_or_default().to_os_string();
    name.push(".meta.json");
    out.with_file_name(name)
}

fn write_artifact(path: &Path, bytes: &[u8]) -> Result<serde_json::Value> {
    std::fs::write(path, bytes).with_context(|| format!("cannot write {}", path.display()))?;
    let mut hasher = Sha256::new();
    hasher.update(bytes);
    let digest = hasher.finalize();
    let hex: String = digest.iter().map(|b| format!("{b:02x}")).collect();
    let rows = bytes
        .iter()
        .filter(|&&b| b == b'\n')
        .count()
        .saturating_sub(1);
    Ok(json!({
        "file": path.display().to_string(),
        "sha256": hex,
        "rows": rows,
    }))
}
