//! Command-line front end: reads loop files, evaluates Wilson loops exactly
//! and by Monte Carlo, and writes text, JSON or CSV reports.
//!
//! Exit codes: 0 success, 1 usage or parse error, 2 invalid geometry,
//! 3 Monte Carlo estimate more than five standard errors off.

pub mod format;
pub mod report;

use std::io::Write;
use std::path::{Path, PathBuf};
use std::time::Instant;

use clap::{Args, Parser, Subcommand};
use masterfield_core::dsl::{self, DslError, Model};
use masterfield_core::{
    decompose, face_windings, pk_closed, pk_laguerre, pk_recursion_with, wilson_loop, EngineConfig,
    EngineError, GeometryError, LoopWord,
};
use masterfield_mc::{convergence_scan, estimate_trace_moment, McConfig, McError, DEFAULT_SEED};
use serde::Serialize;

use crate::format::{num, opt};
use crate::report::{FaceEntry, Fingerprint, LassoEntry, McSummary, Query, RunReport, Status};

#[derive(Debug, Parser)]
#[command(name = "masterfield", version, about = "Planar Yang-Mills master field calculator")]
pub struct Cli {
    /// Print machine-readable JSON instead of text.
    #[arg(long, global = true)]
    pub json: bool,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Tabulate P_k(t) by recursion, closed form and Laguerre form.
    Pk {
        #[arg(long, default_value_t = 10)]
        k_max: usize,
        /// Comma-separated list of t values.
        #[arg(long = "t", value_delimiter = ',', default_value = "1")]
        t: Vec<f64>,
    },
    /// Exact infinite-N expectation of a loop.
    Expect {
        #[command(flatten)]
        target: Target,
        #[arg(long, default_value_t = 1, allow_negative_numbers = true)]
        k: i64,
        #[command(flatten)]
        caps: Caps,
    },
    /// Finite-N Monte Carlo estimate next to the exact value.
    Mc {
        #[command(flatten)]
        target: Target,
        #[arg(long, default_value_t = 1, allow_negative_numbers = true)]
        k: i64,
        #[arg(long = "N", default_value_t = 128)]
        n: usize,
        #[command(flatten)]
        sampling: Sampling,
        #[command(flatten)]
        caps: Caps,
    },
    /// Monte Carlo at several matrix sizes, as CSV.
    Scan {
        #[command(flatten)]
        target: Target,
        #[arg(long, default_value_t = 1, allow_negative_numbers = true)]
        k: i64,
        /// Comma-separated matrix sizes.
        #[arg(long = "N", value_delimiter = ',', default_value = "8,32,128")]
        n: Vec<usize>,
        #[command(flatten)]
        sampling: Sampling,
        #[command(flatten)]
        caps: Caps,
        /// CSV destination; standard output when absent.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Backtrack reduction and lasso decomposition of a loop.
    Reduce {
        #[command(flatten)]
        target: Target,
    },
}

#[derive(Debug, Args)]
pub struct Target {
    /// Loop description file (JSON).
    pub dsl: PathBuf,
    /// Name of a loop in the file.
    #[arg(value_name = "LOOP")]
    pub loop_name: String,
}

#[derive(Debug, Args)]
pub struct Sampling {
    #[arg(long, default_value_t = 2000)]
    pub samples: usize,
    #[arg(long, default_value_t = DEFAULT_SEED)]
    pub seed: u64,
    #[arg(long, default_value_t = 100)]
    pub steps_per_area: usize,
}

#[derive(Debug, Args)]
pub struct Caps {
    /// Longest lasso word the exact engine accepts.
    #[arg(long, default_value_t = EngineConfig::default().max_alternation)]
    pub max_alternation: usize,
}

impl Caps {
    fn engine(&self) -> EngineConfig {
        EngineConfig {
            max_alternation: self.max_alternation,
            ..EngineConfig::default()
        }
    }
}

#[derive(Debug)]
pub enum CliError {
    Usage(String),
    Geometry(String),
    Statistical(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) => 1,
            CliError::Geometry(_) => 2,
            CliError::Statistical(_) => 3,
        }
    }

    fn message(&self) -> &str {
        match self {
            CliError::Usage(m) | CliError::Geometry(m) | CliError::Statistical(m) => m,
        }
    }
}

impl From<DslError> for CliError {
    fn from(e: DslError) -> Self {
        match e {
            DslError::Geometry(_) | DslError::InvalidLoop { .. } => CliError::Geometry(e.to_string()),
            _ => CliError::Usage(e.to_string()),
        }
    }
}

impl From<GeometryError> for CliError {
    fn from(e: GeometryError) -> Self {
        CliError::Geometry(e.to_string())
    }
}

impl From<EngineError> for CliError {
    fn from(e: EngineError) -> Self {
        match e {
            EngineError::Geometry(g) => g.into(),
            other => CliError::Usage(other.to_string()),
        }
    }
}

impl From<McError> for CliError {
    fn from(e: McError) -> Self {
        match e {
            McError::Engine(inner) => inner.into(),
            other => CliError::Usage(other.to_string()),
        }
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Usage(e.to_string())
    }
}

/// Parses `args` (program name first), runs the command, and returns the
/// process exit code.
pub fn run<I, T>(args: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            if e.use_stderr() {
                let _ = write!(stderr, "{e}");
                return 1;
            }
            let _ = write!(stdout, "{e}");
            return 0;
        }
    };
    match execute(&cli, stdout, stderr) {
        Ok(()) => 0,
        Err(e) => {
            let _ = writeln!(stderr, "error: {}", e.message());
            e.exit_code()
        }
    }
}

fn execute(cli: &Cli, stdout: &mut dyn Write, stderr: &mut dyn Write) -> Result<(), CliError> {
    let started = Instant::now();
    let result = match &cli.command {
        Command::Pk { k_max, t } => cmd_pk(*k_max, t, cli.json, stdout),
        Command::Expect { target, k, caps } => {
            let report = cmd_expect(target, *k, &caps.engine())?;
            emit(&report, cli.json, stdout, stderr)
        }
        Command::Mc {
            target,
            k,
            n,
            sampling,
            caps,
        } => {
            let report = cmd_mc(target, *k, *n, sampling, &caps.engine())?;
            emit(&report, cli.json, stdout, stderr)?;
            match report.mc.as_ref().map(|m| m.status) {
                Some(Status::Fail) => Err(CliError::Statistical(format!(
                    "Monte Carlo mean is {} standard errors from the exact value",
                    opt(report.mc.as_ref().and_then(|m| m.z))
                ))),
                Some(Status::Warning) => {
                    let _ = writeln!(stderr, "warning: |z| > 3, worth a second look");
                    Ok(())
                }
                _ => Ok(()),
            }
        }
        Command::Scan {
            target,
            k,
            n,
            sampling,
            caps,
            out,
        } => cmd_scan(target, *k, n, sampling, &caps.engine(), out.as_deref(), stdout),
        Command::Reduce { target } => {
            let report = cmd_reduce(target)?;
            emit(&report, cli.json, stdout, stderr)
        }
    };
    let _ = writeln!(stderr, "{:<16}{:.3} s", "time total", started.elapsed().as_secs_f64());
    result
}

fn emit(
    report: &RunReport,
    json: bool,
    stdout: &mut dyn Write,
    stderr: &mut dyn Write,
) -> Result<(), CliError> {
    let body = if json { report.to_json() } else { report.to_text() };
    stdout.write_all(body.as_bytes())?;
    for (label, took) in &report.timings {
        let _ = writeln!(stderr, "{:<16}{:.3} s", format!("time {label}"), took.as_secs_f64());
    }
    Ok(())
}

fn load(target: &Target) -> Result<(Model, LoopWord), CliError> {
    let text = std::fs::read_to_string(&target.dsl)
        .map_err(|e| CliError::Usage(format!("{}: {e}", target.dsl.display())))?;
    let model = dsl::parse(&text).map_err(|e| {
        let err = CliError::from(e);
        match err {
            CliError::Usage(m) => CliError::Usage(format!("{}: {m}", target.dsl.display())),
            CliError::Geometry(m) => CliError::Geometry(format!("{}: {m}", target.dsl.display())),
            other => other,
        }
    })?;
    let word = model.loop_word(&target.loop_name)?.clone();
    Ok((model, word))
}

fn base_report(
    command: &'static str,
    target: &Target,
    word: &LoopWord,
    k: Option<i64>,
    engine: &EngineConfig,
) -> RunReport {
    RunReport {
        command,
        query: Query {
            dsl: target.dsl.display().to_string(),
            loop_name: target.loop_name.clone(),
            word: word.to_string(),
            reduced_word: word.backtrack_reduce().to_string(),
            k,
        },
        config: Fingerprint::engine(engine),
        lassos: None,
        faces: None,
        free_value: None,
        mc: None,
        timings: Vec::new(),
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct PkRow {
    pub k: usize,
    pub t: f64,
    pub recursion: f64,
    /// `None` when the closed form overflows.
    pub closed: Option<f64>,
    pub laguerre: f64,
    pub max_discrepancy: Option<f64>,
}

/// `P_k(t)` for `k = 1..=k_max` and every `t`, by all three evaluators.
pub fn pk_table(k_max: usize, ts: &[f64]) -> Result<Vec<PkRow>, CliError> {
    let config = EngineConfig::default();
    let mut rows = Vec::new();
    for &t in ts {
        for k in 1..=k_max {
            let recursion = pk_recursion_with(k, t, &config)?;
            let closed = pk_closed(k, t).ok();
            let laguerre = pk_laguerre(k, t);
            let max_discrepancy = closed.map(|c| {
                (recursion - c)
                    .abs()
                    .max((recursion - laguerre).abs())
                    .max((c - laguerre).abs())
            });
            rows.push(PkRow {
                k,
                t,
                recursion,
                closed,
                laguerre,
                max_discrepancy,
            });
        }
    }
    Ok(rows)
}

fn cmd_pk(k_max: usize, ts: &[f64], json: bool, stdout: &mut dyn Write) -> Result<(), CliError> {
    let rows = pk_table(k_max, ts)?;
    if json {
        let body = serde_json::to_string_pretty(&rows).expect("rows serialize");
        writeln!(stdout, "{body}")?;
        return Ok(());
    }
    writeln!(
        stdout,
        "{:<5}{:<12}{:<18}{:<18}{:<18}{}",
        "k", "t", "recursion", "closed", "laguerre", "max_discrepancy"
    )?;
    for r in &rows {
        writeln!(
            stdout,
            "{:<5}{:<12}{:<18}{:<18}{:<18}{}",
            r.k,
            num(r.t),
            num(r.recursion),
            opt(r.closed),
            num(r.laguerre),
            opt(r.max_discrepancy)
        )?;
    }
    Ok(())
}

pub fn cmd_expect(target: &Target, k: i64, engine: &EngineConfig) -> Result<RunReport, CliError> {
    let started = Instant::now();
    let (model, word) = load(target)?;
    let grid = &model.grid;
    let lassos = decompose(&word, grid)?;
    let value = wilson_loop(&word, grid, k, engine)?;
    let windings = face_windings(&word, grid)?;
    let net = lassos.net_exponents();
    let faces = grid
        .lasso_areas()
        .iter()
        .map(|(&key, &area)| FaceEntry {
            sector: key.sector,
            level: key.level,
            area,
            winding: windings.get(&key).copied().unwrap_or(0),
            net_exponent: net.get(&key).copied().unwrap_or(0),
        })
        .collect();
    let mut report = base_report("expect", target, &word, Some(k), engine);
    report.lassos = Some(LassoEntry::list(&lassos));
    report.faces = Some(faces);
    report.free_value = Some(value);
    report.timings.push(("expect", started.elapsed()));
    Ok(report)
}

pub fn cmd_mc(
    target: &Target,
    k: i64,
    n: usize,
    sampling: &Sampling,
    engine: &EngineConfig,
) -> Result<RunReport, CliError> {
    let (model, word) = load(target)?;
    let lassos = decompose(&word, &model.grid)?;
    let exact_start = Instant::now();
    let free_value = wilson_loop(&word, &model.grid, k, engine)?;
    let exact_took = exact_start.elapsed();
    let config = McConfig {
        n,
        samples: sampling.samples,
        steps_per_unit_area: sampling.steps_per_area,
        seed: sampling.seed,
    };
    let mc_start = Instant::now();
    let est = estimate_trace_moment(&lassos, k, &config)?;
    let mc_took = mc_start.elapsed();

    let mut report = base_report("mc", target, &word, Some(k), engine);
    report.config.seed = Some(config.seed);
    report.config.n = Some(n);
    report.config.samples = Some(config.samples);
    report.config.steps_per_area = Some(config.steps_per_unit_area);
    report.lassos = Some(LassoEntry::list(&lassos));
    report.free_value = Some(free_value);
    report.mc = Some(McSummary::new(&est, free_value));
    report.timings = vec![("exact", exact_took), ("mc", mc_took)];
    Ok(report)
}

fn cmd_scan(
    target: &Target,
    k: i64,
    ns: &[usize],
    sampling: &Sampling,
    engine: &EngineConfig,
    out: Option<&Path>,
    stdout: &mut dyn Write,
) -> Result<(), CliError> {
    let (model, word) = load(target)?;
    let lassos = decompose(&word, &model.grid)?;
    let config = McConfig {
        n: ns.first().copied().unwrap_or(2),
        samples: sampling.samples,
        steps_per_unit_area: sampling.steps_per_area,
        seed: sampling.seed,
    };
    let rows = convergence_scan(&lassos, k, ns, &config, engine)?;
    let mut buffer = Vec::new();
    {
        let mut writer = csv::Writer::from_writer(&mut buffer);
        writer
            .write_record(["N", "mean", "stderr", "free_value", "abs_dev"])
            .map_err(|e| CliError::Usage(e.to_string()))?;
        for row in &rows {
            writer
                .write_record([
                    row.n.to_string(),
                    num(row.estimate.mean),
                    opt(row.estimate.stderr),
                    num(row.free_value),
                    num(row.abs_dev),
                ])
                .map_err(|e| CliError::Usage(e.to_string()))?;
        }
        writer.flush()?;
    }
    match out {
        Some(path) => {
            std::fs::write(path, &buffer)
                .map_err(|e| CliError::Usage(format!("{}: {e}", path.display())))?;
            writeln!(stdout, "wrote {} rows to {}", rows.len(), path.display())?;
        }
        None => stdout.write_all(&buffer)?,
    }
    Ok(())
}

pub fn cmd_reduce(target: &Target) -> Result<RunReport, CliError> {
    let (model, word) = load(target)?;
    let lassos = decompose(&word, &model.grid)?;
    let mut report = base_report("reduce", target, &word, None, &EngineConfig::default());
    report.lassos = Some(LassoEntry::list(&lassos));
    Ok(report)
}
