//! Command-line front end for `dmtlab`.
//!
//! Each subcommand has a `cmd_*` function that returns its output as text,
//! so the binary is a thin layer that parses flags and writes files.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use dmtlab::dmt::{curve_points, CurveKind};
use dmtlab::io::{self, RunConfig, TranscriptLine};
use dmtlab::montecarlo::{self, db_to_linear, Node, SimResult};
use dmtlab::oracle::{self, CaseOutcome};
use dmtlab::protocol::{ProtocolConfig, ProtocolKind, DEFAULT_DETECT_WINDOW};

/// Grid used when neither a flag nor the config file gives one.
pub const DEFAULT_GRID_DB: [f64; 5] = [15.0, 20.0, 25.0, 30.0, 35.0];

/// Errors that end a command, split by exit status.
#[derive(Debug, thiserror::Error)]
pub enum CliError {
    /// Bad flags, unknown names, unreadable input: exit status 2.
    #[error("{0}")]
    Usage(String),
    /// A check ran and failed: exit status 1.
    #[error("{0}")]
    Check(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) => 2,
            CliError::Check(_) => 1,
        }
    }
}

impl From<dmtlab::Error> for CliError {
    fn from(e: dmtlab::Error) -> Self {
        CliError::Usage(e.to_string())
    }
}

pub type CliResult<T> = std::result::Result<T, CliError>;

fn usage<T>(msg: impl Into<String>) -> CliResult<T> {
    Err(CliError::Usage(msg.into()))
}

#[derive(Debug, Parser)]
#[command(name = "dmtlab", version, about = "Diversity-multiplexing tradeoff toolkit for feedback protocols")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Write the tradeoff curve of a protocol as `r,d` rows.
    Curve(CurveArgs),
    /// Evaluate exponent-oracle cases against their closed forms.
    Oracle(OracleArgs),
    /// Estimate the outage rate at a single SNR.
    Simulate(RunArgs),
    /// Estimate outage rates over an SNR grid.
    Sweep(RunArgs),
    /// Fit the diversity slope of a results file.
    Fit(FitArgs),
    /// Check the mean-energy growth of one node in a results file.
    Audit(AuditArgs),
}

#[derive(Debug, Args)]
pub struct CurveArgs {
    #[arg(long)]
    pub protocol: String,
    #[arg(long, default_value_t = 1)]
    pub m: usize,
    #[arg(long, default_value_t = 1)]
    pub n: usize,
    #[arg(long, default_value_t = 2)]
    pub k: usize,
    #[arg(long, default_value_t = 0.05)]
    pub r_step: f64,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct OracleArgs {
    /// Case id, or `all`.
    #[arg(default_value = "all")]
    pub case: String,
    #[arg(long, default_value_t = 1e-2)]
    pub grid_step: f64,
    /// Print the case ids and exit.
    #[arg(long)]
    pub list: bool,
}

/// Flags shared by `simulate` and `sweep`. Unset flags fall back to the
/// config file, then to built-in defaults.
#[derive(Debug, Args, Default)]
pub struct RunArgs {
    #[arg(long)]
    pub config: Option<PathBuf>,
    #[arg(long)]
    pub protocol: Option<String>,
    #[arg(long)]
    pub m: Option<usize>,
    #[arg(long)]
    pub n: Option<usize>,
    #[arg(long)]
    pub k: Option<usize>,
    #[arg(long)]
    pub r: Option<f64>,
    #[arg(long)]
    pub epsilon: Option<f64>,
    #[arg(long)]
    pub delta: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    pub snr_db: Option<f64>,
    /// Comma-separated list, e.g. `15,20,25`.
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    pub snr_grid_db: Option<Vec<f64>>,
    #[arg(long)]
    pub trials: Option<u64>,
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long)]
    pub workers: Option<usize>,
    #[arg(long)]
    pub out: Option<String>,
    /// `csv` or `json`.
    #[arg(long)]
    pub format: Option<String>,
    #[arg(long)]
    pub noiseless: bool,
    /// Write the first N transcripts of each SNR point.
    #[arg(long)]
    pub dump_transcripts: Option<u64>,
    /// Energy-detection window in symbols.
    #[arg(long)]
    pub detect_window: Option<usize>,
}

#[derive(Debug, Args)]
pub struct FitArgs {
    pub results: PathBuf,
    /// Where to write the `log10_snr,log10_rate,fit` table.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct AuditArgs {
    pub results: PathBuf,
    /// `tx` or `rx`.
    #[arg(long, default_value = "tx")]
    pub node: String,
    #[arg(long, default_value_t = 0.1)]
    pub margin: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Format {
    Csv,
    Json,
}

impl std::str::FromStr for Format {
    type Err = CliError;
    fn from_str(s: &str) -> CliResult<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "csv" => Ok(Format::Csv),
            "json" => Ok(Format::Json),
            _ => usage(format!("unknown format `{s}`, expected csv or json")),
        }
    }
}

/// Fully resolved settings of a `simulate` or `sweep` run.
#[derive(Debug, Clone, PartialEq)]
pub struct RunSettings {
    pub protocol: ProtocolConfig,
    pub grid_db: Vec<f64>,
    pub trials: u64,
    pub seed: u64,
    pub workers: usize,
    pub out: Option<String>,
    pub format: Format,
    pub dump_transcripts: u64,
}

impl RunArgs {
    /// The flags as a config record, so they can be layered over a file.
    pub fn as_config(&self) -> RunConfig {
        RunConfig {
            protocol: self.protocol.clone(),
            m: self.m,
            n: self.n,
            k: self.k,
            r: self.r,
            epsilon: self.epsilon,
            delta: self.delta,
            snr_db: self.snr_db,
            snr_grid_db: self.snr_grid_db.clone(),
            trials: self.trials,
            seed: self.seed,
            workers: self.workers,
            out: self.out.clone(),
            format: self.format.clone(),
            noiseless: self.noiseless.then_some(true),
            dump_transcripts: self.dump_transcripts,
            detect_window: self.detect_window,
        }
    }
}

/// Fields set in `top` win over those in `base`.
pub fn layer(top: RunConfig, base: RunConfig) -> RunConfig {
    RunConfig {
        protocol: top.protocol.or(base.protocol),
        m: top.m.or(base.m),
        n: top.n.or(base.n),
        k: top.k.or(base.k),
        r: top.r.or(base.r),
        epsilon: top.epsilon.or(base.epsilon),
        delta: top.delta.or(base.delta),
        snr_db: top.snr_db.or(base.snr_db),
        snr_grid_db: top.snr_grid_db.or(base.snr_grid_db),
        trials: top.trials.or(base.trials),
        seed: top.seed.or(base.seed),
        workers: top.workers.or(base.workers),
        out: top.out.or(base.out),
        format: top.format.or(base.format),
        noiseless: top.noiseless.or(base.noiseless),
        dump_transcripts: top.dump_transcripts.or(base.dump_transcripts),
        detect_window: top.detect_window.or(base.detect_window),
    }
}

fn default_workers() -> usize {
    std::thread::available_parallelism().map_or(1, |n| n.get())
}

/// Turns a layered config into run settings. `single` selects one SNR
/// point (`simulate`) instead of a grid (`sweep`).
pub fn resolve(cfg: &RunConfig, single: bool) -> CliResult<RunSettings> {
    let Some(name) = &cfg.protocol else {
        return usage("--protocol is required");
    };
    let kind: ProtocolKind = name.parse()?;
    let Some(seed) = cfg.seed else {
        return usage("--seed is required; runs never draw a seed on their own");
    };
    let grid_db = if single {
        vec![cfg.snr_db.unwrap_or(20.0)]
    } else {
        cfg.snr_grid_db.clone().unwrap_or_else(|| DEFAULT_GRID_DB.to_vec())
    };
    if let Some(x) = grid_db.iter().find(|x| !x.is_finite()) {
        return usage(format!("SNR values must be finite, got {x}"));
    }
    let workers = cfg.workers.unwrap_or_else(default_workers);
    if workers == 0 {
        return usage("--workers must be at least 1");
    }
    let trials = cfg.trials.unwrap_or(100_000);
    if trials == 0 {
        return usage("--trials must be at least 1");
    }
    let mut protocol = ProtocolConfig::new(
        kind,
        cfg.m.unwrap_or(1),
        cfg.n.unwrap_or(1),
        cfg.k.unwrap_or(2),
        cfg.r.unwrap_or(0.5),
        cfg.epsilon.unwrap_or(0.1),
        cfg.delta.unwrap_or(0.05),
        db_to_linear(grid_db.first().copied().unwrap_or(20.0)),
    );
    protocol.noiseless = cfg.noiseless.unwrap_or(false);
    protocol.detect_window = cfg.detect_window.unwrap_or(DEFAULT_DETECT_WINDOW);
    for &db in &grid_db {
        let mut c = protocol.clone();
        c.snr = db_to_linear(db);
        c.validate()?;
    }
    let format = match &cfg.format {
        Some(f) => f.parse()?,
        None => Format::Csv,
    };
    Ok(RunSettings {
        protocol,
        grid_db,
        trials,
        seed,
        workers,
        out: cfg.out.clone(),
        format,
        dump_transcripts: cfg.dump_transcripts.unwrap_or(0),
    })
}

/// Tradeoff curve as a `r,d` table.
pub fn cmd_curve(protocol: &str, m: usize, n: usize, k: usize, r_step: f64) -> CliResult<String> {
    let kind: CurveKind = protocol.parse()?;
    let pts = curve_points(kind, m, n, k, r_step)?;
    Ok(io::curve_to_csv(&pts))
}

/// Oracle outcomes and a printable table with one row per case.
pub fn cmd_oracle(case: &str, grid_step: f64) -> CliResult<(Vec<CaseOutcome>, String)> {
    if !(grid_step > 0.0) {
        return usage("--grid-step must be positive");
    }
    let outcomes = match oracle::run_catalog(case, grid_step) {
        Err(dmtlab::Error::UnknownCase(id)) => {
            return usage(format!("unknown case `{id}`; run `dmtlab oracle --list` for the ids"))
        }
        r => r?,
    };
    let mut s = format!("{:<60} {:>10} {:>10} {:>10} {:>8}  verdict\n", "case", "computed", "target", "|diff|", "tol");
    for o in &outcomes {
        let diff = if o.target.is_infinite() && o.value.is_infinite() { 0.0 } else { (o.value - o.target).abs() };
        let _ = writeln!(
            s,
            "{:<60} {:>10.4} {:>10.4} {:>10.2e} {:>8.3}  {}",
            o.label,
            o.value,
            o.target,
            diff,
            o.tolerance,
            if o.pass { "pass" } else { "FAIL" }
        );
    }
    Ok((outcomes, s))
}

/// Output of a `simulate` or `sweep` run.
#[derive(Debug, Clone, PartialEq)]
pub struct RunOutput {
    pub results: Vec<SimResult>,
    /// Results table in the requested format.
    pub text: String,
    /// Line-delimited transcript records, if any were requested.
    pub transcripts: Option<String>,
}

pub fn cmd_sweep(settings: &RunSettings) -> CliResult<RunOutput> {
    let s = settings;
    let results = montecarlo::sweep(&s.protocol, &s.grid_db, s.trials, s.seed, s.workers)?;
    let text = match s.format {
        Format::Csv => io::results_to_csv(&results)?,
        Format::Json => io::results_to_json(&results)? + "\n",
    };
    let transcripts = if s.dump_transcripts > 0 {
        let mut lines = Vec::new();
        for &db in &s.grid_db {
            let mut c = s.protocol.clone();
            c.snr = db_to_linear(db);
            let count = s.dump_transcripts.min(s.trials);
            for (i, t) in montecarlo::transcripts(&c, count, s.seed)?.into_iter().enumerate() {
                lines.push(TranscriptLine { trial: i as u64, protocol: c.kind, snr_db: db, transcript: t });
            }
        }
        Some(io::transcripts_to_jsonl(&lines)?)
    } else {
        None
    };
    Ok(RunOutput { results, text, transcripts })
}

/// Slope report line and the plot table.
pub fn cmd_fit(results_text: &str) -> CliResult<(montecarlo::SlopeFit, String, String)> {
    let results = io::parse_results(results_text)?;
    let fit = match montecarlo::fit_diversity_slope(&results) {
        Err(e @ dmtlab::Error::InsufficientData(_)) => return Err(CliError::Check(e.to_string())),
        r => r?,
    };
    let report = format!(
        "d_hat = {:.4} +/- {:.4} (slope {:.4}, intercept {:.4}, {} of {} points)\n",
        fit.d_hat,
        fit.stderr,
        fit.slope,
        fit.intercept,
        fit.points.len(),
        results.len()
    );
    let plot = io::fit_to_csv(&fit);
    Ok((fit, report, plot))
}

pub fn cmd_audit(results_text: &str, node: &str, margin: f64) -> CliResult<(montecarlo::AuditReport, String)> {
    let node: Node = node.parse()?;
    let results = io::parse_results(results_text)?;
    let rep = montecarlo::power_audit(&results, node, margin)?;
    let text = format!(
        "{} energy slope {:.4} (limit {:.4}): {}\n",
        match node {
            Node::Tx => "transmitter",
            Node::Rx => "receiver",
        },
        rep.slope,
        rep.limit,
        if rep.pass { "pass" } else { "FAIL" }
    );
    Ok((rep, text))
}

fn read(path: &Path) -> CliResult<String> {
    std::fs::read_to_string(path).map_err(|e| CliError::Usage(format!("cannot read {}: {e}", path.display())))
}

fn write(path: &Path, text: &str) -> CliResult<()> {
    std::fs::write(path, text).map_err(|e| CliError::Usage(format!("cannot write {}: {e}", path.display())))
}

fn emit(out: Option<&Path>, text: &str) -> CliResult<()> {
    match out {
        Some(p) => write(p, text),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

/// Where transcripts go: next to the results file, or `transcripts.jsonl`.
pub fn transcript_path(out: Option<&str>) -> PathBuf {
    match out {
        Some(o) => {
            let p = Path::new(o);
            let stem = p.file_stem().map_or_else(|| "results".into(), |s| s.to_string_lossy().into_owned());
            p.with_file_name(format!("{stem}.transcripts.jsonl"))
        }
        None => PathBuf::from("transcripts.jsonl"),
    }
}

fn run_simulation(args: &RunArgs, single: bool) -> CliResult<()> {
    let file = match &args.config {
        Some(p) => io::parse_config(&read(p)?)?,
        None => RunConfig::default(),
    };
    let settings = resolve(&layer(args.as_config(), file), single)?;
    let out = cmd_sweep(&settings)?;
    emit(settings.out.as_deref().map(Path::new), &out.text)?;
    if let Some(t) = &out.transcripts {
        let p = transcript_path(settings.out.as_deref());
        write(&p, t)?;
        eprintln!("wrote transcripts to {}", p.display());
    }
    Ok(())
}

/// Runs a parsed command line.
pub fn run(cli: Cli) -> CliResult<()> {
    match cli.command {
        Command::Curve(a) => {
            let text = cmd_curve(&a.protocol, a.m, a.n, a.k, a.r_step)?;
            emit(a.out.as_deref(), &text)
        }
        Command::Oracle(a) => {
            if a.list {
                let mut seen = std::collections::BTreeSet::new();
                for c in oracle::catalog() {
                    if seen.insert(c.id) {
                        println!("{:<36} {}", c.id, c.about);
                    }
                }
                return Ok(());
            }
            let (outcomes, table) = cmd_oracle(&a.case, a.grid_step)?;
            print!("{table}");
            let failed = outcomes.iter().filter(|o| !o.pass).count();
            if failed > 0 {
                return Err(CliError::Check(format!("{failed} of {} case(s) failed", outcomes.len())));
            }
            Ok(())
        }
        Command::Simulate(a) => run_simulation(&a, true),
        Command::Sweep(a) => run_simulation(&a, false),
        Command::Fit(a) => {
            let (_, report, plot) = cmd_fit(&read(&a.results)?)?;
            print!("{report}");
            let out = a.out.unwrap_or_else(|| {
                let stem = a.results.file_stem().map_or_else(|| "results".into(), |s| s.to_string_lossy().into_owned());
                a.results.with_file_name(format!("{stem}.fit.csv"))
            });
            write(&out, &plot)
        }
        Command::Audit(a) => {
            let (rep, text) = cmd_audit(&read(&a.results)?, &a.node, a.margin)?;
            print!("{text}");
            if rep.pass {
                Ok(())
            } else {
                Err(CliError::Check("energy grows faster than allowed".into()))
            }
        }
    }
}
