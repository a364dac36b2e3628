//! Command-line front end: reads an experiment config, runs it, and writes
//! CSV results with a run manifest beside them.
//!
//! Exit codes: 0 success, 1 I/O or self-test failure, 2 configuration or
//! usage error, 3 data error (malformed counts or series, failed fit).

pub mod counts;
pub mod output;
pub mod selftest;

use std::io::Write;
use std::path::{Path, PathBuf};
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};

use monotone_lab::circuits::StateFamily;
use monotone_lab::experiments::{
    fit_series, prep_error_experiment, run_scan, synthesize_counts, ExperimentConfig, ExperimentKind, ScanSeries,
};
use monotone_lab::monotones::{stabilizer_group, E4bVariant, MonotoneName};

use crate::output::{config_hash, write_atomic, RunManifest};

pub const SEED_ENV: &str = "MONOTONE_LAB_SEED";

#[derive(Debug, Clone, PartialEq)]
pub enum CliError {
    Config(String),
    Data(String),
    Io(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Io(_) => 1,
            CliError::Config(_) => 2,
            CliError::Data(_) => 3,
        }
    }
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CliError::Config(m) => write!(f, "config error: {m}"),
            CliError::Data(m) => write!(f, "data error: {m}"),
            CliError::Io(m) => write!(f, "i/o error: {m}"),
        }
    }
}

impl std::error::Error for CliError {}

fn config_err(e: impl std::fmt::Display) -> CliError {
    CliError::Config(e.to_string())
}

fn data_err(e: impl std::fmt::Display) -> CliError {
    CliError::Data(e.to_string())
}

#[derive(Debug, Parser)]
#[command(
    name = "monotone-lab",
    version,
    about = "Simulate and analyze GHZ/cluster entanglement monotone experiments"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Preparation error by direct fidelity estimation over repeated noisy preps.
    PrepError(RunArgs),
    /// Delay scan of monotones, a Pauli expectation, Ramsey fringes or Bell concurrence.
    Scan(ScanArgs),
    /// Fit A cos(2 pi f t) to a scan CSV and print the frequency.
    DriftFit(DriftFitArgs),
    /// Evaluate a monotone from a counts JSONL file, one report per delay.
    AnalyzeCounts(AnalyzeArgs),
    /// List the stabilizer group of a GHZ, Bell or cluster target.
    Stabilizers(StabilizerArgs),
    /// Run the built-in sanity checks.
    Selftest,
    /// Write the counts a sampled monotone scan would measure, as JSONL.
    SynthCounts(RunArgs),
}

#[derive(Debug, Args)]
struct RunArgs {
    #[arg(long)]
    config: PathBuf,
    /// Output file; stdout when omitted.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Overrides the config seed and the environment.
    #[arg(long)]
    seed: Option<u64>,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum ScanKind {
    Monotone,
    Pauli,
    Ramsey,
    Bell,
}

#[derive(Debug, Args)]
struct ScanArgs {
    #[command(flatten)]
    run: RunArgs,
    /// Overrides the config's `experiment`.
    #[arg(long, value_enum)]
    kind: Option<ScanKind>,
    /// Use XYZY instead of the repeated ZYZY term in E4b.
    #[arg(long)]
    e4b_symmetrized: bool,
}

#[derive(Debug, Args)]
struct DriftFitArgs {
    #[arg(long = "in")]
    input: PathBuf,
    /// Quantity column value to fit; required when the series holds several.
    #[arg(long)]
    quantity: Option<String>,
}

#[derive(Debug, Args)]
struct AnalyzeArgs {
    #[arg(long = "in")]
    input: PathBuf,
    #[arg(long)]
    monotone: MonotoneName,
    /// Config supplying the readout model, bootstrap count and seed.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    bootstrap: Option<usize>,
    #[arg(long)]
    e4b_symmetrized: bool,
}

#[derive(Debug, Args)]
struct StabilizerArgs {
    #[arg(long, default_value = "ghz")]
    family: String,
    #[arg(long, default_value_t = 3)]
    n: usize,
    #[arg(long)]
    out: Option<PathBuf>,
}

/// Runs one command with the real environment and standard streams.
pub fn run_command<I, S>(argv: I) -> i32
where
    I: IntoIterator<Item = S>,
    S: Into<std::ffi::OsString> + Clone,
{
    let env_seed = std::env::var(SEED_ENV).ok();
    run_command_with(
        argv,
        env_seed.as_deref(),
        &mut std::io::stdout(),
        &mut std::io::stderr(),
    )
}

/// As [`run_command`], with the seed variable and streams supplied.
pub fn run_command_with<I, S>(argv: I, env_seed: Option<&str>, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = S>,
    S: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let text = e.render().to_string();
            let _ = if code == 0 {
                write!(out, "{text}")
            } else {
                write!(err, "{text}")
            };
            return code;
        }
    };
    match dispatch(cli.command, env_seed, out, err) {
        Ok(code) => code,
        Err(e) => {
            let _ = writeln!(err, "{e}");
            e.exit_code()
        }
    }
}

fn dispatch(cmd: Command, env_seed: Option<&str>, out: &mut dyn Write, err: &mut dyn Write) -> Result<i32, CliError> {
    let start = Instant::now();
    match cmd {
        Command::PrepError(args) => {
            let mut cfg = load_config(&args.config, args.seed, env_seed)?;
            cfg.experiment = ExperimentKind::PrepError;
            cfg.validate().map_err(config_err)?;
            let result = prep_error_experiment(&cfg).map_err(config_err)?;
            emit(
                out,
                "prep-error",
                &cfg,
                args.out.as_deref(),
                result.to_csv_string().as_bytes(),
                start,
            )?;
        }
        Command::Scan(args) => {
            let mut cfg = load_config(&args.run.config, args.run.seed, env_seed)?;
            if let Some(kind) = args.kind {
                cfg.experiment = match kind {
                    ScanKind::Monotone => ExperimentKind::MonotoneScan,
                    ScanKind::Pauli => ExperimentKind::PauliScan,
                    ScanKind::Ramsey => ExperimentKind::RamseyScan,
                    ScanKind::Bell => ExperimentKind::BellScan,
                };
            }
            if args.e4b_symmetrized {
                cfg.e4b_variant = E4bVariant::Symmetrized;
            }
            cfg.validate().map_err(config_err)?;
            let series = run_scan(&cfg).map_err(config_err)?;
            emit(
                out,
                "scan",
                &cfg,
                args.run.out.as_deref(),
                series.to_csv_string().as_bytes(),
                start,
            )?;
        }
        Command::DriftFit(args) => {
            let file =
                std::fs::File::open(&args.input).map_err(|e| data_err(format!("{}: {e}", args.input.display())))?;
            let series = ScanSeries::read_csv(file).map_err(|e| data_err(format!("{}: {e}", args.input.display())))?;
            let fit = fit_series(&series, args.quantity.as_deref()).map_err(data_err)?;
            writeln!(out, "f_hat_hz={}", fit.f_hat_hz).map_err(io_err)?;
            writeln!(out, "amplitude={}", fit.amplitude).map_err(io_err)?;
            writeln!(out, "residual={}", fit.residual).map_err(io_err)?;
        }
        Command::AnalyzeCounts(args) => analyze(args, env_seed, out, err, start)?,
        Command::Stabilizers(args) => {
            let family = StateFamily::parse(&args.family).map_err(config_err)?;
            let group = stabilizer_group(family, args.n).map_err(config_err)?;
            let mut text = String::from("index,pauli\n");
            for (i, p) in group.elements().iter().enumerate() {
                text.push_str(&format!(
                    "{i},{}{}\n",
                    if p.is_negative() { "-" } else { "+" },
                    p.label()
                ));
            }
            match &args.out {
                Some(path) => {
                    write_atomic(path, text.as_bytes())?;
                    RunManifest::new("stabilizers", None, None, std::slice::from_ref(path), start.elapsed())
                        .write_beside(path)?;
                }
                None => out.write_all(text.as_bytes()).map_err(io_err)?,
            }
        }
        Command::Selftest => {
            let failures = selftest::run_selftest(out);
            if failures > 0 {
                writeln!(err, "{failures} self-test check(s) failed").map_err(io_err)?;
                return Ok(1);
            }
        }
        Command::SynthCounts(args) => {
            let cfg = load_config(&args.config, args.seed, env_seed)?;
            cfg.validate().map_err(config_err)?;
            let records = synthesize_counts(&cfg).map_err(config_err)?;
            let mut text = String::new();
            for r in &records {
                text.push_str(&serde_json::to_string(r).expect("record serializes"));
                text.push('\n');
            }
            emit(out, "synth-counts", &cfg, args.out.as_deref(), text.as_bytes(), start)?;
        }
    }
    Ok(0)
}

fn analyze(
    args: AnalyzeArgs,
    env_seed: Option<&str>,
    out: &mut dyn Write,
    err: &mut dyn Write,
    start: Instant,
) -> Result<(), CliError> {
    let cfg = match &args.config {
        Some(path) => Some(load_config(path, args.seed, env_seed)?),
        None => None,
    };
    let seed = resolve_seed(cfg.as_ref().map_or(0, |c| c.seed), args.seed, env_seed)?;
    let bootstrap = args
        .bootstrap
        .or(cfg.as_ref().map(|c| c.bootstrap))
        .unwrap_or(monotone_lab::monotones::DEFAULT_BOOTSTRAP);
    let variant = if args.e4b_symmetrized {
        E4bVariant::Symmetrized
    } else {
        cfg.as_ref().map_or(E4bVariant::default(), |c| c.e4b_variant)
    };
    let readout = match &cfg {
        Some(c) if c.readout_correction => {
            let model = c.noise.to_model(args.monotone.n_qubits()).map_err(config_err)?;
            Some(model.readout_map().map_err(config_err)?)
        }
        _ => None,
    };

    let records = counts::ingest_counts(&args.input)?;
    let analysis = counts::analyze_counts(&records, args.monotone, variant, readout.as_ref(), bootstrap, seed)?;
    for (delay, missing) in &analysis.skipped {
        writeln!(
            err,
            "skipped delay_us={}: missing bases {}",
            fmt_delay(*delay),
            missing.join(", ")
        )
        .map_err(io_err)?;
    }
    let family = records
        .iter()
        .find_map(|r| r.metadata.get("family").cloned())
        .unwrap_or_else(|| "counts".to_string());
    let series = analysis.to_series(&family);
    match &args.out {
        Some(path) => {
            write_atomic(path, series.to_csv_string().as_bytes())?;
            let hash = cfg.as_ref().map(config_hash);
            RunManifest::new(
                "analyze-counts",
                hash,
                Some(seed),
                std::slice::from_ref(path),
                start.elapsed(),
            )
            .write_beside(path)?;
            for (delay, r) in &analysis.reports {
                writeln!(
                    out,
                    "delay_us={} {}={} stderr={}",
                    fmt_delay(*delay),
                    r.name,
                    r.value,
                    r.stderr
                )
                .map_err(io_err)?;
            }
        }
        None => out.write_all(series.to_csv_string().as_bytes()).map_err(io_err)?,
    }
    Ok(())
}

fn fmt_delay(d: Option<f64>) -> String {
    d.map_or_else(|| "none".to_string(), |v| v.to_string())
}

fn io_err(e: std::io::Error) -> CliError {
    CliError::Io(e.to_string())
}

fn resolve_seed(config_seed: u64, flag: Option<u64>, env_seed: Option<&str>) -> Result<u64, CliError> {
    if let Some(s) = flag {
        return Ok(s);
    }
    match env_seed {
        Some(v) => v
            .trim()
            .parse()
            .map_err(|_| CliError::Config(format!("{SEED_ENV}={v:?} is not an unsigned integer"))),
        None => Ok(config_seed),
    }
}

/// Parses a TOML config and applies the seed precedence flag > env > file.
pub fn load_config(path: &Path, flag_seed: Option<u64>, env_seed: Option<&str>) -> Result<ExperimentConfig, CliError> {
    let text = std::fs::read_to_string(path).map_err(|e| CliError::Config(format!("{}: {e}", path.display())))?;
    let mut cfg: ExperimentConfig =
        toml::from_str(&text).map_err(|e| CliError::Config(format!("{}: {e}", path.display())))?;
    cfg.seed = resolve_seed(cfg.seed, flag_seed, env_seed)?;
    Ok(cfg)
}

fn emit(
    out: &mut dyn Write,
    command: &str,
    cfg: &ExperimentConfig,
    path: Option<&Path>,
    contents: &[u8],
    start: Instant,
) -> Result<(), CliError> {
    match path {
        Some(p) => {
            write_atomic(p, contents)?;
            let manifest = RunManifest::new(
                command,
                Some(config_hash(cfg)),
                Some(cfg.seed),
                &[p.to_path_buf()],
                start.elapsed(),
            );
            let m = manifest.write_beside(p)?;
            writeln!(out, "wrote {} ({})", p.display(), m.display()).map_err(io_err)?;
        }
        None => out.write_all(contents).map_err(io_err)?,
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn seed_precedence() {
        assert_eq!(resolve_seed(1, None, None).unwrap(), 1);
        assert_eq!(resolve_seed(1, None, Some("7")).unwrap(), 7);
        assert_eq!(resolve_seed(1, Some(9), Some("7")).unwrap(), 9);
        assert!(resolve_seed(1, None, Some("x")).is_err());
    }

    #[test]
    fn unknown_subcommand_exits_2() {
        let (mut o, mut e) = (Vec::new(), Vec::new());
        assert_eq!(
            run_command_with(["monotone-lab", "frobnicate"], None, &mut o, &mut e),
            2
        );
        assert_eq!(run_command_with(["monotone-lab", "--help"], None, &mut o, &mut e), 0);
    }

    #[test]
    fn missing_config_exits_2() {
        let (mut o, mut e) = (Vec::new(), Vec::new());
        let code = run_command_with(
            ["monotone-lab", "scan", "--config", "/nonexistent.toml"],
            None,
            &mut o,
            &mut e,
        );
        assert_eq!(code, 2);
    }

    #[test]
    fn selftest_passes() {
        let (mut o, mut e) = (Vec::new(), Vec::new());
        assert_eq!(run_command_with(["monotone-lab", "selftest"], None, &mut o, &mut e), 0);
        assert!(!String::from_utf8(o).unwrap().contains("FAIL"));
    }
}
