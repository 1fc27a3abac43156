//! Command-line front end: `run`, `bench`, `validate` and `trace-dump`.
//!
//! Exit statuses: 0 on success, 2 for configuration or input errors, 3 when
//! a run aborts at runtime.

use std::ffi::OsString;
use std::fs::{self, File};
use std::io::{BufReader, Write};
use std::path::{Path, PathBuf};

use clap::{ArgAction, Parser, Subcommand};
use serde::de::DeserializeOwned;

use crate::bench::{run_experiment, write_csv, ExperimentResult, ExperimentSpec, RunSpec, REGRET_HEADER};
use crate::bo::BoTrace;
use crate::error::Error;

/// Environment variable consulted for a seed when `--seed` is absent.
pub const SEED_ENV: &str = "MAXENT_BO_SEED";

pub const EXIT_OK: i32 = 0;
pub const EXIT_CONFIG: i32 = 2;
pub const EXIT_RUNTIME: i32 = 3;

#[derive(Debug, Parser)]
#[command(name = "maxent-bo", version, about = "Max-value entropy search for Bayesian optimization")]
pub struct Cli {
    /// More log output on stderr (repeatable).
    #[arg(short, long, action = ArgAction::Count, global = true)]
    pub verbose: u8,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Optimize one objective with one method.
    Run {
        #[arg(short, long)]
        config: PathBuf,
        #[arg(short, long)]
        out: PathBuf,
        /// Overrides the config seed and MAXENT_BO_SEED.
        #[arg(long)]
        seed: Option<u64>,
    },
    /// Run a methods × objectives × repetitions grid.
    Bench {
        #[arg(short, long)]
        config: PathBuf,
        #[arg(short, long)]
        out: PathBuf,
        /// Concurrent repetitions; defaults to the number of logical cores.
        #[arg(long)]
        parallel: Option<usize>,
        /// Exit non-zero if any run fails.
        #[arg(long)]
        strict: bool,
    },
    /// Check a run or bench config without executing it.
    Validate {
        #[arg(short, long)]
        config: PathBuf,
    },
    /// Pretty-print a trace file.
    TraceDump { file: PathBuf },
}

/// Failure of a subcommand, mapped to an exit status.
#[derive(Debug)]
pub enum CliError {
    Config(String),
    Runtime(String),
}

impl CliError {
    pub fn status(&self) -> i32 {
        match self {
            CliError::Config(_) => EXIT_CONFIG,
            CliError::Runtime(_) => EXIT_RUNTIME,
        }
    }

    pub fn message(&self) -> &str {
        match self {
            CliError::Config(m) | CliError::Runtime(m) => m,
        }
    }
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CliError::Config(m) => write!(f, "config error: {m}"),
            CliError::Runtime(m) => write!(f, "run aborted: {m}"),
        }
    }
}

fn config_err(e: Error) -> CliError {
    match e {
        Error::Config(m) => CliError::Config(m),
        other => CliError::Config(other.to_string()),
    }
}

fn runtime_err(e: Error) -> CliError {
    CliError::Runtime(e.to_string())
}

/// A parsed configuration file of either kind.
#[derive(Debug, Clone)]
pub enum ConfigFile {
    Run(RunSpec),
    Bench(ExperimentSpec),
}

fn parse_as<T: DeserializeOwned>(path: &Path, text: &str) -> Result<T, CliError> {
    toml::from_str(text).map_err(|e| CliError::Config(format!("{}: {e}", path.display())))
}

/// Read and validate a config. A top-level `methods` key marks a bench
/// config; anything else is read as a single run.
pub fn load_config(path: &Path) -> Result<ConfigFile, CliError> {
    let text = fs::read_to_string(path).map_err(|e| CliError::Config(format!("{}: {e}", path.display())))?;
    let table: toml::Table = parse_as(path, &text)?;
    let cfg = if table.contains_key("methods") {
        ConfigFile::Bench(parse_as(path, &text)?)
    } else {
        ConfigFile::Run(parse_as(path, &text)?)
    };
    match &cfg {
        ConfigFile::Run(r) => r.validate(),
        ConfigFile::Bench(b) => b.validate(),
    }
    .map_err(|e| CliError::Config(format!("{}: {}", path.display(), config_err(e).message())))?;
    Ok(cfg)
}

fn env_seed() -> Result<Option<u64>, CliError> {
    match std::env::var(SEED_ENV) {
        Ok(v) => v
            .trim()
            .parse()
            .map(Some)
            .map_err(|_| CliError::Config(format!("{SEED_ENV}={v:?} is not a non-negative integer"))),
        Err(_) => Ok(None),
    }
}

fn cmd_run(config: &Path, out: &Path, seed: Option<u64>, stdout: &mut dyn Write) -> Result<(), CliError> {
    let mut spec = match load_config(config)? {
        ConfigFile::Run(r) => r,
        ConfigFile::Bench(_) => {
            return Err(CliError::Config(format!("{}: bench config given to `run`", config.display())))
        }
    };
    let seed = match seed {
        Some(s) => Some(s),
        None => env_seed()?,
    };
    if let Some(s) = seed {
        spec.seed = s;
    }
    let result = run_experiment(&spec.as_experiment(), Some(1)).map_err(config_err)?;
    write_run_outputs(&result, out)?;
    let run = &result.runs[0];
    if let Some(e) = &run.error {
        return Err(CliError::Runtime(format!("{} on {} (seed {}): {e}", run.method, run.objective, run.seed)));
    }
    let last = run.regret.last();
    let _ = writeln!(
        stdout,
        "{} on {} (seed {}): {} iterations, final simple regret {}",
        run.method,
        run.objective,
        run.seed,
        run.regret.len(),
        last.map_or(f64::NAN, |r| r.r_t)
    );
    Ok(())
}

fn write_run_outputs(result: &ExperimentResult, out: &Path) -> Result<(), CliError> {
    fs::create_dir_all(out).map_err(|e| CliError::Runtime(format!("{}: {e}", out.display())))?;
    for r in &result.runs {
        if let Some(trace) = &r.trace {
            let path = out.join(r.trace_file_name());
            let f = File::create(&path).map_err(|e| CliError::Runtime(format!("{}: {e}", path.display())))?;
            trace
                .write_jsonl(std::io::BufWriter::new(f))
                .map_err(|e| CliError::Runtime(format!("{}: {e}", path.display())))?;
        }
    }
    write_csv(&out.join("regret.csv"), &REGRET_HEADER, &result.regret_rows()).map_err(runtime_err)
}

fn cmd_bench(
    config: &Path,
    out: &Path,
    parallel: Option<usize>,
    strict: bool,
    stdout: &mut dyn Write,
) -> Result<(), CliError> {
    let spec = match load_config(config)? {
        ConfigFile::Bench(b) => b,
        ConfigFile::Run(_) => {
            return Err(CliError::Config(format!("{}: run config given to `bench`", config.display())))
        }
    };
    if parallel == Some(0) {
        return Err(CliError::Config("--parallel must be at least 1".into()));
    }
    let result = run_experiment(&spec, parallel).map_err(config_err)?;
    result.write(out).map_err(runtime_err)?;
    let failed = result.failed_count();
    let _ = writeln!(stdout, "{} runs, {failed} failed; results in {}", result.runs.len(), out.display());
    if strict && failed > 0 {
        return Err(CliError::Runtime(format!("{failed} of {} runs failed", result.runs.len())));
    }
    Ok(())
}

fn fmt_point(x: &[f64]) -> String {
    let parts: Vec<String> = x.iter().map(|v| format!("{v:.6}")).collect();
    format!("[{}]", parts.join(", "))
}

fn cmd_trace_dump(file: &Path, stdout: &mut dyn Write) -> Result<(), CliError> {
    let f = File::open(file).map_err(|e| CliError::Config(format!("{}: {e}", file.display())))?;
    let trace = BoTrace::read_jsonl(BufReader::new(f))
        .map_err(|e| CliError::Config(format!("{}: {}", file.display(), config_err(e).message())))?;
    let mut out = String::new();
    out.push_str(&format!("method {}  seed {}\n", trace.method, trace.seed));
    for (i, o) in trace.initial.iter().enumerate() {
        out.push_str(&format!("init {i:>3}  x={}  y={:.6}  f={:.6}\n", fmt_point(&o.x), o.y, o.f));
    }
    for r in &trace.records {
        let ys: Vec<f64> = r.y_star.iter().flat_map(|s| s.values.iter().copied()).collect();
        let ys = if ys.is_empty() {
            String::new()
        } else {
            let (lo, hi) = ys.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), v| (a.min(*v), b.max(*v)));
            format!("  y*=[{lo:.4}, {hi:.4}] (n={})", ys.len())
        };
        out.push_str(&format!(
            "t {:>4}  x={}  y={:.6}  f={:.6}  best={:.6}  alpha={:.4e}  {:.4}s{ys}\n",
            r.t,
            fmt_point(&r.x),
            r.y,
            r.f,
            r.best_y,
            r.acquisition_value,
            r.acq_seconds
        ));
    }
    if let Some(p) = &trace.partition {
        out.push_str(&format!("partition {:?}\n", p.groups()));
    }
    out.push_str(&format!("final kernel {:?}\n", trace.final_kernel));
    if let Some(a) = &trace.abort {
        out.push_str(&format!("aborted: {a}\n"));
    }
    stdout.write_all(out.as_bytes()).map_err(|e| CliError::Runtime(e.to_string()))
}

/// Execute a parsed command, writing normal output to `stdout`.
pub fn execute(cli: &Cli, stdout: &mut dyn Write) -> Result<(), CliError> {
    match &cli.command {
        Command::Run { config, out, seed } => cmd_run(config, out, *seed, stdout),
        Command::Bench { config, out, parallel, strict } => cmd_bench(config, out, *parallel, *strict, stdout),
        Command::Validate { config } => {
            load_config(config)?;
            let _ = writeln!(stdout, "ok");
            Ok(())
        }
        Command::TraceDump { file } => cmd_trace_dump(file, stdout),
    }
}

/// Parse `args`, run, report errors on stderr and return the exit status.
pub fn main_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_CONFIG } else { EXIT_OK };
        }
    };
    let level = match cli.verbose {
        0 => log::LevelFilter::Warn,
        1 => log::LevelFilter::Info,
        _ => log::LevelFilter::Debug,
    };
    let _ = env_logger::Builder::new().filter_level(level).parse_default_env().try_init();
    match execute(&cli, &mut std::io::stdout()) {
        Ok(()) => EXIT_OK,
        Err(e) => {
            eprintln!("error: {e}");
            e.status()
        }
    }
}
