//! `vfd` command line.

use std::ffi::OsString;
use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};

use crate::error::{Error, Result};
use crate::montecarlo::run_sweep;
use crate::optimizer::{grid_search, Strategy};
use crate::output::{fmt_sig9, write_sweep_csv};
use crate::rates::Relay;
use crate::scenario::{load_scenario, Overrides, ScenarioFile, ScenarioKind};

/// Environment variable capping the number of worker threads.
pub const THREADS_ENV: &str = "VFD_THREADS";

#[derive(Debug, Parser)]
#[command(
    name = "vfd",
    version,
    about = "Two-path relaying with improper signaling: rate sweeps and grid search"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Sweep the mean inter-relay gain.
    IriSweep(RunArgs),
    /// Sweep the mean inter-relay gain, comparing proper and maximally improper relays.
    MaxImproperSweep(RunArgs),
    /// Sweep the S-R2 distance with R1 fixed at the midpoint.
    LocationSweep(RunArgs),
    /// Optimize every strategy for one channel realization.
    Single(RunArgs),
}

#[derive(Debug, Args)]
struct RunArgs {
    /// Scenario JSON file.
    #[arg(long)]
    config: PathBuf,
    /// Output CSV (stdout when omitted).
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    realizations: Option<u64>,
    /// Points per grid axis, applied to both C and tau (odd).
    #[arg(long)]
    grid_points: Option<usize>,
    /// Comma-separated strategy names, e.g. `proper_eq,distinct_opt`.
    #[arg(long)]
    strategies: Option<String>,
}

impl Command {
    fn parts(&self) -> (ScenarioKind, &RunArgs) {
        match self {
            Command::IriSweep(a) => (ScenarioKind::IriSweep, a),
            Command::MaxImproperSweep(a) => (ScenarioKind::MaxImproperSweep, a),
            Command::LocationSweep(a) => (ScenarioKind::LocationSweep, a),
            Command::Single(a) => (ScenarioKind::Single, a),
        }
    }
}

/// Runs the CLI with the process's stdout and stderr.
pub fn run_cli<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let stdout = std::io::stdout();
    let stderr = std::io::stderr();
    run_cli_with(argv, &mut stdout.lock(), &mut stderr.lock())
}

/// Exit codes: 0 success, 1 I/O or validation failure, 2 bad usage.
pub fn run_cli_with<I, T>(argv: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = write!(err, "{}", e.render());
            return if e.use_stderr() { 2 } else { 0 };
        }
    };
    match execute(&cli.command, out) {
        Ok(()) => 0,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            1
        }
    }
}

fn thread_pool() -> Result<rayon::ThreadPool> {
    let mut builder = rayon::ThreadPoolBuilder::new();
    if let Ok(v) = std::env::var(THREADS_ENV) {
        let n: usize = v.trim().parse().ok().filter(|&n| n > 0).ok_or_else(|| {
            Error::invalid(
                "VFD_THREADS",
                format!("expected a positive integer, got `{v}`"),
            )
        })?;
        builder = builder.num_threads(n);
    }
    builder
        .build()
        .map_err(|e| Error::Scenario(format!("cannot start worker threads: {e}")))
}

fn execute(command: &Command, out: &mut dyn Write) -> Result<()> {
    let (kind, args) = command.parts();
    let overrides = Overrides {
        seed: args.seed,
        realizations: args.realizations,
        grid_points: args.grid_points,
        strategies: args
            .strategies
            .as_deref()
            .map(Strategy::parse_list)
            .transpose()?,
    };
    let scenario = load_scenario(&args.config)?.with_overrides(&overrides)?;
    if scenario.kind != kind {
        return Err(Error::Scenario(format!(
            "{} describes a `{}` scenario, not `{}`",
            args.config.display(),
            scenario.kind.name(),
            kind.name()
        )));
    }

    let pool = thread_pool()?;
    match &scenario.sweep {
        Some((axis, values)) => {
            let points = pool.install(|| run_sweep(&scenario.run, *axis, values))?;
            match &args.out {
                Some(path) => {
                    let mut file = BufWriter::new(File::create(path)?);
                    write_sweep_csv(&mut file, &points, scenario.run.seed)?;
                    file.flush()?;
                }
                None => write_sweep_csv(&mut *out, &points, scenario.run.seed)?,
            }
        }
        None => {
            let report = single_report(&scenario)?;
            match &args.out {
                Some(path) => std::fs::write(path, report)?,
                None => out.write_all(report.as_bytes())?,
            }
        }
    }
    Ok(())
}

/// Plain-text optimization report for realization 0 of the scenario's seed.
pub fn single_report(scenario: &ScenarioFile) -> Result<String> {
    use std::fmt::Write as _;

    let run = &scenario.run;
    let gains = run.source.realization(run.seed, 0)?;
    let mut s = String::new();
    let _ = writeln!(s, "seed {} realization 0", run.seed.0);
    let _ = writeln!(
        s,
        "gains h1_sq={} h2_sq={} g1_sq={} g2_sq={} f_sq={}",
        fmt_sig9(gains.h_sq(Relay::R1)),
        fmt_sig9(gains.h_sq(Relay::R2)),
        fmt_sig9(gains.g_sq(Relay::R1)),
        fmt_sig9(gains.g_sq(Relay::R2)),
        fmt_sig9(gains.f_sq()),
    );
    for &strategy in &run.strategies {
        let r = grid_search(strategy, &run.grid, &run.params, &gains);
        let b = r.breakdown;
        let _ = writeln!(
            s,
            "{strategy}: rate={} c1={} c2={} tau={}",
            fmt_sig9(r.rate),
            fmt_sig9(r.best.c1.value()),
            fmt_sig9(r.best.c2.value()),
            fmt_sig9(r.best.tau()),
        );
        let _ = writeln!(
            s,
            "  hops r11={} r12={} r21={} r22={}",
            fmt_sig9(b.r11),
            fmt_sig9(b.r12),
            fmt_sig9(b.r21),
            fmt_sig9(b.r22),
        );
        let _ = writeln!(
            s,
            "  paths path1={} path2={} total={}",
            fmt_sig9(b.path1),
            fmt_sig9(b.path2),
            fmt_sig9(b.total),
        );
    }
    Ok(s)
}
