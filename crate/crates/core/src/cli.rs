//! Command-line front end.
//!
//! Configuration is layered: built-in defaults, then `--config <file>`, then
//! `--set key=value` overrides, then the dedicated flags (`--seed`,
//! `--algorithm`, ...). Exit codes: 0 success, 1 bad input (flags, keys,
//! validation), 2 failure while simulating or writing outputs.

use std::ffi::OsString;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};

use crate::config::{Algorithm, SimConfig};
use crate::engine::{self, with_threads};
use crate::error::{Error, Result};
use crate::metrics::{fmt_sig, Metric, MetricsReport, SweepTable};
use crate::plot::{emit_plot_data, write_all_atomic};

pub const THREADS_ENV: &str = "FEMTOHO_THREADS";
pub const DEFAULT_DISTANCES: &str = "50:500:50";
pub const DEFAULT_REPLICATIONS: u32 = 20;

#[derive(Debug, Parser)]
#[command(name = "femtoho", version, about = "Macro/femtocell handover simulator")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Single run: writes the event log and metrics.
    Run(CommonArgs),
    /// Distance sweep: writes a CSV of mean/std per distance and algorithm.
    Sweep(CommonArgs),
    /// All four algorithms on shared traces at the configured distance.
    Compare(CommonArgs),
    /// Check the configuration and exit.
    Validate(CommonArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Preset {
    Fig10,
    Fig11,
    SingleRun,
}

#[derive(Debug, Args)]
struct CommonArgs {
    /// Config file of `key = value` lines.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Override a config key (repeatable), e.g. `--set hmm_db=3`.
    #[arg(long = "set", value_name = "KEY=VALUE")]
    overrides: Vec<String>,
    /// rss | rss-pathloss | speed | proposed
    #[arg(long)]
    algorithm: Option<Algorithm>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    replications: Option<u32>,
    /// Inclusive range `start:stop:step` in metres.
    #[arg(long)]
    distances: Option<String>,
    #[arg(long, default_value = "femtoho-out")]
    out: PathBuf,
    /// Also write per-figure data files and a plotting script.
    #[arg(long)]
    emit_plot_data: bool,
    #[arg(long, value_enum)]
    preset: Option<Preset>,
}

/// Parses `start:stop:step` into an ascending, inclusive list.
pub fn parse_distances(spec: &str) -> Result<Vec<f64>> {
    let bad = |why: &str| Error::Usage(format!("--distances `{spec}`: {why}"));
    let parts: Vec<&str> = spec.split(':').collect();
    if parts.len() != 3 {
        return Err(bad("expected start:stop:step"));
    }
    let nums: Vec<f64> = parts
        .iter()
        .map(|p| p.trim().parse::<f64>())
        .collect::<std::result::Result<_, _>>()
        .map_err(|_| bad("not a number"))?;
    let (start, stop, step) = (nums[0], nums[1], nums[2]);
    if !(start.is_finite() && stop.is_finite() && step.is_finite()) {
        return Err(bad("values must be finite"));
    }
    if start < 0.0 {
        return Err(bad("start must be ≥ 0"));
    }
    if step <= 0.0 {
        return Err(bad("step must be > 0"));
    }
    if stop < start {
        return Err(bad("stop must be ≥ start"));
    }
    let n = ((stop - start) / step + 1e-9).floor() as usize;
    Ok((0..=n).map(|i| start + i as f64 * step).collect())
}

/// Worker count from `FEMTOHO_THREADS`; 0 or unset means rayon's default.
pub fn threads_from_env() -> Result<usize> {
    match std::env::var(THREADS_ENV) {
        Err(_) => Ok(0),
        Ok(v) if v.trim().is_empty() => Ok(0),
        Ok(v) => v
            .trim()
            .parse()
            .map_err(|_| Error::Usage(format!("{THREADS_ENV}=`{v}` is not a non-negative integer"))),
    }
}

struct Plan {
    config: SimConfig,
    algorithms: Vec<Algorithm>,
    distances: Vec<f64>,
    replications: u32,
    emit_plot_data: bool,
}

fn resolve(args: &CommonArgs, sweep_like: bool) -> Result<Plan> {
    let mut config = match &args.config {
        Some(path) => SimConfig::from_file(path)?,
        None => SimConfig::default(),
    };
    for kv in &args.overrides {
        let (key, value) = kv
            .split_once('=')
            .ok_or_else(|| Error::Usage(format!("--set `{kv}`: expected KEY=VALUE")))?;
        config.set(key.trim(), value.trim())?;
    }
    if let Some(seed) = args.seed {
        config.seed = seed;
    }
    if let Some(alg) = args.algorithm {
        config.algorithm = alg;
    }
    let figure_preset = matches!(args.preset, Some(Preset::Fig10 | Preset::Fig11));
    let algorithms = match args.algorithm {
        Some(alg) if sweep_like => vec![alg],
        _ if sweep_like => Algorithm::ALL.to_vec(),
        _ => vec![config.algorithm],
    };
    let distances = match &args.distances {
        Some(spec) => parse_distances(spec)?,
        None if sweep_like => parse_distances(DEFAULT_DISTANCES)?,
        None => vec![config.enb_fap_distance_m],
    };
    let replications = args.replications.unwrap_or(if sweep_like {
        DEFAULT_REPLICATIONS
    } else {
        1
    });
    if replications == 0 {
        return Err(Error::Usage("--replications must be ≥ 1".into()));
    }
    config.ensure_valid()?;
    Ok(Plan {
        config,
        algorithms,
        distances,
        replications,
        emit_plot_data: args.emit_plot_data || figure_preset,
    })
}

fn metrics_csv(reports: &[MetricsReport]) -> String {
    let mut out = String::from("algorithm,metric,value\n");
    for r in reports {
        for m in Metric::ALL {
            out.push_str(&format!("{},{},{}\n", r.algorithm, m, fmt_sig(r.value(m), 6)));
        }
    }
    out
}

fn summary(out: &mut (dyn Write + Send), r: &MetricsReport) -> std::io::Result<()> {
    writeln!(
        out,
        "{}: fap_assignment_probability={} ho_count={} pingpong_count={} ho_failure_count={}",
        r.algorithm,
        fmt_sig(r.fap_assignment_probability, 6),
        r.ho_count,
        r.pingpong_count,
        r.ho_failure_count
    )
}

fn cmd_run(plan: &Plan, out_dir: &Path, stdout: &mut (dyn Write + Send)) -> Result<()> {
    let (log, report) = engine::run(&plan.config)?;
    write_all_atomic(
        out_dir,
        &[
            ("events.csv", log.to_csv()),
            ("metrics.csv", metrics_csv(std::slice::from_ref(&report))),
        ],
    )?;
    let _ = summary(stdout, &report);
    Ok(())
}

fn cmd_compare(plan: &Plan, out_dir: &Path, stdout: &mut (dyn Write + Send)) -> Result<()> {
    let algorithms = Algorithm::ALL;
    let reps = engine::run_replications_with(&plan.config, &algorithms, plan.replications, plan.config.seed)?;
    let table = SweepTable::from_reports(&[plan.config.enb_fap_distance_m], &algorithms, std::slice::from_ref(&reps));
    let mut files = vec![("compare.csv", table.to_csv())];
    if plan.replications == 1 {
        files.push(("metrics.csv", metrics_csv(&reps[0])));
    }
    write_all_atomic(out_dir, &files)?;
    if plan.emit_plot_data {
        emit_plot_data(&table, out_dir)?;
    }
    for r in &reps[0] {
        let _ = summary(stdout, r);
    }
    Ok(())
}

fn cmd_sweep(plan: &Plan, out_dir: &Path, stdout: &mut (dyn Write + Send)) -> Result<()> {
    let table = engine::sweep(&plan.config, &plan.distances, plan.replications, &plan.algorithms)?;
    write_all_atomic(out_dir, &[("sweep.csv", table.to_csv())])?;
    if plan.emit_plot_data {
        emit_plot_data(&table, out_dir)?;
    }
    let _ = writeln!(
        stdout,
        "{} distances x {} algorithms x {} replications -> {}",
        plan.distances.len(),
        plan.algorithms.len(),
        plan.replications,
        out_dir.join("sweep.csv").display()
    );
    Ok(())
}

fn execute(cli: Cli, stdout: &mut (dyn Write + Send)) -> Result<()> {
    let threads = threads_from_env()?;
    match cli.command {
        Command::Validate(args) => {
            resolve(&args, false)?;
            let _ = writeln!(stdout, "config ok");
            Ok(())
        }
        Command::Run(args) | Command::Sweep(args) if args.preset.is_some() => {
            // A preset decides between a single run and a figure sweep.
            let sweep_like = args.preset != Some(Preset::SingleRun);
            let plan = resolve(&args, sweep_like)?;
            if sweep_like {
                with_threads(threads, || cmd_sweep(&plan, &args.out, stdout))
            } else {
                with_threads(threads, || cmd_run(&plan, &args.out, stdout))
            }
        }
        Command::Run(args) => {
            let plan = resolve(&args, false)?;
            with_threads(threads, || cmd_run(&plan, &args.out, stdout))
        }
        Command::Sweep(args) => {
            let plan = resolve(&args, true)?;
            with_threads(threads, || cmd_sweep(&plan, &args.out, stdout))
        }
        Command::Compare(args) => {
            let plan = resolve(&args, false)?;
            with_threads(threads, || cmd_compare(&plan, &args.out, stdout))
        }
    }
}

/// Runs the CLI on `args` (including the program name) and returns the
/// process exit code.
pub fn run_cli<I, T>(args: I, stdout: &mut (dyn Write + Send), stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let rendered = e.render().to_string();
            if code == 0 {
                let _ = write!(stdout, "{rendered}");
            } else {
                let _ = write!(stderr, "{rendered}");
            }
            return code;
        }
    };
    match execute(cli, stdout) {
        Ok(()) => 0,
        Err(e) => {
            let _ = writeln!(stderr, "error: {e}");
            if e.is_validation() {
                1
            } else {
                2
            }
        }
    }
}
