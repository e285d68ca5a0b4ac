//! Command-line front end.

use std::ffi::OsString;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand};

use super::csvio::{export_speedup_csv, export_summary_csv, export_sweep_csv, export_trace_csv};
use super::experiment::{run_race, steps_to_reach, zeta_sweep};
use super::summary::{render_speedup, SpeedupRow};
use super::{ExperimentConfig, RaceFile};
use crate::error::{Error, Result};
use crate::trace::RunTrace;

#[derive(Debug, Parser)]
#[command(name = "adine", version, about = "Momentum optimizer races on saddle landscapes and small networks")]
struct Cli {
    #[command(subcommand)]
    command: Command,
    /// JSON experiment config.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Overrides the config's seed.
    #[arg(long, global = true)]
    seed: Option<u64>,
    #[arg(long, global = true, default_value = "out")]
    out_dir: PathBuf,
    /// Overrides the config's iteration cap.
    #[arg(long, global = true)]
    max_iters: Option<u64>,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Race every listed optimizer on a shared target.
    Race,
    /// Race optimizers on a network target and report the speedup over the first one.
    Train,
    /// Run the single ADINE optimizer once per `zeta_values` entry.
    SweepZeta,
    /// Run the built-in property checks.
    Selftest,
}

/// Runs the CLI and returns the process exit code.
pub fn cli_main<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return code;
        }
    };
    match dispatch(&cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            1
        }
    }
}

fn dispatch(cli: &Cli) -> Result<i32> {
    let kind = match cli.command {
        Command::Race => RunKind::Race,
        Command::Train => RunKind::Train,
        Command::SweepZeta => RunKind::SweepZeta,
        Command::Selftest => {
            let results = super::selftest::run_selftest();
            for r in &results {
                println!("{r}");
            }
            return Ok(if results.iter().all(|r| r.passed) { 0 } else { 1 });
        }
    };
    let path = cli.config.as_deref().ok_or_else(|| Error::InvalidArgument("--config <path> is required".into()))?;
    let report = run_config_file(kind, path, &cli.out_dir, cli.seed, cli.max_iters)?;
    print!("{report}");
    Ok(0)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RunKind {
    Race,
    Train,
    SweepZeta,
}

/// Loads a config, runs it, and writes its CSV and text outputs to `out_dir`.
/// Nothing is written unless every run completes. Returns the text tables.
pub fn run_config_file(
    kind: RunKind,
    config: &Path,
    out_dir: &Path,
    seed: Option<u64>,
    max_iters: Option<u64>,
) -> Result<String> {
    let mut file = RaceFile::load(config)?;
    if let Some(seed) = seed {
        file.seed = seed;
    }
    if let Some(n) = max_iters {
        file.max_iters = Some(n);
    }
    match kind {
        RunKind::Race => race(&file, out_dir, false),
        RunKind::Train => {
            if !file.target.is_network() {
                return Err(Error::InvalidConfig(format!("{}: train needs a network target", file.id)));
            }
            race(&file, out_dir, true)
        }
        RunKind::SweepZeta => sweep(&file, out_dir),
    }
}

fn race(file: &RaceFile, out_dir: &Path, speedup: bool) -> Result<String> {
    let cfgs = file.experiments()?;
    let result = run_race(&cfgs)?;
    let mut report = result.table.to_text();
    prepare_dir(out_dir)?;
    write_traces(out_dir, &result.traces)?;
    export_summary_csv(&result.table, &out_dir.join("summary.csv"))?;
    write_text(&out_dir.join("summary.txt"), &report)?;
    if speedup {
        let per_epoch = result.steps_per_epoch.unwrap_or(1);
        let rows = speedup_rows(&cfgs, &result.traces, per_epoch);
        let text = render_speedup(&rows);
        export_speedup_csv(&rows, &out_dir.join("speedup.csv"))?;
        write_text(&out_dir.join("speedup.txt"), &text)?;
        report.push('\n');
        report.push_str(&text);
    }
    Ok(report)
}

/// The first trace is the baseline: its last full-epoch mean loss is the
/// target every run is timed against.
pub(crate) fn speedup_rows(cfgs: &[ExperimentConfig], traces: &[RunTrace], steps_per_epoch: usize) -> Vec<SpeedupRow> {
    let baseline = &traces[0];
    let target = baseline.epoch_mean_losses(steps_per_epoch).last().copied().unwrap_or(f64::NAN);
    cfgs.iter()
        .zip(traces)
        .map(|(c, t)| SpeedupRow {
            method: c.optimizer.method_name().to_string(),
            momentum: c.optimizer.momentum_label(),
            steps_to_baseline: steps_to_reach(t, target, steps_per_epoch),
            baseline_steps: baseline.steps,
        })
        .collect()
}

fn sweep(file: &RaceFile, out_dir: &Path) -> Result<String> {
    let zetas = file
        .zeta_values
        .as_deref()
        .ok_or_else(|| Error::InvalidConfig(format!("{}: sweep-zeta needs zeta_values", file.id)))?;
    let cfgs = file.experiments()?;
    let [base] = cfgs.as_slice() else {
        return Err(Error::InvalidConfig(format!("{}: sweep-zeta needs exactly one optimizer", file.id)));
    };
    let result = zeta_sweep(base, zetas)?;
    let text = result.table.to_text();
    prepare_dir(out_dir)?;
    write_traces(out_dir, &result.traces)?;
    export_sweep_csv(&result.table, &out_dir.join("sweep.csv"))?;
    write_text(&out_dir.join("sweep.txt"), &text)?;
    Ok(text)
}

fn prepare_dir(dir: &Path) -> Result<()> {
    std::fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))
}

fn write_traces(dir: &Path, traces: &[RunTrace]) -> Result<()> {
    for t in traces {
        export_trace_csv(t, &dir.join(format!("{}.csv", t.config_id)))?;
    }
    Ok(())
}

fn write_text(path: &Path, text: &str) -> Result<()> {
    std::fs::write(path, text).map_err(|e| Error::io(path, e))
}
