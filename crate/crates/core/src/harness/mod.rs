//! Experiment runner: JSON configs in, CSV traces and summary tables out.

pub mod cli;
mod config;
mod csvio;
mod experiment;
pub mod selftest;
mod summary;

pub use config::{ArchitectureSpec, DatasetSpec, ExperimentConfig, RaceFile, TargetSpec};
pub use csvio::{
    export_speedup_csv, export_summary_csv, export_sweep_csv, export_trace_csv, read_trace_csv, SPEEDUP_HEADER,
    SUMMARY_HEADER, SWEEP_HEADER, TRACE_HEADER,
};
pub use experiment::{
    build_target, run_experiment, run_race, steps_to_reach, zeta_sweep, BuiltTarget, RaceResult, SweepResult,
};
pub use summary::{SpeedupRow, SummaryRow, SummaryTable, SweepRow, SweepTable};
