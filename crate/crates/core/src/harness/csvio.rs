use std::path::Path;

use super::summary::{SpeedupRow, SummaryTable, SweepTable};
use crate::error::{Error, Result};
use crate::fmt_real;
use crate::trace::{RunTrace, StepRecord};

pub const TRACE_HEADER: [&str; 5] = ["t", "loss", "wsl", "momentum", "grad_norm"];
pub const SUMMARY_HEADER: [&str; 5] = ["method", "momentum", "iterations", "terminal_reason", "final_loss"];
pub const SWEEP_HEADER: [&str; 5] = ["zeta", "final_loss", "m_g_fraction", "iterations", "terminal_reason"];
pub const SPEEDUP_HEADER: [&str; 4] = ["method", "momentum", "steps_to_baseline", "baseline_steps"];

fn writer(path: &Path) -> Result<csv::Writer<std::fs::File>> {
    csv::Writer::from_path(path).map_err(|source| Error::Csv { path: path.to_path_buf(), source })
}

fn write_all<const N: usize>(
    path: &Path,
    header: [&str; N],
    rows: impl IntoIterator<Item = [String; N]>,
) -> Result<()> {
    let csv_err = |source| Error::Csv { path: path.to_path_buf(), source };
    let mut w = writer(path)?;
    w.write_record(header).map_err(csv_err)?;
    for row in rows {
        w.write_record(&row).map_err(csv_err)?;
    }
    w.flush().map_err(|e| Error::io(path, e))
}

/// Writes one row per recorded step. An empty `wsl` cell means the
/// optimizer keeps no weighted-sum loss.
pub fn export_trace_csv(trace: &RunTrace, path: &Path) -> Result<()> {
    write_all(
        path,
        TRACE_HEADER,
        trace.records.iter().map(|r| {
            [
                r.t.to_string(),
                fmt_real(r.loss),
                r.wsl.map(fmt_real).unwrap_or_default(),
                fmt_real(r.momentum_used),
                fmt_real(r.grad_norm),
            ]
        }),
    )
}

pub fn read_trace_csv(path: &Path) -> Result<Vec<StepRecord>> {
    let mut r = csv::Reader::from_path(path).map_err(|source| Error::Csv { path: path.to_path_buf(), source })?;
    let header = r.headers().map_err(|source| Error::Csv { path: path.to_path_buf(), source })?;
    if header.iter().ne(TRACE_HEADER) {
        return Err(Error::Parse { path: path.to_path_buf(), message: format!("unexpected header {header:?}") });
    }
    let mut out = Vec::new();
    for (line, rec) in r.records().enumerate() {
        let rec = rec.map_err(|source| Error::Csv { path: path.to_path_buf(), source })?;
        let bad =
            |what: &str| Error::Parse { path: path.to_path_buf(), message: format!("row {}: bad {what}", line + 1) };
        let real = |i: usize, what: &str| rec[i].parse::<f64>().map_err(|_| bad(what));
        out.push(StepRecord {
            t: rec[0].parse().map_err(|_| bad("t"))?,
            loss: real(1, "loss")?,
            wsl: if rec[2].is_empty() { None } else { Some(real(2, "wsl")?) },
            momentum_used: real(3, "momentum")?,
            grad_norm: real(4, "grad_norm")?,
        });
    }
    Ok(out)
}

/// `iterations` always holds the integer step count; `terminal_reason`
/// tells whether that count is iterations to threshold.
pub fn export_summary_csv(table: &SummaryTable, path: &Path) -> Result<()> {
    write_all(
        path,
        SUMMARY_HEADER,
        table.rows.iter().map(|r| {
            [
                r.method.clone(),
                r.momentum.clone(),
                r.iterations.to_string(),
                r.terminal_reason.to_string(),
                fmt_real(r.final_loss),
            ]
        }),
    )
}

pub fn export_sweep_csv(table: &SweepTable, path: &Path) -> Result<()> {
    write_all(
        path,
        SWEEP_HEADER,
        table.rows.iter().map(|r| {
            [
                fmt_real(r.zeta),
                fmt_real(r.final_loss),
                fmt_real(r.m_g_fraction),
                r.steps.to_string(),
                r.terminal_reason.to_string(),
            ]
        }),
    )
}

/// An empty `steps_to_baseline` cell means the baseline loss was never reached.
pub fn export_speedup_csv(rows: &[SpeedupRow], path: &Path) -> Result<()> {
    write_all(
        path,
        SPEEDUP_HEADER,
        rows.iter().map(|r| {
            [
                r.method.clone(),
                r.momentum.clone(),
                r.steps_to_baseline.map(|s| s.to_string()).unwrap_or_default(),
                r.baseline_steps.to_string(),
            ]
        }),
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::trace::TerminalReason;

    #[test]
    fn trace_round_trip_is_exact() {
        let records = vec![
            StepRecord { t: 1, loss: 0.1 + 0.2, wsl: Some(1.0 / 3.0), momentum_used: 1.0001, grad_norm: 1e-300 },
            StepRecord { t: 2, loss: -7.25, wsl: None, momentum_used: 0.9, grad_norm: 12345.678 },
        ];
        let trace = RunTrace {
            config_id: "r".into(),
            records: records.clone(),
            terminal_reason: TerminalReason::MaxIters,
            steps: 2,
            final_loss: 0.0,
        };
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("t.csv");
        export_trace_csv(&trace, &p).unwrap();
        assert_eq!(read_trace_csv(&p).unwrap(), records);
        let text = std::fs::read_to_string(&p).unwrap();
        assert!(text.starts_with("t,loss,wsl,momentum,grad_norm\n"));
    }

    #[test]
    fn wrong_header_is_rejected() {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("t.csv");
        std::fs::write(&p, "a,b\n1,2\n").unwrap();
        assert!(matches!(read_trace_csv(&p), Err(Error::Parse { .. })));
    }
}
