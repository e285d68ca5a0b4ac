use crate::optim::{OptimizerConfig, StopCriterion};
use crate::trace::{RunTrace, TerminalReason};

#[derive(Debug, Clone, PartialEq)]
pub struct SummaryRow {
    pub config_id: String,
    pub method: String,
    pub momentum: String,
    /// Steps executed: iterations to threshold when it was reached,
    /// otherwise the step the run stopped at.
    pub iterations: u64,
    pub terminal_reason: TerminalReason,
    pub final_loss: f64,
    /// True when a loss threshold was set and not reached.
    pub dnf: bool,
}

impl SummaryRow {
    pub fn from_trace(opt: &OptimizerConfig, trace: &RunTrace, stop: StopCriterion) -> Self {
        let dnf = trace.terminal_reason == TerminalReason::Diverged
            || (matches!(stop, StopCriterion::LossBelow { .. }) && !trace.reached_threshold());
        Self {
            config_id: trace.config_id.clone(),
            method: opt.method_name().to_string(),
            momentum: opt.momentum_label(),
            iterations: trace.steps,
            terminal_reason: trace.terminal_reason,
            final_loss: trace.final_loss,
            dnf,
        }
    }

    fn iterations_cell(&self) -> String {
        match (self.dnf, self.terminal_reason) {
            (true, TerminalReason::Diverged) => format!("DNF (diverged at step {})", self.iterations),
            (true, _) => format!("DNF (stopped at {})", self.iterations),
            (false, _) => self.iterations.to_string(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct SummaryTable {
    pub rows: Vec<SummaryRow>,
}

impl SummaryTable {
    /// Aligned plain-text rendering.
    pub fn to_text(&self) -> String {
        let header = ["method", "momentum", "iterations", "terminal_reason", "final_loss"];
        let body: Vec<[String; 5]> = self
            .rows
            .iter()
            .map(|r| {
                [
                    r.method.clone(),
                    r.momentum.clone(),
                    r.iterations_cell(),
                    r.terminal_reason.to_string(),
                    format!("{:.6e}", r.final_loss),
                ]
            })
            .collect();
        render(&header, &body)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepRow {
    pub zeta: f64,
    pub final_loss: f64,
    /// Share of steps after the first that used the greater momentum.
    pub m_g_fraction: f64,
    pub iterations_to_threshold: Option<u64>,
    pub terminal_reason: TerminalReason,
    pub steps: u64,
}

impl SweepRow {
    pub fn from_trace(zeta: f64, m_g: f64, trace: &RunTrace, stop: StopCriterion) -> Self {
        let threshold = matches!(stop, StopCriterion::LossBelow { .. });
        Self {
            zeta,
            final_loss: trace.final_loss,
            m_g_fraction: trace.momentum_fraction(m_g, 1),
            iterations_to_threshold: if threshold { trace.iterations_to_threshold() } else { None },
            terminal_reason: trace.terminal_reason,
            steps: trace.steps,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct SweepTable {
    pub rows: Vec<SweepRow>,
}

impl SweepTable {
    pub fn to_text(&self) -> String {
        let header = ["zeta", "final_loss", "m_g_fraction", "iterations", "terminal_reason"];
        let body: Vec<[String; 5]> = self
            .rows
            .iter()
            .map(|r| {
                [
                    format!("{}", r.zeta),
                    format!("{:.6e}", r.final_loss),
                    format!("{:.4}", r.m_g_fraction),
                    r.iterations_to_threshold.map_or_else(|| "-".to_string(), |i| i.to_string()),
                    r.terminal_reason.to_string(),
                ]
            })
            .collect();
        render(&header, &body)
    }
}

/// Steps each optimizer needed to match the first row's final epoch loss.
#[derive(Debug, Clone, PartialEq)]
pub struct SpeedupRow {
    pub method: String,
    pub momentum: String,
    pub steps_to_baseline: Option<u64>,
    pub baseline_steps: u64,
}

impl SpeedupRow {
    pub fn ratio(&self) -> Option<f64> {
        self.steps_to_baseline.map(|s| s as f64 / self.baseline_steps as f64)
    }
}

pub(crate) fn render_speedup(rows: &[SpeedupRow]) -> String {
    let header = ["method", "momentum", "steps_to_baseline", "baseline_steps", "ratio"];
    let body: Vec<[String; 5]> = rows
        .iter()
        .map(|r| {
            [
                r.method.clone(),
                r.momentum.clone(),
                r.steps_to_baseline.map_or_else(|| "not reached".into(), |s| s.to_string()),
                r.baseline_steps.to_string(),
                r.ratio().map_or_else(|| "-".into(), |x| format!("{x:.3}")),
            ]
        })
        .collect();
    render(&header, &body)
}

fn render<const N: usize>(header: &[&str; N], body: &[[String; N]]) -> String {
    let mut widths: [usize; N] = header.map(str::len);
    for row in body {
        for (w, cell) in widths.iter_mut().zip(row) {
            *w = (*w).max(cell.len());
        }
    }
    let line = |cells: Vec<&str>| {
        cells.iter().zip(&widths).map(|(c, w)| format!("{c:<w$}")).collect::<Vec<_>>().join("  ").trim_end().to_string()
    };
    let mut out = line(header.to_vec());
    out.push('\n');
    out.push_str(&line(widths.iter().map(|w| "-".repeat(*w)).collect::<Vec<_>>().iter().map(String::as_str).collect()));
    out.push('\n');
    for row in body {
        out.push_str(&line(row.iter().map(String::as_str).collect()));
        out.push('\n');
    }
    out
}
