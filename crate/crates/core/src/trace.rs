use serde::{Deserialize, Serialize};

/// One optimizer step as seen by the harness.
///
/// `loss` is the objective at the parameters the step started from (on the
/// step's mini-batch); `grad_norm` is the norm of the gradient actually used
/// in the update, which for lookahead methods is taken at `θ + m·v`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct StepRecord {
    pub t: u64,
    pub loss: f64,
    pub wsl: Option<f64>,
    pub momentum_used: f64,
    pub grad_norm: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TerminalReason {
    ThresholdReached,
    MaxIters,
    Diverged,
}

impl TerminalReason {
    pub fn as_str(self) -> &'static str {
        match self {
            TerminalReason::ThresholdReached => "threshold_reached",
            TerminalReason::MaxIters => "max_iters",
            TerminalReason::Diverged => "diverged",
        }
    }
}

impl std::fmt::Display for TerminalReason {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunTrace {
    pub config_id: String,
    pub records: Vec<StepRecord>,
    pub terminal_reason: TerminalReason,
    /// Number of completed steps, which can exceed `records.len()` when the
    /// trace is thinned.
    pub steps: u64,
    /// Objective at the final parameters, evaluated on the last batch context.
    pub final_loss: f64,
}

impl RunTrace {
    pub fn reached_threshold(&self) -> bool {
        self.terminal_reason == TerminalReason::ThresholdReached
    }

    /// Iterations to threshold, or `None` for a DNF.
    pub fn iterations_to_threshold(&self) -> Option<u64> {
        self.reached_threshold().then_some(self.steps)
    }

    pub fn losses(&self) -> Vec<f64> {
        self.records.iter().map(|r| r.loss).collect()
    }

    /// Fraction of recorded steps with `t > skip` that used momentum `m`.
    pub fn momentum_fraction(&self, m: f64, skip: u64) -> f64 {
        let eligible: Vec<_> = self.records.iter().filter(|r| r.t > skip).collect();
        if eligible.is_empty() {
            return 0.0;
        }
        eligible.iter().filter(|r| r.momentum_used == m).count() as f64 / eligible.len() as f64
    }

    /// Mean recorded loss over consecutive windows of `steps_per_epoch` steps.
    /// A trailing partial window is dropped.
    pub fn epoch_mean_losses(&self, steps_per_epoch: usize) -> Vec<f64> {
        assert!(steps_per_epoch > 0);
        self.records
            .chunks_exact(steps_per_epoch)
            .map(|c| c.iter().map(|r| r.loss).sum::<f64>() / c.len() as f64)
            .collect()
    }
}
