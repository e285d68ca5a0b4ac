use serde::{Deserialize, Serialize};

use super::Optimizer;
use crate::error::{Error, Result};
use crate::objective::Objective;
use crate::trace::{RunTrace, TerminalReason};
use crate::vector::{check_dims, ParamVector};

/// A run is declared diverged once `|f(θ)|` exceeds this.
pub const DIVERGENCE_LIMIT: f64 = 1e12;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum StopCriterion {
    /// Stop as soon as the objective at the new parameters drops below `threshold`.
    LossBelow {
        threshold: f64,
    },
    MaxItersOnly,
}

impl StopCriterion {
    pub fn validate(&self) -> Result<()> {
        match self {
            StopCriterion::LossBelow { threshold } if !threshold.is_finite() => {
                Err(Error::InvalidConfig(format!("loss_below threshold must be finite, got {threshold}")))
            }
            _ => Ok(()),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunSettings {
    pub config_id: String,
    pub stop: StopCriterion,
    pub max_iters: u64,
    /// Keep every `trace_every`-th step (plus the last one).
    pub trace_every: u64,
}

impl RunSettings {
    pub fn new(stop: StopCriterion, max_iters: u64) -> Self {
        Self { config_id: String::new(), stop, max_iters, trace_every: 1 }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunOutcome {
    pub trace: RunTrace,
    pub theta: ParamVector,
}

/// Iterates `opt` from `theta_0` until the stop criterion fires, `max_iters`
/// steps have run, or the run diverges.
pub fn run_until<Opt, O>(
    opt: &Opt,
    obj: &mut O,
    theta_0: &ParamVector,
    stop: StopCriterion,
    max_iters: u64,
) -> Result<RunTrace>
where
    Opt: Optimizer + ?Sized,
    O: Objective + ?Sized,
{
    run_with(opt, obj, theta_0, &RunSettings::new(stop, max_iters)).map(|o| o.trace)
}

pub fn run_with<Opt, O>(opt: &Opt, obj: &mut O, theta_0: &ParamVector, settings: &RunSettings) -> Result<RunOutcome>
where
    Opt: Optimizer + ?Sized,
    O: Objective + ?Sized,
{
    if settings.max_iters == 0 {
        return Err(Error::invalid("max_iters must be positive"));
    }
    if settings.trace_every == 0 {
        return Err(Error::invalid("trace_every must be positive"));
    }
    settings.stop.validate()?;
    check_dims(obj.dim(), theta_0.dim())?;

    let mut state = opt.init_state(theta_0.dim())?;
    let mut theta = theta_0.clone();
    let mut records = Vec::new();
    let mut terminal = TerminalReason::MaxIters;
    let mut steps = 0;

    for t in 1..=settings.max_iters {
        obj.next_batch();
        let out = match opt.step(&state, &*obj, &theta) {
            Ok(out) => out,
            Err(e) if e.is_divergence() => {
                terminal = TerminalReason::Diverged;
                break;
            }
            Err(e) => return Err(e),
        };
        steps = t;
        let record = out.record;
        state = out.state;
        theta = out.theta;

        let mut done = None;
        if record.loss.abs() > DIVERGENCE_LIMIT || theta.first_non_finite().is_some() {
            done = Some(TerminalReason::Diverged);
        } else if let StopCriterion::LossBelow { threshold } = settings.stop {
            let f = obj.eval(&theta);
            match f {
                Ok(f) if !f.is_finite() || f.abs() > DIVERGENCE_LIMIT => done = Some(TerminalReason::Diverged),
                Ok(f) if f < threshold => done = Some(TerminalReason::ThresholdReached),
                Ok(_) => {}
                Err(e) if e.is_divergence() => done = Some(TerminalReason::Diverged),
                Err(e) => return Err(e),
            }
        }

        if t % settings.trace_every == 0 || done.is_some() || t == settings.max_iters {
            records.push(record);
        }
        if let Some(reason) = done {
            terminal = reason;
            break;
        }
    }

    let final_loss = if theta.first_non_finite().is_some() { f64::NAN } else { obj.eval(&theta).unwrap_or(f64::NAN) };
    Ok(RunOutcome {
        trace: RunTrace {
            config_id: settings.config_id.clone(),
            records,
            terminal_reason: terminal,
            steps,
            final_loss,
        },
        theta,
    })
}
