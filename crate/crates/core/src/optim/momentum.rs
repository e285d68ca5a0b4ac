use serde::{Deserialize, Serialize};

use super::{
    apply_velocity, check_positive, ensure_finite_grad, ensure_finite_loss, lookahead_update, nesterov_momentum,
    OptimizerState, StepOutcome,
};
use crate::error::{Error, Result};
use crate::objective::Objective;
use crate::trace::StepRecord;
use crate::vector::{check_dims, vec_norm2, ParamVector};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MomentumVariant {
    /// Heavy ball: gradient at the current parameters.
    Cm,
    /// Gradient at the lookahead point `θ + m·v`.
    NagSutskever,
    /// Lookahead form with `m_t` taken from [`super::NesterovSchedule`]; the
    /// configured `m` is ignored.
    NagScheduled,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FixedMomentumConfig {
    pub eta: f64,
    pub m: f64,
    pub variant: MomentumVariant,
}

impl FixedMomentumConfig {
    pub fn new(eta: f64, m: f64, variant: MomentumVariant) -> Self {
        Self { eta, m, variant }
    }

    pub fn cm(eta: f64, m: f64) -> Self {
        Self::new(eta, m, MomentumVariant::Cm)
    }

    pub fn nag(eta: f64, m: f64) -> Self {
        Self::new(eta, m, MomentumVariant::NagSutskever)
    }

    pub fn validate(&self) -> Result<()> {
        check_positive("eta", self.eta)?;
        if self.variant != MomentumVariant::NagScheduled && !(self.m >= 0.0 && self.m.is_finite()) {
            return Err(Error::invalid(format!("momentum must be finite and >= 0, got {}", self.m)));
        }
        Ok(())
    }
}

impl super::Optimizer for FixedMomentumConfig {
    fn init_state(&self, dim: usize) -> Result<OptimizerState> {
        let m = match self.variant {
            MomentumVariant::NagScheduled => 0.0,
            _ => self.m,
        };
        OptimizerState::new(dim, m)
    }

    fn step<O: Objective + ?Sized>(&self, state: &OptimizerState, obj: &O, theta: &ParamVector) -> Result<StepOutcome> {
        match self.variant {
            MomentumVariant::Cm => cm_step(state, self, obj, theta),
            _ => nag_step(state, self, obj, theta),
        }
    }
}

fn check_inputs<O: Objective + ?Sized>(state: &OptimizerState, obj: &O, theta: &ParamVector) -> Result<()> {
    check_dims(obj.dim(), theta.dim())?;
    check_dims(theta.dim(), state.velocity.dim())
}

/// Classical momentum: `v' = m·v − η·∇f(θ)`, `θ' = θ + v'`.
pub fn cm_step<O: Objective + ?Sized>(
    state: &OptimizerState,
    cfg: &FixedMomentumConfig,
    obj: &O,
    theta: &ParamVector,
) -> Result<StepOutcome> {
    if cfg.variant != MomentumVariant::Cm {
        return Err(Error::invalid("cm_step needs the CM variant"));
    }
    check_inputs(state, obj, theta)?;
    let t = state.t + 1;
    let (loss, grad) = obj.eval_grad(theta)?;
    ensure_finite_loss(loss, t)?;
    ensure_finite_grad(&grad, t)?;
    let (velocity, theta_next) = apply_velocity(cfg.m, cfg.eta, &state.velocity, theta, &grad)?;
    Ok(StepOutcome {
        theta: theta_next,
        record: StepRecord { t, loss, wsl: None, momentum_used: cfg.m, grad_norm: vec_norm2(&grad) },
        state: OptimizerState { velocity, t, active_momentum: cfg.m, ..state.clone() },
    })
}

/// Nesterov momentum in lookahead form: `v' = m·v − η·∇f(θ + m·v)`,
/// `θ' = θ + v'`. For the scheduled variant `m` is the schedule's `m_t`.
pub fn nag_step<O: Objective + ?Sized>(
    state: &OptimizerState,
    cfg: &FixedMomentumConfig,
    obj: &O,
    theta: &ParamVector,
) -> Result<StepOutcome> {
    let (m, schedule) = match cfg.variant {
        MomentumVariant::Cm => return Err(Error::invalid("nag_step needs a NAG variant")),
        MomentumVariant::NagSutskever => (cfg.m, state.schedule),
        MomentumVariant::NagScheduled => nesterov_momentum(state.schedule),
    };
    check_inputs(state, obj, theta)?;
    let t = state.t + 1;
    let loss = obj.eval(theta)?;
    ensure_finite_loss(loss, t)?;
    let (velocity, theta_next, grad_norm) = lookahead_update(m, cfg.eta, obj, theta, &state.velocity, t)?;
    Ok(StepOutcome {
        theta: theta_next,
        record: StepRecord { t, loss, wsl: None, momentum_used: m, grad_norm },
        state: OptimizerState { velocity, t, active_momentum: m, schedule, ..state.clone() },
    })
}
