use serde::{Deserialize, Serialize};

use super::{check_positive, ensure_finite_loss, lookahead_update, wsl_update, OptimizerState, StepOutcome};
use crate::error::{Error, Result};
use crate::objective::Objective;
use crate::trace::StepRecord;
use crate::vector::{check_dims, ParamVector};

pub const DEFAULT_M_S: f64 = 0.9;
pub const DEFAULT_M_G: f64 = 1.0001;

fn default_m_s() -> f64 {
    DEFAULT_M_S
}

fn default_m_g() -> f64 {
    DEFAULT_M_G
}

/// Adaptive-inertia settings.
///
/// Each step compares the new weighted-sum loss against `zeta` times the
/// previous one: if it rose past that tolerance the standard momentum `m_s`
/// is used, otherwise the greater momentum `m_g`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AdineConfig {
    pub eta: f64,
    #[serde(default = "default_m_s")]
    pub m_s: f64,
    #[serde(default = "default_m_g")]
    pub m_g: f64,
    pub zeta: f64,
}

impl AdineConfig {
    /// Validated config with `0 < m_s < 1 ≤ m_g`.
    pub fn new(eta: f64, m_s: f64, m_g: f64, zeta: f64) -> Result<Self> {
        let cfg = Self { eta, m_s, m_g, zeta };
        cfg.validate()?;
        Ok(cfg)
    }

    /// Default momenta (`m_s = 0.9`, `m_g = 1.0001`).
    pub fn with_zeta(eta: f64, zeta: f64) -> Result<Self> {
        Self::new(eta, DEFAULT_M_S, DEFAULT_M_G, zeta)
    }

    /// Skips the `m_s < 1 ≤ m_g` check; only rates and `zeta` are validated.
    /// Used to compare against fixed-momentum runs, e.g. with `m_s == m_g`.
    pub fn relaxed(eta: f64, m_s: f64, m_g: f64, zeta: f64) -> Result<Self> {
        check_positive("eta", eta)?;
        check_positive("zeta", zeta)?;
        if !(m_s >= 0.0 && m_g >= 0.0 && m_s.is_finite() && m_g.is_finite()) {
            return Err(Error::invalid("momenta must be finite and >= 0"));
        }
        Ok(Self { eta, m_s, m_g, zeta })
    }

    pub fn validate(&self) -> Result<()> {
        check_positive("eta", self.eta)?;
        check_positive("zeta", self.zeta)?;
        if !(self.m_s > 0.0 && self.m_s < 1.0) {
            return Err(Error::invalid(format!("m_s must lie in (0, 1), got {}", self.m_s)));
        }
        if !(self.m_g >= 1.0 && self.m_g.is_finite()) {
            return Err(Error::invalid(format!("m_g must be finite and >= 1, got {}", self.m_g)));
        }
        Ok(())
    }
}

impl super::Optimizer for AdineConfig {
    fn init_state(&self, dim: usize) -> Result<OptimizerState> {
        OptimizerState::new(dim, self.m_s)
    }

    fn step<O: Objective + ?Sized>(&self, state: &OptimizerState, obj: &O, theta: &ParamVector) -> Result<StepOutcome> {
        adine_step(state, self, obj, theta)
    }
}

/// One adaptive-inertia step.
///
/// The loss at the current parameters feeds the weighted-sum loss; the
/// momentum is then picked by the `zeta` test and the lookahead update is
/// applied with it. With `wsl == 0` on the first call, any positive loss
/// selects `m_s`.
pub fn adine_step<O: Objective + ?Sized>(
    state: &OptimizerState,
    cfg: &AdineConfig,
    obj: &O,
    theta: &ParamVector,
) -> Result<StepOutcome> {
    check_dims(obj.dim(), theta.dim())?;
    check_dims(theta.dim(), state.velocity.dim())?;
    let t = state.t + 1;

    let loss = obj.eval(theta)?;
    ensure_finite_loss(loss, t)?;
    let wsl = wsl_update(state.wsl, loss);
    let m = if wsl > cfg.zeta * state.wsl { cfg.m_s } else { cfg.m_g };

    let (velocity, theta_next, grad_norm) = lookahead_update(m, cfg.eta, obj, theta, &state.velocity, t)?;
    Ok(StepOutcome {
        theta: theta_next,
        record: StepRecord { t, loss, wsl: Some(wsl), momentum_used: m, grad_norm },
        state: OptimizerState { velocity, t, wsl, wsl_prev: state.wsl, active_momentum: m, schedule: state.schedule },
    })
}
