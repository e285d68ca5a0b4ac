//! Momentum update rules.
//!
//! Every rule is a pure step function: it takes the current
//! [`OptimizerState`] and parameters and returns new ones, leaving its inputs
//! untouched. The [`Optimizer`] trait lets the run driver treat them uniformly.

mod adine;
mod driver;
mod momentum;
mod schedule;
mod theory;
mod wsl;

use serde::{Deserialize, Serialize};

pub use adine::{adine_step, AdineConfig, DEFAULT_M_G, DEFAULT_M_S};
pub use driver::{run_until, run_with, RunOutcome, RunSettings, StopCriterion, DIVERGENCE_LIMIT};
pub use momentum::{cm_step, nag_step, FixedMomentumConfig, MomentumVariant};
pub use schedule::{nesterov_momentum, NesterovSchedule};
pub use theory::{cm_telescoped_position, polyak_optimal_params};
pub use wsl::{wsl_closed_form, wsl_update};

use crate::error::{Error, Result};
use crate::objective::Objective;
use crate::trace::StepRecord;
use crate::vector::{vec_axpy, vec_norm2, ParamVector};

/// Mutable state carried between steps of one run.
#[derive(Debug, Clone, PartialEq)]
pub struct OptimizerState {
    pub velocity: ParamVector,
    pub t: u64,
    /// Weighted-sum loss after `t` steps.
    pub wsl: f64,
    pub wsl_prev: f64,
    pub active_momentum: f64,
    pub schedule: NesterovSchedule,
}

impl OptimizerState {
    /// Fresh state: zero velocity, `t = 0`, zero weighted-sum loss.
    pub fn new(dim: usize, initial_momentum: f64) -> Result<Self> {
        Ok(Self {
            velocity: ParamVector::zeros(dim)?,
            t: 0,
            wsl: 0.0,
            wsl_prev: 0.0,
            active_momentum: initial_momentum,
            schedule: NesterovSchedule::new(),
        })
    }

    /// Fresh state whose velocity is preset, for resuming or probing a rule.
    pub fn with_velocity(velocity: ParamVector, momentum: f64) -> Self {
        Self { velocity, t: 0, wsl: 0.0, wsl_prev: 0.0, active_momentum: momentum, schedule: NesterovSchedule::new() }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct StepOutcome {
    pub theta: ParamVector,
    pub state: OptimizerState,
    pub record: StepRecord,
}

pub trait Optimizer {
    fn init_state(&self, dim: usize) -> Result<OptimizerState>;

    fn step<O: Objective + ?Sized>(&self, state: &OptimizerState, obj: &O, theta: &ParamVector) -> Result<StepOutcome>;
}

/// Any optimizer the harness knows how to build from a config file.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "method", rename_all = "snake_case")]
pub enum OptimizerConfig {
    Cm { eta: f64, m: f64 },
    Nag { eta: f64, m: f64 },
    NagScheduled { eta: f64 },
    Adine(AdineConfig),
}

impl OptimizerConfig {
    pub fn validate(&self) -> Result<()> {
        match self {
            OptimizerConfig::Adine(cfg) => cfg.validate(),
            _ => self.fixed().expect("fixed variant").validate(),
        }
    }

    fn fixed(&self) -> Option<FixedMomentumConfig> {
        match *self {
            OptimizerConfig::Cm { eta, m } => Some(FixedMomentumConfig::new(eta, m, MomentumVariant::Cm)),
            OptimizerConfig::Nag { eta, m } => Some(FixedMomentumConfig::new(eta, m, MomentumVariant::NagSutskever)),
            OptimizerConfig::NagScheduled { eta } => {
                Some(FixedMomentumConfig::new(eta, 0.0, MomentumVariant::NagScheduled))
            }
            OptimizerConfig::Adine(_) => None,
        }
    }

    pub fn method_name(&self) -> &'static str {
        match self {
            OptimizerConfig::Cm { .. } => "CM",
            OptimizerConfig::Nag { .. } => "NAG",
            OptimizerConfig::NagScheduled { .. } => "NAG-scheduled",
            OptimizerConfig::Adine(_) => "ADINE",
        }
    }

    /// Momentum as shown in summary tables.
    pub fn momentum_label(&self) -> String {
        match self {
            OptimizerConfig::Cm { m, .. } | OptimizerConfig::Nag { m, .. } => format!("{m}"),
            OptimizerConfig::NagScheduled { .. } => "schedule".to_string(),
            OptimizerConfig::Adine(c) => format!("{}/{}", c.m_s, c.m_g),
        }
    }

    pub fn eta(&self) -> f64 {
        match *self {
            OptimizerConfig::Cm { eta, .. }
            | OptimizerConfig::Nag { eta, .. }
            | OptimizerConfig::NagScheduled { eta } => eta,
            OptimizerConfig::Adine(c) => c.eta,
        }
    }

    pub fn as_adine(&self) -> Option<&AdineConfig> {
        match self {
            OptimizerConfig::Adine(c) => Some(c),
            _ => None,
        }
    }
}

impl Optimizer for OptimizerConfig {
    fn init_state(&self, dim: usize) -> Result<OptimizerState> {
        match self {
            OptimizerConfig::Adine(cfg) => cfg.init_state(dim),
            _ => self.fixed().expect("fixed variant").init_state(dim),
        }
    }

    fn step<O: Objective + ?Sized>(&self, state: &OptimizerState, obj: &O, theta: &ParamVector) -> Result<StepOutcome> {
        match self {
            OptimizerConfig::Adine(cfg) => cfg.step(state, obj, theta),
            _ => self.fixed().expect("fixed variant").step(state, obj, theta),
        }
    }
}

pub(crate) fn ensure_finite_loss(loss: f64, step: u64) -> Result<()> {
    if loss.is_finite() {
        Ok(())
    } else {
        Err(Error::Diverged { step, reason: format!("loss is {loss}") })
    }
}

pub(crate) fn ensure_finite_grad(grad: &ParamVector, step: u64) -> Result<()> {
    match grad.first_non_finite() {
        None => Ok(()),
        Some((i, v)) => Err(Error::Diverged { step, reason: format!("gradient entry {i} is {v}") }),
    }
}

/// `v' = m·v − η·g`, `θ' = θ + v'`.
pub(crate) fn apply_velocity(
    m: f64,
    eta: f64,
    velocity: &ParamVector,
    theta: &ParamVector,
    grad: &ParamVector,
) -> Result<(ParamVector, ParamVector)> {
    let v_next = vec_axpy(-eta, grad, &velocity.scale(m))?;
    let theta_next = vec_axpy(1.0, &v_next, theta)?;
    Ok((v_next, theta_next))
}

/// Shared tail of NAG and ADINE: gradient at the lookahead point `θ + m·v`,
/// then the velocity update. Both rules go through this one function so a
/// given momentum produces bit-identical steps in either.
pub(crate) fn lookahead_update<O: Objective + ?Sized>(
    m: f64,
    eta: f64,
    obj: &O,
    theta: &ParamVector,
    velocity: &ParamVector,
    step: u64,
) -> Result<(ParamVector, ParamVector, f64)> {
    let lookahead = vec_axpy(m, velocity, theta)?;
    let grad = obj.grad(&lookahead)?;
    ensure_finite_grad(&grad, step)?;
    let (v_next, theta_next) = apply_velocity(m, eta, velocity, theta, &grad)?;
    Ok((v_next, theta_next, vec_norm2(&grad)))
}

pub(crate) fn check_positive(name: &str, value: f64) -> Result<()> {
    if value > 0.0 && value.is_finite() {
        Ok(())
    } else {
        Err(Error::invalid(format!("{name} must be positive and finite, got {value}")))
    }
}
