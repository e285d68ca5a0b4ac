//! Momentum optimizers (classical, Nesterov and adaptive-inertia) with the
//! synthetic saddle landscapes, a small backprop network and the experiment
//! harness used to compare them.
//!
//! ```
//! use adine::landscape::Saddle2D;
//! use adine::optim::{run_until, FixedMomentumConfig, StopCriterion};
//!
//! let cm = FixedMomentumConfig::cm(0.01, 1.1);
//! let trace = run_until(
//!     &cm,
//!     &mut Saddle2D,
//!     &Saddle2D::default_start(),
//!     StopCriterion::LossBelow { threshold: -10.0 },
//!     10_000,
//! )
//! .unwrap();
//! assert!(trace.reached_threshold());
//! ```

pub mod error;
pub mod gradcheck;
pub mod harness;
pub mod landscape;
pub mod nn;
pub mod objective;
pub mod optim;
pub mod rng;
pub mod trace;
pub mod vector;

pub use error::{Error, Result};
pub use objective::Objective;
pub use optim::{AdineConfig, FixedMomentumConfig, Optimizer, OptimizerConfig, OptimizerState, StopCriterion};
pub use rng::Rng;
pub use trace::{RunTrace, StepRecord, TerminalReason};
pub use vector::{vec_axpy, vec_norm2, ParamVector};

/// Formats a real with 17 significant digits, enough to round-trip any `f64`.
pub fn fmt_real(v: f64) -> String {
    format!("{v:.16e}")
}
