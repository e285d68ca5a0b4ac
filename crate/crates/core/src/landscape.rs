//! Synthetic saddle landscapes with analytic gradients.
//!
//! * [`QuadraticSaddle`]: `f(x) = xᵀΛx` with diagonal `Λ` whose signs
//!   alternate, so the origin is a strict saddle.
//! * [`CubicSaddle`]: `g(x) = xᵀΘ(x ⊙ x) = Σ Θ_ii x_i³`, whose Hessian
//!   vanishes at the origin (a degenerate saddle).
//! * [`Saddle2D`]: the fixed `x² − y²`.
//!
//! All three are unbounded below.

use crate::error::{Error, Result};
use crate::objective::Objective;
use crate::rng::Rng;
use crate::vector::{check_dims, ParamVector};

/// Per-coordinate magnitude of the default start point for n-dimensional races.
pub const NEAR_SADDLE_OFFSET: f64 = 0.01;

#[derive(Debug, Clone, PartialEq)]
pub struct QuadraticSaddle {
    lambda_diag: Vec<f64>,
}

impl QuadraticSaddle {
    pub fn new(lambda_diag: Vec<f64>) -> Result<Self> {
        if lambda_diag.is_empty() || lambda_diag.iter().any(|v| !v.is_finite()) {
            return Err(Error::invalid("Λ diagonal must be non-empty and finite"));
        }
        Ok(Self { lambda_diag })
    }

    pub fn lambda_diag(&self) -> &[f64] {
        &self.lambda_diag
    }

    pub fn n(&self) -> usize {
        self.lambda_diag.len()
    }
}

/// Samples `|Λ_ii| ~ U[0.99, 1.01]` with sign `(−1)^i` (even indices positive).
pub fn sample_quadratic(n: usize, rng: &mut Rng) -> Result<QuadraticSaddle> {
    if n < 2 {
        return Err(Error::invalid(format!("quadratic saddle needs n >= 2 so Λ has both signs, got {n}")));
    }
    let lambda_diag = (0..n)
        .map(|i| {
            let magnitude = rng.uniform(0.99, 1.01);
            if i % 2 == 0 {
                magnitude
            } else {
                -magnitude
            }
        })
        .collect();
    QuadraticSaddle::new(lambda_diag)
}

pub fn quad_eval_grad(q: &QuadraticSaddle, x: &ParamVector) -> Result<(f64, ParamVector)> {
    check_dims(q.n(), x.dim())?;
    let f = q.lambda_diag.iter().zip(x.iter()).map(|(l, xi)| l * xi * xi).sum();
    let grad = q.lambda_diag.iter().zip(x.iter()).map(|(l, xi)| 2.0 * l * xi).collect();
    Ok((f, ParamVector::from_raw(grad)))
}

#[derive(Debug, Clone, PartialEq)]
pub struct CubicSaddle {
    theta_diag: Vec<f64>,
}

impl CubicSaddle {
    pub fn new(theta_diag: Vec<f64>) -> Result<Self> {
        if theta_diag.is_empty() || theta_diag.iter().any(|v| !v.is_finite()) {
            return Err(Error::invalid("Θ diagonal must be non-empty and finite"));
        }
        Ok(Self { theta_diag })
    }

    pub fn theta_diag(&self) -> &[f64] {
        &self.theta_diag
    }

    pub fn n(&self) -> usize {
        self.theta_diag.len()
    }
}

/// Samples `Θ_ii ~ U[1, 2]`.
pub fn sample_cubic(n: usize, rng: &mut Rng) -> Result<CubicSaddle> {
    if n == 0 {
        return Err(Error::invalid("cubic saddle needs n >= 1"));
    }
    CubicSaddle::new((0..n).map(|_| rng.uniform(1.0, 2.0)).collect())
}

pub fn cubic_eval_grad(c: &CubicSaddle, x: &ParamVector) -> Result<(f64, ParamVector)> {
    check_dims(c.n(), x.dim())?;
    let f = c.theta_diag.iter().zip(x.iter()).map(|(t, xi)| t * xi * xi * xi).sum();
    let grad = c.theta_diag.iter().zip(x.iter()).map(|(t, xi)| 3.0 * t * xi * xi).collect();
    Ok((f, ParamVector::from_raw(grad)))
}

/// `f(x, y) = x² − y²`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct Saddle2D;

impl Saddle2D {
    pub fn as_quadratic(&self) -> QuadraticSaddle {
        QuadraticSaddle { lambda_diag: vec![1.0, -1.0] }
    }

    /// Just off the stable manifold `y = 0`; starting on it never escapes.
    pub fn default_start() -> ParamVector {
        ParamVector::from_raw(vec![1.0, 0.001])
    }
}

/// `x_i = 0.01·(−1)^i`: a point close to the saddle at the origin.
pub fn near_saddle_start(n: usize) -> Result<ParamVector> {
    ParamVector::new((0..n).map(|i| if i % 2 == 0 { NEAR_SADDLE_OFFSET } else { -NEAR_SADDLE_OFFSET }).collect())
}

impl Objective for QuadraticSaddle {
    fn dim(&self) -> usize {
        self.n()
    }

    fn eval(&self, theta: &ParamVector) -> Result<f64> {
        check_dims(self.n(), theta.dim())?;
        Ok(self.lambda_diag.iter().zip(theta.iter()).map(|(l, x)| l * x * x).sum())
    }

    fn grad(&self, theta: &ParamVector) -> Result<ParamVector> {
        quad_eval_grad(self, theta).map(|(_, g)| g)
    }

    fn eval_grad(&self, theta: &ParamVector) -> Result<(f64, ParamVector)> {
        quad_eval_grad(self, theta)
    }
}

impl Objective for CubicSaddle {
    fn dim(&self) -> usize {
        self.n()
    }

    fn eval(&self, theta: &ParamVector) -> Result<f64> {
        check_dims(self.n(), theta.dim())?;
        Ok(self.theta_diag.iter().zip(theta.iter()).map(|(t, x)| t * x * x * x).sum())
    }

    fn grad(&self, theta: &ParamVector) -> Result<ParamVector> {
        cubic_eval_grad(self, theta).map(|(_, g)| g)
    }

    fn eval_grad(&self, theta: &ParamVector) -> Result<(f64, ParamVector)> {
        cubic_eval_grad(self, theta)
    }
}

impl Objective for Saddle2D {
    fn dim(&self) -> usize {
        2
    }

    fn eval(&self, theta: &ParamVector) -> Result<f64> {
        check_dims(2, theta.dim())?;
        Ok(theta[0] * theta[0] - theta[1] * theta[1])
    }

    fn grad(&self, theta: &ParamVector) -> Result<ParamVector> {
        check_dims(2, theta.dim())?;
        Ok(ParamVector::from_raw(vec![2.0 * theta[0], -2.0 * theta[1]]))
    }
}

/// Any of the synthetic landscapes, as a single objective type.
#[derive(Debug, Clone, PartialEq)]
pub enum Landscape {
    Quadratic(QuadraticSaddle),
    Cubic(CubicSaddle),
    Saddle2D,
}

impl Landscape {
    pub fn default_start(&self) -> Result<ParamVector> {
        match self {
            Landscape::Quadratic(q) => near_saddle_start(q.n()),
            Landscape::Cubic(c) => near_saddle_start(c.n()),
            Landscape::Saddle2D => Ok(Saddle2D::default_start()),
        }
    }

    fn inner(&self) -> &dyn Objective {
        match self {
            Landscape::Quadratic(q) => q,
            Landscape::Cubic(c) => c,
            Landscape::Saddle2D => &Saddle2D,
        }
    }
}

impl Objective for Landscape {
    fn dim(&self) -> usize {
        self.inner().dim()
    }

    fn eval(&self, theta: &ParamVector) -> Result<f64> {
        self.inner().eval(theta)
    }

    fn grad(&self, theta: &ParamVector) -> Result<ParamVector> {
        self.inner().grad(theta)
    }

    fn eval_grad(&self, theta: &ParamVector) -> Result<(f64, ParamVector)> {
        self.inner().eval_grad(theta)
    }
}
