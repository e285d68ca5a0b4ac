use crate::error::Result;
use crate::vector::ParamVector;

/// A differentiable loss over a flat parameter vector.
///
/// `eval` and `grad` must be deterministic for a given `theta` and batch
/// context. Mini-batched objectives hold their batch cursor themselves and
/// only move it in [`Objective::next_batch`], which the run driver calls once
/// before every step; all evaluations inside one step therefore see the same
/// batch.
pub trait Objective {
    fn dim(&self) -> usize;

    fn eval(&self, theta: &ParamVector) -> Result<f64>;

    fn grad(&self, theta: &ParamVector) -> Result<ParamVector>;

    fn eval_grad(&self, theta: &ParamVector) -> Result<(f64, ParamVector)> {
        Ok((self.eval(theta)?, self.grad(theta)?))
    }

    fn next_batch(&mut self) {}
}

impl<O: Objective + ?Sized> Objective for &mut O {
    fn dim(&self) -> usize {
        (**self).dim()
    }

    fn eval(&self, theta: &ParamVector) -> Result<f64> {
        (**self).eval(theta)
    }

    fn grad(&self, theta: &ParamVector) -> Result<ParamVector> {
        (**self).grad(theta)
    }

    fn eval_grad(&self, theta: &ParamVector) -> Result<(f64, ParamVector)> {
        (**self).eval_grad(theta)
    }

    fn next_batch(&mut self) {
        (**self).next_batch()
    }
}
