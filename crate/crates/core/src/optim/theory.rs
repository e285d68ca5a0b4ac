use crate::error::{Error, Result};
use crate::vector::{check_dims, ParamVector};

/// Optimal heavy-ball step size and momentum for an `alpha`-strongly convex,
/// `beta`-smooth function: `η = 4/(√β + √α)²`, `m = ((√β − √α)/(√β + √α))²`.
pub fn polyak_optimal_params(alpha: f64, beta: f64) -> Result<(f64, f64)> {
    if !(alpha > 0.0 && alpha.is_finite()) {
        return Err(Error::invalid(format!("alpha must be positive, got {alpha}")));
    }
    if !(beta >= alpha && beta.is_finite()) {
        return Err(Error::invalid(format!("beta must be finite and >= alpha, got {beta}")));
    }
    let (sa, sb) = (alpha.sqrt(), beta.sqrt());
    let sum = sb + sa;
    Ok((4.0 / (sum * sum), ((sb - sa) / sum).powi(2)))
}

/// Closed form for the heavy-ball iterate after `grads.len()` steps:
/// `θ_{n+1} = m·θ_n + (1 − m)·θ_0 − η·Σ_{t=0..n} ∇f(θ_t)`, valid when the
/// run started from zero velocity.
pub fn cm_telescoped_position(
    theta_0: &ParamVector,
    grads: &[ParamVector],
    m: f64,
    eta: f64,
    theta_n: &ParamVector,
) -> Result<ParamVector> {
    if grads.is_empty() {
        return Err(Error::invalid("need at least one gradient"));
    }
    let dim = theta_0.dim();
    check_dims(dim, theta_n.dim())?;
    let mut grad_sum = vec![0.0; dim];
    for g in grads {
        check_dims(dim, g.dim())?;
        for (s, gi) in grad_sum.iter_mut().zip(g.iter()) {
            *s += gi;
        }
    }
    let out = theta_0
        .iter()
        .zip(theta_n.iter())
        .zip(&grad_sum)
        .map(|((t0, tn), s)| m * tn + (1.0 - m) * t0 - eta * s)
        .collect();
    Ok(ParamVector::from_raw(out))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn polyak_examples() {
        assert_eq!(polyak_optimal_params(1.0, 1.0).unwrap(), (1.0, 0.0));
        assert_eq!(polyak_optimal_params(1.0, 9.0).unwrap(), (0.25, 0.25));
        let (eta, m) = polyak_optimal_params(0.01, 100.0).unwrap();
        assert!((eta - 0.039_212).abs() < 1e-6);
        assert!((m - 0.960_788).abs() < 1e-6);
    }

    #[test]
    fn polyak_rejects_bad_curvatures() {
        assert!(polyak_optimal_params(0.0, 1.0).is_err());
        assert!(polyak_optimal_params(-1.0, 1.0).is_err());
        assert!(polyak_optimal_params(2.0, 1.0).is_err());
    }

    #[test]
    fn telescope_without_momentum_is_summed_descent() {
        let t0 = ParamVector::new(vec![1.0, 2.0]).unwrap();
        let tn = ParamVector::new(vec![9.0, 9.0]).unwrap();
        let grads = vec![ParamVector::new(vec![1.0, 0.0]).unwrap(), ParamVector::new(vec![0.5, -1.0]).unwrap()];
        let out = cm_telescoped_position(&t0, &grads, 0.0, 0.1, &tn).unwrap();
        assert!((out[0] - (1.0 - 0.15)).abs() < 1e-15);
        assert!((out[1] - (2.0 + 0.1)).abs() < 1e-15);
    }

    #[test]
    fn telescope_rejects_empty_and_mismatched() {
        let t0 = ParamVector::new(vec![1.0, 2.0]).unwrap();
        assert!(cm_telescoped_position(&t0, &[], 0.9, 0.1, &t0).is_err());
        let g = ParamVector::new(vec![1.0]).unwrap();
        assert!(cm_telescoped_position(&t0, &[g], 0.9, 0.1, &t0).is_err());
    }
}
