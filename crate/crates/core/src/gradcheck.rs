//! Central-difference gradient checks.

/// Denominator floor for [`relative_error`], so entries whose true gradient
/// is zero are compared on an absolute scale.
pub const RELATIVE_ERROR_FLOOR: f64 = 1e-6;

/// `(f(x + h·e_i) − f(x − h·e_i)) / 2h` for every coordinate `i`.
pub fn central_difference<F>(f: F, x: &[f64], h: f64) -> Vec<f64>
where
    F: Fn(&[f64]) -> f64,
{
    let mut probe = x.to_vec();
    (0..x.len())
        .map(|i| {
            let orig = probe[i];
            probe[i] = orig + h;
            let up = f(&probe);
            probe[i] = orig - h;
            let down = f(&probe);
            probe[i] = orig;
            (up - down) / (2.0 * h)
        })
        .collect()
}

/// Diagonal of the Hessian by second differences.
pub fn hessian_diagonal<F>(f: F, x: &[f64], h: f64) -> Vec<f64>
where
    F: Fn(&[f64]) -> f64,
{
    let mut probe = x.to_vec();
    let f0 = f(x);
    (0..x.len())
        .map(|i| {
            let orig = probe[i];
            probe[i] = orig + h;
            let up = f(&probe);
            probe[i] = orig - h;
            let down = f(&probe);
            probe[i] = orig;
            (up - 2.0 * f0 + down) / (h * h)
        })
        .collect()
}

pub fn relative_error(analytic: f64, numeric: f64) -> f64 {
    (analytic - numeric).abs() / analytic.abs().max(numeric.abs()).max(RELATIVE_ERROR_FLOOR)
}

/// Largest per-entry error, relative to the larger of the two gradients'
/// max-norms.
///
/// Entries whose true value is near zero carry the full rounding noise of
/// the difference quotient, so they are measured against the gradient's
/// overall scale rather than their own magnitude.
pub fn max_relative_error(analytic: &[f64], numeric: &[f64]) -> f64 {
    assert_eq!(analytic.len(), numeric.len());
    let scale = analytic.iter().chain(numeric).fold(RELATIVE_ERROR_FLOOR, |acc, v| acc.max(v.abs()));
    analytic.iter().zip(numeric).map(|(&a, &n)| (a - n).abs() / scale).fold(0.0, f64::max)
}
