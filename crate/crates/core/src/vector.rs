//! Flat parameter vectors and the two vector kernels every update rule is built from.

use std::ops::Index;

use crate::error::{Error, Result};

/// A flat, non-empty vector of finite 64-bit parameters.
///
/// Entries are checked for finiteness by [`ParamVector::new`]. Arithmetic
/// inside the crate may produce non-finite entries while a run diverges; the
/// run driver detects those with [`ParamVector::first_non_finite`].
#[derive(Debug, Clone, PartialEq)]
pub struct ParamVector {
    values: Vec<f64>,
}

impl ParamVector {
    pub fn new(values: Vec<f64>) -> Result<Self> {
        if values.is_empty() {
            return Err(Error::EmptyVector);
        }
        if let Some((index, &value)) = values.iter().enumerate().find(|(_, v)| !v.is_finite()) {
            return Err(Error::NonFinite { index, value });
        }
        Ok(Self { values })
    }

    pub fn zeros(dim: usize) -> Result<Self> {
        Self::new(vec![0.0; dim])
    }

    pub fn filled(dim: usize, value: f64) -> Result<Self> {
        Self::new(vec![value; dim])
    }

    /// Wraps values produced by internal arithmetic without re-validating them.
    pub(crate) fn from_raw(values: Vec<f64>) -> Self {
        debug_assert!(!values.is_empty());
        Self { values }
    }

    pub fn dim(&self) -> usize {
        self.values.len()
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.values
    }

    pub fn into_vec(self) -> Vec<f64> {
        self.values
    }

    pub fn iter(&self) -> std::slice::Iter<'_, f64> {
        self.values.iter()
    }

    pub fn is_zero(&self) -> bool {
        self.values.iter().all(|&v| v == 0.0)
    }

    pub fn first_non_finite(&self) -> Option<(usize, f64)> {
        self.values.iter().enumerate().find(|(_, v)| !v.is_finite()).map(|(i, &v)| (i, v))
    }

    pub fn max_abs_diff(&self, other: &ParamVector) -> Result<f64> {
        check_dims(self.dim(), other.dim())?;
        Ok(self.values.iter().zip(&other.values).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max))
    }

    pub fn scale(&self, a: f64) -> ParamVector {
        Self::from_raw(self.values.iter().map(|v| a * v).collect())
    }
}

impl Index<usize> for ParamVector {
    type Output = f64;

    fn index(&self, i: usize) -> &f64 {
        &self.values[i]
    }
}

impl TryFrom<Vec<f64>> for ParamVector {
    type Error = Error;

    fn try_from(values: Vec<f64>) -> Result<Self> {
        Self::new(values)
    }
}

pub(crate) fn check_dims(expected: usize, got: usize) -> Result<()> {
    if expected != got {
        return Err(Error::DimensionMismatch { expected, got });
    }
    Ok(())
}

/// Returns `a·x + y`. Neither input is modified.
pub fn vec_axpy(a: f64, x: &ParamVector, y: &ParamVector) -> Result<ParamVector> {
    check_dims(y.dim(), x.dim())?;
    Ok(ParamVector::from_raw(x.values.iter().zip(&y.values).map(|(xi, yi)| a * xi + yi).collect()))
}

/// Euclidean norm.
pub fn vec_norm2(x: &ParamVector) -> f64 {
    x.values.iter().map(|v| v * v).sum::<f64>().sqrt()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn pv(v: &[f64]) -> ParamVector {
        ParamVector::new(v.to_vec()).unwrap()
    }

    #[test]
    fn axpy_examples() {
        assert_eq!(vec_axpy(0.0, &pv(&[3., 4.]), &pv(&[1., 2.])).unwrap(), pv(&[1., 2.]));
        assert_eq!(vec_axpy(1.0, &pv(&[1., 1.]), &pv(&[0., 0.])).unwrap(), pv(&[1., 1.]));
        assert_eq!(vec_axpy(-0.5, &pv(&[2., 4.]), &pv(&[1., 1.])).unwrap(), pv(&[0., -1.]));
    }

    #[test]
    fn axpy_rejects_mismatched_dims() {
        let err = vec_axpy(1.0, &pv(&[1.]), &pv(&[1., 2.])).unwrap_err();
        assert!(matches!(err, Error::DimensionMismatch { expected: 2, got: 1 }));
    }

    #[test]
    fn axpy_leaves_inputs_untouched() {
        let x = pv(&[1.5, -2.0, 3.0]);
        let y = pv(&[0.25, 0.5, -1.0]);
        let (x0, y0) = (x.clone(), y.clone());
        let _ = vec_axpy(2.0, &x, &y).unwrap();
        assert_eq!(x, x0);
        assert_eq!(y, y0);
    }

    #[test]
    fn norm_examples() {
        assert_eq!(vec_norm2(&pv(&[0., 0., 0.])), 0.0);
        assert_eq!(vec_norm2(&pv(&[3., 4.])), 5.0);
        assert_eq!(vec_norm2(&pv(&[1., 1., 1., 1.])), 2.0);
    }

    #[test]
    fn construction_rejects_bad_values() {
        assert!(matches!(ParamVector::new(vec![]), Err(Error::EmptyVector)));
        assert!(matches!(ParamVector::new(vec![1.0, f64::NAN]), Err(Error::NonFinite { index: 1, .. })));
        assert!(ParamVector::new(vec![f64::INFINITY]).is_err());
    }
}
