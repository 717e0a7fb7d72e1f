//! Signal container and small vector helpers shared by solvers and metrics.

use crate::{Error, Result};

/// One-dimensional real signal: finite entries, non-empty.
///
/// Solver inner loops work on raw `&[f64]` slices; `SignalVector` is the
/// validated boundary type for inputs and results.
#[derive(Debug, Clone, PartialEq)]
pub struct SignalVector {
    values: Vec<f64>,
}

impl SignalVector {
    pub fn new(values: Vec<f64>) -> Result<Self> {
        if values.is_empty() {
            return Err(Error::InvalidDimension("signal must be non-empty".into()));
        }
        if let Some(i) = values.iter().position(|v| !v.is_finite()) {
            return Err(Error::DegenerateSignal(format!(
                "non-finite entry {} at index {i}",
                values[i]
            )));
        }
        Ok(SignalVector { values })
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.values
    }

    pub fn into_vec(self) -> Vec<f64> {
        self.values
    }
}

impl std::ops::Deref for SignalVector {
    type Target = [f64];

    fn deref(&self) -> &[f64] {
        &self.values
    }
}

impl AsRef<[f64]> for SignalVector {
    fn as_ref(&self) -> &[f64] {
        &self.values
    }
}

pub(crate) fn dot(a: &[f64], b: &[f64]) -> f64 {
    debug_assert_eq!(a.len(), b.len());
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

pub(crate) fn norm2(a: &[f64]) -> f64 {
    dot(a, a).sqrt()
}

pub(crate) fn norm1(a: &[f64]) -> f64 {
    a.iter().map(|x| x.abs()).sum()
}

pub(crate) fn norm_inf(a: &[f64]) -> f64 {
    a.iter().fold(0.0, |m, x| m.max(x.abs()))
}

/// a <- a + s * b
pub(crate) fn axpy(a: &mut [f64], s: f64, b: &[f64]) {
    debug_assert_eq!(a.len(), b.len());
    for (x, y) in a.iter_mut().zip(b) {
        *x += s * y;
    }
}

pub(crate) fn sub(a: &[f64], b: &[f64]) -> Vec<f64> {
    debug_assert_eq!(a.len(), b.len());
    a.iter().zip(b).map(|(x, y)| x - y).collect()
}

/// Relative change ||new - old|| / max(||new||, floor); the solver stopping
/// rule compares this against the configured tolerance.
pub(crate) fn relative_change(new: &[f64], old: &[f64]) -> f64 {
    let mut diff_sq = 0.0;
    let mut new_sq = 0.0;
    for (x, y) in new.iter().zip(old) {
        diff_sq += (x - y) * (x - y);
        new_sq += x * x;
    }
    diff_sq.sqrt() / new_sq.sqrt().max(1e-300)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_empty_and_non_finite() {
        assert!(SignalVector::new(vec![]).is_err());
        assert!(SignalVector::new(vec![1.0, f64::NAN]).is_err());
        assert!(SignalVector::new(vec![1.0, f64::INFINITY]).is_err());
        assert!(SignalVector::new(vec![0.0, -3.5]).is_ok());
    }

    #[test]
    fn norms_match_hand_values() {
        let v = [3.0, -4.0];
        assert_eq!(norm2(&v), 5.0);
        assert_eq!(norm1(&v), 7.0);
        assert_eq!(norm_inf(&v), 4.0);
    }
}
