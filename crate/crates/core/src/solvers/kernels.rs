//! Proximal building blocks shared by the solvers.

use crate::{Error, Result};

/// Componentwise soft threshold sign(x) * max(|x| - t, 0).
pub fn soft_threshold(x: &[f64], t: f64) -> Result<Vec<f64>> {
    if !(t.is_finite() && t >= 0.0) {
        return Err(Error::InvalidArgument(format!(
            "threshold must be non-negative, got {t}"
        )));
    }
    Ok(x.iter().map(|&v| shrink_scalar(v, t)).collect())
}

#[inline]
pub(crate) fn shrink_scalar(v: f64, t: f64) -> f64 {
    if v > t {
        v - t
    } else if v < -t {
        v + t
    } else {
        0.0
    }
}

/// Pairwise group soft threshold: each (x_i, y_i) pair shrinks toward the
/// origin by `t` in Euclidean norm. Used by isotropic TV proximal steps.
pub fn group_soft_threshold(x: &[f64], y: &[f64], t: f64) -> Result<(Vec<f64>, Vec<f64>)> {
    if x.len() != y.len() {
        return Err(Error::InvalidDimension(format!(
            "component length mismatch: {} vs {}",
            x.len(),
            y.len()
        )));
    }
    if !(t.is_finite() && t >= 0.0) {
        return Err(Error::InvalidArgument(format!(
            "threshold must be non-negative, got {t}"
        )));
    }
    let mut out_x = vec![0.0; x.len()];
    let mut out_y = vec![0.0; y.len()];
    for i in 0..x.len() {
        let norm = x[i].hypot(y[i]);
        if norm > t {
            let scale = (norm - t) / norm;
            out_x[i] = scale * x[i];
            out_y[i] = scale * y[i];
        }
    }
    Ok((out_x, out_y))
}

/// Euclidean projection onto the L1 ball of radius `tau`, by the sort-based
/// threshold search: the projection is a soft threshold whose level is the
/// unique value making the result's L1 norm equal `tau`.
///
/// Points already inside the ball are returned unchanged (exact fixed
/// point). `tau` must be positive.
pub fn project_l1_ball(x: &[f64], tau: f64) -> Result<Vec<f64>> {
    if !(tau.is_finite() && tau > 0.0) {
        return Err(Error::InvalidArgument(format!(
            "ball radius must be positive, got {tau}"
        )));
    }
    let norm1: f64 = x.iter().map(|v| v.abs()).sum();
    if norm1 <= tau {
        return Ok(x.to_vec());
    }
    let mut magnitudes: Vec<f64> = x.iter().map(|v| v.abs()).collect();
    magnitudes.sort_unstable_by(|a, b| b.partial_cmp(a).expect("magnitudes are finite"));
    let mut cumulative = 0.0;
    let mut theta = 0.0;
    for (i, &u) in magnitudes.iter().enumerate() {
        cumulative += u;
        let candidate = (cumulative - tau) / (i + 1) as f64;
        if u > candidate {
            theta = candidate;
        } else {
            break;
        }
    }
    Ok(x.iter().map(|&v| shrink_scalar(v, theta)).collect())
}
