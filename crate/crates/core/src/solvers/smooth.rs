//! Smooth (sub)objectives and their analytic gradients.
//!
//! The iterative solvers all descend on one of these functions. They are
//! exposed so gradient implementations can be validated against finite
//! differences independently of any solver loop.

use crate::operators::{grad_values, LinearOperator, TvMode};
use crate::signal::{axpy, dot, sub};
use crate::operators::gradient::div_components_into;
use crate::Result;

/// GPSR objective over the positive/negative split x = u - v with u, v >= 0:
/// 0.5 ||A(u - v) - y||^2 + lambda * sum(u + v).
pub fn gpsr_objective<A: LinearOperator>(
    a: &A,
    y: &[f64],
    lambda: f64,
    u: &[f64],
    v: &[f64],
) -> f64 {
    let x = sub(u, v);
    let r = sub(&a.forward(&x), y);
    0.5 * dot(&r, &r) + lambda * (u.iter().sum::<f64>() + v.iter().sum::<f64>())
}

/// Gradient of [`gpsr_objective`]: (A^T r + lambda, -A^T r + lambda) with
/// r = A(u - v) - y.
pub fn gpsr_gradient<A: LinearOperator>(
    a: &A,
    y: &[f64],
    lambda: f64,
    u: &[f64],
    v: &[f64],
) -> (Vec<f64>, Vec<f64>) {
    let x = sub(u, v);
    let r = sub(&a.forward(&x), y);
    let at_r = a.adjoint(&r);
    let gu: Vec<f64> = at_r.iter().map(|g| g + lambda).collect();
    let gv: Vec<f64> = at_r.iter().map(|g| -g + lambda).collect();
    (gu, gv)
}

#[inline]
fn huber_value(z: f64, mu: f64) -> f64 {
    let abs = z.abs();
    if abs <= mu {
        z * z / (2.0 * mu)
    } else {
        abs - mu / 2.0
    }
}

#[inline]
fn huber_slope(z: f64, mu: f64) -> f64 {
    if z.abs() <= mu {
        z / mu
    } else {
        z.signum()
    }
}

/// Huber-smoothed L1 norm sum_i h_mu(x_i) and its gradient. The gradient is
/// 1/mu-Lipschitz, which fixes the step size of smoothed-norm solvers.
pub fn huber_l1(x: &[f64], mu: f64) -> (f64, Vec<f64>) {
    debug_assert!(mu > 0.0);
    let value = x.iter().map(|&z| huber_value(z, mu)).sum();
    let grad = x.iter().map(|&z| huber_slope(z, mu)).collect();
    (value, grad)
}

/// Huber-smoothed total variation of a flattened row-major image and its
/// gradient. Anisotropic mode applies the scalar Huber function to every
/// forward difference; isotropic mode applies it to the per-pixel Euclidean
/// gradient magnitude. The gradient is (8/mu)-Lipschitz: 8 bounds the
/// squared operator norm of the forward-difference stencil.
pub fn huber_tv(
    x: &[f64],
    width: usize,
    height: usize,
    mu: f64,
    mode: TvMode,
) -> Result<(f64, Vec<f64>)> {
    debug_assert!(mu > 0.0);
    let field = grad_values(x, width, height)?;
    let dx = field.dx();
    let dy = field.dy();
    let mut value = 0.0;
    let mut slope_x = vec![0.0; dx.len()];
    let mut slope_y = vec![0.0; dy.len()];
    match mode {
        TvMode::Anisotropic => {
            for i in 0..dx.len() {
                value += huber_value(dx[i], mu) + huber_value(dy[i], mu);
                slope_x[i] = huber_slope(dx[i], mu);
                slope_y[i] = huber_slope(dy[i], mu);
            }
        }
        TvMode::Isotropic => {
            for i in 0..dx.len() {
                let norm = dx[i].hypot(dy[i]);
                value += huber_value(norm, mu);
                let denom = norm.max(mu);
                slope_x[i] = dx[i] / denom;
                slope_y[i] = dy[i] / denom;
            }
        }
    }
    // Chain rule through the gradient stencil: D^T s = -div(s).
    let mut grad = vec![0.0; x.len()];
    div_components_into(width, height, &slope_x, &slope_y, &mut grad);
    for g in grad.iter_mut() {
        *g = -*g;
    }
    Ok((value, grad))
}

/// The x-dependent part of the TVAL3 augmented Lagrangian, with the
/// splitting variable `w` (stacked [wx; wy]) and both multiplier sets held
/// fixed:
///
/// -lam_w . (w - Dx) + (beta/2) ||w - Dx||^2
///     - lam_y . (Ax - y) + (mu/2) ||Ax - y||^2
pub fn tval3_x_objective<A: LinearOperator>(
    a: &A,
    y: &[f64],
    width: usize,
    height: usize,
    w: &[f64],
    lam_w: &[f64],
    lam_y: &[f64],
    beta: f64,
    mu: f64,
    x: &[f64],
) -> Result<f64> {
    let n = width * height;
    let field = grad_values(x, width, height)?;
    let mut split_gap = Vec::with_capacity(2 * n);
    split_gap.extend(field.dx().iter().zip(&w[..n]).map(|(d, wv)| wv - d));
    split_gap.extend(field.dy().iter().zip(&w[n..]).map(|(d, wv)| wv - d));
    let r = sub(&a.forward(x), y);
    Ok(-dot(lam_w, &split_gap) + 0.5 * beta * dot(&split_gap, &split_gap) - dot(lam_y, &r)
        + 0.5 * mu * dot(&r, &r))
}

/// Gradient of [`tval3_x_objective`] in x:
/// D^T lam_w + beta D^T (Dx - w) - A^T lam_y + mu A^T (Ax - y).
pub fn tval3_x_gradient<A: LinearOperator>(
    a: &A,
    y: &[f64],
    width: usize,
    height: usize,
    w: &[f64],
    lam_w: &[f64],
    lam_y: &[f64],
    beta: f64,
    mu: f64,
    x: &[f64],
) -> Result<Vec<f64>> {
    let n = width * height;
    let field = grad_values(x, width, height)?;
    // Field-space term lam_w + beta (Dx - w), pulled back through D^T.
    let mut fx = vec![0.0; n];
    let mut fy = vec![0.0; n];
    for i in 0..n {
        fx[i] = lam_w[i] + beta * (field.dx()[i] - w[i]);
        fy[i] = lam_w[n + i] + beta * (field.dy()[i] - w[n + i]);
    }
    let mut grad = vec![0.0; n];
    div_components_into(width, height, &fx, &fy, &mut grad);
    for g in grad.iter_mut() {
        *g = -*g;
    }
    let r = sub(&a.forward(x), y);
    let mut data_term = a.adjoint(&r);
    for d in data_term.iter_mut() {
        *d *= mu;
    }
    axpy(&mut grad, 1.0, &data_term);
    let at_lam = a.adjoint(lam_y);
    axpy(&mut grad, -1.0, &at_lam);
    Ok(grad)
}
