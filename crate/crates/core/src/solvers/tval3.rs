//! Total-variation reconstruction by augmented-Lagrangian splitting.

use super::kernels::{group_soft_threshold, shrink_scalar};
use super::{smooth, RecentMax, ReconstructionReport, SolverConfig, StopMonitor, StopReason};
use crate::operators::{grad_values, total_variation, LinearOperator, TvMode};
use crate::signal::{axpy, dot, norm2, relative_change, sub, SignalVector};
use crate::{Error, Result};
use std::time::Instant;

const ARMIJO_C1: f64 = 1e-4;
const BACKTRACK_LIMIT: usize = 50;
const BB_STEP_MIN: f64 = 1e-12;
const BB_STEP_MAX: f64 = 1e12;
const INNER_CAP: usize = 40;
const PENALTY_CAP: f64 = 65536.0;
/// Feasibility slack, in units of tol, required before a run may report
/// convergence.
const FEASIBILITY_FACTOR: f64 = 10.0;
/// Constraint gaps must shrink by this factor per outer round, or the
/// penalties double.
const GAP_PROGRESS: f64 = 0.7;

/// Minimizes the total variation of a `width` x `height` image subject to
/// A x = y, by alternating minimization of the augmented Lagrangian of the
/// split problem min TV(w) s.t. w = Dx, A x = y.
///
/// Each inner round takes the closed-form shrinkage step in the splitting
/// variable and one spectral gradient step in the image, with a nonmonotone
/// line search over `cfg.nonmonotone_window` recent values; both Lagrange
/// multiplier sets update when the inner round stalls. The measurement
/// penalty starts at `cfg.mu_penalty` and the splitting penalty at one
/// eighth of it; both double whenever an outer round fails to shrink the
/// constraint gaps by a fixed factor, capped at 2^16 times their start.
///
/// `cfg.tv_mode` picks componentwise or pairwise-Euclidean shrinkage.
/// Histories record the total variation and residual norm per inner
/// iteration. The run reports convergence only when the relative-change rule
/// fires and the iterate is feasible, `||y - A x|| <= 10 * tol * ||y||`.
pub fn tval3<A: LinearOperator>(
    a: &A,
    y: &SignalVector,
    width: usize,
    height: usize,
    cfg: &SolverConfig,
) -> Result<ReconstructionReport> {
    cfg.validate()?;
    let n = a.cols();
    if y.len() != a.rows() {
        return Err(Error::InvalidDimension(format!(
            "measurement length {} does not match operator rows {}",
            y.len(),
            a.rows()
        )));
    }
    if width.checked_mul(height) != Some(n) {
        return Err(Error::InvalidDimension(format!(
            "image geometry {width}x{height} does not match operator columns {n}"
        )));
    }
    if width < 2 || height < 2 {
        return Err(Error::InvalidDimension(format!(
            "total variation needs at least 2x2 pixels, got {width}x{height}"
        )));
    }

    let start = Instant::now();
    let m = a.rows();
    let y_norm = norm2(y);
    let feasibility_limit = FEASIBILITY_FACTOR * cfg.tol * y_norm;
    let beta0 = cfg.mu_penalty / 8.0;
    let mu0 = cfg.mu_penalty;
    let mut beta = beta0;
    let mut mu = mu0;
    let mut x = a.adjoint(y);
    let mut w = vec![0.0; 2 * n];
    let mut lam_w = vec![0.0; 2 * n];
    let mut lam_y = vec![0.0; m];
    let mut monitor = StopMonitor::new(cfg.tol);
    let mut objective_history = Vec::new();
    let mut residual_history = Vec::new();
    let mut used = 0;
    let mut converged = false;
    let mut stop_reason = StopReason::MaxIters;
    let mut prev_gap: Option<f64> = None;

    'outer: loop {
        let mut recent = RecentMax::new(cfg.nonmonotone_window);
        let mut prev_state: Option<(Vec<f64>, Vec<f64>)> = None;
        for inner in 0..INNER_CAP {
            if used >= cfg.max_iters {
                break 'outer;
            }

            // Splitting step: shrink the shifted gradient field at 1/beta.
            let field = grad_values(&x, width, height)?;
            let shift_x: Vec<f64> = field
                .dx()
                .iter()
                .zip(&lam_w[..n])
                .map(|(d, l)| d + l / beta)
                .collect();
            let shift_y: Vec<f64> = field
                .dy()
                .iter()
                .zip(&lam_w[n..])
                .map(|(d, l)| d + l / beta)
                .collect();
            match cfg.tv_mode {
                TvMode::Anisotropic => {
                    for i in 0..n {
                        w[i] = shrink_scalar(shift_x[i], 1.0 / beta);
                        w[n + i] = shrink_scalar(shift_y[i], 1.0 / beta);
                    }
                }
                TvMode::Isotropic => {
                    let (wx, wy) = group_soft_threshold(&shift_x, &shift_y, 1.0 / beta)?;
                    w[..n].copy_from_slice(&wx);
                    w[n..].copy_from_slice(&wy);
                }
            }

            // Image step: one spectral gradient step on the augmented
            // Lagrangian with w and the multipliers fixed.
            let value = smooth::tval3_x_objective(
                a, y, width, height, &w, &lam_w, &lam_y, beta, mu, &x,
            )?;
            let grad = smooth::tval3_x_gradient(
                a, y, width, height, &w, &lam_w, &lam_y, beta, mu, &x,
            )?;
            recent.push(value);
            let step = match &prev_state {
                Some((px, pg)) => {
                    let s = sub(&x, px);
                    let q = sub(&grad, pg);
                    let sq = dot(&s, &q);
                    if sq > 0.0 {
                        (dot(&s, &s) / sq).clamp(BB_STEP_MIN, BB_STEP_MAX)
                    } else {
                        1.0 / (8.0 * beta + mu)
                    }
                }
                // The Hessian norm is at most 8 beta + mu ||A||^2 with
                // ||A|| <= 1 for the supported operators.
                None => 1.0 / (8.0 * beta + mu),
            };
            let grad_sq = dot(&grad, &grad);
            let reference = recent.max();
            let mut alpha = step;
            let mut accepted = None;
            for _ in 0..BACKTRACK_LIMIT {
                let mut cand = x.clone();
                axpy(&mut cand, -alpha, &grad);
                let cand_value = smooth::tval3_x_objective(
                    a, y, width, height, &w, &lam_w, &lam_y, beta, mu, &cand,
                )?;
                if cand_value <= reference - ARMIJO_C1 * alpha * grad_sq {
                    accepted = Some(cand);
                    break;
                }
                alpha *= 0.5;
            }
            let Some(next) = accepted else {
                stop_reason = StopReason::Stagnation;
                break 'outer;
            };
            prev_state = Some((x.clone(), grad));
            let change = relative_change(&next, &x);
            x = next;
            used += 1;
            let residual_norm = norm2(&sub(&a.forward(&x), y));
            objective_history.push(total_variation(&x, width, height, cfg.tv_mode)?);
            residual_history.push(residual_norm);
            if monitor.observe(change) {
                if residual_norm <= feasibility_limit {
                    let field = grad_values(&x, width, height)?;
                    let mut gap_sq = 0.0;
                    for i in 0..n {
                        let gx = w[i] - field.dx()[i];
                        let gy = w[n + i] - field.dy()[i];
                        gap_sq += gx * gx + gy * gy;
                    }
                    let split_scale = norm2(field.dx()).hypot(norm2(field.dy())).max(1.0);
                    if gap_sq.sqrt() <= FEASIBILITY_FACTOR * cfg.tol * split_scale {
                        converged = true;
                        stop_reason = StopReason::Tolerance;
                        break 'outer;
                    }
                }
                // Settled without closing the constraints: hand control
                // back to the multiplier updates.
                monitor.reset();
                break;
            }
            // The first step of a round uses the conservative worst-case
            // step length; only trust smallness once the spectral length
            // is active.
            if inner > 0 && change <= cfg.tol {
                break;
            }
        }

        // Multiplier ascent at the current split.
        let field = grad_values(&x, width, height)?;
        let mut split_gap_sq = 0.0;
        for i in 0..n {
            let gx = w[i] - field.dx()[i];
            let gy = w[n + i] - field.dy()[i];
            lam_w[i] -= beta * gx;
            lam_w[n + i] -= beta * gy;
            split_gap_sq += gx * gx + gy * gy;
        }
        let residual = sub(&a.forward(&x), y);
        axpy(&mut lam_y, -mu, &residual);
        // Penalties double only when the combined constraint gap stalls;
        // multiplier ascent alone drives steady progress.
        let gap = split_gap_sq.sqrt().hypot(norm2(&residual));
        if prev_gap.is_none_or(|g| gap > GAP_PROGRESS * g) {
            beta = (beta * 2.0).min(beta0 * PENALTY_CAP);
            mu = (mu * 2.0).min(mu0 * PENALTY_CAP);
        }
        prev_gap = Some(gap);
    }

    Ok(ReconstructionReport {
        solution: SignalVector::new(x)?,
        iterations: used,
        wall_time_s: start.elapsed().as_secs_f64(),
        objective_history,
        residual_history,
        converged,
        stop_reason,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::imageio::{phantom, PhantomKind};
    use crate::operators::{make_sensing_operator, SensingSpec};

    #[test]
    fn rejects_mismatched_geometry() {
        let spec = SensingSpec::new(64, 32, 1, 2).unwrap();
        let op = make_sensing_operator(&spec);
        let y = SignalVector::new(vec![0.0; 32]).unwrap();
        let err = tval3(&op, &y, 5, 5, &SolverConfig::default()).unwrap_err();
        assert!(matches!(err, Error::InvalidDimension(_)));
    }

    #[test]
    fn recovers_piecewise_constant_image() {
        let image = phantom(PhantomKind::NestedRectangles, 16, 0).unwrap();
        let truth = image.pixels().to_vec();
        let spec = SensingSpec::new(256, 128, 51, 52).unwrap();
        let op = make_sensing_operator(&spec);
        let y = SignalVector::new(op.forward(&truth)).unwrap();
        let report = tval3(&op, &y, 16, 16, &SolverConfig::default()).unwrap();
        let err = norm2(&sub(&report.solution, &truth)) / norm2(&truth);
        assert!(err < 1e-2, "err {err} stop {:?}", report.stop_reason);
        if report.converged {
            let res = norm2(&sub(&op.forward(&report.solution), &y));
            assert!(res <= FEASIBILITY_FACTOR * 1e-6 * norm2(&y));
        }
    }

    #[test]
    fn isotropic_mode_also_recovers() {
        let image = phantom(PhantomKind::NestedRectangles, 16, 0).unwrap();
        let truth = image.pixels().to_vec();
        let spec = SensingSpec::new(256, 128, 61, 62).unwrap();
        let op = make_sensing_operator(&spec);
        let y = SignalVector::new(op.forward(&truth)).unwrap();
        let mut cfg = SolverConfig::default();
        cfg.tv_mode = TvMode::Isotropic;
        let report = tval3(&op, &y, 16, 16, &cfg).unwrap();
        let err = norm2(&sub(&report.solution, &truth)) / norm2(&truth);
        assert!(err < 2e-2, "err {err}");
    }

    #[test]
    fn histories_track_iterations() {
        let image = phantom(PhantomKind::GradientRamp, 8, 0).unwrap();
        let truth = image.pixels().to_vec();
        let spec = SensingSpec::new(64, 48, 71, 72).unwrap();
        let op = make_sensing_operator(&spec);
        let y = SignalVector::new(op.forward(&truth)).unwrap();
        let mut cfg = SolverConfig::default();
        cfg.max_iters = 100;
        let report = tval3(&op, &y, 8, 8, &cfg).unwrap();
        assert_eq!(report.objective_history.len(), report.iterations);
        assert_eq!(report.residual_history.len(), report.iterations);
        assert!(report.iterations <= 100);
    }

    #[test]
    fn budget_exhaustion_reports_max_iters() {
        let image = phantom(PhantomKind::NestedRectangles, 8, 0).unwrap();
        let truth = image.pixels().to_vec();
        let spec = SensingSpec::new(64, 20, 81, 82).unwrap();
        let op = make_sensing_operator(&spec);
        let y = SignalVector::new(op.forward(&truth)).unwrap();
        let mut cfg = SolverConfig::default();
        cfg.max_iters = 7;
        cfg.tol = 1e-14;
        let report = tval3(&op, &y, 8, 8, &cfg).unwrap();
        assert_eq!(report.iterations, 7);
        assert!(!report.converged);
        assert_eq!(report.stop_reason, StopReason::MaxIters);
    }
}
