//! Basis pursuit denoise via Pareto-curve root finding.

use super::kernels::project_l1_ball;
use super::{RecentMax, ReconstructionReport, SolverConfig, StopMonitor, StopReason};
use crate::operators::LinearOperator;
use crate::signal::{dot, norm1, norm2, norm_inf, relative_change, sub, SignalVector};
use crate::{Error, Result};
use std::time::Instant;

const ARMIJO_C1: f64 = 1e-4;
const BACKTRACK_LIMIT: usize = 50;
const BB_STEP_MIN: f64 = 1e-12;
const BB_STEP_MAX: f64 = 1e12;
const NEWTON_LIMIT: usize = 50;

/// Solves min ||x||_1 subject to ||A x - y||_2 <= sigma.
///
/// The residual bound is `cfg.sigma`. The outer loop runs Newton's method on
/// the Pareto curve phi(tau) = ||y - A x_tau||_2 of the L1-constrained
/// least-squares problem, using the curve's slope
/// phi'(tau) = -||A^T r||_inf / ||r||_2; the inner loop solves each
/// constrained subproblem by spectral projected gradient with a nonmonotone
/// line search over `cfg.nonmonotone_window` recent values. `cfg.tau` seeds
/// the first radius (default 0, whose subproblem is trivial).
///
/// The run converges once |phi(tau) - sigma| <= tol * max(1, sigma); the
/// iteration count and histories aggregate all inner iterations.
pub fn spgl1<A: LinearOperator>(
    a: &A,
    y: &SignalVector,
    cfg: &SolverConfig,
) -> Result<ReconstructionReport> {
    cfg.validate()?;
    if y.len() != a.rows() {
        return Err(Error::InvalidDimension(format!(
            "measurement length {} does not match operator rows {}",
            y.len(),
            a.rows()
        )));
    }
    let start = Instant::now();
    let n = a.cols();
    let sigma = cfg.sigma;
    let pareto_tol = cfg.tol * sigma.max(1.0);
    let y_norm = norm2(y);
    let mut history = History::default();

    // sigma at or above ||y||: x = 0 is feasible and optimal.
    if y_norm <= sigma {
        return finish(start, vec![0.0; n], &history, true, StopReason::Tolerance);
    }

    let mut tau = cfg.tau.unwrap_or(0.0);
    let mut x = vec![0.0; n];
    if tau > 0.0 {
        x = project_l1_ball(&x, tau)?;
    }
    let mut residual = sub(&a.forward(&x), y);
    let mut converged = false;
    let mut stop_reason = StopReason::MaxIters;

    for _ in 0..NEWTON_LIMIT {
        if tau > 0.0 {
            let outcome = solve_lasso(
                a,
                y,
                &mut x,
                tau,
                cfg,
                cfg.max_iters.saturating_sub(history.len()),
                &mut history,
            )?;
            residual = outcome.residual;
            if outcome.out_of_budget {
                stop_reason = StopReason::MaxIters;
                break;
            }
        }
        let phi = norm2(&residual);
        if (phi - sigma).abs() <= pareto_tol || phi <= pareto_tol {
            converged = true;
            stop_reason = StopReason::Tolerance;
            break;
        }
        let dual = norm_inf(&a.adjoint(&residual));
        if dual <= 1e-14 * y_norm.max(1.0) {
            // The residual is orthogonal to the range of A; no radius
            // reaches sigma.
            stop_reason = StopReason::Stagnation;
            break;
        }
        let slope = -dual / phi;
        let next_tau = tau + (sigma - phi) / slope;
        if !(next_tau.is_finite() && next_tau > tau * (1.0 + 1e-14) + 1e-14) {
            stop_reason = StopReason::Stagnation;
            break;
        }
        tau = next_tau;
    }
    finish(start, x, &history, converged, stop_reason)
}

#[derive(Default)]
struct History {
    objective: Vec<f64>,
    residual: Vec<f64>,
}

impl History {
    fn len(&self) -> usize {
        self.objective.len()
    }

    fn push(&mut self, x: &[f64], residual_norm: f64) {
        self.objective.push(norm1(x));
        self.residual.push(residual_norm);
    }
}

fn finish(
    start: Instant,
    x: Vec<f64>,
    history: &History,
    converged: bool,
    stop_reason: StopReason,
) -> Result<ReconstructionReport> {
    Ok(ReconstructionReport {
        solution: SignalVector::new(x)?,
        iterations: history.len(),
        wall_time_s: start.elapsed().as_secs_f64(),
        objective_history: history.objective.clone(),
        residual_history: history.residual.clone(),
        converged,
        stop_reason,
    })
}

struct LassoOutcome {
    residual: Vec<f64>,
    out_of_budget: bool,
}

/// Spectral projected gradient for min 0.5 ||A x - y||^2 s.t. ||x||_1 <= tau,
/// warm-started from `x`.
fn solve_lasso<A: LinearOperator>(
    a: &A,
    y: &[f64],
    x: &mut Vec<f64>,
    tau: f64,
    cfg: &SolverConfig,
    budget: usize,
    history: &mut History,
) -> Result<LassoOutcome> {
    *x = project_l1_ball(x, tau)?;
    let mut residual = sub(&a.forward(x), y);
    let mut value = 0.5 * dot(&residual, &residual);
    let mut grad = a.adjoint(&residual);
    let mut recent = RecentMax::new(cfg.nonmonotone_window);
    recent.push(value);
    let mut monitor = StopMonitor::new(cfg.tol);
    let mut step = 1.0f64;
    let mut prev: Option<(Vec<f64>, Vec<f64>)> = None;
    let mut used = 0;
    while used < budget {
        let alpha = match &prev {
            Some((s, q)) => {
                let ss = dot(s, s);
                let sq = dot(s, q);
                if sq > 0.0 {
                    (ss / sq).clamp(BB_STEP_MIN, BB_STEP_MAX)
                } else {
                    BB_STEP_MAX.min(step * 10.0)
                }
            }
            None => 1.0,
        };
        step = alpha;
        // Projected direction at the BB step, then a nonmonotone Armijo
        // backtrack along it.
        let target = project_l1_ball(
            &x.iter().zip(&grad).map(|(v, g)| v - alpha * g).collect::<Vec<_>>(),
            tau,
        )?;
        let direction = sub(&target, x);
        let dir_deriv = dot(&grad, &direction);
        if dir_deriv >= -1e-18 {
            // Stationary within the ball.
            break;
        }
        let reference = recent.max();
        let mut lambda = 1.0f64;
        let mut accepted = None;
        for _ in 0..BACKTRACK_LIMIT {
            let cand: Vec<f64> = x
                .iter()
                .zip(&direction)
                .map(|(v, d)| v + lambda * d)
                .collect();
            let cand_residual = sub(&a.forward(&cand), y);
            let cand_value = 0.5 * dot(&cand_residual, &cand_residual);
            if cand_value <= reference + ARMIJO_C1 * lambda * dir_deriv {
                accepted = Some((cand, cand_residual, cand_value));
                break;
            }
            lambda *= 0.5;
        }
        let Some((next, next_residual, next_value)) = accepted else {
            break;
        };
        let next_grad = a.adjoint(&next_residual);
        prev = Some((sub(&next, x), sub(&next_grad, &grad)));
        let change = relative_change(&next, x);
        *x = next;
        residual = next_residual;
        value = next_value;
        grad = next_grad;
        recent.push(value);
        used += 1;
        history.push(x, norm2(&residual));
        if monitor.observe(change) {
            break;
        }
    }
    Ok(LassoOutcome {
        residual,
        out_of_budget: used >= budget,
    })
}
