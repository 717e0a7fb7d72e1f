//! Orthogonal matching pursuit.

use super::lsq::ActiveSetLs;
use super::{ReconstructionReport, SolverConfig, StopReason};
use crate::operators::LinearOperator;
use crate::signal::{norm2, SignalVector};
use crate::{Error, Result};
use std::time::Instant;

/// Greedy sparse recovery: each round selects the column most correlated
/// with the current residual, then re-fits all active magnitudes by least
/// squares, keeping the residual orthogonal to the active span.
///
/// Stops after `max_atoms` selections (default: the measurement dimension)
/// or once the relative residual `||r|| / ||y||` falls to `cfg.tol`. A
/// numerically dependent selection ends the run with
/// `StopReason::Breakdown` and the last consistent iterate.
pub fn omp<A: LinearOperator>(
    a: &A,
    y: &SignalVector,
    max_atoms: Option<usize>,
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
    let budget = max_atoms.unwrap_or(a.rows());
    if budget == 0 || budget > a.rows() {
        return Err(Error::InvalidArgument(format!(
            "atom budget must satisfy 1 <= k <= {}, got {budget}",
            a.rows()
        )));
    }
    let start = Instant::now();
    let y_norm = norm2(y);
    let mut objective_history = Vec::new();
    let mut residual_history = Vec::new();
    let mut active = ActiveSetLs::new(a.rows());
    let mut coeffs: Vec<f64> = Vec::new();
    let mut residual = y.as_slice().to_vec();
    let mut converged = y_norm == 0.0;
    let mut stop_reason = if converged {
        StopReason::Tolerance
    } else {
        StopReason::MaxIters
    };
    while !converged && active.len() < budget {
        let correlations = a.adjoint(&residual);
        let mut best = None;
        let mut best_abs = 0.0;
        for (i, &c) in correlations.iter().enumerate() {
            if c.abs() > best_abs && !active.contains(i) {
                best_abs = c.abs();
                best = Some(i);
            }
        }
        let Some(index) = best else {
            stop_reason = StopReason::Stagnation;
            break;
        };
        if best_abs <= 1e-14 * y_norm {
            // Residual is numerically orthogonal to every remaining column.
            stop_reason = StopReason::Stagnation;
            break;
        }
        let column = ActiveSetLs::extract_column(a, index);
        if !active.try_add(index, column, y) {
            stop_reason = StopReason::Breakdown;
            break;
        }
        coeffs = active.solve();
        residual = active.residual(&coeffs, y);
        let r_norm = norm2(&residual);
        objective_history.push(r_norm);
        residual_history.push(r_norm);
        if r_norm <= cfg.tol * y_norm {
            converged = true;
            stop_reason = StopReason::Tolerance;
        }
    }
    let mut solution = vec![0.0; a.cols()];
    for (&index, &c) in active.indices().iter().zip(&coeffs) {
        solution[index] = c;
    }
    let iterations = residual_history.len();
    Ok(ReconstructionReport {
        solution: SignalVector::new(solution)?,
        iterations,
        wall_time_s: start.elapsed().as_secs_f64(),
        objective_history,
        residual_history,
        converged,
        stop_reason,
    })
}
