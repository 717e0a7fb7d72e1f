//! Sparse recovery solvers.
//!
//! Every solver consumes a measurement operator, a measurement vector, and a
//! [`SolverConfig`], and produces a [`ReconstructionReport`]. All of them are
//! deterministic: rerunning with identical inputs reproduces the report bit
//! for bit except for wall time.
//!
//! The shared stopping rule: a solver counts as converged on tolerance once
//! the relative solution change stays at or below `tol` for five consecutive
//! iterations; the iteration budget `max_iters` bounds the total work.

mod gpsr;
mod kernels;
mod lsq;
mod nesta;
mod omp;
pub mod smooth;
mod spgl1;
mod tval3;

pub use crate::operators::TvMode;
pub use gpsr::{gpsr, GpsrVariant};
pub use kernels::{group_soft_threshold, project_l1_ball, soft_threshold};
pub use nesta::{nesta, NestaMode};
pub use omp::omp;
pub use spgl1::spgl1;
pub use tval3::tval3;

use crate::signal::SignalVector;
use crate::{Error, Result};

/// Why a solver stopped iterating.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum StopReason {
    /// Relative solution change stayed within `tol` for five consecutive
    /// iterations (plus solver-specific feasibility conditions).
    Tolerance,
    /// Iteration budget exhausted.
    MaxIters,
    /// No further progress possible: a line search failed or the model ran
    /// out of descent directions before reaching tolerance.
    Stagnation,
    /// A numerically singular subproblem (for OMP, a dependent active set).
    Breakdown,
}

impl StopReason {
    pub fn as_str(&self) -> &'static str {
        match self {
            StopReason::Tolerance => "tolerance",
            StopReason::MaxIters => "max_iters",
            StopReason::Stagnation => "stagnation",
            StopReason::Breakdown => "breakdown",
        }
    }
}

impl std::fmt::Display for StopReason {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Shared solver parameters. Fields a given solver does not use are ignored
/// by it; `Default` gives the values the benchmark harness runs with.
#[derive(Debug, Clone, PartialEq)]
pub struct SolverConfig {
    /// Total iteration budget.
    pub max_iters: usize,
    /// Relative solution-change tolerance for the stopping rule.
    pub tol: f64,
    /// GPSR shrinkage weight. `None` resolves to 0.01 * ||A^T y||_inf at
    /// call time.
    pub lambda: Option<f64>,
    /// Initial L1-ball radius for SPGL1's root finding. `None` starts at 0.
    pub tau: Option<f64>,
    /// Residual-ball radius for SPGL1 and NESTA; 0 demands exact data fit.
    pub sigma: f64,
    /// NESTA smoothing parameter for the first continuation stage.
    pub mu_smooth: f64,
    /// TVAL3 measurement-penalty start value. The splitting penalty starts
    /// at one eighth of it; both double per outer round, capped at 2^16
    /// times their start.
    pub mu_penalty: f64,
    /// Number of NESTA continuation stages; each divides the smoothing
    /// parameter by 10. Zero behaves like one stage.
    pub continuation_steps: usize,
    /// Which total-variation functional TV solvers use.
    pub tv_mode: TvMode,
    /// History window for nonmonotone line searches.
    pub nonmonotone_window: usize,
    /// Re-fit the magnitudes on the recovered support by least squares
    /// after a GPSR run.
    pub debias: bool,
}

impl Default for SolverConfig {
    fn default() -> Self {
        SolverConfig {
            max_iters: 3000,
            tol: 1e-6,
            lambda: None,
            tau: None,
            sigma: 0.0,
            mu_smooth: 1e-2,
            mu_penalty: 256.0,
            continuation_steps: 5,
            tv_mode: TvMode::Anisotropic,
            nonmonotone_window: 10,
            debias: false,
        }
    }
}

impl SolverConfig {
    pub fn validate(&self) -> Result<()> {
        if self.max_iters == 0 {
            return Err(Error::InvalidArgument("max_iters must be positive".into()));
        }
        if !(self.tol.is_finite() && self.tol > 0.0) {
            return Err(Error::InvalidArgument(format!(
                "tol must be positive and finite, got {}",
                self.tol
            )));
        }
        if let Some(lambda) = self.lambda {
            if !(lambda.is_finite() && lambda > 0.0) {
                return Err(Error::InvalidArgument(format!(
                    "lambda must be positive, got {lambda}"
                )));
            }
        }
        if let Some(tau) = self.tau {
            if !(tau.is_finite() && tau >= 0.0) {
                return Err(Error::InvalidArgument(format!(
                    "tau must be non-negative, got {tau}"
                )));
            }
        }
        if !(self.sigma.is_finite() && self.sigma >= 0.0) {
            return Err(Error::InvalidArgument(format!(
                "sigma must be non-negative, got {}",
                self.sigma
            )));
        }
        if !(self.mu_smooth.is_finite() && self.mu_smooth > 0.0) {
            return Err(Error::InvalidArgument(format!(
                "mu_smooth must be positive, got {}",
                self.mu_smooth
            )));
        }
        if !(self.mu_penalty.is_finite() && self.mu_penalty > 0.0) {
            return Err(Error::InvalidArgument(format!(
                "mu_penalty must be positive, got {}",
                self.mu_penalty
            )));
        }
        if self.nonmonotone_window == 0 {
            return Err(Error::InvalidArgument(
                "nonmonotone_window must be positive".into(),
            ));
        }
        Ok(())
    }
}

/// Outcome of a solver run.
///
/// `objective_history` and `residual_history` carry one entry per iteration
/// (the solver's own objective and the measurement residual norm
/// `||y - A x||_2`), so both have length `iterations`.
#[derive(Debug, Clone)]
pub struct ReconstructionReport {
    pub solution: SignalVector,
    pub iterations: usize,
    /// Seconds spent inside the solve loop.
    pub wall_time_s: f64,
    pub objective_history: Vec<f64>,
    pub residual_history: Vec<f64>,
    pub converged: bool,
    pub stop_reason: StopReason,
}

/// Tracks the consecutive-iteration tolerance rule.
pub(crate) struct StopMonitor {
    tol: f64,
    streak: usize,
}

impl StopMonitor {
    const NEEDED: usize = 5;

    pub(crate) fn new(tol: f64) -> Self {
        StopMonitor { tol, streak: 0 }
    }

    /// Feeds one relative-change observation; true once the rule fires.
    pub(crate) fn observe(&mut self, rel_change: f64) -> bool {
        if rel_change <= self.tol {
            self.streak += 1;
        } else {
            self.streak = 0;
        }
        self.streak >= Self::NEEDED
    }

    pub(crate) fn reset(&mut self) {
        self.streak = 0;
    }
}

/// Sliding maximum of recent objective values for nonmonotone line searches.
pub(crate) struct RecentMax {
    window: usize,
    values: std::collections::VecDeque<f64>,
}

impl RecentMax {
    pub(crate) fn new(window: usize) -> Self {
        RecentMax {
            window: window.max(1),
            values: std::collections::VecDeque::new(),
        }
    }

    pub(crate) fn push(&mut self, value: f64) {
        if self.values.len() == self.window {
            self.values.pop_front();
        }
        self.values.push_back(value);
    }

    pub(crate) fn max(&self) -> f64 {
        self.values.iter().fold(f64::NEG_INFINITY, |m, &v| m.max(v))
    }
}
