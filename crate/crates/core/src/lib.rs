//! Matrix-free compressive sensing reconstruction.
//!
//! The crate is organised around a small [`LinearOperator`] trait
//! (`operators::LinearOperator`): measurement matrices are never materialised,
//! only their forward and adjoint actions. On top of that sit:
//!
//! * [`operators`]: a scrambled subsampled Hadamard sensing ensemble, an
//!   orthonormal 2-D DCT, discrete gradient / divergence, and operator
//!   composition;
//! * [`solvers`]: OMP, GPSR (basic and Barzilai-Borwein), SPGL1, NESTA
//!   (L1 and total variation) and TVAL3;
//! * [`metrics`]: additive white Gaussian measurement noise, reconstruction
//!   quality scores, and sample-budget diagnostics;
//! * [`imageio`]: binary PGM codec, power-of-two padding, and synthetic
//!   phantoms.
//!
//! Everything is deterministic: all randomness flows through explicit 64-bit
//! seeds and a fixed SplitMix64 generator, so identical inputs reproduce
//! identical operators, noise draws, and solver output bit for bit.

pub mod imageio;
pub mod metrics;
pub mod operators;
pub mod rng;
pub mod signal;
pub mod solvers;

pub use signal::SignalVector;

/// Crate-wide error type.
///
/// Solver-internal events that still produce a usable iterate (hitting the
/// iteration budget, stagnating line searches) are reported through
/// `solvers::StopReason` instead; `Error` is reserved for inputs or states
/// that make the requested computation meaningless.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("invalid dimension: {0}")]
    InvalidDimension(String),
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("degenerate signal: {0}")]
    DegenerateSignal(String),
    #[error("invalid operator: {0}")]
    InvalidOperator(String),
    #[error("solver diverged: {0}")]
    Divergence(String),
    #[error("parse error at byte {offset}: {message}")]
    Parse { offset: usize, message: String },
    #[error("empty output: {0}")]
    EmptyOutput(String),
}

pub type Result<T> = std::result::Result<T, Error>;
