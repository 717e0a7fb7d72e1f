//! Benchmark harness for the csrec solvers.
//!
//! The harness runs declarative scenario sweeps — images × solvers ×
//! measurement ratios × noise levels × seeds — and renders the results as
//! CSV, SVG charts, and a timing table. Every cell is deterministic:
//! operator draws and noise realizations derive from the cell's 64-bit seed,
//! so rerunning a scenario reproduces every number except wall time.

pub mod chart;
pub mod csvout;
pub mod measurement;
pub mod runner;
pub mod scenario;
pub mod timing;

/// Harness-level failure, split by CLI exit code: configuration problems
/// (exit 1), I/O problems (exit 2), and solver failures in single-run mode
/// (exit 3).
#[derive(Debug)]
pub enum HarnessError {
    Config(String),
    Io(String),
    Solver(String),
}

impl HarnessError {
    pub fn exit_code(&self) -> i32 {
        match self {
            HarnessError::Config(_) => 1,
            HarnessError::Io(_) => 2,
            HarnessError::Solver(_) => 3,
        }
    }
}

impl std::fmt::Display for HarnessError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            HarnessError::Config(msg) => write!(f, "config error: {msg}"),
            HarnessError::Io(msg) => write!(f, "i/o error: {msg}"),
            HarnessError::Solver(msg) => write!(f, "solver error: {msg}"),
        }
    }
}

impl std::error::Error for HarnessError {}

impl From<csrec::Error> for HarnessError {
    fn from(err: csrec::Error) -> Self {
        HarnessError::Config(err.to_string())
    }
}

pub type Result<T> = std::result::Result<T, HarnessError>;
