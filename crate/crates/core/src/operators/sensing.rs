//! Scrambled subsampled Hadamard sensing ensemble.

use super::fwht::fwht_inplace;
use super::LinearOperator;
use crate::rng::{sample_distinct, SplitMix64};
use crate::{Error, Result};

/// Parameters of a sensing ensemble draw. Two equal specs always reconstruct
/// bit-identical operators.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct SensingSpec {
    /// Signal dimension, a power of two.
    pub n: usize,
    /// Number of measurements, `1 <= m <= n`.
    pub m: usize,
    /// Seed for the diagonal +-1 sign scramble.
    pub scramble_seed: u64,
    /// Seed for measurement row selection.
    pub row_seed: u64,
}

impl SensingSpec {
    pub fn new(n: usize, m: usize, scramble_seed: u64, row_seed: u64) -> Result<Self> {
        if n == 0 || !n.is_power_of_two() {
            return Err(Error::InvalidDimension(format!(
                "signal dimension must be a power of two, got {n}"
            )));
        }
        if m == 0 || m > n {
            return Err(Error::InvalidDimension(format!(
                "measurement count must satisfy 1 <= m <= n, got m={m}, n={n}"
            )));
        }
        Ok(SensingSpec {
            n,
            m,
            scramble_seed,
            row_seed,
        })
    }
}

/// Measurement operator `A = P H S`: a +-1 diagonal sign scramble `S`, the
/// orthonormal Walsh-Hadamard transform `H`, and selection `P` of `m` of the
/// `n` transform rows.
///
/// Rows of `A` are rows of the orthogonal matrix `H S`, so `A A^T = I` and
/// `||A x|| <= ||x||` for every signal. This makes the operator nearly
/// universal: it is incoherent with any basis not specially aligned with
/// sign-scrambled Hadamard rows while costing O(n log n) per application.
#[derive(Debug, Clone)]
pub struct SensingOperator {
    spec: SensingSpec,
    signs: Vec<f64>,
    selected_rows: Vec<usize>,
}

impl SensingOperator {
    /// Draws the operator deterministically from its spec.
    ///
    /// The sign diagonal consumes one SplitMix64 draw per entry (top output
    /// bit, seeded by `scramble_seed`). Row selection takes the first `m`
    /// entries of a Fisher-Yates shuffle of `0..n` seeded by `row_seed`; the
    /// selected rows keep their shuffle order, which fixes the measurement
    /// ordering.
    pub fn new(spec: &SensingSpec) -> Self {
        let mut sign_rng = SplitMix64::new(spec.scramble_seed);
        let signs: Vec<f64> = (0..spec.n).map(|_| sign_rng.next_sign()).collect();
        let mut row_rng = SplitMix64::new(spec.row_seed);
        let selected_rows = sample_distinct(spec.n, spec.m, &mut row_rng);
        SensingOperator {
            spec: *spec,
            signs,
            selected_rows,
        }
    }

    pub fn spec(&self) -> &SensingSpec {
        &self.spec
    }

    /// Diagonal sign scramble, entries +-1.
    pub fn signs(&self) -> &[f64] {
        &self.signs
    }

    /// Selected Hadamard row indices, in measurement order. Always distinct.
    pub fn selected_rows(&self) -> &[usize] {
        &self.selected_rows
    }
}

impl LinearOperator for SensingOperator {
    fn rows(&self) -> usize {
        self.spec.m
    }

    fn cols(&self) -> usize {
        self.spec.n
    }

    fn forward(&self, x: &[f64]) -> Vec<f64> {
        debug_assert_eq!(x.len(), self.spec.n);
        let mut buf: Vec<f64> = x.iter().zip(&self.signs).map(|(v, s)| v * s).collect();
        fwht_inplace(&mut buf).expect("spec guarantees power-of-two length");
        self.selected_rows.iter().map(|&r| buf[r]).collect()
    }

    fn adjoint(&self, y: &[f64]) -> Vec<f64> {
        debug_assert_eq!(y.len(), self.spec.m);
        let mut buf = vec![0.0; self.spec.n];
        for (value, &row) in y.iter().zip(&self.selected_rows) {
            buf[row] = *value;
        }
        fwht_inplace(&mut buf).expect("spec guarantees power-of-two length");
        for (v, s) in buf.iter_mut().zip(&self.signs) {
            *v *= s;
        }
        buf
    }
}

/// Constructs the sensing operator for `spec`. See [`SensingOperator::new`].
pub fn make_sensing_operator(spec: &SensingSpec) -> SensingOperator {
    SensingOperator::new(spec)
}
