//! Measurement and transform operators.
//!
//! Operators are matrix-free: a [`LinearOperator`] exposes only its shape and
//! the actions `x -> Ax` and `y -> A^T y`. Dense materialisation, when a
//! diagnostic needs it, is done by applying the operator to basis vectors.

mod dct;
mod fwht;
pub(crate) mod gradient;
mod sensing;

pub use dct::{dct2_forward, dct2_inverse, Dct2Operator};
pub use fwht::fwht_inplace;
pub use gradient::{
    div, grad, grad_values, total_variation, GradientField, GradientOperator, TvMode,
};
pub use sensing::{make_sensing_operator, SensingOperator, SensingSpec};

use crate::rng::SplitMix64;
use crate::signal::{dot, norm2};
use crate::{Error, Result};

/// Real linear map between flat signal spaces.
///
/// Implementations must keep `forward` and `adjoint` consistent: for all x, y,
/// `<forward(x), y> = <x, adjoint(y)>` up to roundoff. [`adjoint_defect`]
/// measures exactly that and the test suites hold every operator to it.
pub trait LinearOperator {
    /// Output dimension of `forward`.
    fn rows(&self) -> usize;

    /// Input dimension of `forward`.
    fn cols(&self) -> usize;

    /// `A x`. `x.len()` must equal `cols()`.
    fn forward(&self, x: &[f64]) -> Vec<f64>;

    /// `A^T y`. `y.len()` must equal `rows()`.
    fn adjoint(&self, y: &[f64]) -> Vec<f64>;
}

impl<T: LinearOperator + ?Sized> LinearOperator for &T {
    fn rows(&self) -> usize {
        (**self).rows()
    }

    fn cols(&self) -> usize {
        (**self).cols()
    }

    fn forward(&self, x: &[f64]) -> Vec<f64> {
        (**self).forward(x)
    }

    fn adjoint(&self, y: &[f64]) -> Vec<f64> {
        (**self).adjoint(y)
    }
}

impl<T: LinearOperator + ?Sized> LinearOperator for Box<T> {
    fn rows(&self) -> usize {
        (**self).rows()
    }

    fn cols(&self) -> usize {
        (**self).cols()
    }

    fn forward(&self, x: &[f64]) -> Vec<f64> {
        (**self).forward(x)
    }

    fn adjoint(&self, y: &[f64]) -> Vec<f64> {
        (**self).adjoint(y)
    }
}

/// Identity map on `n`-dimensional signals.
#[derive(Debug, Clone)]
pub struct IdentityOperator {
    n: usize,
}

impl IdentityOperator {
    pub fn new(n: usize) -> Self {
        IdentityOperator { n }
    }
}

impl LinearOperator for IdentityOperator {
    fn rows(&self) -> usize {
        self.n
    }

    fn cols(&self) -> usize {
        self.n
    }

    fn forward(&self, x: &[f64]) -> Vec<f64> {
        debug_assert_eq!(x.len(), self.n);
        x.to_vec()
    }

    fn adjoint(&self, y: &[f64]) -> Vec<f64> {
        debug_assert_eq!(y.len(), self.n);
        y.to_vec()
    }
}

/// Composition `a . b`: forward applies `b` first, then `a`.
#[derive(Debug, Clone)]
pub struct ComposedOperator<A, B> {
    outer: A,
    inner: B,
}

impl<A: LinearOperator, B: LinearOperator> LinearOperator for ComposedOperator<A, B> {
    fn rows(&self) -> usize {
        self.outer.rows()
    }

    fn cols(&self) -> usize {
        self.inner.cols()
    }

    fn forward(&self, x: &[f64]) -> Vec<f64> {
        self.outer.forward(&self.inner.forward(x))
    }

    fn adjoint(&self, y: &[f64]) -> Vec<f64> {
        self.inner.adjoint(&self.outer.adjoint(y))
    }
}

/// Composes two operators, checking the shared dimension.
pub fn compose<A: LinearOperator, B: LinearOperator>(
    outer: A,
    inner: B,
) -> Result<ComposedOperator<A, B>> {
    if outer.cols() != inner.rows() {
        return Err(Error::InvalidDimension(format!(
            "cannot compose {}x{} with {}x{}",
            outer.rows(),
            outer.cols(),
            inner.rows(),
            inner.cols()
        )));
    }
    Ok(ComposedOperator { outer, inner })
}

/// Worst relative adjoint mismatch |<Ax,y> - <x,A^T y>| / (||x|| ||y||) over
/// `pairs` seeded Gaussian probe pairs.
pub fn adjoint_defect<A: LinearOperator>(op: &A, pairs: usize, seed: u64) -> f64 {
    let mut rng = SplitMix64::new(seed);
    let mut worst = 0.0f64;
    for _ in 0..pairs {
        let x: Vec<f64> = (0..op.cols()).map(|_| rng.next_gaussian()).collect();
        let y: Vec<f64> = (0..op.rows()).map(|_| rng.next_gaussian()).collect();
        let lhs = dot(&op.forward(&x), &y);
        let rhs = dot(&x, &op.adjoint(&y));
        let scale = (norm2(&x) * norm2(&y)).max(1e-300);
        worst = worst.max((lhs - rhs).abs() / scale);
    }
    worst
}

/// Worst relative deviation of `A A^T` from the identity over `probes` seeded
/// Gaussian probes: max ||A A^T v - v|| / ||v||. Solvers that project onto a
/// measurement-residual ball require this to be at roundoff level.
pub fn row_orthonormality_defect<A: LinearOperator>(op: &A, probes: usize, seed: u64) -> f64 {
    let mut rng = SplitMix64::new(seed);
    let mut worst = 0.0f64;
    for _ in 0..probes {
        let v: Vec<f64> = (0..op.rows()).map(|_| rng.next_gaussian()).collect();
        let av = op.forward(&op.adjoint(&v));
        let mut diff_sq = 0.0;
        for (a, b) in av.iter().zip(&v) {
            diff_sq += (a - b) * (a - b);
        }
        worst = worst.max(diff_sq.sqrt() / norm2(&v).max(1e-300));
    }
    worst
}

/// Dense matrix of `op`, row-major, built column by column from basis vectors.
/// Intended for small-dimension diagnostics and oracle tests.
pub fn materialize<A: LinearOperator>(op: &A) -> Vec<Vec<f64>> {
    let mut columns = Vec::with_capacity(op.cols());
    let mut e = vec![0.0; op.cols()];
    for j in 0..op.cols() {
        e[j] = 1.0;
        columns.push(op.forward(&e));
        e[j] = 0.0;
    }
    let mut rows = vec![vec![0.0; op.cols()]; op.rows()];
    for (j, col) in columns.iter().enumerate() {
        for (i, v) in col.iter().enumerate() {
            rows[i][j] = *v;
        }
    }
    rows
}
