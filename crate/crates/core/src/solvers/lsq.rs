//! Least squares on an explicit column subset of a matrix-free operator.

use crate::operators::LinearOperator;
use crate::signal::dot;

/// Growable active-set least-squares state: dense copies of the selected
/// operator columns plus an incrementally updated Cholesky factor of their
/// Gram matrix. Adding a column costs one forward operator application and
/// O(k^2) arithmetic; solving costs O(k^2).
pub(crate) struct ActiveSetLs {
    measurement_dim: usize,
    indices: Vec<usize>,
    columns: Vec<Vec<f64>>,
    /// Lower-triangular Cholesky rows of the Gram matrix; row i has i + 1
    /// entries.
    chol: Vec<Vec<f64>>,
    /// A_S^T y, grown alongside the columns.
    rhs: Vec<f64>,
}

/// Relative pivot floor: a new column whose Gram pivot falls below this
/// fraction of its squared norm is treated as dependent on the active set.
const PIVOT_FLOOR: f64 = 1e-12;

impl ActiveSetLs {
    pub(crate) fn new(measurement_dim: usize) -> Self {
        ActiveSetLs {
            measurement_dim,
            indices: Vec::new(),
            columns: Vec::new(),
            chol: Vec::new(),
            rhs: Vec::new(),
        }
    }

    pub(crate) fn len(&self) -> usize {
        self.indices.len()
    }

    pub(crate) fn indices(&self) -> &[usize] {
        &self.indices
    }

    pub(crate) fn contains(&self, index: usize) -> bool {
        self.indices.contains(&index)
    }

    /// Extracts column `index` of the operator as a dense vector.
    pub(crate) fn extract_column<A: LinearOperator>(a: &A, index: usize) -> Vec<f64> {
        let mut basis = vec![0.0; a.cols()];
        basis[index] = 1.0;
        a.forward(&basis)
    }

    /// Adds a column; false if it is numerically dependent on the active
    /// set, in which case the state is unchanged.
    pub(crate) fn try_add(&mut self, index: usize, column: Vec<f64>, y: &[f64]) -> bool {
        debug_assert_eq!(column.len(), self.measurement_dim);
        let k = self.len();
        let mut gram_row = Vec::with_capacity(k + 1);
        for existing in &self.columns {
            gram_row.push(dot(existing, &column));
        }
        let diag = dot(&column, &column);
        // Forward-substitute L l = gram_row for the new Cholesky row.
        let mut l_row = vec![0.0; k + 1];
        for i in 0..k {
            let mut v = gram_row[i];
            for j in 0..i {
                v -= self.chol[i][j] * l_row[j];
            }
            l_row[i] = v / self.chol[i][i];
        }
        let pivot_sq = diag - l_row[..k].iter().map(|v| v * v).sum::<f64>();
        if !(pivot_sq > PIVOT_FLOOR * diag.max(f64::MIN_POSITIVE)) {
            return false;
        }
        l_row[k] = pivot_sq.sqrt();
        self.rhs.push(dot(&column, y));
        self.indices.push(index);
        self.columns.push(column);
        self.chol.push(l_row);
        true
    }

    /// Coefficients minimising ||A_S c - y|| for the current active set.
    pub(crate) fn solve(&self) -> Vec<f64> {
        let k = self.len();
        let mut forward = vec![0.0; k];
        for i in 0..k {
            let mut v = self.rhs[i];
            for j in 0..i {
                v -= self.chol[i][j] * forward[j];
            }
            forward[i] = v / self.chol[i][i];
        }
        let mut coeffs = vec![0.0; k];
        for i in (0..k).rev() {
            let mut v = forward[i];
            for j in i + 1..k {
                v -= self.chol[j][i] * coeffs[j];
            }
            coeffs[i] = v / self.chol[i][i];
        }
        coeffs
    }

    /// y - A_S c for the given coefficients, using the stored columns.
    pub(crate) fn residual(&self, coeffs: &[f64], y: &[f64]) -> Vec<f64> {
        let mut r = y.to_vec();
        for (col, &c) in self.columns.iter().zip(coeffs) {
            if c != 0.0 {
                for (rv, cv) in r.iter_mut().zip(col) {
                    *rv -= c * cv;
                }
            }
        }
        r
    }
}

/// Least-squares refit of `y` on the given support columns of `a`, scattered
/// back to a full-length vector. `None` if the support is empty, larger than
/// the measurement dimension, or numerically dependent.
pub(crate) fn least_squares_on_support<A: LinearOperator>(
    a: &A,
    y: &[f64],
    support: &[usize],
) -> Option<Vec<f64>> {
    if support.is_empty() || support.len() > a.rows() {
        return None;
    }
    let mut ls = ActiveSetLs::new(a.rows());
    for &index in support {
        let column = ActiveSetLs::extract_column(a, index);
        if !ls.try_add(index, column, y) {
            return None;
        }
    }
    let coeffs = ls.solve();
    let mut x = vec![0.0; a.cols()];
    for (&index, &c) in support.iter().zip(&coeffs) {
        x[index] = c;
    }
    Some(x)
}
