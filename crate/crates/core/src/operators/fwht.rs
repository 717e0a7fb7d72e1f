//! Fast Walsh-Hadamard transform.

use crate::{Error, Result};

/// In-place orthonormal Walsh-Hadamard transform in natural (Hadamard)
/// ordering, the Kronecker power of [[1, 1], [1, -1]] / sqrt(2).
///
/// The butterfly passes run unnormalised and a single 1/sqrt(n) sweep at the
/// end restores unit operator norm; no storage beyond the input buffer is
/// used. The normalised transform is symmetric and orthogonal, hence its own
/// inverse and its own adjoint.
///
/// Errors with `InvalidDimension` unless `x.len()` is a power of two.
pub fn fwht_inplace(x: &mut [f64]) -> Result<()> {
    let n = x.len();
    if n == 0 || !n.is_power_of_two() {
        return Err(Error::InvalidDimension(format!(
            "transform length must be a power of two, got {n}"
        )));
    }
    let mut half = 1;
    while half < n {
        let step = half * 2;
        for block in (0..n).step_by(step) {
            for i in block..block + half {
                let a = x[i];
                let b = x[i + half];
                x[i] = a + b;
                x[i + half] = a - b;
            }
        }
        half = step;
    }
    let scale = 1.0 / (n as f64).sqrt();
    for v in x.iter_mut() {
        *v *= scale;
    }
    Ok(())
}
