//! Orthonormal two-dimensional discrete cosine transform.

use super::LinearOperator;
use crate::imageio::GrayImage;
use crate::signal::SignalVector;
use crate::{Error, Result};

/// Precomputed 1-D orthonormal DCT-II basis for one transform length.
/// `coeffs[k * n + j] = c_k * cos(pi * (2j + 1) * k / (2n))` with
/// `c_0 = sqrt(1/n)` and `c_k = sqrt(2/n)` otherwise. The matrix is
/// orthogonal, so the inverse (DCT-III) is its transpose.
#[derive(Debug, Clone)]
struct DctTable {
    n: usize,
    coeffs: Vec<f64>,
}

impl DctTable {
    fn new(n: usize) -> Self {
        let mut coeffs = vec![0.0; n * n];
        let scale0 = (1.0 / n as f64).sqrt();
        let scale = (2.0 / n as f64).sqrt();
        for k in 0..n {
            let c = if k == 0 { scale0 } else { scale };
            for j in 0..n {
                let angle = std::f64::consts::PI * (2 * j + 1) as f64 * k as f64
                    / (2 * n) as f64;
                coeffs[k * n + j] = c * angle.cos();
            }
        }
        DctTable { n, coeffs }
    }

    fn forward(&self, input: &[f64], output: &mut [f64]) {
        for k in 0..self.n {
            let row = &self.coeffs[k * self.n..(k + 1) * self.n];
            output[k] = row.iter().zip(input).map(|(a, b)| a * b).sum();
        }
    }

    fn inverse(&self, input: &[f64], output: &mut [f64]) {
        output[..self.n].fill(0.0);
        for k in 0..self.n {
            let row = &self.coeffs[k * self.n..(k + 1) * self.n];
            let v = input[k];
            if v != 0.0 {
                for (out, c) in output.iter_mut().zip(row) {
                    *out += v * c;
                }
            }
        }
    }
}

fn check_geometry(len: usize, width: usize, height: usize) -> Result<()> {
    if width == 0 || height == 0 || width * height != len {
        return Err(Error::InvalidDimension(format!(
            "geometry {width}x{height} does not match {len} samples"
        )));
    }
    Ok(())
}

/// Separable 2-D transform over row-major samples: 1-D passes along every
/// row, then along every column.
fn apply_separable(
    values: &[f64],
    width: usize,
    height: usize,
    row_table: &DctTable,
    col_table: &DctTable,
    inverse: bool,
) -> Vec<f64> {
    let mut out = vec![0.0; values.len()];
    let mut row_buf = vec![0.0; width];
    for r in 0..height {
        let row = &values[r * width..(r + 1) * width];
        if inverse {
            row_table.inverse(row, &mut row_buf);
        } else {
            row_table.forward(row, &mut row_buf);
        }
        out[r * width..(r + 1) * width].copy_from_slice(&row_buf);
    }
    let mut col_in = vec![0.0; height];
    let mut col_out = vec![0.0; height];
    for c in 0..width {
        for r in 0..height {
            col_in[r] = out[r * width + c];
        }
        if inverse {
            col_table.inverse(&col_in, &mut col_out);
        } else {
            col_table.forward(&col_in, &mut col_out);
        }
        for r in 0..height {
            out[r * width + c] = col_out[r];
        }
    }
    out
}

/// Orthonormal 2-D DCT as a square linear operator on flattened row-major
/// images. Being orthonormal, the adjoint equals the inverse transform.
#[derive(Debug, Clone)]
pub struct Dct2Operator {
    width: usize,
    height: usize,
    row_table: DctTable,
    col_table: DctTable,
}

impl Dct2Operator {
    pub fn new(width: usize, height: usize) -> Result<Self> {
        if width == 0 || height == 0 {
            return Err(Error::InvalidDimension(format!(
                "image geometry must be positive, got {width}x{height}"
            )));
        }
        Ok(Dct2Operator {
            width,
            height,
            row_table: DctTable::new(width),
            col_table: DctTable::new(height),
        })
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    /// DCT-II coefficients of row-major samples.
    pub fn forward_values(&self, values: &[f64]) -> Result<Vec<f64>> {
        check_geometry(values.len(), self.width, self.height)?;
        Ok(apply_separable(
            values,
            self.width,
            self.height,
            &self.row_table,
            &self.col_table,
            false,
        ))
    }

    /// DCT-III (inverse) of a coefficient array.
    pub fn inverse_values(&self, coeffs: &[f64]) -> Result<Vec<f64>> {
        check_geometry(coeffs.len(), self.width, self.height)?;
        Ok(apply_separable(
            coeffs,
            self.width,
            self.height,
            &self.row_table,
            &self.col_table,
            true,
        ))
    }
}

impl LinearOperator for Dct2Operator {
    fn rows(&self) -> usize {
        self.width * self.height
    }

    fn cols(&self) -> usize {
        self.width * self.height
    }

    fn forward(&self, x: &[f64]) -> Vec<f64> {
        self.forward_values(x).expect("operator geometry is fixed")
    }

    fn adjoint(&self, y: &[f64]) -> Vec<f64> {
        self.inverse_values(y).expect("operator geometry is fixed")
    }
}

/// DCT-II coefficients of an image, flattened row-major.
pub fn dct2_forward(image: &GrayImage) -> Result<SignalVector> {
    let op = Dct2Operator::new(image.width(), image.height())?;
    SignalVector::new(op.forward_values(image.pixels())?)
}

/// Image reconstructed from DCT coefficients. Roundoff can push intensities
/// marginally outside [0, 1]; values are clamped back into range so the
/// result is a valid image. Pipelines that need the raw inverse use
/// [`Dct2Operator::inverse_values`].
pub fn dct2_inverse(coeffs: &[f64], width: usize, height: usize) -> Result<GrayImage> {
    let op = Dct2Operator::new(width, height)?;
    let values = op.inverse_values(coeffs)?;
    GrayImage::new(
        width,
        height,
        values.into_iter().map(|v| v.clamp(0.0, 1.0)).collect(),
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::operators::adjoint_defect;
    use crate::rng::SplitMix64;

    #[test]
    fn constant_image_concentrates_in_dc() {
        let c = 0.3;
        let img = GrayImage::new(8, 8, vec![c; 64]).unwrap();
        let coeffs = dct2_forward(&img).unwrap();
        assert!((coeffs[0] - 8.0 * c).abs() < 1e-12);
        for v in &coeffs[1..] {
            assert!(v.abs() < 1e-12);
        }
    }

    #[test]
    fn round_trip_reproduces_image() {
        let mut rng = SplitMix64::new(8);
        let pixels: Vec<f64> = (0..12 * 20).map(|_| rng.next_f64()).collect();
        let img = GrayImage::new(12, 20, pixels.clone()).unwrap();
        let coeffs = dct2_forward(&img).unwrap();
        let back = dct2_inverse(&coeffs, 12, 20).unwrap();
        for (a, b) in back.pixels().iter().zip(&pixels) {
            assert!((a - b).abs() < 1e-10);
        }
    }

    #[test]
    fn operator_is_orthonormal() {
        let op = Dct2Operator::new(4, 4).unwrap();
        assert!(adjoint_defect(&op, 20, 17) < 1e-12);
        let mut rng = SplitMix64::new(6);
        let x: Vec<f64> = (0..16).map(|_| rng.next_gaussian()).collect();
        let back = op.adjoint(&op.forward(&x));
        for (a, b) in back.iter().zip(&x) {
            assert!((a - b).abs() < 1e-12);
        }
    }

    #[test]
    fn rejects_mismatched_geometry() {
        let op = Dct2Operator::new(4, 4).unwrap();
        assert!(op.forward_values(&[0.0; 15]).is_err());
        assert!(Dct2Operator::new(0, 4).is_err());
    }
}
