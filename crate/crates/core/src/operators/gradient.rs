//! Discrete image gradient, divergence, and total variation.

use super::LinearOperator;
use crate::imageio::GrayImage;
use crate::{Error, Result};

/// Which total-variation functional a solver penalises.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TvMode {
    /// Sum of |dx| + |dy| over all pixels.
    Anisotropic,
    /// Sum of sqrt(dx^2 + dy^2) over all pixels.
    Isotropic,
}

/// Forward-difference gradient of a row-major image. `dx` and `dy` share the
/// source geometry; the last column of `dx` and the last row of `dy` are zero
/// (replicate boundary, so the boundary difference vanishes).
#[derive(Debug, Clone, PartialEq)]
pub struct GradientField {
    width: usize,
    height: usize,
    dx: Vec<f64>,
    dy: Vec<f64>,
}

impl GradientField {
    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn dx(&self) -> &[f64] {
        &self.dx
    }

    pub fn dy(&self) -> &[f64] {
        &self.dy
    }

    /// Builds a field from raw component arrays. Entries in the last column
    /// of `dx` or last row of `dy` must be zero.
    pub fn from_components(
        width: usize,
        height: usize,
        dx: Vec<f64>,
        dy: Vec<f64>,
    ) -> Result<Self> {
        if width < 2 || height < 2 {
            return Err(Error::InvalidDimension(format!(
                "gradient geometry must be at least 2x2, got {width}x{height}"
            )));
        }
        if dx.len() != width * height || dy.len() != width * height {
            return Err(Error::InvalidDimension(format!(
                "component length mismatch for {width}x{height} field"
            )));
        }
        for r in 0..height {
            if dx[r * width + width - 1] != 0.0 {
                return Err(Error::InvalidArgument(
                    "dx must vanish on the last column".into(),
                ));
            }
        }
        for c in 0..width {
            if dy[(height - 1) * width + c] != 0.0 {
                return Err(Error::InvalidArgument(
                    "dy must vanish on the last row".into(),
                ));
            }
        }
        Ok(GradientField {
            width,
            height,
            dx,
            dy,
        })
    }
}

fn check_grad_geometry(len: usize, width: usize, height: usize) -> Result<()> {
    if width < 2 || height < 2 {
        return Err(Error::InvalidDimension(format!(
            "gradient needs at least 2 pixels per dimension, got {width}x{height}"
        )));
    }
    if width * height != len {
        return Err(Error::InvalidDimension(format!(
            "geometry {width}x{height} does not match {len} samples"
        )));
    }
    Ok(())
}

/// Forward-difference gradient of raw row-major samples.
pub fn grad_values(values: &[f64], width: usize, height: usize) -> Result<GradientField> {
    check_grad_geometry(values.len(), width, height)?;
    let mut dx = vec![0.0; values.len()];
    let mut dy = vec![0.0; values.len()];
    for r in 0..height {
        let base = r * width;
        for c in 0..width - 1 {
            dx[base + c] = values[base + c + 1] - values[base + c];
        }
    }
    for r in 0..height - 1 {
        let base = r * width;
        for c in 0..width {
            dy[base + c] = values[base + width + c] - values[base + c];
        }
    }
    Ok(GradientField {
        width,
        height,
        dx,
        dy,
    })
}

/// Forward-difference gradient of an image.
pub fn grad(image: &GrayImage) -> Result<GradientField> {
    grad_values(image.pixels(), image.width(), image.height())
}

/// Discrete divergence, the negative adjoint of [`grad`]: for every image `u`
/// and field `p`, `<grad u, p> = -<u, div p>`. Entries of `p` in positions
/// the gradient never writes (last column of `dx`, last row of `dy`) do not
/// contribute. Returns raw row-major samples; divergence values are signed,
/// so the result is not an intensity image.
pub fn div(field: &GradientField) -> Vec<f64> {
    div_components(field.width, field.height, &field.dx, &field.dy)
}

pub(crate) fn div_components(width: usize, height: usize, dx: &[f64], dy: &[f64]) -> Vec<f64> {
    let mut out = vec![0.0; width * height];
    div_components_into(width, height, dx, dy, &mut out);
    out
}

pub(crate) fn div_components_into(
    width: usize,
    height: usize,
    dx: &[f64],
    dy: &[f64],
    out: &mut [f64],
) {
    debug_assert_eq!(out.len(), width * height);
    for r in 0..height {
        let base = r * width;
        for c in 0..width {
            let mut v = 0.0;
            if c < width - 1 {
                v += dx[base + c];
            }
            if c > 0 {
                v -= dx[base + c - 1];
            }
            if r < height - 1 {
                v += dy[base + c];
            }
            if r > 0 {
                v -= dy[base - width + c];
            }
            out[base + c] = v;
        }
    }
}

/// Total variation of raw row-major samples under the given mode.
pub fn total_variation(values: &[f64], width: usize, height: usize, mode: TvMode) -> Result<f64> {
    let field = grad_values(values, width, height)?;
    let tv = match mode {
        TvMode::Anisotropic => field
            .dx
            .iter()
            .chain(field.dy.iter())
            .map(|v| v.abs())
            .sum(),
        TvMode::Isotropic => field
            .dx
            .iter()
            .zip(&field.dy)
            .map(|(x, y)| x.hypot(*y))
            .sum(),
    };
    Ok(tv)
}

/// The gradient as a `2n x n` linear operator on flattened images: forward
/// stacks `[dx; dy]`, adjoint is the negative divergence.
#[derive(Debug, Clone)]
pub struct GradientOperator {
    width: usize,
    height: usize,
}

impl GradientOperator {
    pub fn new(width: usize, height: usize) -> Result<Self> {
        if width < 2 || height < 2 {
            return Err(Error::InvalidDimension(format!(
                "gradient operator needs at least 2x2 geometry, got {width}x{height}"
            )));
        }
        Ok(GradientOperator { width, height })
    }
}

impl LinearOperator for GradientOperator {
    fn rows(&self) -> usize {
        2 * self.width * self.height
    }

    fn cols(&self) -> usize {
        self.width * self.height
    }

    fn forward(&self, x: &[f64]) -> Vec<f64> {
        let field = grad_values(x, self.width, self.height)
            .expect("operator geometry is fixed");
        let mut out = field.dx;
        out.extend_from_slice(&field.dy);
        out
    }

    fn adjoint(&self, y: &[f64]) -> Vec<f64> {
        let n = self.width * self.height;
        debug_assert_eq!(y.len(), 2 * n);
        let mut out = div_components(self.width, self.height, &y[..n], &y[n..]);
        for v in out.iter_mut() {
            *v = -*v;
        }
        out
    }
}
