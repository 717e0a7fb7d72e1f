//! Grayscale images: binary PGM codec, power-of-two padding, phantoms.

use crate::rng::{sample_distinct, SplitMix64};
use crate::{Error, Result};

/// Row-major grayscale image with intensities in [0, 1].
#[derive(Debug, Clone, PartialEq)]
pub struct GrayImage {
    width: usize,
    height: usize,
    pixels: Vec<f64>,
}

impl GrayImage {
    pub fn new(width: usize, height: usize, pixels: Vec<f64>) -> Result<Self> {
        if width == 0 || height == 0 {
            return Err(Error::InvalidDimension(format!(
                "image geometry must be positive, got {width}x{height}"
            )));
        }
        if pixels.len() != width * height {
            return Err(Error::InvalidDimension(format!(
                "expected {} pixels for {width}x{height}, got {}",
                width * height,
                pixels.len()
            )));
        }
        if let Some(i) = pixels.iter().position(|v| !(0.0..=1.0).contains(v)) {
            return Err(Error::InvalidArgument(format!(
                "intensity {} at index {i} outside [0, 1]",
                pixels[i]
            )));
        }
        Ok(GrayImage {
            width,
            height,
            pixels,
        })
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn pixels(&self) -> &[f64] {
        &self.pixels
    }

    pub fn into_pixels(self) -> Vec<f64> {
        self.pixels
    }

    pub fn get(&self, row: usize, col: usize) -> f64 {
        self.pixels[row * self.width + col]
    }
}

/// Geometry bookkeeping for padding a raw image up to power-of-two sides.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct PadRecord {
    pub original_width: usize,
    pub original_height: usize,
    pub padded_width: usize,
    pub padded_height: usize,
}

/// Zero-pads an image so each side becomes the next power of two (sides that
/// already are powers of two are kept). Padding is appended on the right and
/// bottom.
pub fn pad_to_pow2(image: &GrayImage) -> (GrayImage, PadRecord) {
    let pw = image.width.next_power_of_two();
    let ph = image.height.next_power_of_two();
    let record = PadRecord {
        original_width: image.width,
        original_height: image.height,
        padded_width: pw,
        padded_height: ph,
    };
    if pw == image.width && ph == image.height {
        return (image.clone(), record);
    }
    let mut pixels = vec![0.0; pw * ph];
    for r in 0..image.height {
        let src = &image.pixels[r * image.width..(r + 1) * image.width];
        pixels[r * pw..r * pw + image.width].copy_from_slice(src);
    }
    let padded = GrayImage {
        width: pw,
        height: ph,
        pixels,
    };
    (padded, record)
}

/// Exact inverse of [`pad_to_pow2`]: cuts the original-geometry region back
/// out of a padded image.
pub fn crop(image: &GrayImage, record: &PadRecord) -> Result<GrayImage> {
    if image.width != record.padded_width || image.height != record.padded_height {
        return Err(Error::InvalidDimension(format!(
            "image is {}x{} but pad record says {}x{}",
            image.width, image.height, record.padded_width, record.padded_height
        )));
    }
    if record.original_width > record.padded_width
        || record.original_height > record.padded_height
        || record.original_width == 0
        || record.original_height == 0
    {
        return Err(Error::InvalidDimension(format!(
            "inconsistent pad record: {}x{} inside {}x{}",
            record.original_width,
            record.original_height,
            record.padded_width,
            record.padded_height
        )));
    }
    let mut pixels = Vec::with_capacity(record.original_width * record.original_height);
    for r in 0..record.original_height {
        let base = r * image.width;
        pixels.extend_from_slice(&image.pixels[base..base + record.original_width]);
    }
    Ok(GrayImage {
        width: record.original_width,
        height: record.original_height,
        pixels,
    })
}

/// Crops raw row-major samples with the same geometry rules as [`crop`],
/// without the [0, 1] intensity requirement. Reconstruction pipelines use
/// this before scoring, where iterates may leave the intensity range.
pub fn crop_values(values: &[f64], record: &PadRecord) -> Result<Vec<f64>> {
    if values.len() != record.padded_width * record.padded_height {
        return Err(Error::InvalidDimension(format!(
            "expected {} padded samples, got {}",
            record.padded_width * record.padded_height,
            values.len()
        )));
    }
    let mut out = Vec::with_capacity(record.original_width * record.original_height);
    for r in 0..record.original_height {
        let base = r * record.padded_width;
        out.extend_from_slice(&values[base..base + record.original_width]);
    }
    Ok(out)
}

const PGM_MAGIC: [u8; 2] = *b"P5";

struct HeaderCursor<'a> {
    bytes: &'a [u8],
    pos: usize,
}

impl<'a> HeaderCursor<'a> {
    fn parse_error(&self, message: impl Into<String>) -> Error {
        Error::Parse {
            offset: self.pos,
            message: message.into(),
        }
    }

    /// Skips whitespace and `#` comment lines between header tokens.
    fn skip_separators(&mut self) -> Result<()> {
        loop {
            match self.bytes.get(self.pos) {
                Some(b) if b.is_ascii_whitespace() => self.pos += 1,
                Some(b'#') => {
                    while let Some(&b) = self.bytes.get(self.pos) {
                        self.pos += 1;
                        if b == b'\n' {
                            break;
                        }
                    }
                }
                Some(_) => return Ok(()),
                None => return Err(self.parse_error("unexpected end of header")),
            }
        }
    }

    fn read_number(&mut self, what: &str) -> Result<u64> {
        self.skip_separators()?;
        let start = self.pos;
        let mut value: u64 = 0;
        while let Some(&b) = self.bytes.get(self.pos) {
            if b.is_ascii_digit() {
                value = value
                    .checked_mul(10)
                    .and_then(|v| v.checked_add((b - b'0') as u64))
                    .ok_or_else(|| self.parse_error(format!("{what} overflows")))?;
                self.pos += 1;
            } else {
                break;
            }
        }
        if self.pos == start {
            return Err(self.parse_error(format!("expected {what}")));
        }
        Ok(value)
    }
}

/// Decodes a binary (P5) PGM file. Returns the image and the file's maxval
/// (255 or 65535; 16-bit samples are big-endian per the format). Intensities
/// are mapped to sample / maxval.
///
/// Errors carry the byte offset where parsing stopped. Only binary PGM is
/// accepted; other netpbm magics are named in the error to aid diagnosis.
pub fn read_pgm(bytes: &[u8]) -> Result<(GrayImage, u16)> {
    let mut cur = HeaderCursor { bytes, pos: 0 };
    if bytes.len() < 2 {
        return Err(cur.parse_error("file too short for a PGM magic"));
    }
    if bytes[..2] != PGM_MAGIC {
        let magic = String::from_utf8_lossy(&bytes[..2]);
        return Err(cur.parse_error(format!(
            "unsupported magic {magic:?}; only binary PGM (P5) is supported"
        )));
    }
    cur.pos = 2;
    let width = cur.read_number("width")? as usize;
    let height = cur.read_number("height")? as usize;
    let maxval = cur.read_number("maxval")?;
    if width == 0 || height == 0 {
        return Err(cur.parse_error(format!("degenerate geometry {width}x{height}")));
    }
    if maxval != 255 && maxval != 65535 {
        return Err(cur.parse_error(format!("unsupported maxval {maxval}")));
    }
    match bytes.get(cur.pos) {
        Some(b) if b.is_ascii_whitespace() => cur.pos += 1,
        _ => return Err(cur.parse_error("expected single whitespace before samples")),
    }
    let count = width
        .checked_mul(height)
        .ok_or_else(|| cur.parse_error("pixel count overflows"))?;
    let bytes_per_sample = if maxval == 255 { 1 } else { 2 };
    let need = count
        .checked_mul(bytes_per_sample)
        .ok_or_else(|| cur.parse_error("sample payload overflows"))?;
    let payload = bytes
        .get(cur.pos..cur.pos + need)
        .ok_or_else(|| cur.parse_error(format!(
            "truncated payload: need {need} sample bytes, have {}",
            bytes.len().saturating_sub(cur.pos)
        )))?;
    let scale = 1.0 / maxval as f64;
    let pixels: Vec<f64> = if maxval == 255 {
        payload.iter().map(|&b| b as f64 * scale).collect()
    } else {
        payload
            .chunks_exact(2)
            .map(|pair| u16::from_be_bytes([pair[0], pair[1]]) as f64 * scale)
            .collect()
    };
    let image = GrayImage::new(width, height, pixels)?;
    Ok((image, maxval as u16))
}

/// Encodes an image as binary (P5) PGM at the given maxval (255 or 65535).
/// Intensities quantise to round(v * maxval); reading the result back
/// reproduces the samples exactly.
pub fn write_pgm(image: &GrayImage, maxval: u16) -> Result<Vec<u8>> {
    if maxval != 255 && maxval != 65535 {
        return Err(Error::InvalidArgument(format!(
            "maxval must be 255 or 65535, got {maxval}"
        )));
    }
    let mut out = Vec::with_capacity(32 + image.pixels.len() * 2);
    out.extend_from_slice(format!("P5\n{} {}\n{}\n", image.width, image.height, maxval).as_bytes());
    if maxval == 255 {
        for &v in &image.pixels {
            out.push((v * 255.0).round() as u8);
        }
    } else {
        for &v in &image.pixels {
            let s = (v * 65535.0).round() as u16;
            out.extend_from_slice(&s.to_be_bytes());
        }
    }
    Ok(out)
}

/// Synthetic test image families.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PhantomKind {
    /// Two concentric axis-aligned rectangles on a black background:
    /// intensity 0.5 on [size/4, 3*size/4) squared, raised to 1.0 on
    /// [3*size/8, 5*size/8) squared. Piecewise constant, so its gradient is
    /// sparse; for size >= 8 the anisotropic total variation is exactly
    /// 1.5 * size (outer boundary contributes 4 * (size/2) * 0.5, inner
    /// 4 * (size/4) * 0.5).
    NestedRectangles,
    /// Horizontal ramp col / (size - 1): smooth, with low-entropy DCT
    /// spectrum concentrated in the first row of coefficients.
    GradientRamp,
    /// min(20, size^2 / 2) spike pixels at seeded distinct positions with
    /// seeded intensities in [0.5, 1.0]; all other pixels are zero.
    RandomSparseSpikes,
}

/// Deterministic square phantom of the requested kind. `size` must be a
/// power of two. The seed only influences `RandomSparseSpikes`; the other
/// kinds are fully determined by their geometry.
pub fn phantom(kind: PhantomKind, size: usize, seed: u64) -> Result<GrayImage> {
    if size == 0 || !size.is_power_of_two() {
        return Err(Error::InvalidDimension(format!(
            "phantom size must be a power of two, got {size}"
        )));
    }
    let n = size * size;
    let pixels = match kind {
        PhantomKind::NestedRectangles => {
            let outer = size / 4..3 * size / 4;
            let inner = 3 * size / 8..5 * size / 8;
            let mut pixels = vec![0.0; n];
            for r in 0..size {
                for c in 0..size {
                    if inner.contains(&r) && inner.contains(&c) {
                        pixels[r * size + c] = 1.0;
                    } else if outer.contains(&r) && outer.contains(&c) {
                        pixels[r * size + c] = 0.5;
                    }
                }
            }
            pixels
        }
        PhantomKind::GradientRamp => {
            let denom = (size - 1).max(1) as f64;
            (0..n).map(|i| (i % size) as f64 / denom).collect()
        }
        PhantomKind::RandomSparseSpikes => {
            let spikes = 20.min(n / 2);
            let mut rng = SplitMix64::new(seed);
            let positions = sample_distinct(n, spikes, &mut rng);
            let mut pixels = vec![0.0; n];
            for pos in positions {
                pixels[pos] = 0.5 + 0.5 * rng.next_f64();
            }
            pixels
        }
    };
    GrayImage::new(size, size, pixels)
}
