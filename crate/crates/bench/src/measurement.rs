//! Serialized measurement sets: the values of one acquisition together with
//! the full provenance needed to replay it bit for bit.

use csrec::imageio::{pad_to_pow2, GrayImage, PadRecord};
use csrec::metrics::{add_awgn, NoiseSpec};
use csrec::operators::{make_sensing_operator, Dct2Operator, LinearOperator, SensingSpec};
use csrec::SignalVector;

use crate::scenario::Sparsifier;
use crate::{HarnessError, Result};

const MAGIC: [u8; 4] = *b"CSMS";
const FORMAT_VERSION: u32 = 1;

/// One acquisition: measurement values plus the sensing draw, optional noise
/// draw, padding geometry, and sparsifier flag that produced them. Replaying
/// the recorded pipeline on the source image reproduces `values` exactly.
#[derive(Debug, Clone, PartialEq)]
pub struct MeasurementSet {
    pub values: Vec<f64>,
    pub spec: SensingSpec,
    pub noise: Option<NoiseSpec>,
    pub pad: PadRecord,
    pub sparsifier: Sparsifier,
}

fn push_u64(buf: &mut Vec<u8>, v: u64) {
    buf.extend_from_slice(&v.to_le_bytes());
}

fn push_f64(buf: &mut Vec<u8>, v: f64) {
    buf.extend_from_slice(&v.to_le_bytes());
}

struct Reader<'a> {
    bytes: &'a [u8],
    at: usize,
}

impl<'a> Reader<'a> {
    fn take(&mut self, len: usize) -> Result<&'a [u8]> {
        let end = self.at.checked_add(len).filter(|&e| e <= self.bytes.len());
        match end {
            Some(end) => {
                let slice = &self.bytes[self.at..end];
                self.at = end;
                Ok(slice)
            }
            None => Err(HarnessError::Io(format!(
                "measurement file truncated at byte {}",
                self.at
            ))),
        }
    }

    fn u8(&mut self) -> Result<u8> {
        Ok(self.take(1)?[0])
    }

    fn u32(&mut self) -> Result<u32> {
        Ok(u32::from_le_bytes(self.take(4)?.try_into().unwrap()))
    }

    fn u64(&mut self) -> Result<u64> {
        Ok(u64::from_le_bytes(self.take(8)?.try_into().unwrap()))
    }

    fn f64(&mut self) -> Result<f64> {
        Ok(f64::from_le_bytes(self.take(8)?.try_into().unwrap()))
    }
}

impl MeasurementSet {
    /// Little-endian binary encoding: magic, format version, sensing spec,
    /// padding geometry, sparsifier flag, optional noise spec, then the
    /// measurement values.
    pub fn to_bytes(&self) -> Vec<u8> {
        let mut buf = Vec::with_capacity(80 + 8 * self.values.len());
        buf.extend_from_slice(&MAGIC);
        buf.extend_from_slice(&FORMAT_VERSION.to_le_bytes());
        push_u64(&mut buf, self.spec.n as u64);
        push_u64(&mut buf, self.spec.m as u64);
        push_u64(&mut buf, self.spec.scramble_seed);
        push_u64(&mut buf, self.spec.row_seed);
        push_u64(&mut buf, self.pad.original_width as u64);
        push_u64(&mut buf, self.pad.original_height as u64);
        push_u64(&mut buf, self.pad.padded_width as u64);
        push_u64(&mut buf, self.pad.padded_height as u64);
        buf.push(match self.sparsifier {
            Sparsifier::None => 0,
            Sparsifier::Dct => 1,
        });
        match &self.noise {
            None => buf.push(0),
            Some(noise) => {
                buf.push(1);
                push_f64(&mut buf, noise.snr_db);
                push_u64(&mut buf, noise.seed);
            }
        }
        push_u64(&mut buf, self.values.len() as u64);
        for &v in &self.values {
            push_f64(&mut buf, v);
        }
        buf
    }

    pub fn from_bytes(bytes: &[u8]) -> Result<MeasurementSet> {
        let mut r = Reader { bytes, at: 0 };
        if r.take(4)? != MAGIC {
            return Err(HarnessError::Io(
                "not a measurement file (bad magic)".into(),
            ));
        }
        let version = r.u32()?;
        if version != FORMAT_VERSION {
            return Err(HarnessError::Io(format!(
                "unsupported measurement format version {version}; this build reads {FORMAT_VERSION}"
            )));
        }
        let n = r.u64()? as usize;
        let m = r.u64()? as usize;
        let scramble_seed = r.u64()?;
        let row_seed = r.u64()?;
        let spec = SensingSpec::new(n, m, scramble_seed, row_seed)
            .map_err(|e| HarnessError::Io(format!("measurement file: {e}")))?;
        let pad = PadRecord {
            original_width: r.u64()? as usize,
            original_height: r.u64()? as usize,
            padded_width: r.u64()? as usize,
            padded_height: r.u64()? as usize,
        };
        if pad.padded_width * pad.padded_height != n
            || pad.padded_width < pad.original_width
            || pad.padded_height < pad.original_height
        {
            return Err(HarnessError::Io(format!(
                "measurement file: padding geometry {}x{} -> {}x{} does not match n = {n}",
                pad.original_width, pad.original_height, pad.padded_width, pad.padded_height
            )));
        }
        let sparsifier = match r.u8()? {
            0 => Sparsifier::None,
            1 => Sparsifier::Dct,
            other => {
                return Err(HarnessError::Io(format!(
                    "measurement file: unknown sparsifier tag {other}"
                )))
            }
        };
        let noise = match r.u8()? {
            0 => None,
            1 => {
                let snr_db = r.f64()?;
                let seed = r.u64()?;
                Some(
                    NoiseSpec::new(snr_db, seed)
                        .map_err(|e| HarnessError::Io(format!("measurement file: {e}")))?,
                )
            }
            other => {
                return Err(HarnessError::Io(format!(
                    "measurement file: unknown noise tag {other}"
                )))
            }
        };
        let count = r.u64()? as usize;
        if count != m {
            return Err(HarnessError::Io(format!(
                "measurement file: value count {count} does not match m = {m}"
            )));
        }
        let mut values = Vec::with_capacity(count);
        for _ in 0..count {
            values.push(r.f64()?);
        }
        if r.at != bytes.len() {
            return Err(HarnessError::Io(format!(
                "measurement file: {} trailing bytes",
                bytes.len() - r.at
            )));
        }
        Ok(MeasurementSet {
            values,
            spec,
            noise,
            pad,
            sparsifier,
        })
    }

    /// Re-runs the recorded pipeline on `image` and returns the measurement
    /// values it produces. For a faithful source image the result equals
    /// `self.values` bit for bit; noise replays identically because the
    /// noise seed is part of the record.
    pub fn replay(&self, image: &GrayImage) -> Result<Vec<f64>> {
        if image.width() != self.pad.original_width || image.height() != self.pad.original_height {
            return Err(HarnessError::Config(format!(
                "image is {}x{} but the measurement set records {}x{}",
                image.width(),
                image.height(),
                self.pad.original_width,
                self.pad.original_height
            )));
        }
        let (padded, _record) = pad_to_pow2(image);
        let target: Vec<f64> = match self.sparsifier {
            Sparsifier::None => padded.pixels().to_vec(),
            Sparsifier::Dct => Dct2Operator::new(padded.width(), padded.height())
                .map_err(HarnessError::from)?
                .forward(padded.pixels()),
        };
        let op = make_sensing_operator(&self.spec);
        let clean = op.forward(&target);
        match &self.noise {
            None => Ok(clean),
            Some(noise) => {
                let vec = SignalVector::new(clean).map_err(HarnessError::from)?;
                Ok(add_awgn(&vec, noise).map_err(HarnessError::from)?.into_vec())
            }
        }
    }
}
