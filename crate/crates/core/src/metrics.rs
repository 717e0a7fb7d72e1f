//! Measurement noise, reconstruction quality, and sample-budget diagnostics.

use crate::operators::LinearOperator;
use crate::rng::SplitMix64;
use crate::signal::{norm1, norm2, sub, SignalVector};
use crate::{Error, Result};

/// Additive white Gaussian noise level, expressed as a signal-to-noise ratio
/// in decibels. `snr_db = +inf` is the no-noise sentinel; NaN and -inf are
/// rejected.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NoiseSpec {
    pub snr_db: f64,
    pub seed: u64,
}

impl NoiseSpec {
    pub fn new(snr_db: f64, seed: u64) -> Result<Self> {
        if snr_db.is_nan() || snr_db == f64::NEG_INFINITY {
            return Err(Error::InvalidArgument(format!(
                "snr must be finite or +inf, got {snr_db}"
            )));
        }
        Ok(NoiseSpec { snr_db, seed })
    }

    pub fn noiseless(seed: u64) -> Self {
        NoiseSpec {
            snr_db: f64::INFINITY,
            seed,
        }
    }

    pub fn is_noiseless(&self) -> bool {
        self.snr_db == f64::INFINITY
    }

    /// Per-sample noise standard deviation for a measurement vector:
    /// sigma = rms(y) * 10^(-snr_db / 20).
    pub fn sigma_for(&self, measurements: &[f64]) -> f64 {
        if self.is_noiseless() {
            return 0.0;
        }
        let rms = norm2(measurements) / (measurements.len() as f64).sqrt();
        rms * 10f64.powf(-self.snr_db / 20.0)
    }
}

/// Adds seeded white Gaussian noise scaled to the requested SNR. Deviates
/// come from Box-Muller over SplitMix64, one per sample in order, so a given
/// `(snr_db, seed)` pair perturbs a given vector identically on every run.
///
/// A zero measurement vector has no defined signal power and is rejected.
pub fn add_awgn(measurements: &SignalVector, noise: &NoiseSpec) -> Result<SignalVector> {
    if noise.is_noiseless() {
        return Ok(measurements.clone());
    }
    let y = measurements.as_slice();
    if y.iter().all(|&v| v == 0.0) {
        return Err(Error::DegenerateSignal(
            "cannot scale noise to an all-zero measurement vector".into(),
        ));
    }
    let sigma = noise.sigma_for(y);
    let mut rng = SplitMix64::new(noise.seed);
    let noisy: Vec<f64> = y.iter().map(|v| v + sigma * rng.next_gaussian()).collect();
    SignalVector::new(noisy)
}

/// Reconstruction quality scores against a reference signal.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QualityRecord {
    /// ||x - ref||_1 / ||ref||_1
    pub rel_l1_error: f64,
    /// ||x - ref||_2 / ||ref||_2
    pub rel_l2_error: f64,
    /// 20 log10(peak * sqrt(n) / ||x - ref||_2); +inf for an exact match.
    pub psnr_db: f64,
}

/// Scores a reconstruction against its reference. `peak` is the nominal
/// signal peak (1.0 for intensity images). A zero reference leaves relative
/// errors undefined and is rejected.
pub fn quality(reconstruction: &SignalVector, reference: &SignalVector, peak: f64) -> Result<QualityRecord> {
    if reconstruction.len() != reference.len() {
        return Err(Error::InvalidDimension(format!(
            "length mismatch: reconstruction {} vs reference {}",
            reconstruction.len(),
            reference.len()
        )));
    }
    if !(peak.is_finite() && peak > 0.0) {
        return Err(Error::InvalidArgument(format!("peak must be positive, got {peak}")));
    }
    let ref_l1 = norm1(reference);
    let ref_l2 = norm2(reference);
    if ref_l1 == 0.0 {
        return Err(Error::DegenerateSignal(
            "reference signal is identically zero".into(),
        ));
    }
    let err = sub(reconstruction, reference);
    let err_l2 = norm2(&err);
    let psnr_db = if err_l2 == 0.0 {
        f64::INFINITY
    } else {
        20.0 * (peak * (reference.len() as f64).sqrt() / err_l2).log10()
    };
    Ok(QualityRecord {
        rel_l1_error: norm1(&err) / ref_l1,
        rel_l2_error: err_l2 / ref_l2,
        psnr_db,
    })
}

/// Information-content bounds for a k-sparse support pattern in dimension n.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EntropyBound {
    /// n * H2(k / n) bits, the exact asymptotic support-entropy form.
    pub exact_bits: f64,
    /// k * log2(n / k) bits, the small-k approximation.
    pub approx_bits: f64,
}

/// Bits needed to encode which k of n entries are active. `k = 0` carries no
/// information and returns zero by continuity; `k > n` is rejected.
pub fn entropy_bound(n: usize, k: usize) -> Result<EntropyBound> {
    if n == 0 {
        return Err(Error::InvalidArgument("dimension must be positive".into()));
    }
    if k > n {
        return Err(Error::InvalidArgument(format!(
            "sparsity {k} exceeds dimension {n}"
        )));
    }
    if k == 0 {
        return Ok(EntropyBound {
            exact_bits: 0.0,
            approx_bits: 0.0,
        });
    }
    let p = k as f64 / n as f64;
    let h2 = if k == n {
        0.0
    } else {
        -(p * p.log2() + (1.0 - p) * (1.0 - p).log2())
    };
    Ok(EntropyBound {
        exact_bits: n as f64 * h2,
        approx_bits: k as f64 * (n as f64 / k as f64).log2(),
    })
}

/// Mutual incoherence mu = sqrt(n) * max_ij |<phi_i, psi_j>| between the row
/// sets of two square n x n operators, computed by materialising the Gram
/// matrix one column at a time (phi applied to each row of psi). Dimensions
/// above 4096 are refused: the scan is O(n^2 log n) and meant for
/// diagnostics, not pipelines.
pub fn mutual_incoherence<P, Q>(phi: &P, psi: &Q) -> Result<f64>
where
    P: LinearOperator,
    Q: LinearOperator,
{
    let n = phi.cols();
    if phi.rows() != n || psi.rows() != n || psi.cols() != n {
        return Err(Error::InvalidDimension(format!(
            "incoherence needs square operators of equal dimension, got {}x{} and {}x{}",
            phi.rows(),
            phi.cols(),
            psi.rows(),
            psi.cols()
        )));
    }
    if n > 4096 {
        return Err(Error::InvalidArgument(format!(
            "dense incoherence scan capped at n = 4096, got {n}"
        )));
    }
    let mut basis = vec![0.0; n];
    let mut max_abs = 0.0f64;
    for j in 0..n {
        basis[j] = 1.0;
        // Row j of psi is psi^T e_j; phi applied to it yields the inner
        // products of that row against every row of phi.
        let psi_row = psi.adjoint(&basis);
        let grams = phi.forward(&psi_row);
        for g in grams {
            max_abs = max_abs.max(g.abs());
        }
        basis[j] = 0.0;
    }
    Ok((n as f64).sqrt() * max_abs)
}

/// Minimum measurement budget ceil(mu^2 * k * ln(n / delta)) for recovering
/// a k-sparse signal with failure probability delta under incoherence mu.
pub fn min_measurements(mu: f64, k: usize, n: usize, delta: f64) -> Result<usize> {
    if !(mu.is_finite() && mu > 0.0) {
        return Err(Error::InvalidArgument(format!(
            "incoherence must be positive, got {mu}"
        )));
    }
    if k == 0 || n == 0 {
        return Err(Error::InvalidArgument(
            "sparsity and dimension must be positive".into(),
        ));
    }
    if !(delta > 0.0 && delta < 1.0) {
        return Err(Error::InvalidArgument(format!(
            "failure probability must lie in (0, 1), got {delta}"
        )));
    }
    Ok((mu * mu * k as f64 * (n as f64 / delta).ln()).ceil() as usize)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::operators::{make_sensing_operator, IdentityOperator, SensingSpec};

    #[test]
    fn sigma_matches_hand_computation() {
        // y = [1, 1, 1, 1]: rms 1, so 20 dB SNR means sigma = 0.1.
        let y = [1.0, 1.0, 1.0, 1.0];
        let noise = NoiseSpec::new(20.0, 0).unwrap();
        assert!((noise.sigma_for(&y) - 0.1).abs() < 1e-12);
    }

    #[test]
    fn awgn_is_deterministic_and_scaled() {
        let y = SignalVector::new(vec![1.0; 64]).unwrap();
        let noise = NoiseSpec::new(3.0, 77).unwrap();
        let a = add_awgn(&y, &noise).unwrap();
        let b = add_awgn(&y, &noise).unwrap();
        for (p, q) in a.iter().zip(b.iter()) {
            assert_eq!(p.to_bits(), q.to_bits());
        }
        let other = add_awgn(&y, &NoiseSpec::new(3.0, 78).unwrap()).unwrap();
        assert!(a.iter().zip(other.iter()).any(|(p, q)| p != q));
    }

    #[test]
    fn empirical_snr_tracks_request() {
        // 100k samples: the realised SNR should sit within 0.2 dB.
        let n = 100_000;
        let y = SignalVector::new(vec![1.0; n]).unwrap();
        let noise = NoiseSpec::new(3.0, 5).unwrap();
        let noisy = add_awgn(&y, &noise).unwrap();
        let noise_power: f64 =
            noisy.iter().zip(y.iter()).map(|(a, b)| (a - b) * (a - b)).sum::<f64>() / n as f64;
        let snr_db = 10.0 * (1.0 / noise_power).log10();
        assert!((snr_db - 3.0).abs() < 0.2, "snr {snr_db}");
    }

    #[test]
    fn noiseless_sentinel_passes_through() {
        let y = SignalVector::new(vec![0.3, -2.0]).unwrap();
        let out = add_awgn(&y, &NoiseSpec::noiseless(1)).unwrap();
        assert_eq!(out.as_slice(), y.as_slice());
    }

    #[test]
    fn awgn_rejects_zero_vector_and_bad_snr() {
        let zero = SignalVector::new(vec![0.0; 4]).unwrap();
        assert!(add_awgn(&zero, &NoiseSpec::new(3.0, 0).unwrap()).is_err());
        assert!(NoiseSpec::new(f64::NAN, 0).is_err());
        assert!(NoiseSpec::new(f64::NEG_INFINITY, 0).is_err());
    }

    #[test]
    fn quality_of_exact_match() {
        let x = SignalVector::new(vec![0.5, 0.25, 0.0, 1.0]).unwrap();
        let q = quality(&x, &x, 1.0).unwrap();
        assert_eq!(q.rel_l1_error, 0.0);
        assert_eq!(q.rel_l2_error, 0.0);
        assert_eq!(q.psnr_db, f64::INFINITY);
    }

    #[test]
    fn quality_matches_hand_values() {
        let x = SignalVector::new(vec![1.0, 0.0]).unwrap();
        let r = SignalVector::new(vec![0.0, 1.0]).unwrap();
        let q = quality(&x, &r, 1.0).unwrap();
        assert!((q.rel_l1_error - 2.0).abs() < 1e-12);
        assert!((q.rel_l2_error - 2.0f64.sqrt()).abs() < 1e-12);
        // 20 log10(sqrt(2) / sqrt(2)) = 0
        assert!(q.psnr_db.abs() < 1e-12);
    }

    #[test]
    fn quality_rejects_zero_reference() {
        let x = SignalVector::new(vec![1.0]).unwrap();
        let zero = SignalVector::new(vec![0.0]).unwrap();
        assert!(quality(&x, &zero, 1.0).is_err());
    }

    #[test]
    fn entropy_reference_points() {
        let b = entropy_bound(1024, 32).unwrap();
        assert_eq!(b.approx_bits, 160.0);
        assert!(b.exact_bits > b.approx_bits);
        let uniform = entropy_bound(2, 1).unwrap();
        assert!((uniform.exact_bits - 2.0).abs() < 1e-12);
        let full = entropy_bound(64, 64).unwrap();
        assert_eq!(full.exact_bits, 0.0);
        assert_eq!(full.approx_bits, 0.0);
        let none = entropy_bound(64, 0).unwrap();
        assert_eq!(none.exact_bits, 0.0);
        assert!(entropy_bound(64, 65).is_err());
    }

    #[test]
    fn entropy_forms_agree_within_factor_two_for_sparse_regimes() {
        for n in [64usize, 256, 1024, 4096] {
            for k in [1usize, 2, 4, n / 32, n / 8] {
                let b = entropy_bound(n, k.max(1)).unwrap();
                let ratio = b.exact_bits / b.approx_bits;
                assert!(
                    (1.0..2.0).contains(&ratio),
                    "n {n} k {k}: ratio {ratio}"
                );
            }
        }
    }

    #[test]
    fn incoherence_of_identity_with_hadamard_ensemble() {
        // Full-sampling sensing rows are scrambled Hadamard rows with
        // entries +-1/sqrt(n): maximally incoherent with the identity.
        let spec = SensingSpec::new(64, 64, 5, 6).unwrap();
        let op = make_sensing_operator(&spec);
        let mu = mutual_incoherence(&IdentityOperator::new(64), &op).unwrap();
        assert!((mu - 1.0).abs() < 1e-10, "mu {mu}");
    }

    #[test]
    fn incoherence_is_symmetric_and_maximal_for_identity_pair() {
        let spec = SensingSpec::new(32, 32, 2, 3).unwrap();
        let op = make_sensing_operator(&spec);
        let id = IdentityOperator::new(32);
        let a = mutual_incoherence(&id, &op).unwrap();
        let b = mutual_incoherence(&op, &id).unwrap();
        assert!((a - b).abs() < 1e-12);
        let self_mu = mutual_incoherence(&id, &id).unwrap();
        assert!((self_mu - 32f64.sqrt()).abs() < 1e-12);
    }

    #[test]
    fn incoherence_rejects_rectangular_and_oversized() {
        let spec = SensingSpec::new(64, 32, 0, 0).unwrap();
        let op = make_sensing_operator(&spec);
        assert!(mutual_incoherence(&IdentityOperator::new(64), &op).is_err());
        let big = IdentityOperator::new(8192);
        assert!(mutual_incoherence(&big, &IdentityOperator::new(8192)).is_err());
    }

    #[test]
    fn measurement_budget_reference_point() {
        assert_eq!(min_measurements(1.0, 20, 1024, 0.01).unwrap(), 231);
        assert!(min_measurements(0.0, 20, 1024, 0.01).is_err());
        assert!(min_measurements(1.0, 20, 1024, 1.0).is_err());
        assert!(min_measurements(1.0, 0, 1024, 0.5).is_err());
    }
}
