//! Sweep execution: acquisition, solver dispatch, and the scenario runner.

use std::collections::BTreeMap;
use std::path::Path;
use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::Mutex;
use std::time::Instant;

use csrec::imageio::{crop_values, pad_to_pow2, GrayImage};
use csrec::metrics::{add_awgn, quality, NoiseSpec};
use csrec::operators::{make_sensing_operator, Dct2Operator, LinearOperator, SensingSpec};
use csrec::rng::SplitMix64;
use csrec::solvers::{
    gpsr, nesta, omp, spgl1, tval3, GpsrVariant, NestaMode, ReconstructionReport, SolverConfig,
};
use csrec::SignalVector;

use crate::measurement::MeasurementSet;
use crate::scenario::{ScenarioSpec, SolverKind, Sparsifier};
use crate::{HarnessError, Result};

/// One completed sweep cell. `stop_reason` carries the solver's stop reason,
/// or `error: ...` when the cell failed outright (in which case the quality
/// fields are NaN and `converged` is false).
#[derive(Debug, Clone, PartialEq)]
pub struct ResultRow {
    pub image: String,
    pub solver: SolverKind,
    pub ratio: f64,
    pub snr_db: Option<f64>,
    pub seed: u64,
    pub wall_time_ms: f64,
    pub iterations: usize,
    pub rel_l1_error: f64,
    pub rel_l2_error: f64,
    pub psnr_db: f64,
    pub converged: bool,
    pub stop_reason: String,
}

/// Acquisition output: the recorded measurement set plus the solver-facing
/// quantities derived during the forward pass.
pub struct Acquisition {
    pub measurement: MeasurementSet,
    /// Residual-ball radius sigma * sqrt(m) matching the injected noise;
    /// zero for noiseless acquisitions.
    pub sigma_ball: f64,
    pub padded_width: usize,
    pub padded_height: usize,
}

/// Per-cell sub-seeds. All randomness in a cell flows from its one sweep
/// seed through a single SplitMix64 stream, in a fixed draw order.
fn cell_seeds(seed: u64) -> (u64, u64, u64) {
    let mut stream = SplitMix64::new(seed);
    let scramble_seed = stream.next_u64();
    let row_seed = stream.next_u64();
    let noise_seed = stream.next_u64();
    (scramble_seed, row_seed, noise_seed)
}

/// Measures `image` at the given ratio: pad to power-of-two sides, optionally
/// sparsify with the 2-D DCT, apply the seeded sensing operator with
/// m = round(ratio * n), and optionally add seeded white Gaussian noise.
pub fn acquire(
    image: &GrayImage,
    ratio: f64,
    seed: u64,
    snr_db: Option<f64>,
    sparsifier: Sparsifier,
) -> Result<Acquisition> {
    if !(ratio.is_finite() && ratio > 0.0 && ratio <= 1.0) {
        return Err(HarnessError::Config(format!("ratio {ratio} outside (0, 1]")));
    }
    let (padded, pad) = pad_to_pow2(image);
    let n = padded.width() * padded.height();
    let m = ((ratio * n as f64).round() as usize).clamp(1, n);
    let (scramble_seed, row_seed, noise_seed) = cell_seeds(seed);
    let spec = SensingSpec::new(n, m, scramble_seed, row_seed).map_err(HarnessError::from)?;
    let op = make_sensing_operator(&spec);

    let target: Vec<f64> = match sparsifier {
        Sparsifier::None => padded.pixels().to_vec(),
        Sparsifier::Dct => Dct2Operator::new(padded.width(), padded.height())
            .map_err(HarnessError::from)?
            .forward(padded.pixels()),
    };
    let clean = op.forward(&target);

    let (values, noise, sigma_ball) = match snr_db {
        None => (clean, None, 0.0),
        Some(snr) => {
            let noise = NoiseSpec::new(snr, noise_seed).map_err(HarnessError::from)?;
            let clean_vec = SignalVector::new(clean).map_err(HarnessError::from)?;
            let sigma_ball = noise.sigma_for(&clean_vec) * (m as f64).sqrt();
            let noisy = add_awgn(&clean_vec, &noise).map_err(HarnessError::from)?;
            (noisy.into_vec(), Some(noise), sigma_ball)
        }
    };

    Ok(Acquisition {
        measurement: MeasurementSet {
            values,
            spec,
            noise,
            pad,
            sparsifier,
        },
        sigma_ball,
        padded_width: padded.width(),
        padded_height: padded.height(),
    })
}

/// Runs one solver on one acquisition. `cfg.sigma` is overwritten with the
/// acquisition's residual-ball radius for the noise-aware solvers.
pub fn dispatch_solver(
    solver: SolverKind,
    acq: &Acquisition,
    cfg: &SolverConfig,
) -> csrec::Result<ReconstructionReport> {
    let op = make_sensing_operator(&acq.measurement.spec);
    let y = SignalVector::new(acq.measurement.values.clone())?;
    let mut cfg = cfg.clone();
    if matches!(
        solver,
        SolverKind::Spgl1 | SolverKind::NestaL1 | SolverKind::NestaTv
    ) {
        cfg.sigma = acq.sigma_ball;
    }
    let (w, h) = (acq.padded_width, acq.padded_height);
    match solver {
        SolverKind::Omp => omp(&op, &y, None, &cfg),
        SolverKind::Gpsr => gpsr(&op, &y, GpsrVariant::Basic, &cfg),
        SolverKind::GpsrBb => gpsr(&op, &y, GpsrVariant::BarzilaiBorwein, &cfg),
        SolverKind::Spgl1 => spgl1(&op, &y, &cfg),
        SolverKind::NestaL1 => nesta(&op, &y, NestaMode::L1, &cfg),
        SolverKind::NestaTv => nesta(&op, &y, NestaMode::Tv { width: w, height: h }, &cfg),
        SolverKind::Tval3 => tval3(&op, &y, w, h, &cfg),
    }
}

/// Maps a solver solution back to the source image domain: inverse DCT when
/// the acquisition sparsified, then crop away the padding.
pub fn solution_to_image_values(acq: &Acquisition, solution: &[f64]) -> csrec::Result<Vec<f64>> {
    let pixel_domain: Vec<f64> = match acq.measurement.sparsifier {
        Sparsifier::None => solution.to_vec(),
        Sparsifier::Dct => Dct2Operator::new(acq.padded_width, acq.padded_height)?
            .inverse_values(solution)?,
    };
    crop_values(&pixel_domain, &acq.measurement.pad)
}

struct Cell {
    image_index: usize,
    solver: SolverKind,
    ratio: f64,
    snr_db: Option<f64>,
    seed: u64,
}

fn failed_row(cell: &Cell, image_id: &str, message: String) -> ResultRow {
    ResultRow {
        image: image_id.to_string(),
        solver: cell.solver,
        ratio: cell.ratio,
        snr_db: cell.snr_db,
        seed: cell.seed,
        wall_time_ms: 0.0,
        iterations: 0,
        rel_l1_error: f64::NAN,
        rel_l2_error: f64::NAN,
        psnr_db: f64::NAN,
        converged: false,
        stop_reason: format!("error: {message}"),
    }
}

fn run_cell(
    cell: &Cell,
    image_id: &str,
    image: &GrayImage,
    cfg: &SolverConfig,
    sparsifier: Sparsifier,
) -> ResultRow {
    let acq = match acquire(image, cell.ratio, cell.seed, cell.snr_db, sparsifier) {
        Ok(acq) => acq,
        Err(e) => return failed_row(cell, image_id, e.to_string()),
    };
    let started = Instant::now();
    let report = match dispatch_solver(cell.solver, &acq, cfg) {
        Ok(report) => report,
        Err(e) => return failed_row(cell, image_id, e.to_string()),
    };
    let wall_time_ms = started.elapsed().as_secs_f64() * 1000.0;

    let reconstruction = match solution_to_image_values(&acq, &report.solution) {
        Ok(values) => values,
        Err(e) => return failed_row(cell, image_id, e.to_string()),
    };
    let scores = SignalVector::new(reconstruction)
        .and_then(|recon| {
            let reference = SignalVector::new(image.pixels().to_vec())?;
            quality(&recon, &reference, 1.0)
        });
    let scores = match scores {
        Ok(scores) => scores,
        Err(e) => return failed_row(cell, image_id, e.to_string()),
    };

    ResultRow {
        image: image_id.to_string(),
        solver: cell.solver,
        ratio: cell.ratio,
        snr_db: cell.snr_db,
        seed: cell.seed,
        wall_time_ms,
        iterations: report.iterations,
        rel_l1_error: scores.rel_l1_error,
        rel_l2_error: scores.rel_l2_error,
        psnr_db: scores.psnr_db,
        converged: report.converged,
        stop_reason: report.stop_reason.as_str().to_string(),
    }
}

/// Executes the full Cartesian sweep of `spec`. Rows come back in the
/// deterministic order (image, solver, ratio, snr, seed), nested in that
/// precedence and following the list order in the scenario document,
/// regardless of the worker count. A failing cell yields an annotated row
/// rather than aborting the sweep; only setup problems (unreadable images,
/// invalid configuration) abort.
pub fn run_scenario(spec: &ScenarioSpec, base_dir: &Path, workers: usize) -> Result<Vec<ResultRow>> {
    spec.validate()?;
    let images: Vec<(String, GrayImage)> = spec
        .images
        .iter()
        .map(|source| Ok((source.id(), source.load(base_dir)?)))
        .collect::<Result<_>>()?;
    let mut configs: BTreeMap<SolverKind, SolverConfig> = BTreeMap::new();
    for &solver in &spec.solvers {
        configs.insert(solver, spec.config_for(solver)?);
    }

    let mut cells = Vec::new();
    for (image_index, _) in images.iter().enumerate() {
        for &solver in &spec.solvers {
            for &ratio in &spec.ratios {
                for &snr_db in &spec.snrs_db {
                    for &seed in &spec.seeds {
                        cells.push(Cell {
                            image_index,
                            solver,
                            ratio,
                            snr_db,
                            seed,
                        });
                    }
                }
            }
        }
    }

    let run_one = |cell: &Cell| -> ResultRow {
        let (image_id, image) = &images[cell.image_index];
        run_cell(cell, image_id, image, &configs[&cell.solver], spec.sparsifier)
    };

    let worker_count = workers.max(1).min(cells.len().max(1));
    if worker_count <= 1 {
        return Ok(cells.iter().map(run_one).collect());
    }

    let next = AtomicUsize::new(0);
    let done: Mutex<Vec<(usize, ResultRow)>> = Mutex::new(Vec::with_capacity(cells.len()));
    std::thread::scope(|scope| {
        for _ in 0..worker_count {
            scope.spawn(|| loop {
                let index = next.fetch_add(1, Ordering::Relaxed);
                if index >= cells.len() {
                    break;
                }
                let row = run_one(&cells[index]);
                done.lock().expect("result sink poisoned").push((index, row));
            });
        }
    });
    let mut indexed = done.into_inner().expect("result sink poisoned");
    indexed.sort_by_key(|(index, _)| *index);
    Ok(indexed.into_iter().map(|(_, row)| row).collect())
}
