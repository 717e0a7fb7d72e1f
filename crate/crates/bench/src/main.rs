//! Command-line front end for the benchmark harness.

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::error::ErrorKind;
use clap::{Parser, Subcommand, ValueEnum};
use csrec::imageio::{read_pgm, write_pgm, GrayImage};
use csrec::metrics::{entropy_bound, min_measurements};

use csbench::chart::{emit_chart, ChartKind};
use csbench::csvout::emit_csv;
use csbench::runner::{acquire, dispatch_solver, run_scenario, solution_to_image_values};
use csbench::scenario::{ScenarioSpec, SolverKind, Sparsifier};
use csbench::timing::timing_table;
use csbench::{HarnessError, Result};

#[derive(Parser)]
#[command(
    name = "csbench",
    version,
    about = "Compressive-sensing reconstruction benchmarks",
    long_about = "Runs deterministic compressive-sensing benchmarks: scenario sweeps \
                  over images, solvers, measurement ratios, noise levels, and seeds, \
                  plus single-image reconstruction, measurement acquisition, and \
                  sample-budget diagnostics."
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum SparsifierArg {
    None,
    Dct,
}

impl From<SparsifierArg> for Sparsifier {
    fn from(arg: SparsifierArg) -> Sparsifier {
        match arg {
            SparsifierArg::None => Sparsifier::None,
            SparsifierArg::Dct => Sparsifier::Dct,
        }
    }
}

#[derive(Subcommand)]
enum Command {
    /// Run a scenario sweep; write CSV, SVG charts, and a timing table.
    Bench {
        /// Scenario file (JSON). Relative image paths resolve against its
        /// directory.
        #[arg(long)]
        config: PathBuf,
        /// Output directory (created if missing).
        #[arg(long)]
        out: PathBuf,
        /// Concurrent sweep workers.
        #[arg(long, default_value_t = 1)]
        workers: usize,
    },
    /// Reconstruct one image from seeded measurements; write the result as
    /// binary PGM.
    Reconstruct {
        /// Source image (binary PGM).
        #[arg(long)]
        image: PathBuf,
        /// Measurement ratio m/n in (0, 1].
        #[arg(long)]
        ratio: f64,
        /// Solver: omp, gpsr, gpsr_bb, spgl1, nesta_l1, nesta_tv, or tval3.
        #[arg(long)]
        solver: String,
        /// Measurement SNR in dB; omit for noiseless acquisition.
        #[arg(long)]
        snr_db: Option<f64>,
        /// Sweep seed driving the operator and noise draws.
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Output image path.
        #[arg(long)]
        out: PathBuf,
        /// Sparsify before sensing (simulation-only pipeline; incompatible
        /// with the TV solvers).
        #[arg(long, value_enum, default_value_t = SparsifierArg::None)]
        sparsifier: SparsifierArg,
    },
    /// Acquire measurements of an image; write a measurement-set file.
    Measure {
        /// Source image (binary PGM).
        #[arg(long)]
        image: PathBuf,
        /// Measurement ratio m/n in (0, 1].
        #[arg(long)]
        ratio: f64,
        /// Sweep seed driving the operator and noise draws.
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Output file path.
        #[arg(long)]
        out: PathBuf,
        /// Measurement SNR in dB; omit for noiseless acquisition.
        #[arg(long)]
        snr_db: Option<f64>,
        /// Sparsify before sensing (simulation-only pipeline).
        #[arg(long, value_enum, default_value_t = SparsifierArg::None)]
        sparsifier: SparsifierArg,
    },
    /// Print sample-budget diagnostics: support entropy and the
    /// incoherence-based minimum measurement count.
    Diagnostics {
        /// Signal dimension.
        #[arg(long)]
        n: usize,
        /// Sparsity level.
        #[arg(long)]
        k: usize,
        /// Failure probability bound.
        #[arg(long)]
        delta: f64,
        /// Mutual incoherence of the sensing and sparsity bases.
        #[arg(long, default_value_t = 1.0)]
        mu: f64,
    },
}

fn read_image(path: &Path) -> Result<GrayImage> {
    let bytes =
        std::fs::read(path).map_err(|e| HarnessError::Io(format!("reading {}: {e}", path.display())))?;
    let (image, _maxval) = read_pgm(&bytes)
        .map_err(|e| HarnessError::Io(format!("decoding {}: {e}", path.display())))?;
    Ok(image)
}

fn write_file(path: &Path, bytes: &[u8]) -> Result<()> {
    std::fs::write(path, bytes)
        .map_err(|e| HarnessError::Io(format!("writing {}: {e}", path.display())))
}

fn cmd_bench(config: &Path, out: &Path, workers: usize) -> Result<()> {
    let text = std::fs::read_to_string(config)
        .map_err(|e| HarnessError::Io(format!("reading {}: {e}", config.display())))?;
    let spec = ScenarioSpec::from_json(&text)?;
    let base_dir = config.parent().unwrap_or_else(|| Path::new("."));
    let rows = run_scenario(&spec, base_dir, workers)?;

    std::fs::create_dir_all(out)
        .map_err(|e| HarnessError::Io(format!("creating {}: {e}", out.display())))?;
    let csv = emit_csv(&rows)?;
    write_file(&out.join("results.csv"), csv.as_bytes())?;
    let line_chart = emit_chart(&rows, ChartKind::ErrorVsRatio)?;
    write_file(&out.join("error_vs_ratio.svg"), line_chart.as_bytes())?;
    let bar_chart = emit_chart(&rows, ChartKind::RuntimeBars)?;
    write_file(&out.join("runtime_bars.svg"), bar_chart.as_bytes())?;
    let timing = timing_table(&rows)?;
    write_file(&out.join("timing.txt"), timing.as_bytes())?;

    println!(
        "{} rows -> {}/{{results.csv, error_vs_ratio.svg, runtime_bars.svg, timing.txt}}",
        rows.len(),
        out.display()
    );
    println!("{timing}");
    Ok(())
}

#[allow(clippy::too_many_arguments)]
fn cmd_reconstruct(
    image_path: &Path,
    ratio: f64,
    solver_name: &str,
    snr_db: Option<f64>,
    seed: u64,
    out: &Path,
    sparsifier: Sparsifier,
) -> Result<()> {
    let solver = SolverKind::parse(solver_name)?;
    if sparsifier == Sparsifier::Dct && solver.is_tv() {
        return Err(HarnessError::Config(format!(
            "sparsifier \"dct\" runs the solver in the DCT coefficient domain, where the \
             total-variation objective of {solver} is meaningless"
        )));
    }
    let image = read_image(image_path)?;
    let acq = acquire(&image, ratio, seed, snr_db, sparsifier)?;

    let mut cfg = csrec::solvers::SolverConfig::default();
    if matches!(solver, SolverKind::Gpsr | SolverKind::GpsrBb) {
        cfg.debias = true;
    }
    let report =
        dispatch_solver(solver, &acq, &cfg).map_err(|e| HarnessError::Solver(e.to_string()))?;
    let values = solution_to_image_values(&acq, &report.solution)
        .map_err(|e| HarnessError::Solver(e.to_string()))?;
    let clamped: Vec<f64> = values.iter().map(|v| v.clamp(0.0, 1.0)).collect();
    let result = GrayImage::new(image.width(), image.height(), clamped)
        .map_err(|e| HarnessError::Solver(e.to_string()))?;
    let bytes = write_pgm(&result, 255).map_err(|e| HarnessError::Solver(e.to_string()))?;
    write_file(out, &bytes)?;

    println!(
        "{}: m = {} of n = {}, {} iterations, stopped on {}, {:.1} ms -> {}",
        solver,
        acq.measurement.spec.m,
        acq.measurement.spec.n,
        report.iterations,
        report.stop_reason,
        report.wall_time_s * 1000.0,
        out.display()
    );
    Ok(())
}

fn cmd_measure(
    image_path: &Path,
    ratio: f64,
    seed: u64,
    out: &Path,
    snr_db: Option<f64>,
    sparsifier: Sparsifier,
) -> Result<()> {
    let image = read_image(image_path)?;
    let acq = acquire(&image, ratio, seed, snr_db, sparsifier)?;
    write_file(out, &acq.measurement.to_bytes())?;
    println!(
        "{} measurements of n = {} written to {}",
        acq.measurement.spec.m,
        acq.measurement.spec.n,
        out.display()
    );
    Ok(())
}

fn cmd_diagnostics(n: usize, k: usize, delta: f64, mu: f64) -> Result<()> {
    let entropy = entropy_bound(n, k)?;
    let minimum = min_measurements(mu, k, n, delta)?;
    println!(
        "support entropy for k = {k} of n = {n}: {:.2} bits exact, {:.2} bits small-k approximation",
        entropy.exact_bits, entropy.approx_bits
    );
    println!(
        "minimum measurements for mu = {mu}, k = {k}, n = {n}, delta = {delta}: {minimum}"
    );
    Ok(())
}

fn run(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Bench {
            config,
            out,
            workers,
        } => cmd_bench(&config, &out, workers),
        Command::Reconstruct {
            image,
            ratio,
            solver,
            snr_db,
            seed,
            out,
            sparsifier,
        } => cmd_reconstruct(
            &image,
            ratio,
            &solver,
            snr_db,
            seed,
            &out,
            sparsifier.into(),
        ),
        Command::Measure {
            image,
            ratio,
            seed,
            out,
            snr_db,
            sparsifier,
        } => cmd_measure(&image, ratio, seed, &out, snr_db, sparsifier.into()),
        Command::Diagnostics { n, k, delta, mu } => cmd_diagnostics(n, k, delta, mu),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(err) => {
            if matches!(
                err.kind(),
                ErrorKind::DisplayHelp
                    | ErrorKind::DisplayVersion
                    | ErrorKind::DisplayHelpOnMissingArgumentOrSubcommand
            ) {
                let _ = err.print();
                return ExitCode::SUCCESS;
            }
            let _ = err.print();
            return ExitCode::from(1);
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            eprintln!("{err}");
            ExitCode::from(err.exit_code() as u8)
        }
    }
}
