//! End-to-end harness checks: sweep output schema, determinism, chart
//! structure, measurement-file round trips, and the full-information sanity
//! floor.

use std::path::Path;

use csbench::chart::{emit_chart, ChartKind};
use csbench::csvout::{csv_without_wall_time, emit_csv, split_csv_line, CSV_HEADER};
use csbench::measurement::MeasurementSet;
use csbench::runner::{acquire, run_scenario, ResultRow};
use csbench::scenario::{ScenarioSpec, Sparsifier};
use csrec::imageio::{phantom, write_pgm, GrayImage, PhantomKind};

fn scratch_dir(tag: &str) -> std::path::PathBuf {
    let dir = std::env::temp_dir().join(format!("csbench_{tag}_{}", std::process::id()));
    std::fs::create_dir_all(&dir).expect("scratch dir");
    dir
}

fn run_json(json: &str) -> Vec<ResultRow> {
    let spec = ScenarioSpec::from_json(json).expect("scenario parses");
    run_scenario(&spec, Path::new("."), 2).expect("sweep runs")
}

#[test]
fn full_rate_sanity_floor_holds_for_every_solver() {
    // At ratio 1.0 the sensing operator is orthonormal and square, so every
    // solver has all the information it needs; each must reach 1e-3.
    let rows = run_json(
        r#"{
            "version": 1,
            "images": [{"phantom": "random_sparse_spikes", "size": 16, "seed": 6}],
            "solvers": ["omp", "gpsr", "gpsr_bb", "spgl1", "nesta_l1", "nesta_tv", "tval3"],
            "ratios": [1.0],
            "seeds": [3]
        }"#,
    );
    assert_eq!(rows.len(), 7);
    for row in &rows {
        assert!(
            row.rel_l2_error <= 1e-3,
            "{} misses the sanity floor: {row:?}",
            row.solver
        );
    }
}

#[test]
fn csv_schema_holds_through_a_real_sweep_with_quoted_paths() {
    let dir = scratch_dir("csv");
    let image = phantom(PhantomKind::RandomSparseSpikes, 16, 1).unwrap();
    let bytes = write_pgm(&image, 255).unwrap();
    let image_path = dir.join("sparse, spikes.pgm");
    std::fs::write(&image_path, bytes).unwrap();

    let json = format!(
        r#"{{
            "version": 1,
            "images": [{{"path": "sparse, spikes.pgm"}}],
            "solvers": ["gpsr_bb"],
            "ratios": [0.6],
            "snrs_db": [null, 10.0],
            "seeds": [1]
        }}"#
    );
    let spec = ScenarioSpec::from_json(&json).unwrap();
    let rows = run_scenario(&spec, &dir, 1).unwrap();
    assert_eq!(rows.len(), 2);

    let csv = emit_csv(&rows).unwrap();
    let lines: Vec<&str> = csv.lines().collect();
    assert_eq!(lines[0], CSV_HEADER);
    assert_eq!(lines.len(), 3);
    for line in &lines[1..] {
        let fields = split_csv_line(line);
        assert_eq!(fields.len(), 12, "line {line:?}");
        assert_eq!(fields[0], "sparse, spikes.pgm");
    }
    assert!(lines[1].starts_with("\"sparse, spikes.pgm\","));
    // Noiseless row leaves snr_db empty; the noisy row prints it.
    assert_eq!(split_csv_line(lines[1])[3], "");
    assert_eq!(split_csv_line(lines[2])[3], "10");

    let _ = std::fs::remove_dir_all(&dir);
}

#[test]
fn repeated_sweeps_differ_only_in_wall_time() {
    let json = r#"{
        "version": 1,
        "images": [{"phantom": "nested_rectangles", "size": 16}],
        "solvers": ["tval3", "spgl1"],
        "ratios": [0.5],
        "snrs_db": [14.0],
        "seeds": [1, 2]
    }"#;
    let first = emit_csv(&run_json(json)).unwrap();
    let second = emit_csv(&run_json(json)).unwrap();
    assert_eq!(csv_without_wall_time(&first), csv_without_wall_time(&second));
}

#[test]
fn charts_built_from_a_sweep_have_one_series_per_solver() {
    let rows = run_json(
        r#"{
            "version": 1,
            "images": [{"phantom": "random_sparse_spikes", "size": 16, "seed": 9}],
            "solvers": ["gpsr_bb", "spgl1"],
            "ratios": [0.3, 0.5, 0.8],
            "seeds": [1, 2]
        }"#,
    );
    assert_eq!(rows.len(), 12);
    let line_chart = emit_chart(&rows, ChartKind::ErrorVsRatio).unwrap();
    assert_eq!(line_chart.matches("<polyline").count(), 2);
    let bar_chart = emit_chart(&rows, ChartKind::RuntimeBars).unwrap();
    assert_eq!(bar_chart.matches("<rect class=\"bar\"").count(), 2);
}

#[test]
fn measurement_files_round_trip_through_disk_and_replay() {
    let dir = scratch_dir("meas");
    // Non-power-of-two geometry exercises the padding provenance.
    let pixels: Vec<f64> = (0..24 * 17).map(|i| (i % 97) as f64 / 96.0).collect();
    let image = GrayImage::new(24, 17, pixels).unwrap();
    let acq = acquire(&image, 0.45, 11, Some(8.0), Sparsifier::None).unwrap();

    let path = dir.join("set.bin");
    std::fs::write(&path, acq.measurement.to_bytes()).unwrap();
    let bytes = std::fs::read(&path).unwrap();
    let decoded = MeasurementSet::from_bytes(&bytes).unwrap();
    assert_eq!(decoded, acq.measurement);
    assert_eq!(decoded.replay(&image).unwrap(), acq.measurement.values);

    let _ = std::fs::remove_dir_all(&dir);
}
