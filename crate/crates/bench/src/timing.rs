//! Plain-text timing summary: per-solver wall-time aggregates and the
//! TVAL3-to-NESTA-TV speed ratio, reported for manual comparison (relative
//! solver speed is machine- and implementation-dependent, so nothing asserts
//! on it).

use std::collections::BTreeMap;

use crate::runner::ResultRow;
use crate::scenario::SolverKind;
use crate::{HarnessError, Result};

fn mean(values: &[f64]) -> f64 {
    values.iter().sum::<f64>() / values.len() as f64
}

fn median(values: &mut [f64]) -> f64 {
    values.sort_by(|a, b| a.total_cmp(b));
    values[values.len() / 2]
}

/// Renders the timing table. One line per solver (run count, mean, median,
/// total wall milliseconds), then a speed-ratio line for every solver pair
/// the classic TV comparison cares about, when both sides are present.
pub fn timing_table(rows: &[ResultRow]) -> Result<String> {
    if rows.is_empty() {
        return Err(HarnessError::Config("no rows to summarize".into()));
    }
    let mut per_solver: BTreeMap<SolverKind, Vec<f64>> = BTreeMap::new();
    for row in rows {
        per_solver.entry(row.solver).or_default().push(row.wall_time_ms);
    }

    let mut out = String::new();
    out.push_str(&format!(
        "{:<10} {:>6} {:>12} {:>12} {:>12}\n",
        "solver", "runs", "mean_ms", "median_ms", "total_ms"
    ));
    let mut means: BTreeMap<SolverKind, f64> = BTreeMap::new();
    for (&solver, times) in &mut per_solver {
        let total: f64 = times.iter().sum();
        let mean_ms = mean(times);
        let median_ms = median(times);
        means.insert(solver, mean_ms);
        out.push_str(&format!(
            "{:<10} {:>6} {:>12.3} {:>12.3} {:>12.3}\n",
            solver.as_str(),
            times.len(),
            mean_ms,
            median_ms,
            total,
        ));
    }

    for (fast, slow) in [
        (SolverKind::Tval3, SolverKind::NestaTv),
        (SolverKind::Tval3, SolverKind::NestaL1),
    ] {
        if let (Some(&fast_ms), Some(&slow_ms)) = (means.get(&fast), means.get(&slow)) {
            if fast_ms > 0.0 {
                out.push_str(&format!(
                    "\nspeed ratio: {} mean / {} mean = {:.2} ({} is {:.2}x the speed of {})\n",
                    slow.as_str(),
                    fast.as_str(),
                    slow_ms / fast_ms,
                    fast.as_str(),
                    slow_ms / fast_ms,
                    slow.as_str(),
                ));
            }
        }
    }
    Ok(out)
}
