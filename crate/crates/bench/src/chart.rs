//! Self-contained SVG charts over result rows: error-vs-ratio lines per
//! solver and runtime bars per solver.

use std::collections::BTreeMap;

use crate::runner::ResultRow;
use crate::scenario::SolverKind;
use crate::{HarnessError, Result};

/// Chart families the harness renders.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ChartKind {
    /// Median `rel_l1_error` against measurement ratio, one polyline per
    /// solver.
    ErrorVsRatio,
    /// Mean solve wall time, one bar per solver.
    RuntimeBars,
}

const WIDTH: f64 = 640.0;
const HEIGHT: f64 = 400.0;
const MARGIN_LEFT: f64 = 70.0;
const MARGIN_RIGHT: f64 = 150.0;
const MARGIN_TOP: f64 = 40.0;
const MARGIN_BOTTOM: f64 = 50.0;

const PALETTE: [&str; 7] = [
    "#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b", "#17becf",
];

fn median(mut values: Vec<f64>) -> Option<f64> {
    values.retain(|v| v.is_finite());
    if values.is_empty() {
        return None;
    }
    values.sort_by(|a, b| a.total_cmp(b));
    Some(values[values.len() / 2])
}

fn solver_color(index: usize) -> &'static str {
    PALETTE[index % PALETTE.len()]
}

fn svg_open(title: &str) -> String {
    format!(
        concat!(
            "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{w}\" height=\"{h}\" ",
            "viewBox=\"0 0 {w} {h}\" font-family=\"sans-serif\" font-size=\"12\">\n",
            "<title>{title}</title>\n",
            "<text x=\"{tx}\" y=\"24\" text-anchor=\"middle\" font-size=\"15\">{title}</text>\n"
        ),
        w = WIDTH,
        h = HEIGHT,
        tx = WIDTH / 2.0,
        title = title,
    )
}

fn axes(x_label: &str, y_label: &str) -> String {
    let x0 = MARGIN_LEFT;
    let x1 = WIDTH - MARGIN_RIGHT;
    let y0 = HEIGHT - MARGIN_BOTTOM;
    let y1 = MARGIN_TOP;
    format!(
        concat!(
            "<line x1=\"{x0}\" y1=\"{y0}\" x2=\"{x1}\" y2=\"{y0}\" stroke=\"#333\"/>\n",
            "<line x1=\"{x0}\" y1=\"{y0}\" x2=\"{x0}\" y2=\"{y1}\" stroke=\"#333\"/>\n",
            "<text x=\"{xm}\" y=\"{xly}\" text-anchor=\"middle\">{x_label}</text>\n",
            "<text x=\"16\" y=\"{ym}\" text-anchor=\"middle\" transform=\"rotate(-90 16 {ym})\">{y_label}</text>\n"
        ),
        x0 = x0,
        x1 = x1,
        y0 = y0,
        y1 = y1,
        xm = (x0 + x1) / 2.0,
        xly = HEIGHT - 12.0,
        ym = (y0 + y1) / 2.0,
        x_label = x_label,
        y_label = y_label,
    )
}

fn legend(entries: &[(SolverKind, &'static str)]) -> String {
    let mut out = String::new();
    for (index, (solver, color)) in entries.iter().enumerate() {
        let y = MARGIN_TOP + 16.0 * index as f64;
        let x = WIDTH - MARGIN_RIGHT + 14.0;
        out.push_str(&format!(
            concat!(
                "<rect x=\"{x}\" y=\"{ry}\" width=\"12\" height=\"12\" fill=\"{color}\"/>\n",
                "<text x=\"{tx}\" y=\"{ty}\">{name}</text>\n"
            ),
            x = x,
            ry = y - 10.0,
            color = color,
            tx = x + 18.0,
            ty = y,
            name = solver.as_str(),
        ));
    }
    out
}

/// Renders `rows` as a chart of the requested kind. Output is a complete,
/// dependency-free SVG document.
pub fn emit_chart(rows: &[ResultRow], kind: ChartKind) -> Result<String> {
    if rows.is_empty() {
        return Err(HarnessError::Config("empty output: no rows to chart".into()));
    }
    match kind {
        ChartKind::ErrorVsRatio => error_vs_ratio(rows),
        ChartKind::RuntimeBars => runtime_bars(rows),
    }
}

fn error_vs_ratio(rows: &[ResultRow]) -> Result<String> {
    // Medians per (solver, ratio); ratios keyed by bit pattern to stay
    // grouping-stable, then sorted numerically for the x axis.
    let mut per_series: BTreeMap<SolverKind, BTreeMap<u64, Vec<f64>>> = BTreeMap::new();
    for row in rows {
        per_series
            .entry(row.solver)
            .or_default()
            .entry(row.ratio.to_bits())
            .or_default()
            .push(row.rel_l1_error);
    }
    let mut ratios: Vec<f64> = rows.iter().map(|r| r.ratio).collect();
    ratios.sort_by(|a, b| a.total_cmp(b));
    ratios.dedup();
    let (rmin, rmax) = (ratios[0], ratios[ratios.len() - 1]);
    let span = (rmax - rmin).max(1e-12);

    let mut y_max = 0.0f64;
    let mut series: Vec<(SolverKind, Vec<(f64, f64)>)> = Vec::new();
    for (&solver, buckets) in &per_series {
        let mut points = Vec::new();
        for (&bits, errs) in buckets {
            if let Some(med) = median(errs.clone()) {
                points.push((f64::from_bits(bits), med));
                y_max = y_max.max(med);
            }
        }
        points.sort_by(|a, b| a.0.total_cmp(&b.0));
        series.push((solver, points));
    }
    let y_max = if y_max > 0.0 { y_max * 1.08 } else { 1.0 };

    let x0 = MARGIN_LEFT;
    let x1 = WIDTH - MARGIN_RIGHT;
    let y0 = HEIGHT - MARGIN_BOTTOM;
    let y1 = MARGIN_TOP;
    let to_x = |ratio: f64| x0 + (ratio - rmin) / span * (x1 - x0);
    let to_y = |err: f64| y0 - (err / y_max) * (y0 - y1);

    let mut svg = svg_open("Median relative L1 error vs measurement ratio");
    svg.push_str(&axes("measurement ratio m/n", "median rel L1 error"));
    for &ratio in &ratios {
        let x = to_x(ratio);
        svg.push_str(&format!(
            concat!(
                "<line x1=\"{x}\" y1=\"{y0}\" x2=\"{x}\" y2=\"{yt}\" stroke=\"#333\"/>\n",
                "<text x=\"{x}\" y=\"{ly}\" text-anchor=\"middle\">{ratio}</text>\n"
            ),
            x = x,
            y0 = y0,
            yt = y0 + 5.0,
            ly = y0 + 20.0,
            ratio = ratio,
        ));
    }
    let y_ticks = 4;
    for tick in 0..=y_ticks {
        let value = y_max * tick as f64 / y_ticks as f64;
        let y = to_y(value);
        svg.push_str(&format!(
            concat!(
                "<line x1=\"{xt}\" y1=\"{y}\" x2=\"{x0}\" y2=\"{y}\" stroke=\"#333\"/>\n",
                "<text x=\"{lx}\" y=\"{ly}\" text-anchor=\"end\">{value:.3}</text>\n"
            ),
            xt = x0 - 5.0,
            y = y,
            x0 = x0,
            lx = x0 - 8.0,
            ly = y + 4.0,
            value = value,
        ));
    }

    let mut legend_entries = Vec::new();
    for (index, (solver, points)) in series.iter().enumerate() {
        let color = solver_color(index);
        legend_entries.push((*solver, color));
        let coords: Vec<String> = points
            .iter()
            .map(|&(ratio, err)| format!("{:.2},{:.2}", to_x(ratio), to_y(err)))
            .collect();
        svg.push_str(&format!(
            "<polyline fill=\"none\" stroke=\"{color}\" stroke-width=\"2\" points=\"{}\"/>\n",
            coords.join(" "),
        ));
        for &(ratio, err) in points {
            svg.push_str(&format!(
                "<circle cx=\"{:.2}\" cy=\"{:.2}\" r=\"3\" fill=\"{color}\"/>\n",
                to_x(ratio),
                to_y(err),
            ));
        }
    }
    svg.push_str(&legend(&legend_entries));
    svg.push_str("</svg>\n");
    Ok(svg)
}

fn runtime_bars(rows: &[ResultRow]) -> Result<String> {
    let mut per_solver: BTreeMap<SolverKind, Vec<f64>> = BTreeMap::new();
    for row in rows {
        per_solver.entry(row.solver).or_default().push(row.wall_time_ms);
    }
    let means: Vec<(SolverKind, f64)> = per_solver
        .iter()
        .map(|(&solver, times)| {
            (
                solver,
                times.iter().sum::<f64>() / times.len() as f64,
            )
        })
        .collect();
    let t_max = means.iter().fold(0.0f64, |m, &(_, t)| m.max(t)).max(1e-9) * 1.08;

    let x0 = MARGIN_LEFT;
    let x1 = WIDTH - MARGIN_RIGHT;
    let y0 = HEIGHT - MARGIN_BOTTOM;
    let y1 = MARGIN_TOP;
    let slot = (x1 - x0) / means.len() as f64;

    let mut svg = svg_open("Mean solve time per solver");
    svg.push_str(&axes("solver", "mean wall time [ms]"));
    let y_ticks = 4;
    for tick in 0..=y_ticks {
        let value = t_max * tick as f64 / y_ticks as f64;
        let y = y0 - (value / t_max) * (y0 - y1);
        svg.push_str(&format!(
            concat!(
                "<line x1=\"{xt}\" y1=\"{y}\" x2=\"{x0}\" y2=\"{y}\" stroke=\"#333\"/>\n",
                "<text x=\"{lx}\" y=\"{ly}\" text-anchor=\"end\">{value:.1}</text>\n"
            ),
            xt = x0 - 5.0,
            y = y,
            x0 = x0,
            lx = x0 - 8.0,
            ly = y + 4.0,
            value = value,
        ));
    }
    for (index, &(solver, mean_ms)) in means.iter().enumerate() {
        let color = solver_color(index);
        let bar_width = slot * 0.6;
        let x = x0 + slot * index as f64 + slot * 0.2;
        let height = (mean_ms / t_max) * (y0 - y1);
        svg.push_str(&format!(
            concat!(
                "<rect class=\"bar\" x=\"{x:.2}\" y=\"{y:.2}\" width=\"{w:.2}\" height=\"{h:.2}\" fill=\"{color}\"/>\n",
                "<text x=\"{tx:.2}\" y=\"{ty}\" text-anchor=\"middle\">{name}</text>\n"
            ),
            x = x,
            y = y0 - height,
            w = bar_width,
            h = height,
            color = color,
            tx = x + bar_width / 2.0,
            ty = y0 + 16.0,
            name = solver.as_str(),
        ));
    }
    svg.push_str("</svg>\n");
    Ok(svg)
}
