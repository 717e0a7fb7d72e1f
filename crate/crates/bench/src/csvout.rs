//! CSV rendering of result rows (RFC 4180 quoting, fixed schema).

use crate::runner::ResultRow;
use crate::{HarnessError, Result};

/// Column order of every CSV this harness emits.
pub const CSV_HEADER: &str =
    "image,solver,ratio,snr_db,seed,wall_time_ms,iterations,rel_l1_error,rel_l2_error,psnr_db,converged,stop_reason";

/// Quotes a field per RFC 4180: fields containing commas, double quotes, or
/// line breaks are wrapped in double quotes, with embedded quotes doubled.
fn quote(field: &str) -> String {
    if field.contains(',') || field.contains('"') || field.contains('\n') || field.contains('\r') {
        format!("\"{}\"", field.replace('"', "\"\""))
    } else {
        field.to_string()
    }
}

/// Floats print through Rust's shortest round-trip formatting, so equal
/// values always render to equal bytes.
fn fmt_f64(v: f64) -> String {
    format!("{v}")
}

fn fmt_row(row: &ResultRow) -> String {
    let snr = match row.snr_db {
        None => String::new(),
        Some(snr) => fmt_f64(snr),
    };
    [
        quote(&row.image),
        row.solver.to_string(),
        fmt_f64(row.ratio),
        snr,
        row.seed.to_string(),
        fmt_f64(row.wall_time_ms),
        row.iterations.to_string(),
        fmt_f64(row.rel_l1_error),
        fmt_f64(row.rel_l2_error),
        fmt_f64(row.psnr_db),
        row.converged.to_string(),
        quote(&row.stop_reason),
    ]
    .join(",")
}

/// Renders rows to CSV: header line, one line per row, trailing newline.
pub fn emit_csv(rows: &[ResultRow]) -> Result<String> {
    if rows.is_empty() {
        return Err(HarnessError::Config("no rows to emit".into()));
    }
    let mut out = String::with_capacity(64 * (rows.len() + 1));
    out.push_str(CSV_HEADER);
    out.push('\n');
    for row in rows {
        out.push_str(&fmt_row(row));
        out.push('\n');
    }
    Ok(out)
}

/// Splits one CSV line into fields, honoring RFC 4180 quoting.
pub fn split_csv_line(line: &str) -> Vec<String> {
    let mut fields = Vec::new();
    let mut field = String::new();
    let mut chars = line.chars().peekable();
    let mut quoted = false;
    while let Some(c) = chars.next() {
        if quoted {
            if c == '"' {
                if chars.peek() == Some(&'"') {
                    chars.next();
                    field.push('"');
                } else {
                    quoted = false;
                }
            } else {
                field.push(c);
            }
        } else if c == '"' && field.is_empty() {
            quoted = true;
        } else if c == ',' {
            fields.push(std::mem::take(&mut field));
        } else {
            field.push(c);
        }
    }
    fields.push(field);
    fields
}

/// Copy of a CSV document with every `wall_time_ms` field blanked, for
/// comparing two runs of the same scenario byte for byte.
pub fn csv_without_wall_time(csv: &str) -> String {
    let wall_index = CSV_HEADER
        .split(',')
        .position(|name| name == "wall_time_ms")
        .expect("schema names wall_time_ms");
    let mut out = String::with_capacity(csv.len());
    for (line_no, line) in csv.lines().enumerate() {
        if line_no == 0 || line.is_empty() {
            out.push_str(line);
        } else {
            let mut fields = split_csv_line(line);
            if wall_index < fields.len() {
                fields[wall_index] = String::new();
            }
            let quoted: Vec<String> = fields.iter().map(|f| quote(f)).collect();
            out.push_str(&quoted.join(","));
        }
        out.push('\n');
    }
    out
}
