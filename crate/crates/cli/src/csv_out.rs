//! CSV emission and re-parsing.
//!
//! Floats are printed with 17 significant digits (`{:.16e}`), which
//! round-trips every finite f64 exactly; the round-trip is what the tests
//! assert. Rows are sorted by `(a, b, method name)` so a given result
//! always serializes to identical bytes.

use std::path::Path;

use hollowgram_core::{ab_to_config, ABPoint};

use crate::experiments::{
    success_transform, CurveResult, DiffGrid, GridResult, Method, MethodTally,
};
use crate::HarnessError;

/// Decimal text with 17 significant digits: lossless for f64.
pub fn fmt17(x: f64) -> String {
    format!("{x:.16e}")
}

pub const GRID_CSV_HEADER: &str =
    "a,b,delta,p,method,reps,successes,success_rate,mean_miscls_frac,transformed_rate";

/// One parsed grid CSV row; fields mirror the header.
#[derive(Debug, Clone, PartialEq)]
pub struct GridCsvRow {
    pub a: f64,
    pub b: f64,
    pub delta: f64,
    pub p: usize,
    pub method: String,
    pub reps: u32,
    pub successes: u32,
    pub success_rate: f64,
    pub mean_miscls_frac: f64,
    pub transformed_rate: f64,
}

fn grid_rows(result: &GridResult) -> Result<Vec<GridCsvRow>, HarnessError> {
    let spec = &result.spec;
    // methods in name order within each cell
    let mut method_order: Vec<(usize, Method)> = spec.methods.iter().copied().enumerate().collect();
    method_order.sort_by_key(|&(_, m)| m.name());

    let mut rows = Vec::with_capacity(spec.cell_count() * spec.methods.len());
    for (ai, &a) in spec.a_grid.iter().enumerate() {
        for (bi, &b) in spec.b_grid.iter().enumerate() {
            let cell = &result.cells[spec.cell_index(ai, bi)];
            if !cell.completed {
                return Err(HarnessError::InvalidSpec(format!(
                    "cell ({ai}, {bi}) incomplete; cannot emit CSV"
                )));
            }
            let config = ab_to_config(&ABPoint::new(a, b)?, spec.n, spec.sigma)?;
            for &(slot, method) in &method_order {
                let tally: &MethodTally = &cell.tallies[slot];
                let rate = tally.success_rate();
                rows.push(GridCsvRow {
                    a,
                    b,
                    delta: config.delta,
                    p: config.p,
                    method: method.name().to_string(),
                    reps: tally.reps_done,
                    successes: tally.successes,
                    success_rate: rate,
                    mean_miscls_frac: tally.mean_miscls(),
                    transformed_rate: success_transform(rate)?,
                });
            }
        }
    }
    Ok(rows)
}

/// Serializes a completed grid result; header plus one row per
/// `(cell, method)`.
pub fn grid_csv_string(result: &GridResult) -> Result<String, HarnessError> {
    let mut out = String::from(GRID_CSV_HEADER);
    out.push('\n');
    for row in grid_rows(result)? {
        out.push_str(&format!(
            "{},{},{},{},{},{},{},{},{},{}\n",
            fmt17(row.a),
            fmt17(row.b),
            fmt17(row.delta),
            row.p,
            row.method,
            row.reps,
            row.successes,
            fmt17(row.success_rate),
            fmt17(row.mean_miscls_frac),
            fmt17(row.transformed_rate),
        ));
    }
    Ok(out)
}

pub fn write_grid_csv(result: &GridResult, path: &Path) -> Result<(), HarnessError> {
    std::fs::write(path, grid_csv_string(result)?).map_err(|e| HarnessError::io(path, e))
}

/// Parses text produced by [`grid_csv_string`]; used by the round-trip
/// property and by anyone post-processing results.
pub fn parse_grid_csv(text: &str) -> Result<Vec<GridCsvRow>, HarnessError> {
    let mut lines = text.lines().enumerate();
    match lines.next() {
        Some((_, header)) if header == GRID_CSV_HEADER => {}
        _ => {
            return Err(HarnessError::CsvParse {
                line: 1,
                message: "missing or unexpected header".into(),
            })
        }
    }
    let mut rows = Vec::new();
    for (index, line) in lines {
        let line_no = index + 1;
        if line.is_empty() {
            continue;
        }
        let fields: Vec<&str> = line.split(',').collect();
        if fields.len() != 10 {
            return Err(HarnessError::CsvParse {
                line: line_no,
                message: format!("expected 10 fields, found {}", fields.len()),
            });
        }
        let parse_f = |s: &str, what: &str| -> Result<f64, HarnessError> {
            s.parse().map_err(|_| HarnessError::CsvParse {
                line: line_no,
                message: format!("bad {what}: {s}"),
            })
        };
        let parse_u = |s: &str, what: &str| -> Result<u64, HarnessError> {
            s.parse().map_err(|_| HarnessError::CsvParse {
                line: line_no,
                message: format!("bad {what}: {s}"),
            })
        };
        rows.push(GridCsvRow {
            a: parse_f(fields[0], "a")?,
            b: parse_f(fields[1], "b")?,
            delta: parse_f(fields[2], "delta")?,
            p: parse_u(fields[3], "p")? as usize,
            method: fields[4].to_string(),
            reps: parse_u(fields[5], "reps")? as u32,
            successes: parse_u(fields[6], "successes")? as u32,
            success_rate: parse_f(fields[7], "success_rate")?,
            mean_miscls_frac: parse_f(fields[8], "mean_miscls_frac")?,
            transformed_rate: parse_f(fields[9], "transformed_rate")?,
        });
    }
    Ok(rows)
}

/// Equality between a result and parsed CSV rows, bit-exact on floats.
pub fn csv_matches_result(rows: &[GridCsvRow], result: &GridResult) -> Result<bool, HarnessError> {
    let expected = grid_rows(result)?;
    if rows.len() != expected.len() {
        return Ok(false);
    }
    Ok(rows.iter().zip(&expected).all(|(got, want)| {
        got.a.to_bits() == want.a.to_bits()
            && got.b.to_bits() == want.b.to_bits()
            && got.delta.to_bits() == want.delta.to_bits()
            && got.p == want.p
            && got.method == want.method
            && got.reps == want.reps
            && got.successes == want.successes
            && got.success_rate.to_bits() == want.success_rate.to_bits()
            && got.mean_miscls_frac.to_bits() == want.mean_miscls_frac.to_bits()
            && got.transformed_rate.to_bits() == want.transformed_rate.to_bits()
    }))
}

pub const CURVE_CSV_HEADER: &str =
    "r,delta,p,method,reps,successes,success_rate,mean_miscls_frac,miscls_stderr,lower_bound";

pub fn curve_csv_string(result: &CurveResult) -> String {
    let spec = &result.spec;
    let mut method_order: Vec<(usize, Method)> = spec.methods.iter().copied().enumerate().collect();
    method_order.sort_by_key(|&(_, m)| m.name());
    let mut out = String::from(CURVE_CSV_HEADER);
    out.push('\n');
    for row in &result.rows {
        for &(slot, method) in &method_order {
            let stat = &row.methods[slot];
            out.push_str(&format!(
                "{},{},{},{},{},{},{},{},{},{}\n",
                fmt17(row.r),
                fmt17(row.delta),
                spec.p,
                method.name(),
                stat.tally.reps_done,
                stat.tally.successes,
                fmt17(stat.tally.success_rate()),
                fmt17(stat.tally.mean_miscls()),
                fmt17(stat.miscls_stderr()),
                fmt17(row.lower_bound),
            ));
        }
    }
    out
}

pub fn write_curve_csv(result: &CurveResult, path: &Path) -> Result<(), HarnessError> {
    std::fs::write(path, curve_csv_string(result)).map_err(|e| HarnessError::io(path, e))
}

pub const DIFF_CSV_HEADER: &str = "a,b,method_a,method_b,diff";

pub fn diff_csv_string(diff: &DiffGrid) -> String {
    let mut out = String::from(DIFF_CSV_HEADER);
    out.push('\n');
    for (ai, &a) in diff.a_grid.iter().enumerate() {
        for (bi, &b) in diff.b_grid.iter().enumerate() {
            out.push_str(&format!(
                "{},{},{},{},{}\n",
                fmt17(a),
                fmt17(b),
                diff.method_a.name(),
                diff.method_b.name(),
                fmt17(diff.values[ai * diff.b_grid.len() + bi]),
            ));
        }
    }
    out
}

pub fn write_diff_csv(diff: &DiffGrid, path: &Path) -> Result<(), HarnessError> {
    std::fs::write(path, diff_csv_string(diff)).map_err(|e| HarnessError::io(path, e))
}
