//! Plain-text `key=value` experiment configs.
//!
//! Grid configs (`kind=grid`, the default) take:
//! `n`, `a_min`, `a_max`, `a_points`, `b_min`, `b_max`, `b_points`,
//! `reps`, `methods` (comma-separated names), and optionally `sigma`
//! (default 1) and `seed` (default 0).
//!
//! Curve configs (`kind=curve`) take: `n`, `p`, `r_values`
//! (comma-separated), `reps`, `methods`, and optionally `sigma`, `seed`.
//!
//! Blank lines and lines starting with `#` are ignored. Unknown keys are
//! hard errors, reported with their line number.

use std::collections::HashMap;
use std::path::Path;

use crate::experiments::{linspace, CurveSpec, GridSpec, Method};
use crate::HarnessError;

#[derive(Debug, Clone, PartialEq)]
pub enum ConfigSpec {
    Grid(GridSpec),
    Curve(CurveSpec),
}

const GRID_KEYS: &[&str] = &[
    "kind", "n", "sigma", "a_min", "a_max", "a_points", "b_min", "b_max", "b_points", "reps",
    "methods", "seed",
];
const CURVE_KEYS: &[&str] = &[
    "kind", "n", "p", "sigma", "r_values", "reps", "methods", "seed",
];

pub fn load_config(path: &Path) -> Result<ConfigSpec, HarnessError> {
    let text = std::fs::read_to_string(path).map_err(|e| HarnessError::io(path, e))?;
    parse_config(&text, path)
}

fn parse_config(text: &str, path: &Path) -> Result<ConfigSpec, HarnessError> {
    let err = |line: usize, message: String| HarnessError::Config {
        path: path.to_path_buf(),
        line,
        message,
    };

    let mut fields: HashMap<String, (usize, String)> = HashMap::new();
    for (index, raw) in text.lines().enumerate() {
        let line_no = index + 1;
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let (key, value) = line
            .split_once('=')
            .ok_or_else(|| err(line_no, format!("expected key=value, got {line:?}")))?;
        let key = key.trim().to_string();
        if fields.contains_key(&key) {
            return Err(err(line_no, format!("duplicate key {key}")));
        }
        fields.insert(key, (line_no, value.trim().to_string()));
    }

    let kind = fields
        .get("kind")
        .map(|(_, v)| v.as_str())
        .unwrap_or("grid")
        .to_string();
    let allowed: &[&str] = match kind.as_str() {
        "grid" => GRID_KEYS,
        "curve" => CURVE_KEYS,
        other => {
            let line = fields.get("kind").map(|(l, _)| *l).unwrap_or(1);
            return Err(err(line, format!("unknown kind {other:?}")));
        }
    };
    for (key, (line, _)) in &fields {
        if !allowed.contains(&key.as_str()) {
            return Err(err(*line, format!("unknown key {key:?}")));
        }
    }

    let take = |key: &str| -> Result<(usize, String), HarnessError> {
        fields
            .get(key)
            .cloned()
            .ok_or_else(|| err(0, format!("missing required key {key:?}")))
    };
    let parse_usize = |key: &str| -> Result<usize, HarnessError> {
        let (line, v) = take(key)?;
        v.parse().map_err(|_| err(line, format!("bad {key}: {v}")))
    };
    let parse_u64_opt = |key: &str, default: u64| -> Result<u64, HarnessError> {
        match fields.get(key) {
            Some((line, v)) => v.parse().map_err(|_| err(*line, format!("bad {key}: {v}"))),
            None => Ok(default),
        }
    };
    let parse_f64 = |key: &str| -> Result<f64, HarnessError> {
        let (line, v) = take(key)?;
        v.parse().map_err(|_| err(line, format!("bad {key}: {v}")))
    };
    let parse_f64_opt = |key: &str, default: f64| -> Result<f64, HarnessError> {
        match fields.get(key) {
            Some((line, v)) => v.parse().map_err(|_| err(*line, format!("bad {key}: {v}"))),
            None => Ok(default),
        }
    };
    let parse_methods = || -> Result<Vec<Method>, HarnessError> {
        let (line, v) = take("methods")?;
        v.split(',')
            .map(|name| {
                let name = name.trim();
                Method::from_name(name).ok_or_else(|| err(line, format!("unknown method {name:?}")))
            })
            .collect()
    };
    let axis = |min_key: &str, max_key: &str, points_key: &str| -> Result<Vec<f64>, HarnessError> {
        let min = parse_f64(min_key)?;
        let max = parse_f64(max_key)?;
        let points = parse_usize(points_key)?;
        let (line, _) = take(min_key)?;
        if points < 1 {
            return Err(err(line, format!("{points_key} must be at least 1")));
        }
        if points == 1 {
            if min != max {
                return Err(err(line, format!("{min_key} != {max_key} with one point")));
            }
            return Ok(vec![min]);
        }
        if min >= max {
            return Err(err(line, format!("{min_key} must be below {max_key}")));
        }
        Ok(linspace(min, max, points))
    };

    let config = match kind.as_str() {
        "grid" => {
            let spec = GridSpec {
                n: parse_usize("n")?,
                sigma: parse_f64_opt("sigma", 1.0)?,
                a_grid: axis("a_min", "a_max", "a_points")?,
                b_grid: axis("b_min", "b_max", "b_points")?,
                reps: parse_usize("reps")? as u32,
                methods: parse_methods()?,
                master_seed: parse_u64_opt("seed", 0)?,
            };
            spec.validate()?;
            ConfigSpec::Grid(spec)
        }
        _ => {
            let (line, r_text) = take("r_values")?;
            let r_grid: Vec<f64> = r_text
                .split(',')
                .map(|v| {
                    v.trim()
                        .parse()
                        .map_err(|_| err(line, format!("bad r value {v:?}")))
                })
                .collect::<Result<_, _>>()?;
            let spec = CurveSpec {
                n: parse_usize("n")?,
                p: parse_usize("p")?,
                sigma: parse_f64_opt("sigma", 1.0)?,
                r_grid,
                reps: parse_usize("reps")? as u32,
                methods: parse_methods()?,
                master_seed: parse_u64_opt("seed", 0)?,
            };
            spec.validate()?;
            ConfigSpec::Curve(spec)
        }
    };
    Ok(config)
}
