//! Experiment specifications and result containers.

use serde::{Deserialize, Serialize};

use crate::csv_out::fmt17;
use crate::HarnessError;

/// Label-recovery methods the engine can evaluate. All methods requested
/// in one spec see the same dataset in every rep (paired comparison).
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Method {
    SpectralLloyd,
    Spectral,
    RandomLloyd,
    OracleSupervised,
    OracleKnownCenter,
}

impl Method {
    pub const ALL: [Method; 5] = [
        Method::SpectralLloyd,
        Method::Spectral,
        Method::RandomLloyd,
        Method::OracleSupervised,
        Method::OracleKnownCenter,
    ];

    pub fn name(&self) -> &'static str {
        match self {
            Method::SpectralLloyd => "spectral_lloyd",
            Method::Spectral => "spectral",
            Method::RandomLloyd => "random_lloyd",
            Method::OracleSupervised => "oracle_supervised",
            Method::OracleKnownCenter => "oracle_known_center",
        }
    }

    pub fn from_name(name: &str) -> Option<Method> {
        Method::ALL.iter().copied().find(|m| m.name() == name)
    }
}

/// A phase-diagram run: for every `(a_grid[i], b_grid[j])` cell, `reps`
/// paired datasets evaluated by every requested method.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GridSpec {
    pub n: usize,
    pub sigma: f64,
    pub a_grid: Vec<f64>,
    pub b_grid: Vec<f64>,
    pub reps: u32,
    pub methods: Vec<Method>,
    pub master_seed: u64,
}

impl GridSpec {
    pub fn validate(&self) -> Result<(), HarnessError> {
        if self.n < 3 {
            return Err(HarnessError::InvalidSpec("n must be at least 3".into()));
        }
        if !self.sigma.is_finite() || self.sigma <= 0.0 {
            return Err(HarnessError::InvalidSpec("sigma must be > 0".into()));
        }
        validate_grid("a_grid", &self.a_grid)?;
        validate_grid("b_grid", &self.b_grid)?;
        if self.reps < 1 {
            return Err(HarnessError::InvalidSpec("reps must be at least 1".into()));
        }
        validate_methods(&self.methods)
    }

    pub fn cell_count(&self) -> usize {
        self.a_grid.len() * self.b_grid.len()
    }

    /// Linear cell index: a-major, `cell = a_index * |b_grid| + b_index`.
    pub fn cell_index(&self, a_index: usize, b_index: usize) -> usize {
        a_index * self.b_grid.len() + b_index
    }

    pub fn cell_coords(&self, cell_index: usize) -> (usize, usize) {
        (
            cell_index / self.b_grid.len(),
            cell_index % self.b_grid.len(),
        )
    }

    /// Canonical text form: one `key=value` line per field in fixed order,
    /// floats printed with 17 significant digits. This is what the spec
    /// hash is computed over.
    pub fn canonical_text(&self) -> String {
        let joined = |grid: &[f64]| grid.iter().map(|v| fmt17(*v)).collect::<Vec<_>>().join(",");
        let methods = self
            .methods
            .iter()
            .map(|m| m.name())
            .collect::<Vec<_>>()
            .join(",");
        format!(
            "kind=grid\nn={}\nsigma={}\na={}\nb={}\nreps={}\nmethods={}\nseed={}\n",
            self.n,
            fmt17(self.sigma),
            joined(&self.a_grid),
            joined(&self.b_grid),
            self.reps,
            methods,
            self.master_seed
        )
    }

    /// FNV-1a 64-bit hash of [`GridSpec::canonical_text`].
    pub fn spec_hash(&self) -> u64 {
        fnv1a64(self.canonical_text().as_bytes())
    }
}

/// A risk-versus-SNR sweep at fixed `(n, p, sigma)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CurveSpec {
    pub n: usize,
    pub p: usize,
    pub sigma: f64,
    pub r_grid: Vec<f64>,
    pub reps: u32,
    pub methods: Vec<Method>,
    pub master_seed: u64,
}

impl CurveSpec {
    pub fn validate(&self) -> Result<(), HarnessError> {
        if self.n < 3 {
            return Err(HarnessError::InvalidSpec("n must be at least 3".into()));
        }
        if self.p < 1 {
            return Err(HarnessError::InvalidSpec("p must be at least 1".into()));
        }
        if !self.sigma.is_finite() || self.sigma <= 0.0 {
            return Err(HarnessError::InvalidSpec("sigma must be > 0".into()));
        }
        if self.r_grid.is_empty() || self.r_grid[0] <= 0.0 {
            return Err(HarnessError::InvalidSpec(
                "r_grid must be nonempty and positive".into(),
            ));
        }
        validate_grid("r_grid", &self.r_grid)?;
        if self.reps < 1 {
            return Err(HarnessError::InvalidSpec("reps must be at least 1".into()));
        }
        validate_methods(&self.methods)
    }

    /// Separation hitting the target SNR exactly:
    /// `delta^2 = sigma^2 r^2 (1 + sqrt(1 + 4p/(n r^2))) / 2`.
    pub fn delta_for(&self, r: f64) -> f64 {
        let a = r * r;
        let inner = 1.0 + 4.0 * self.p as f64 / (self.n as f64 * a);
        (self.sigma * self.sigma * a * (1.0 + inner.sqrt()) / 2.0).sqrt()
    }
}

fn validate_grid(name: &str, grid: &[f64]) -> Result<(), HarnessError> {
    if grid.is_empty() {
        return Err(HarnessError::InvalidSpec(format!("{name} is empty")));
    }
    if grid.iter().any(|v| !v.is_finite()) {
        return Err(HarnessError::InvalidSpec(format!(
            "{name} has a non-finite entry"
        )));
    }
    if grid.windows(2).any(|w| w[0] >= w[1]) {
        return Err(HarnessError::InvalidSpec(format!(
            "{name} must be strictly increasing"
        )));
    }
    Ok(())
}

fn validate_methods(methods: &[Method]) -> Result<(), HarnessError> {
    if methods.is_empty() {
        return Err(HarnessError::InvalidSpec("methods is empty".into()));
    }
    for (i, m) in methods.iter().enumerate() {
        if methods[..i].contains(m) {
            return Err(HarnessError::InvalidSpec(format!(
                "duplicate method {}",
                m.name()
            )));
        }
    }
    Ok(())
}

/// Evenly spaced grid, inclusive of both endpoints.
pub fn linspace(min: f64, max: f64, points: usize) -> Vec<f64> {
    if points == 1 {
        return vec![min];
    }
    let step = (max - min) / (points - 1) as f64;
    (0..points)
        .map(|i| {
            if i + 1 == points {
                max
            } else {
                min + step * i as f64
            }
        })
        .collect()
}

/// FNV-1a, 64-bit: `h = 0xcbf29ce484222325`, then for each byte
/// `h = (h ^ byte) * 0x100000001b3`.
pub(crate) fn fnv1a64(bytes: &[u8]) -> u64 {
    let mut hash = 0xcbf2_9ce4_8422_2325u64;
    for &b in bytes {
        hash ^= b as u64;
        hash = hash.wrapping_mul(0x0000_0100_0000_01b3);
    }
    hash
}

/// Per-method Monte-Carlo tallies of one cell.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct MethodTally {
    pub successes: u32,
    pub reps_done: u32,
    pub sum_miscls: f64,
}

impl MethodTally {
    pub fn success_rate(&self) -> f64 {
        self.successes as f64 / self.reps_done as f64
    }

    pub fn mean_miscls(&self) -> f64 {
        self.sum_miscls / self.reps_done as f64
    }
}

/// One grid cell: tallies aligned with `spec.methods`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CellResult {
    pub tallies: Vec<MethodTally>,
    pub completed: bool,
}

/// A completed (or partially completed) grid run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GridResult {
    pub spec: GridSpec,
    pub cells: Vec<CellResult>,
}

impl GridResult {
    pub fn empty(spec: GridSpec) -> Self {
        let cells = vec![
            CellResult {
                tallies: vec![MethodTally::default(); spec.methods.len()],
                completed: false,
            };
            spec.cell_count()
        ];
        GridResult { spec, cells }
    }

    pub fn is_complete(&self) -> bool {
        self.cells.iter().all(|c| c.completed)
    }

    pub fn method_index(&self, method: Method) -> Option<usize> {
        self.spec.methods.iter().position(|&m| m == method)
    }
}

/// Per-cell success-rate differences `method_a - method_b`, in `[-1, 1]`.
#[derive(Debug, Clone, PartialEq)]
pub struct DiffGrid {
    pub a_grid: Vec<f64>,
    pub b_grid: Vec<f64>,
    pub method_a: Method,
    pub method_b: Method,
    /// a-major, same layout as the grid cells.
    pub values: Vec<f64>,
}

/// Difference map between two methods of completed grid results with
/// identical specs (pass the same result twice to compare within one run).
pub fn diff_grids(
    r1: &GridResult,
    method_a: Method,
    r2: &GridResult,
    method_b: Method,
) -> Result<DiffGrid, HarnessError> {
    if r1.spec != r2.spec {
        return Err(HarnessError::SpecMismatch);
    }
    let ia = r1
        .method_index(method_a)
        .ok_or_else(|| HarnessError::InvalidSpec(format!("{} not in spec", method_a.name())))?;
    let ib = r2
        .method_index(method_b)
        .ok_or_else(|| HarnessError::InvalidSpec(format!("{} not in spec", method_b.name())))?;
    if !r1.is_complete() || !r2.is_complete() {
        return Err(HarnessError::InvalidSpec(
            "diff requires completed grids".into(),
        ));
    }
    let values = r1
        .cells
        .iter()
        .zip(&r2.cells)
        .map(|(ca, cb)| ca.tallies[ia].success_rate() - cb.tallies[ib].success_rate())
        .collect();
    Ok(DiffGrid {
        a_grid: r1.spec.a_grid.clone(),
        b_grid: r1.spec.b_grid.clone(),
        method_a,
        method_b,
        values,
    })
}

/// Display transform for success probabilities: `x -> 10^(-3 (1 - x))`,
/// mapping 0 to 0.001 and 1 to 1. Display scaling only.
pub fn success_transform(x: f64) -> Result<f64, HarnessError> {
    if !(0.0..=1.0).contains(&x) {
        return Err(HarnessError::InvalidSpec(format!(
            "success_transform domain is [0, 1], got {x}"
        )));
    }
    Ok(10f64.powf(-3.0 * (1.0 - x)))
}

/// Per-method statistics of one curve point.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MethodCurve {
    pub tally: MethodTally,
    /// Sum of squared per-rep misclassified fractions (for the standard
    /// error of the mean).
    pub sum_miscls_sq: f64,
}

impl MethodCurve {
    /// Standard error of the mean misclassified fraction.
    pub fn miscls_stderr(&self) -> f64 {
        let n = self.tally.reps_done as f64;
        let mean = self.tally.mean_miscls();
        let var = (self.sum_miscls_sq / n - mean * mean).max(0.0);
        (var / n).sqrt()
    }
}

/// One row of a risk-versus-SNR sweep.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CurveRow {
    pub r: f64,
    pub delta: f64,
    /// Reference decay shape `gaussian_tail(r)`.
    pub lower_bound: f64,
    pub methods: Vec<MethodCurve>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CurveResult {
    pub spec: CurveSpec,
    pub rows: Vec<CurveRow>,
}
