//! Label estimators built on the hollowed Gram matrix.
//!
//! The full pipeline is `gram -> hollow -> spectral_init -> lloyd_steps`:
//! the initializer rounds the top eigenvector of `H(Y'Y)` to signs, and
//! each Lloyd step applies `eta -> sign(H(Y'Y) eta)`. Both stages share
//! one Gram matrix; [`spectral_lloyd`] packages them with the
//! `floor(3 ln n)` iteration budget. [`random_lloyd`] replaces the
//! spectral start with a uniform random sign vector, and the two oracles
//! ([`oracle_supervised`], [`oracle_known_center`]) are the benchmarks the
//! pipeline is measured against.

use alloc::vec::Vec;

use crate::labels::{sign_vec, LabelVector};
use crate::linalg::{self, gram, hollow, matvec_hollow, HollowGram, Matrix};
use crate::math;
use crate::rng::Rng;
use crate::{Error, Result};

/// Estimate plus diagnostics of the run that produced it.
#[derive(Debug, Clone, PartialEq)]
pub struct EstimateTrace {
    pub labels: LabelVector,
    /// Number of Lloyd map evaluations performed (0 for a bare initializer).
    pub iterations_run: usize,
    /// First step at which the iteration hit a fixed point, when it did.
    pub converged_at: Option<usize>,
    /// Carried over from the eigensolver: the top eigenvalue was
    /// near-degenerate, so the start labels depend on the solver seed.
    pub eigen_gap_warning: bool,
}

/// Eigensolver settings for the spectral stage.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SolverOpts {
    pub tol: f64,
    /// `None` selects the default budget of `100 * n`.
    pub max_iter: Option<usize>,
}

impl Default for SolverOpts {
    fn default() -> Self {
        SolverOpts {
            tol: linalg::DEFAULT_TOL,
            max_iter: None,
        }
    }
}

impl SolverOpts {
    fn max_iter_for(&self, n: usize) -> usize {
        self.max_iter.unwrap_or_else(|| linalg::default_max_iter(n))
    }
}

/// Number of Lloyd steps used by the packaged pipelines: `floor(3 ln n)`.
pub fn default_iter_count(n: usize) -> usize {
    debug_assert!(n >= 2);
    math::floor(3.0 * math::ln(n as f64)) as usize
}

/// Spectral initializer: signs of the top eigenvector of `H(Y'Y)`.
pub fn spectral_init(hg: &HollowGram, rng: &mut Rng) -> Result<EstimateTrace> {
    spectral_init_with(hg, rng, &SolverOpts::default())
}

/// As [`spectral_init`] with explicit eigensolver settings.
pub fn spectral_init_with(
    hg: &HollowGram,
    rng: &mut Rng,
    opts: &SolverOpts,
) -> Result<EstimateTrace> {
    let n = hg.order();
    let top = linalg::top_eigpair(hg.as_sym(), opts.tol, opts.max_iter_for(n), rng)?;
    Ok(EstimateTrace {
        labels: sign_vec(&top.vector),
        iterations_run: 0,
        converged_at: None,
        eigen_gap_warning: top.gap_warning,
    })
}

/// Runs up to `k_max` steps of `eta -> sign(H eta)`, stopping at the first
/// fixed point. The map is deterministic, so a fixed point is absorbing
/// and early stopping cannot change the final labels.
pub fn lloyd_steps(hg: &HollowGram, start: LabelVector, k_max: usize) -> Result<EstimateTrace> {
    if start.len() != hg.order() {
        return Err(Error::DimensionMismatch {
            what: "lloyd start labels",
            expected: hg.order(),
            got: start.len(),
        });
    }
    let mut current = start;
    let mut iterations_run = 0;
    let mut converged_at = None;
    for step in 1..=k_max {
        let image = matvec_hollow(hg, &current.to_f64())?;
        let next = sign_vec(&image);
        iterations_run = step;
        if next == current {
            converged_at = Some(step);
            break;
        }
        current = next;
    }
    Ok(EstimateTrace {
        labels: current,
        iterations_run,
        converged_at,
        eigen_gap_warning: false,
    })
}

/// Full pipeline: Gram, hollow, spectral initialization, then
/// `floor(3 ln n)` Lloyd steps, all on one shared `H(Y'Y)`.
pub fn spectral_lloyd(y: &Matrix, rng: &mut Rng) -> Result<EstimateTrace> {
    spectral_lloyd_with(y, rng, &SolverOpts::default())
}

/// As [`spectral_lloyd`] with explicit eigensolver settings.
pub fn spectral_lloyd_with(y: &Matrix, rng: &mut Rng, opts: &SolverOpts) -> Result<EstimateTrace> {
    let hg = hollow(gram(y)?);
    let init = spectral_init_with(&hg, rng, opts)?;
    let mut trace = lloyd_steps(&hg, init.labels, default_iter_count(y.cols()))?;
    trace.eigen_gap_warning = init.eigen_gap_warning;
    Ok(trace)
}

/// Lloyd iterations from a uniform random sign start (no spectral stage).
pub fn random_lloyd(y: &Matrix, rng: &mut Rng) -> Result<EstimateTrace> {
    let n = y.cols();
    let hg = hollow(gram(y)?);
    let start = crate::synth::sample_labels(n, rng)?;
    lloyd_steps(&hg, start, default_iter_count(n))
}

/// Supervised oracle: classifies each observation with the true labels of
/// all the others, `sign(Y_i . sum_{j != i} eta_j Y_j)`.
///
/// Computed in observation space (one shared weighted sum, then one inner
/// product and one diagonal correction per entry), not through the Gram
/// matrix, so it doubles as an independent check of the algebraic identity
/// with `sign(H(Y'Y) eta)`.
pub fn oracle_supervised(y: &Matrix, eta_true: &LabelVector) -> Result<LabelVector> {
    let n = y.cols();
    if eta_true.len() != n {
        return Err(Error::DimensionMismatch {
            what: "supervised oracle labels",
            expected: n,
            got: eta_true.len(),
        });
    }
    let p = y.rows();
    let mut weighted_sum = alloc::vec![0.0f64; p];
    for j in 0..n {
        let label = eta_true.get(j) as f64;
        for (acc, &v) in weighted_sum.iter_mut().zip(y.col(j)) {
            *acc += label * v;
        }
    }
    let scores: Vec<f64> = (0..n)
        .map(|i| {
            let col = y.col(i);
            let own = eta_true.get(i) as f64;
            linalg::dot(col, &weighted_sum) - own * linalg::dot(col, col)
        })
        .collect();
    Ok(sign_vec(&scores))
}

/// Known-center oracle: `sign(Y_i . theta)`.
pub fn oracle_known_center(y: &Matrix, theta: &[f64]) -> Result<LabelVector> {
    if theta.len() != y.rows() {
        return Err(Error::DimensionMismatch {
            what: "known-center oracle center",
            expected: y.rows(),
            got: theta.len(),
        });
    }
    if math::norm2(theta) == 0.0 {
        return Err(Error::ZeroCenter);
    }
    let scores: Vec<f64> = (0..y.cols())
        .map(|i| linalg::dot(y.col(i), theta))
        .collect();
    Ok(sign_vec(&scores))
}
