//! Shifted power iteration for the top algebraic eigenpair.

use alloc::vec;
use alloc::vec::Vec;

use super::{dot, SymMatrix};
use crate::math;
use crate::rng::Rng;
use crate::{Error, Result};

/// Default residual tolerance; far below the statistical noise of any
/// dataset the pipeline sees.
pub const DEFAULT_TOL: f64 = 1e-10;

/// Default iteration budget for a matrix of the given order.
pub fn default_max_iter(order: usize) -> usize {
    100 * order
}

/// Converged eigenpair of the largest *algebraic* eigenvalue.
#[derive(Debug, Clone)]
pub struct TopEigen {
    pub value: f64,
    /// Unit eigenvector; sign fixed so its largest-magnitude coordinate
    /// (first such index on ties) is positive.
    pub vector: Vec<f64>,
    pub iterations: usize,
    pub residual: f64,
    /// Set when the estimated gap to the second eigenvalue is below
    /// `tol * (|lambda| + shift)`; the vector is still returned, but it is
    /// only determined up to the near-degenerate eigenspace.
    pub gap_warning: bool,
}

fn residual_window_rate(history: &[f64], newest: f64) -> Option<f64> {
    let oldest = *history.first()?;
    if oldest <= 0.0 || newest <= 0.0 {
        return Some(0.0);
    }
    let steps = history.len() as f64;
    Some(libm::pow(newest / oldest, 1.0 / steps))
}

/// Power iteration on the Gershgorin-shifted matrix `S + shift * I` with
/// `shift = max_i sum_j |S_ij|`.
///
/// The shift bounds every `|lambda_i|`, so the shifted matrix is positive
/// semidefinite and the iteration converges to the largest *algebraic*
/// eigenvalue of `S` (not the largest in magnitude). Each iteration costs
/// one dense matvec: with `w = S v`, the Rayleigh quotient is `v . w`, the
/// residual is `||w - lambda v||`, and the next iterate is the normalized
/// `w + shift * v`. Convergence is declared when
/// `residual <= tol * (|lambda| + shift)`.
///
/// The start vector is drawn from `rng` (standard normals, normalized), so
/// a seeded caller gets a fully deterministic eigenvector including its
/// behavior on near-degenerate spectra.
pub fn top_eigpair(s: &SymMatrix, tol: f64, max_iter: usize, rng: &mut Rng) -> Result<TopEigen> {
    let n = s.order();
    let mut start = vec![0.0; n];
    let mut attempts = 0;
    loop {
        rng.fill_normals(&mut start);
        if math::norm2(&start) > 1e-300 {
            break;
        }
        attempts += 1;
        if attempts >= 8 {
            return Err(Error::DegenerateDraw);
        }
    }
    top_eigpair_with_start(s, start, tol, max_iter)
}

/// As [`top_eigpair`] but with a caller-provided start vector.
pub fn top_eigpair_with_start(
    s: &SymMatrix,
    mut v: Vec<f64>,
    tol: f64,
    max_iter: usize,
) -> Result<TopEigen> {
    let n = s.order();
    if n < 2 {
        return Err(Error::InvalidParameter("top_eigpair requires order >= 2"));
    }
    if !tol.is_finite() || tol <= 0.0 {
        return Err(Error::InvalidParameter("tol must be finite and > 0"));
    }
    if v.len() != n {
        return Err(Error::DimensionMismatch {
            what: "start vector",
            expected: n,
            got: v.len(),
        });
    }
    let start_norm = math::norm2(&v);
    if start_norm <= 1e-300 {
        return Err(Error::DegenerateDraw);
    }
    for x in v.iter_mut() {
        *x /= start_norm;
    }

    let shift = (0..n)
        .map(|i| s.row(i).iter().map(|&x| math::abs(x)).sum::<f64>())
        .fold(0.0f64, f64::max);

    const RATE_WINDOW: usize = 10;
    let mut history: Vec<f64> = Vec::with_capacity(RATE_WINDOW);
    let mut w = vec![0.0; n];
    let mut last_residual = f64::INFINITY;
    for iteration in 1..=max_iter {
        s.matvec(&v, &mut w);
        let lambda = dot(&v, &w);
        let mut residual_sq = 0.0;
        for (wi, vi) in w.iter().zip(&v) {
            let r = wi - lambda * vi;
            residual_sq += r * r;
        }
        let residual = math::sqrt(residual_sq);
        last_residual = residual;
        let scale = math::abs(lambda) + shift;
        if residual <= tol * scale {
            let gap_warning = match residual_window_rate(&history, residual) {
                Some(rate) => rate >= 1.0 || (1.0 - rate) * (lambda + shift) <= tol * scale,
                None => false,
            };
            fix_sign(&mut v);
            return Ok(TopEigen {
                value: lambda,
                vector: v,
                iterations: iteration,
                residual,
                gap_warning,
            });
        }
        if history.len() == RATE_WINDOW {
            history.remove(0);
        }
        history.push(residual);
        // next iterate of the shifted matrix
        let mut norm_sq = 0.0;
        for (wi, vi) in w.iter_mut().zip(&v) {
            *wi += shift * vi;
            norm_sq += *wi * *wi;
        }
        let norm = math::sqrt(norm_sq);
        if norm <= 1e-300 {
            // S + shift*I annihilated the iterate; only possible when the
            // whole spectrum sits at -shift, i.e. S = -shift * I.
            return Err(Error::DegenerateDraw);
        }
        for (vi, wi) in v.iter_mut().zip(&w) {
            *vi = wi / norm;
        }
    }
    Err(Error::NoConvergence {
        iterations: max_iter,
        residual: last_residual,
    })
}

fn fix_sign(v: &mut [f64]) {
    let mut arg = 0;
    let mut best = 0.0;
    for (i, &x) in v.iter().enumerate() {
        let a = math::abs(x);
        if a > best {
            best = a;
            arg = i;
        }
    }
    if v[arg] < 0.0 {
        for x in v.iter_mut() {
            *x = -*x;
        }
    }
}
