//! Seed-reproducible generation of model instances `Y = theta eta' + W`.
//!
//! A dataset is fully determined by its configuration, center mode and
//! 64-bit seed: labels are drawn first (n Rademacher signs), then the
//! center (p normals), then the noise column by column (p normals per
//! observation), all from one [`Rng`] stream.

use alloc::vec::Vec;

use crate::labels::LabelVector;
use crate::linalg::Matrix;
use crate::math;
use crate::model::ProblemConfig;
use crate::rng::Rng;
use crate::{Error, Result};

/// How the center `theta` is drawn.
///
/// `FixedNorm` places it uniformly on the sphere of radius `delta`, the
/// boundary of the parameter class and the default stress case.
/// `GaussianPrior` draws i.i.d. `N(0, alpha^2)` entries with no norm
/// guarantee. Whether the reference simulations pinned `||theta|| = delta`
/// exactly or drew a random center is not recorded anywhere; fixed-norm is
/// this crate's documented choice.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum CenterMode {
    FixedNorm,
    GaussianPrior { alpha: f64 },
}

impl CenterMode {
    fn validate(&self) -> Result<()> {
        if let CenterMode::GaussianPrior { alpha } = self {
            if !alpha.is_finite() || *alpha <= 0.0 {
                return Err(Error::InvalidParameter("gaussian prior alpha must be > 0"));
            }
        }
        Ok(())
    }
}

/// A sampled instance: observations (columns of `y`), the ground truth
/// that generated them, and the seed that reproduces them.
#[derive(Debug, Clone, PartialEq)]
pub struct Dataset {
    pub y: Matrix,
    pub theta: Vec<f64>,
    pub eta: LabelVector,
    pub config: ProblemConfig,
    pub mode: CenterMode,
    pub seed: u64,
}

/// `n` i.i.d. Rademacher labels.
pub fn sample_labels(n: usize, rng: &mut Rng) -> Result<LabelVector> {
    if n < 2 {
        return Err(Error::InvalidParameter("sample_labels requires n >= 2"));
    }
    let signs: Vec<i8> = (0..n)
        .map(|_| if rng.next_u64() & 1 == 0 { 1i8 } else { -1i8 })
        .collect();
    LabelVector::new(signs)
}

/// Draws the center per `mode`. Fixed-norm draws a standard normal vector
/// and rescales it to norm exactly `delta` (uniform direction); a raw draw
/// with norm below 1e-300 is retried up to 8 times before failing.
pub fn sample_center(p: usize, delta: f64, mode: CenterMode, rng: &mut Rng) -> Result<Vec<f64>> {
    if p < 1 {
        return Err(Error::InvalidParameter("sample_center requires p >= 1"));
    }
    if !delta.is_finite() || delta <= 0.0 {
        return Err(Error::InvalidParameter("delta must be finite and > 0"));
    }
    mode.validate()?;
    match mode {
        CenterMode::FixedNorm => {
            let mut theta = alloc::vec![0.0; p];
            for _ in 0..8 {
                rng.fill_normals(&mut theta);
                let norm = math::norm2(&theta);
                if norm >= 1e-300 {
                    let scale = delta / norm;
                    for x in theta.iter_mut() {
                        *x *= scale;
                    }
                    return Ok(theta);
                }
            }
            Err(Error::DegenerateDraw)
        }
        CenterMode::GaussianPrior { alpha } => {
            let mut theta = alloc::vec![0.0; p];
            rng.fill_normals(&mut theta);
            for x in theta.iter_mut() {
                *x *= alpha;
            }
            Ok(theta)
        }
    }
}

/// Assembles `Y` column by column as `theta * eta_i + sigma * xi_i`,
/// drawing the noise for observation `i` before observation `i+1`.
pub fn assemble_observations(
    theta: &[f64],
    eta: &LabelVector,
    sigma: f64,
    rng: &mut Rng,
) -> Result<Matrix> {
    let p = theta.len();
    let n = eta.len();
    if p < 1 || n < 2 {
        return Err(Error::InvalidParameter(
            "observations require p >= 1 and n >= 2",
        ));
    }
    if !sigma.is_finite() || sigma < 0.0 {
        return Err(Error::InvalidParameter("sigma must be finite and >= 0"));
    }
    let mut y = Matrix::zeros(p, n);
    for i in 0..n {
        let label = eta.get(i) as f64;
        let col = y.col_mut(i);
        rng.fill_normals(col);
        for (slot, &t) in col.iter_mut().zip(theta) {
            *slot = t * label + sigma * *slot;
        }
    }
    Ok(y)
}

/// Samples a full dataset; the generator is consumed in the documented
/// order (labels, center, noise) so a given seed pins every byte.
pub fn sample_dataset(config: &ProblemConfig, mode: CenterMode, rng: &mut Rng) -> Result<Dataset> {
    sample_dataset_seeded(config, mode, rng, 0)
}

/// As [`sample_dataset`] but records `seed` in the returned dataset (the
/// caller knows which seed built `rng`; the sampler cannot recover it).
pub fn sample_dataset_seeded(
    config: &ProblemConfig,
    mode: CenterMode,
    rng: &mut Rng,
    seed: u64,
) -> Result<Dataset> {
    let eta = sample_labels(config.n, rng)?;
    let theta = sample_center(config.p, config.delta, mode, rng)?;
    let y = assemble_observations(&theta, &eta, config.sigma, rng)?;
    Ok(Dataset {
        y,
        theta,
        eta,
        config: *config,
        mode,
        seed,
    })
}
