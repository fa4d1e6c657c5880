//! Closed-form quantities of the mixture model.
//!
//! All logarithms are natural. The signal-to-noise ratio is
//!
//! ```text
//! r_n = (delta^2 / sigma^2) / sqrt(delta^2 / sigma^2 + p / n)
//! ```
//!
//! and the exact-recovery separation threshold is
//!
//! ```text
//! threshold^2 = sigma^2 * (1 + sqrt(1 + 2 p / (n ln n))) * ln n,
//! ```
//!
//! chosen so that `r_n^2 = 2 ln n` exactly at `delta = threshold`. The
//! critical dimension where the threshold changes regime is `p = n ln n`.

use crate::erf;
use crate::math;
use crate::{Error, Result};

const SQRT_2: f64 = core::f64::consts::SQRT_2;

/// Generative parameters: `n` observations in dimension `p`, noise level
/// `sigma` and separation `delta` (the lower bound on the center norm).
///
/// `sigma = 0` is accepted as the documented noiseless degenerate case;
/// operations that divide by `sigma` reject it individually.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ProblemConfig {
    pub n: usize,
    pub p: usize,
    pub sigma: f64,
    pub delta: f64,
}

impl ProblemConfig {
    pub fn new(n: usize, p: usize, sigma: f64, delta: f64) -> Result<Self> {
        if n < 2 {
            return Err(Error::InvalidParameter("n must be at least 2"));
        }
        if p < 1 {
            return Err(Error::InvalidParameter("p must be at least 1"));
        }
        if !sigma.is_finite() || sigma < 0.0 {
            return Err(Error::InvalidParameter("sigma must be finite and >= 0"));
        }
        if !delta.is_finite() || delta <= 0.0 {
            return Err(Error::InvalidParameter("delta must be finite and > 0"));
        }
        Ok(ProblemConfig { n, p, sigma, delta })
    }
}

/// The `(a, b)` reparameterization of the phase plane:
/// `delta^2 = sigma^2 (1 + sqrt(a)) ln n` and `p = b n ln n`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ABPoint {
    pub a: f64,
    pub b: f64,
}

impl ABPoint {
    pub fn new(a: f64, b: f64) -> Result<Self> {
        if !a.is_finite() || a <= 0.0 {
            return Err(Error::InvalidParameter("a must be finite and > 0"));
        }
        if !b.is_finite() || b <= 0.0 {
            return Err(Error::InvalidParameter("b must be finite and > 0"));
        }
        Ok(ABPoint { a, b })
    }
}

/// Signal-to-noise ratio `r_n`; strictly increasing in `delta`, strictly
/// decreasing in `p`. Requires `sigma > 0`.
pub fn snr(config: &ProblemConfig) -> Result<f64> {
    if config.sigma <= 0.0 {
        return Err(Error::InvalidParameter("snr requires sigma > 0"));
    }
    let d2 = (config.delta / config.sigma) * (config.delta / config.sigma);
    let ratio = config.p as f64 / config.n as f64;
    Ok(d2 / math::sqrt(d2 + ratio))
}

/// Separation at which exact recovery flips from impossible to possible.
///
/// At `delta = exact_threshold(n, p, sigma)` the SNR satisfies
/// `r_n^2 = 2 ln n`.
pub fn exact_threshold(n: usize, p: usize, sigma: f64) -> Result<f64> {
    if n < 3 {
        return Err(Error::InvalidParameter("exact_threshold requires n >= 3"));
    }
    if p < 1 {
        return Err(Error::InvalidParameter("p must be at least 1"));
    }
    if !sigma.is_finite() || sigma <= 0.0 {
        return Err(Error::InvalidParameter("sigma must be finite and > 0"));
    }
    let log_n = math::ln(n as f64);
    let inner = 1.0 + 2.0 * p as f64 / (n as f64 * log_n);
    Ok(sigma * math::sqrt((1.0 + math::sqrt(inner)) * log_n))
}

/// Maps an `(a, b)` phase-plane point to generative parameters:
/// `delta = sigma sqrt((1 + sqrt(a)) ln n)` and `p = round(b n ln n)`
/// (floored at 1).
pub fn ab_to_config(point: &ABPoint, n: usize, sigma: f64) -> Result<ProblemConfig> {
    if n < 3 {
        return Err(Error::InvalidParameter("ab_to_config requires n >= 3"));
    }
    if !sigma.is_finite() || sigma <= 0.0 {
        return Err(Error::InvalidParameter("sigma must be finite and > 0"));
    }
    let log_n = math::ln(n as f64);
    let delta = sigma * math::sqrt((1.0 + math::sqrt(point.a)) * log_n);
    let p = math::round(point.b * n as f64 * log_n).max(1.0) as usize;
    ProblemConfig::new(n, p, sigma, delta)
}

/// The phase-transition curve in the `(a, b)` plane: `a = 1 + 2 b`.
pub fn threshold_a(b: f64) -> f64 {
    debug_assert!(b >= 0.0);
    1.0 + 2.0 * b
}

/// Complementary standard normal CDF `P(Z > t)`, via `erfc(t / sqrt 2) / 2`.
///
/// Absolute error is below 1e-15 for `|t| <= 8` (the rational `erfc`
/// approximation is sub-ulp on every branch).
pub fn gaussian_tail(t: f64) -> f64 {
    0.5 * erf::erfc(t / SQRT_2)
}

/// Reference decay curve `gaussian_tail(r_n)` for risk plots.
///
/// This is the rate *shape* of the minimax bounds with all absolute
/// constants dropped; it is not a calibrated bound.
pub fn lower_bound_curve(config: &ProblemConfig) -> Result<f64> {
    Ok(gaussian_tail(snr(config)?))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::Rng;

    /// Quadrature oracle for the Gaussian tail: composite Simpson on
    /// [t, t+48] with a fine step; independent of the erfc path.
    fn tail_by_quadrature(t: f64) -> f64 {
        let lo = t;
        let hi = t + 48.0;
        let steps = 400_000usize; // even
        let h = (hi - lo) / steps as f64;
        let density = |x: f64| (-0.5 * x * x).exp() / (2.0 * core::f64::consts::PI).sqrt();
        let mut acc = density(lo) + density(hi);
        for k in 1..steps {
            let w = if k % 2 == 1 { 4.0 } else { 2.0 };
            acc += w * density(lo + k as f64 * h);
        }
        acc * h / 3.0
    }

    #[test]
    fn snr_reduces_to_delta_over_sigma_when_p_over_n_vanishes() {
        let config = ProblemConfig::new(1_000_000_000, 1, 1.0, 2.0).unwrap();
        assert!((snr(&config).unwrap() - 2.0).abs() <= 1e-6);
    }

    #[test]
    fn snr_direct_evaluation() {
        // delta^2/sigma^2 = 4 and p/n = 12 give r = 4 / sqrt(16) = 1.
        let config = ProblemConfig::new(100, 1200, 1.0, 2.0).unwrap();
        assert_eq!(snr(&config).unwrap(), 1.0);
    }

    #[test]
    fn snr_at_threshold_squares_to_two_log_n() {
        let delta = exact_threshold(500, 3107, 1.0).unwrap();
        let config = ProblemConfig::new(500, 3107, 1.0, delta).unwrap();
        let r = snr(&config).unwrap();
        let target = 2.0 * (500f64).ln();
        assert!((r * r - target).abs() <= 1e-9 * target);
    }

    #[test]
    fn snr_rejects_zero_sigma() {
        let config = ProblemConfig::new(10, 2, 0.0, 1.0).unwrap();
        assert!(snr(&config).is_err());
    }

    #[test]
    fn threshold_at_critical_dimension() {
        for n in [10usize, 100, 500, 2000] {
            let log_n = (n as f64).ln();
            let p = (n as f64 * log_n).round() as usize;
            let t2 = exact_threshold(n, p, 1.0).unwrap().powi(2);
            let expected = (1.0 + 3f64.sqrt()) * log_n;
            assert!(
                (t2 - expected).abs() <= 1e-3 * expected,
                "n={n}: {t2} vs {expected}"
            );
        }
    }

    #[test]
    fn threshold_low_dimension_limit() {
        let n = 1_000_000usize;
        let t2 = exact_threshold(n, 1, 1.0).unwrap().powi(2);
        let expected = 2.0 * (n as f64).ln();
        assert!((t2 - expected).abs() <= 1e-3 * expected);
    }

    #[test]
    fn threshold_high_dimension_limit() {
        let n = 100usize;
        let log_n = (n as f64).ln();
        let p = (1e4 * n as f64 * log_n).round() as usize;
        let t2 = exact_threshold(n, p, 1.0).unwrap().powi(2);
        let expected = (2.0 * p as f64 * log_n / n as f64).sqrt();
        assert!((t2 - expected).abs() <= 0.01 * expected);
    }

    #[test]
    fn threshold_rejects_small_n() {
        assert!(exact_threshold(2, 5, 1.0).is_err());
    }

    #[test]
    fn ab_map_direct_evaluation() {
        let point = ABPoint::new(1.0, 0.5).unwrap();
        let config = ab_to_config(&point, 500, 1.0).unwrap();
        let expected = 2.0 * (500f64).ln(); // 12.4292...
        assert!((config.delta.powi(2) - expected).abs() <= 1e-12 * expected);
    }

    #[test]
    fn ab_map_on_threshold_curve_matches_exact_threshold() {
        let b = 1.0;
        let point = ABPoint::new(threshold_a(b), b).unwrap();
        let config = ab_to_config(&point, 500, 1.0).unwrap();
        let bar = exact_threshold(500, config.p, 1.0).unwrap();
        assert!((config.delta - bar).abs() / bar <= 0.02);
    }

    #[test]
    fn ab_map_paper_scale_point() {
        let point = ABPoint::new(4.0, 1.0).unwrap();
        let config = ab_to_config(&point, 500, 1.0).unwrap();
        assert_eq!(config.p, 3107);
        let expected = 3.0 * (500f64).ln();
        assert!((config.delta.powi(2) - expected).abs() <= 1e-12 * expected);
    }

    #[test]
    fn threshold_a_examples() {
        assert_eq!(threshold_a(0.0), 1.0);
        assert_eq!(threshold_a(1.0), 3.0);
        assert_eq!(threshold_a(5.0), 11.0);
    }

    #[test]
    fn gaussian_tail_by_symmetry_and_quadrature() {
        assert_eq!(gaussian_tail(0.0), 0.5);
        // Frozen from the quadrature oracle (cross-checked below).
        let expected_1 = 0.15865525393145705;
        assert!((gaussian_tail(1.0) - expected_1).abs() <= 1e-14);
        assert!((tail_by_quadrature(1.0) - expected_1).abs() <= 1e-12);
        let expected_m3 = 0.9986501019683699;
        assert!((gaussian_tail(-3.0) - expected_m3).abs() <= 1e-14);
        assert!((1.0 - tail_by_quadrature(3.0) - expected_m3).abs() <= 1e-12);
    }

    #[test]
    fn gaussian_tail_quadrature_sweep() {
        for i in 0..17 {
            let t = -8.0 + i as f64;
            let q = tail_by_quadrature(t);
            assert!(
                (gaussian_tail(t) - q).abs() <= 1e-12,
                "t={t}: {} vs {q}",
                gaussian_tail(t)
            );
        }
    }

    #[test]
    fn tail_symmetry_sums_to_one() {
        let mut rng = Rng::new(11);
        for _ in 0..1000 {
            let t = 16.0 * rng.next_uniform() - 8.0;
            assert!((gaussian_tail(t) + gaussian_tail(-t) - 1.0).abs() <= 1e-12);
        }
    }

    #[test]
    fn lower_bound_curve_examples() {
        // r_n -> 0 as delta -> 0+.
        let config = ProblemConfig::new(100, 100, 1.0, 1e-9).unwrap();
        assert!((lower_bound_curve(&config).unwrap() - 0.5).abs() <= 1e-9);
        // r_n = 1 (delta^2 = 4, p/n = 12).
        let config = ProblemConfig::new(100, 1200, 1.0, 2.0).unwrap();
        assert!((lower_bound_curve(&config).unwrap() - 0.15865525393145705).abs() <= 1e-12);
        // r_n = 4: solve delta^2 = A (1 + sqrt(1 + 4 p / (n A))) / 2 with A = 16.
        let (n, p) = (300usize, 600usize);
        let a = 16.0;
        let d2 = a * (1.0 + (1.0 + 4.0 * p as f64 / (n as f64 * a)).sqrt()) / 2.0;
        let config = ProblemConfig::new(n, p, 1.0, d2.sqrt()).unwrap();
        assert!((snr(&config).unwrap() - 4.0).abs() <= 1e-12);
        assert!((lower_bound_curve(&config).unwrap() - 3.1671241833119921e-5).abs() <= 1e-8);
    }

    #[test]
    fn snr_monotonicity_in_delta_and_p() {
        let mut rng = Rng::new(17);
        for _ in 0..200 {
            let n = 10 + (rng.next_u64() % 1000) as usize;
            let p = 1 + (rng.next_u64() % 5000) as usize;
            let sigma = 0.2 + 3.0 * rng.next_uniform();
            let delta = 0.1 + 5.0 * rng.next_uniform();
            let bump = 0.01 + rng.next_uniform();
            let base = ProblemConfig::new(n, p, sigma, delta).unwrap();
            let more_sep = ProblemConfig::new(n, p, sigma, delta + bump).unwrap();
            let more_dim =
                ProblemConfig::new(n, p + 1 + (rng.next_u64() % 100) as usize, sigma, delta)
                    .unwrap();
            assert!(snr(&more_sep).unwrap() > snr(&base).unwrap());
            assert!(snr(&more_dim).unwrap() < snr(&base).unwrap());
        }
    }

    #[test]
    fn threshold_consistency_randomized() {
        let mut rng = Rng::new(23);
        for _ in 0..300 {
            let n = 10 + (rng.next_u64() % 9991) as usize;
            let p = 1 + (rng.next_u64() % 1_000_000) as usize;
            let sigma = 0.1 + 4.0 * rng.next_uniform();
            let delta = exact_threshold(n, p, sigma).unwrap();
            let config = ProblemConfig::new(n, p, sigma, delta).unwrap();
            let r2 = snr(&config).unwrap().powi(2);
            let target = 2.0 * (n as f64).ln();
            assert!((r2 - target).abs() <= 1e-9 * target, "n={n} p={p}");
        }
    }

    #[test]
    fn ab_snr_monotone_in_a() {
        for n in [50usize, 500] {
            for bi in 0..5 {
                let b = 0.1 + bi as f64;
                let mut last = 0.0;
                for ai in 1..30 {
                    let a = 0.4 * ai as f64;
                    let config = ab_to_config(&ABPoint::new(a, b).unwrap(), n, 1.0).unwrap();
                    let r = snr(&config).unwrap();
                    assert!(r > last, "a={a} b={b} n={n}");
                    last = r;
                }
            }
        }
    }
}
