//! Loss functions and Monte-Carlo estimation of the misclassification law.
//!
//! The Hamming loss is sign-invariant: `r(est, truth)` takes the better of
//! the two global sign alignments, each mismatch contributing 2. The
//! `normalized` field is the misclassified fraction `r / (2n)` in
//! `[0, 1/2]`; callers that want the raw `r / n` scale (range `[0, 2]`)
//! can double it.

use crate::labels::LabelVector;
use crate::math;
use crate::rng::Rng;
use crate::{Error, Result};

/// Hamming loss of one estimate, with its derived quantities.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RiskReport {
    /// `min over global sign flips of sum |est_i - truth_i|` (even).
    pub hamming: usize,
    /// Misclassified fraction after the optimal flip: `hamming / (2n)`.
    pub normalized: f64,
    pub exact: bool,
    /// `|est . truth| / n = 1 - 2 * normalized`.
    pub correlation: f64,
}

/// Value and binomial standard error of a Monte-Carlo frequency.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MonteCarloEstimate {
    pub value: f64,
    pub std_error: f64,
}

/// Aggregate over a batch of risk reports.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TallySummary {
    pub success_rate: f64,
    pub mean_normalized: f64,
    pub count: usize,
}

/// Sign-invariant Hamming loss.
pub fn hamming_risk(est: &LabelVector, truth: &LabelVector) -> Result<RiskReport> {
    if est.len() != truth.len() {
        return Err(Error::DimensionMismatch {
            what: "risk operands",
            expected: truth.len(),
            got: est.len(),
        });
    }
    let n = truth.len();
    let mismatches = est
        .signs()
        .iter()
        .zip(truth.signs())
        .filter(|(a, b)| a != b)
        .count();
    let flips = mismatches.min(n - mismatches);
    let hamming = 2 * flips;
    let normalized = flips as f64 / n as f64;
    Ok(RiskReport {
        hamming,
        normalized,
        exact: hamming == 0,
        correlation: 1.0 - 2.0 * normalized,
    })
}

/// Monte-Carlo estimate of
/// `G(t) = P((theta + sigma xi) . (theta + sigma/(n-1) sum_{j>=2} xi_j) <= ||theta||^2 t)`.
///
/// The `(n-1)`-fold noise average is collapsed analytically to a single
/// normal vector scaled by `sigma / sqrt(n-1)` (same law, `p*(n-2)` fewer
/// deviates per rep). Per rep the first factor's noise is drawn before the
/// second's.
pub fn estimate_g(
    t: f64,
    theta: &[f64],
    sigma: f64,
    n: usize,
    reps: usize,
    rng: &mut Rng,
) -> Result<MonteCarloEstimate> {
    if reps < 100 {
        return Err(Error::InvalidParameter("estimate_g requires reps >= 100"));
    }
    if n < 2 {
        return Err(Error::InvalidParameter("estimate_g requires n >= 2"));
    }
    if !sigma.is_finite() || sigma < 0.0 {
        return Err(Error::InvalidParameter("sigma must be finite and >= 0"));
    }
    let p = theta.len();
    if p == 0 {
        return Err(Error::EmptyInput);
    }
    let threshold = math::hypot_sq(theta) * t;
    let collapsed = sigma / math::sqrt((n - 1) as f64);
    let mut first = alloc::vec![0.0f64; p];
    let mut second = alloc::vec![0.0f64; p];
    let mut hits = 0usize;
    for _ in 0..reps {
        rng.fill_normals(&mut first);
        rng.fill_normals(&mut second);
        let mut inner = 0.0;
        for k in 0..p {
            inner += (theta[k] + sigma * first[k]) * (theta[k] + collapsed * second[k]);
        }
        if inner <= threshold {
            hits += 1;
        }
    }
    let value = hits as f64 / reps as f64;
    let std_error = math::sqrt(value * (1.0 - value) / reps as f64);
    Ok(MonteCarloEstimate { value, std_error })
}

/// Success rate and mean misclassified fraction of a batch.
pub fn tally(reports: &[RiskReport]) -> Result<TallySummary> {
    if reports.is_empty() {
        return Err(Error::EmptyInput);
    }
    let count = reports.len();
    let successes = reports.iter().filter(|r| r.exact).count();
    let mean_normalized = reports.iter().map(|r| r.normalized).sum::<f64>() / count as f64;
    Ok(TallySummary {
        success_rate: successes as f64 / count as f64,
        mean_normalized,
        count,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::synth::sample_labels;
    use alloc::vec;
    use alloc::vec::Vec;

    #[test]
    fn zero_risk_on_equal_and_globally_flipped() {
        let eta = sample_labels(20, &mut Rng::new(41)).unwrap();
        let same = hamming_risk(&eta, &eta).unwrap();
        assert_eq!(same.hamming, 0);
        assert!(same.exact);
        let flipped = hamming_risk(&eta.flipped(), &eta).unwrap();
        assert_eq!(flipped.hamming, 0);
        assert!(flipped.exact);
    }

    #[test]
    fn hand_enumerated_three_entry_case() {
        let est = LabelVector::new(vec![1, 1, -1]).unwrap();
        let truth = LabelVector::new(vec![1, 1, 1]).unwrap();
        let report = hamming_risk(&est, &truth).unwrap();
        // |est - truth| = 2, |est + truth| = 4, so r = 2
        assert_eq!(report.hamming, 2);
        assert!((report.normalized - 1.0 / 3.0).abs() <= 1e-15);
        assert!(!report.exact);
        assert!((report.correlation - 1.0 / 3.0).abs() <= 1e-15);
    }

    #[test]
    fn mismatched_lengths_rejected() {
        let a = LabelVector::new(vec![1, -1]).unwrap();
        let b = LabelVector::new(vec![1, -1, 1]).unwrap();
        assert!(hamming_risk(&a, &b).is_err());
    }

    #[test]
    fn sign_invariance_randomized() {
        let mut rng = Rng::new(42);
        for _ in 0..200 {
            let est = sample_labels(17, &mut rng).unwrap();
            let truth = sample_labels(17, &mut rng).unwrap();
            let base = hamming_risk(&est, &truth).unwrap();
            assert_eq!(base, hamming_risk(&est.flipped(), &truth).unwrap());
            assert_eq!(base, hamming_risk(&est, &truth.flipped()).unwrap());
        }
    }

    #[test]
    fn correlation_identity_exact() {
        let mut rng = Rng::new(43);
        for _ in 0..200 {
            let est = sample_labels(23, &mut rng).unwrap();
            let truth = sample_labels(23, &mut rng).unwrap();
            let report = hamming_risk(&est, &truth).unwrap();
            assert_eq!(report.correlation + 2.0 * report.normalized, 1.0);
            let dot = est.dot(&truth).unsigned_abs() as f64 / 23.0;
            assert!((report.correlation - dot).abs() <= 1e-15);
        }
    }

    #[test]
    fn triangle_consistency_after_flip_unrolling() {
        // For the flip choices realizing each pairwise minimum, mismatch
        // counts obey the triangle inequality; assert over both flips.
        let mut rng = Rng::new(44);
        for _ in 0..1000 {
            let a = sample_labels(15, &mut rng).unwrap();
            let b = sample_labels(15, &mut rng).unwrap();
            let c = sample_labels(15, &mut rng).unwrap();
            let r_ac = hamming_risk(&a, &c).unwrap().hamming;
            let r_ab = hamming_risk(&a, &b).unwrap().hamming;
            let r_bc = hamming_risk(&b, &c).unwrap().hamming;
            assert!(r_ac <= r_ab + r_bc, "{r_ac} > {r_ab} + {r_bc}");
        }
    }

    #[test]
    fn estimate_g_saturates_at_huge_t() {
        let theta = vec![1.0, 2.0];
        let est = estimate_g(1e9, &theta, 1.0, 50, 200, &mut Rng::new(45)).unwrap();
        assert_eq!(est.value, 1.0);
        assert_eq!(est.std_error, 0.0);
    }

    #[test]
    fn estimate_g_degenerate_noise_limit() {
        let theta = vec![3.0, -1.0, 0.5];
        let est = estimate_g(0.5, &theta, 1e-12, 50, 200, &mut Rng::new(46)).unwrap();
        assert_eq!(est.value, 0.0);
    }

    #[test]
    fn estimate_g_rejects_small_reps() {
        assert!(estimate_g(0.0, &[1.0], 1.0, 10, 99, &mut Rng::new(47)).is_err());
    }

    #[test]
    fn estimate_g_monotone_in_t() {
        let theta: Vec<f64> = (0..40).map(|k| 0.3 * ((k % 5) as f64 - 2.0)).collect();
        let mut values = Vec::new();
        for &t in &[-0.5, 0.0, 0.5] {
            let e = estimate_g(t, &theta, 1.0, 30, 20_000, &mut Rng::new(48)).unwrap();
            values.push((e.value, e.std_error));
        }
        // allow CI overlap: nondecreasing within 3 joint standard errors
        for w in values.windows(2) {
            let slack = 3.0 * (w[0].1 + w[1].1);
            assert!(w[1].0 + slack >= w[0].0);
        }
    }

    #[test]
    fn tally_examples() {
        let exact = RiskReport {
            hamming: 0,
            normalized: 0.0,
            exact: true,
            correlation: 1.0,
        };
        let third = RiskReport {
            hamming: 2,
            normalized: 1.0 / 3.0,
            exact: false,
            correlation: 1.0 / 3.0,
        };
        let all = tally(&[exact, exact]).unwrap();
        assert_eq!(all.success_rate, 1.0);
        let half = tally(&[exact, third]).unwrap();
        assert_eq!(half.success_rate, 0.5);
        let mixed = tally(&[exact, third, exact]).unwrap();
        assert!((mixed.mean_normalized - 1.0 / 9.0).abs() <= 1e-15);
        assert!(tally(&[]).is_err());
    }
}
