//! Fast self-contained property checks behind `hollowgram selftest`.
//!
//! A trimmed version of the crate's test suite that a user can run on an
//! installed binary: each check prints one pass/fail line and the command
//! exits nonzero if any fails. Everything is seeded and finishes in a few
//! seconds.

use hollowgram_core::linalg::{gram, hollow, jacobi_eig, op_norm_oracle, Matrix, SymMatrix};
use hollowgram_core::{
    derive_seed, exact_threshold, gaussian_tail, hamming_risk, oracle_supervised,
    sample_dataset_seeded, sample_labels, sign_vec, snr, spectral_lloyd, CenterMode, LabelVector,
    ProblemConfig, Rng,
};

use crate::experiments::success_transform;

type Check = (&'static str, fn() -> Result<(), String>);

fn fail(message: String) -> Result<(), String> {
    Err(message)
}

fn check_rng_streams() -> Result<(), String> {
    let mut a = Rng::new(11);
    let mut b = Rng::new(11);
    let mut c = Rng::new(12);
    let mut diverged = false;
    for _ in 0..1000 {
        let x = a.next_normal();
        if x.to_bits() != b.next_normal().to_bits() {
            return fail("identical seeds diverged".into());
        }
        diverged |= x != c.next_normal();
    }
    if !diverged {
        return fail("adjacent seeds produced identical streams".into());
    }
    Ok(())
}

fn check_seed_derivation() -> Result<(), String> {
    let mut seen = std::collections::HashSet::new();
    for cell in 0..50 {
        for rep in 0..50 {
            if !seen.insert(derive_seed(0xFEED, cell, rep)) {
                return fail(format!("collision at cell {cell}, rep {rep}"));
            }
        }
    }
    Ok(())
}

fn check_gaussian_tail() -> Result<(), String> {
    if gaussian_tail(0.0) != 0.5 {
        return fail("tail(0) != 1/2".into());
    }
    if (gaussian_tail(1.0) - 0.15865525393145705).abs() > 1e-12 {
        return fail("tail(1) off".into());
    }
    for i in 0..100 {
        let t = -6.0 + 0.12 * i as f64;
        if (gaussian_tail(t) + gaussian_tail(-t) - 1.0).abs() > 1e-12 {
            return fail(format!("symmetry violated at t = {t}"));
        }
    }
    Ok(())
}

fn check_threshold_consistency() -> Result<(), String> {
    let mut rng = Rng::new(3);
    for _ in 0..30 {
        let n = 10 + (rng.next_u64() % 2000) as usize;
        let p = 1 + (rng.next_u64() % 10_000) as usize;
        let delta = exact_threshold(n, p, 1.0).map_err(|e| e.to_string())?;
        let config = ProblemConfig::new(n, p, 1.0, delta).map_err(|e| e.to_string())?;
        let r2 = snr(&config).map_err(|e| e.to_string())?.powi(2);
        let target = 2.0 * (n as f64).ln();
        if (r2 - target).abs() > 1e-9 * target {
            return fail(format!("snr^2 = {r2} != 2 ln {n}"));
        }
    }
    Ok(())
}

fn check_spike_norm() -> Result<(), String> {
    let mut rng = Rng::new(4);
    for n in [2usize, 5, 16, 32] {
        let eta: Vec<f64> = (0..n)
            .map(|_| if rng.next_u64() & 1 == 0 { 1.0 } else { -1.0 })
            .collect();
        let spike = hollow(SymMatrix::from_fn(n, |i, j| eta[i] * eta[j]));
        let as_matrix = Matrix::from_fn(n, n, |i, j| spike.as_sym().get(i, j));
        let norm = op_norm_oracle(&as_matrix).map_err(|e| e.to_string())?;
        if (norm - (n as f64 - 1.0)).abs() > 1e-9 {
            return fail(format!("spike norm at n = {n}: {norm}"));
        }
    }
    Ok(())
}

fn check_hollow_norm_inequality() -> Result<(), String> {
    let mut rng = Rng::new(5);
    for _ in 0..60 {
        let n = 2 + (rng.next_u64() % 11) as usize;
        let a = SymMatrix::from_fn(n, |_, _| rng.next_normal());
        let lhs = op_norm_oracle(&Matrix::from_fn(n, n, |i, j| {
            hollow(a.clone()).as_sym().get(i, j)
        }))
        .map_err(|e| e.to_string())?;
        let rhs = op_norm_oracle(&Matrix::from_fn(n, n, |i, j| a.get(i, j)))
            .map_err(|e| e.to_string())?;
        if lhs > 2.0 * rhs + 1e-9 {
            return fail(format!("||H(A)|| = {lhs} > 2 ||A|| = {}", 2.0 * rhs));
        }
    }
    Ok(())
}

fn check_rounding_bound() -> Result<(), String> {
    let mut rng = Rng::new(6);
    for _ in 0..200 {
        let n = 2 + (rng.next_u64() % 30) as usize;
        let x = sample_labels(n, &mut rng).map_err(|e| e.to_string())?;
        let y: Vec<f64> = (0..n).map(|_| rng.next_normal()).collect();
        let lhs = x
            .signs()
            .iter()
            .zip(sign_vec(&y).signs())
            .map(|(&a, &b)| (a as f64 - b as f64).abs())
            .sum::<f64>()
            / n as f64;
        let rhs = 2.0
            * y.iter()
                .zip(x.signs())
                .map(|(&yi, &xi)| {
                    let d = xi as f64 / (n as f64).sqrt() - yi;
                    d * d
                })
                .sum::<f64>();
        if lhs > rhs + 1e-12 {
            return fail(format!("rounding bound violated: {lhs} > {rhs}"));
        }
    }
    Ok(())
}

fn check_jacobi_reconstruction() -> Result<(), String> {
    let mut rng = Rng::new(7);
    let s = SymMatrix::from_fn(12, |_, _| rng.next_normal());
    let e = jacobi_eig(&s).map_err(|e| e.to_string())?;
    let fro = s.frobenius_norm();
    for i in 0..12 {
        for j in 0..12 {
            let mut rebuilt = 0.0;
            for k in 0..12 {
                rebuilt += e.vectors.get(i, k) * e.values[k] * e.vectors.get(j, k);
            }
            if (rebuilt - s.get(i, j)).abs() > 1e-11 * fro {
                return fail(format!("reconstruction off at ({i}, {j})"));
            }
        }
    }
    Ok(())
}

fn check_power_vs_jacobi() -> Result<(), String> {
    let mut rng = Rng::new(8);
    for trial in 0..8 {
        let n = 4 + (rng.next_u64() % 21) as usize;
        let s = SymMatrix::from_fn(n, |_, _| rng.next_normal());
        let top = hollowgram_core::top_eigpair(&s, 1e-11, 200_000, &mut rng)
            .map_err(|e| e.to_string())?;
        let full = jacobi_eig(&s).map_err(|e| e.to_string())?;
        if (top.value - full.values[0]).abs() > 1e-8 * (1.0 + full.values[0].abs()) {
            return fail(format!("trial {trial}: eigenvalue mismatch"));
        }
        let overlap: f64 = (0..n).map(|i| top.vector[i] * full.vectors.get(i, 0)).sum();
        if overlap.abs() < 1.0 - 1e-8 {
            return fail(format!("trial {trial}: eigenvector overlap {overlap}"));
        }
    }
    Ok(())
}

fn check_supervised_identity() -> Result<(), String> {
    let mut rng = Rng::new(9);
    for _ in 0..5 {
        let config = ProblemConfig::new(15, 8, 1.0, 2.0).map_err(|e| e.to_string())?;
        let ds = sample_dataset_seeded(&config, CenterMode::FixedNorm, &mut rng, 0)
            .map_err(|e| e.to_string())?;
        let direct = oracle_supervised(&ds.y, &ds.eta).map_err(|e| e.to_string())?;
        let hg = hollow(gram(&ds.y).map_err(|e| e.to_string())?);
        let via = sign_vec(
            &hollowgram_core::matvec_hollow(&hg, &ds.eta.to_f64()).map_err(|e| e.to_string())?,
        );
        if direct != via {
            return fail("supervised oracle != sign(H(Y'Y) eta)".into());
        }
    }
    Ok(())
}

fn check_hamming_loss() -> Result<(), String> {
    let est = LabelVector::new(vec![1, 1, -1]).map_err(|e| e.to_string())?;
    let truth = LabelVector::new(vec![1, 1, 1]).map_err(|e| e.to_string())?;
    let report = hamming_risk(&est, &truth).map_err(|e| e.to_string())?;
    if report.hamming != 2 || (report.normalized - 1.0 / 3.0).abs() > 1e-15 {
        return fail("worked example wrong".into());
    }
    let mut rng = Rng::new(10);
    for _ in 0..100 {
        let a = sample_labels(9, &mut rng).map_err(|e| e.to_string())?;
        let b = sample_labels(9, &mut rng).map_err(|e| e.to_string())?;
        let base = hamming_risk(&a, &b).map_err(|e| e.to_string())?;
        let flip = hamming_risk(&a.flipped(), &b).map_err(|e| e.to_string())?;
        if base != flip {
            return fail("sign invariance violated".into());
        }
    }
    Ok(())
}

fn check_success_transform() -> Result<(), String> {
    let one = success_transform(1.0).map_err(|e| e.to_string())?;
    let zero = success_transform(0.0).map_err(|e| e.to_string())?;
    if one != 1.0 || zero != 0.001 {
        return fail(format!("anchors off: {one}, {zero}"));
    }
    Ok(())
}

fn check_noiseless_pipeline() -> Result<(), String> {
    let config = ProblemConfig::new(40, 12, 0.0, 1.0).map_err(|e| e.to_string())?;
    let mut rng = Rng::new(13);
    let ds = sample_dataset_seeded(&config, CenterMode::FixedNorm, &mut rng, 0)
        .map_err(|e| e.to_string())?;
    let trace = spectral_lloyd(&ds.y, &mut rng).map_err(|e| e.to_string())?;
    let report = hamming_risk(&trace.labels, &ds.eta).map_err(|e| e.to_string())?;
    if !report.exact {
        return fail("noiseless recovery failed".into());
    }
    Ok(())
}

const CHECKS: &[Check] = &[
    ("rng determinism", check_rng_streams),
    ("seed derivation", check_seed_derivation),
    ("gaussian tail", check_gaussian_tail),
    ("threshold consistency", check_threshold_consistency),
    ("hollowed spike norm", check_spike_norm),
    ("hollowing norm bound", check_hollow_norm_inequality),
    ("sign rounding bound", check_rounding_bound),
    ("jacobi reconstruction", check_jacobi_reconstruction),
    ("power iteration vs jacobi", check_power_vs_jacobi),
    ("supervised oracle identity", check_supervised_identity),
    ("hamming loss", check_hamming_loss),
    ("success transform", check_success_transform),
    ("noiseless pipeline", check_noiseless_pipeline),
];

/// Runs every check, printing one line each; returns the failure count.
pub fn run_all(mut out: impl std::io::Write) -> std::io::Result<usize> {
    let mut failures = 0;
    for (name, check) in CHECKS {
        match check() {
            Ok(()) => writeln!(out, "selftest {name:<28} ok")?,
            Err(why) => {
                failures += 1;
                writeln!(out, "selftest {name:<28} FAILED: {why}")?;
            }
        }
    }
    writeln!(
        out,
        "selftest: {} of {} checks passed",
        CHECKS.len() - failures,
        CHECKS.len()
    )?;
    Ok(failures)
}
