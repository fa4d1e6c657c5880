//! Inequalities the hollowing operator is built on, checked against the
//! exact Jacobi-based operator-norm oracle.

use hollowgram_core::linalg::{gram, hollow, op_norm_oracle, Matrix, SymMatrix};
use hollowgram_core::{hamming_risk, sign_vec, LabelVector, Rng};

fn sym_as_matrix(s: &SymMatrix) -> Matrix {
    Matrix::from_fn(s.order(), s.order(), |i, j| s.get(i, j))
}

#[test]
fn hollowing_at_most_doubles_the_operator_norm() {
    // ||H(A)||op <= 2 ||A||op for any square A
    let mut rng = Rng::new(101);
    for trial in 0..500 {
        let n = 2 + (rng.next_u64() % 15) as usize;
        let a = SymMatrix::from_fn(n, |_, _| 3.0 * rng.next_normal());
        let hollowed = hollow(a.clone());
        let lhs = op_norm_oracle(&sym_as_matrix(hollowed.as_sym())).unwrap();
        let rhs = op_norm_oracle(&sym_as_matrix(&a)).unwrap();
        assert!(lhs <= 2.0 * rhs + 1e-9, "trial {trial}: {lhs} > 2 * {rhs}");
    }
}

#[test]
fn hollowed_gram_bounded_by_centered_gram() {
    // ||H(W'W)||op <= 2 ||W'W - E W'W||op with E W'W = p sigma^2 I
    let mut rng = Rng::new(102);
    for trial in 0..200 {
        let n = 2 + (rng.next_u64() % 15) as usize;
        let p = 1 + (rng.next_u64() % 32) as usize;
        let sigma = 0.5 + 2.0 * rng.next_uniform();
        let w = Matrix::from_fn(p, n, |_, _| sigma * rng.next_normal());
        let g = gram(&w).unwrap();
        let lhs = op_norm_oracle(&sym_as_matrix(hollow(g.clone()).as_sym())).unwrap();
        let centered = SymMatrix::from_fn(n, |i, j| {
            g.get(i, j)
                - if i == j {
                    p as f64 * sigma * sigma
                } else {
                    0.0
                }
        });
        let rhs = op_norm_oracle(&sym_as_matrix(&centered)).unwrap();
        assert!(lhs <= 2.0 * rhs + 1e-9, "trial {trial}: {lhs} > 2 * {rhs}");
    }
}

#[test]
fn hollowed_spike_keeps_all_but_one_unit_of_norm() {
    // ||H(ee')||op = n - 1
    let mut rng = Rng::new(103);
    for n in 2..=64usize {
        let eta: Vec<f64> = (0..n)
            .map(|_| if rng.next_u64() & 1 == 0 { 1.0 } else { -1.0 })
            .collect();
        let spike = hollow(SymMatrix::from_fn(n, |i, j| eta[i] * eta[j]));
        let norm = op_norm_oracle(&sym_as_matrix(spike.as_sym())).unwrap();
        assert!((norm - (n as f64 - 1.0)).abs() <= 1e-9, "n={n}: {norm}");
    }
}

#[test]
fn sign_rounding_error_bounded_by_squared_distance() {
    // (1/n) sum |x_j - sign(y_j)| <= 2 || x/sqrt(n) - y ||^2
    let mut rng = Rng::new(104);
    for trial in 0..500 {
        let n = 2 + (rng.next_u64() % 40) as usize;
        let x_signs: Vec<i8> = (0..n)
            .map(|_| if rng.next_u64() & 1 == 0 { 1 } else { -1 })
            .collect();
        let x = LabelVector::new(x_signs).unwrap();
        let y: Vec<f64> = (0..n).map(|_| 0.8 * rng.next_normal()).collect();
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
        assert!(lhs <= rhs + 1e-12, "trial {trial}: {lhs} > {rhs}");
    }
}

#[test]
fn global_sign_of_solver_start_does_not_change_risk() {
    use hollowgram_core::{lloyd_steps, sample_dataset, spectral_init, CenterMode, ProblemConfig};
    let mut rng = Rng::new(105);
    for _ in 0..25 {
        let config = ProblemConfig::new(24, 12, 1.0, 4.0).unwrap();
        let ds = sample_dataset(&config, CenterMode::FixedNorm, &mut rng).unwrap();
        let hg = hollow(gram(&ds.y).unwrap());
        let init = spectral_init(&hg, &mut Rng::new(7)).unwrap();
        let k = hollowgram_core::default_iter_count(24);
        let from_init = lloyd_steps(&hg, init.labels.clone(), k).unwrap();
        let from_flip = lloyd_steps(&hg, init.labels.flipped(), k).unwrap();
        let r1 = hamming_risk(&from_init.labels, &ds.eta).unwrap();
        let r2 = hamming_risk(&from_flip.labels, &ds.eta).unwrap();
        assert_eq!(r1.hamming, r2.hamming);
    }
}
