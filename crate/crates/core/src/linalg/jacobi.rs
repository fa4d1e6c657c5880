//! Cyclic Jacobi eigendecomposition and the operator-norm oracle.
//!
//! Slow but foolproof references for testing the fast paths; both are
//! size-guarded so they cannot wander into production use.

use alloc::vec;
use alloc::vec::Vec;

use super::{gram, Matrix, SymMatrix};
use crate::math;
use crate::{Error, Result};

/// Guard for the exact oracles.
pub const JACOBI_SIZE_LIMIT: usize = 256;

const MAX_SWEEPS: usize = 100;

/// Full spectrum with an orthonormal eigenbasis, eigenvalues sorted in
/// descending order; column `j` of `vectors` pairs with `values[j]`.
#[derive(Debug, Clone)]
pub struct JacobiEigen {
    pub values: Vec<f64>,
    pub vectors: Matrix,
}

/// Cyclic-by-rows Jacobi rotations, iterated until the off-diagonal
/// Frobenius mass falls below `1e-13 * ||S||_F`.
pub fn jacobi_eig(s: &SymMatrix) -> Result<JacobiEigen> {
    let n = s.order();
    if n > JACOBI_SIZE_LIMIT {
        return Err(Error::SizeGuard {
            limit: JACOBI_SIZE_LIMIT,
            got: n,
        });
    }
    let mut a: Vec<f64> = s.data().to_vec();
    let mut v = vec![0.0; n * n];
    for i in 0..n {
        v[i * n + i] = 1.0;
    }
    let target = 1e-13 * s.frobenius_norm();

    for _sweep in 0..MAX_SWEEPS {
        let mut off_sq = 0.0;
        for p in 0..n {
            for q in (p + 1)..n {
                off_sq += a[p * n + q] * a[p * n + q];
            }
        }
        if math::sqrt(2.0 * off_sq) <= target {
            return Ok(sorted_eigen(n, &a, &v));
        }
        for p in 0..(n - 1) {
            for q in (p + 1)..n {
                let apq = a[p * n + q];
                if apq == 0.0 {
                    continue;
                }
                let theta = 0.5 * (a[q * n + q] - a[p * n + p]) / apq;
                let t = if math::abs(theta) > 1e150 {
                    0.5 / theta
                } else {
                    let sign = if theta >= 0.0 { 1.0 } else { -1.0 };
                    sign / (math::abs(theta) + math::sqrt(1.0 + theta * theta))
                };
                let c = 1.0 / math::sqrt(1.0 + t * t);
                let sn = t * c;
                let tau = sn / (1.0 + c);
                let h = t * apq;
                a[p * n + p] -= h;
                a[q * n + q] += h;
                a[p * n + q] = 0.0;
                a[q * n + p] = 0.0;
                for r in 0..n {
                    if r == p || r == q {
                        continue;
                    }
                    let arp = a[r * n + p];
                    let arq = a[r * n + q];
                    let new_p = arp - sn * (arq + tau * arp);
                    let new_q = arq + sn * (arp - tau * arq);
                    a[r * n + p] = new_p;
                    a[p * n + r] = new_p;
                    a[r * n + q] = new_q;
                    a[q * n + r] = new_q;
                }
                for r in 0..n {
                    let vrp = v[r * n + p];
                    let vrq = v[r * n + q];
                    v[r * n + p] = vrp - sn * (vrq + tau * vrp);
                    v[r * n + q] = vrq + sn * (vrp - tau * vrq);
                }
            }
        }
    }
    Err(Error::NoConvergence {
        iterations: MAX_SWEEPS,
        residual: f64::NAN,
    })
}

fn sorted_eigen(n: usize, a: &[f64], v: &[f64]) -> JacobiEigen {
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| {
        a[j * n + j]
            .partial_cmp(&a[i * n + i])
            .unwrap_or(core::cmp::Ordering::Equal)
    });
    let values: Vec<f64> = order.iter().map(|&k| a[k * n + k]).collect();
    let vectors = Matrix::from_fn(n, n, |i, j| v[i * n + order[j]]);
    JacobiEigen { values, vectors }
}

/// Exact operator norm `sqrt(lambda_max(M'M))` of a rectangular matrix,
/// via [`jacobi_eig`] on the smaller of the two Gram matrices. Guarded to
/// `min(rows, cols) <= 256`.
pub fn op_norm_oracle(m: &Matrix) -> Result<f64> {
    let small = m.rows().min(m.cols());
    if small > JACOBI_SIZE_LIMIT {
        return Err(Error::SizeGuard {
            limit: JACOBI_SIZE_LIMIT,
            got: small,
        });
    }
    let g = if m.cols() <= m.rows() {
        if m.cols() >= 2 {
            gram(m)?
        } else {
            // 1-column Gram degenerates to a scalar
            return Ok(math::norm2(m.col(0)));
        }
    } else {
        let t = m.transposed();
        if t.cols() >= 2 {
            gram(&t)?
        } else {
            return Ok(math::norm2(t.col(0)));
        }
    };
    let top = jacobi_eig(&g)?.values[0].max(0.0);
    Ok(math::sqrt(top))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::Rng;

    #[test]
    fn identity_spectrum() {
        let s = SymMatrix::from_fn(3, |i, j| if i == j { 1.0 } else { 0.0 });
        let e = jacobi_eig(&s).unwrap();
        assert_eq!(e.values, alloc::vec![1.0, 1.0, 1.0]);
    }

    #[test]
    fn exact_two_by_two() {
        let s = SymMatrix::from_fn(2, |i, j| if i != j { 1.0 } else { 0.0 });
        let e = jacobi_eig(&s).unwrap();
        assert!((e.values[0] - 1.0).abs() <= 1e-14);
        assert!((e.values[1] + 1.0).abs() <= 1e-14);
        let inv_sqrt2 = core::f64::consts::FRAC_1_SQRT_2;
        for j in 0..2 {
            let (x, y) = (e.vectors.get(0, j).abs(), e.vectors.get(1, j).abs());
            assert!((x - inv_sqrt2).abs() <= 1e-14 && (y - inv_sqrt2).abs() <= 1e-14);
        }
    }

    #[test]
    fn reconstruction_identity() {
        let mut rng = Rng::new(12);
        let s = SymMatrix::from_fn(16, |_, _| rng.next_normal());
        let e = jacobi_eig(&s).unwrap();
        let fro = s.frobenius_norm();
        for i in 0..16 {
            for j in 0..16 {
                let mut rebuilt = 0.0;
                for k in 0..16 {
                    rebuilt += e.vectors.get(i, k) * e.values[k] * e.vectors.get(j, k);
                }
                assert!(
                    (rebuilt - s.get(i, j)).abs() <= 1e-11 * fro,
                    "entry ({i},{j})"
                );
            }
        }
    }

    #[test]
    fn size_guard_fires() {
        let s = SymMatrix::from_fn(257, |i, j| (i == j) as u8 as f64);
        assert!(matches!(jacobi_eig(&s), Err(Error::SizeGuard { .. })));
    }

    #[test]
    fn op_norm_examples() {
        let id = Matrix::from_fn(4, 4, |i, j| (i == j) as u8 as f64);
        assert!((op_norm_oracle(&id).unwrap() - 1.0).abs() <= 1e-12);

        // rank one: ||u v'||_op = ||u|| ||v||
        let u = [1.0, -2.0, 0.5];
        let v = [3.0, 1.0, -1.0, 0.25];
        let m = Matrix::from_fn(3, 4, |i, j| u[i] * v[j]);
        let expected = math::norm2(&u) * math::norm2(&v);
        assert!((op_norm_oracle(&m).unwrap() - expected).abs() <= 1e-10 * expected);

        // sanity: operator norm dominates every column norm
        let mut rng = Rng::new(13);
        let m = Matrix::from_fn(8, 8, |_, _| rng.next_normal());
        let op = op_norm_oracle(&m).unwrap();
        for j in 0..8 {
            assert!(op + 1e-12 >= math::norm2(m.col(j)));
        }
    }
}
