//! Dense linear algebra for the hollowed-Gram pipeline.
//!
//! [`gram`] forms `Y'Y` with a register-tiled kernel, [`hollow`] removes
//! the diagonal, [`top_eigpair`] extracts the leading eigenpair by shifted
//! power iteration, and [`jacobi_eig`] / [`op_norm_oracle`] are slow exact
//! oracles (size-guarded) used to validate the fast paths.

mod jacobi;
mod power;

use alloc::vec;
use alloc::vec::Vec;

use crate::math;
use crate::{Error, Result};

pub use jacobi::{jacobi_eig, op_norm_oracle, JacobiEigen, JACOBI_SIZE_LIMIT};
pub use power::{default_max_iter, top_eigpair, top_eigpair_with_start, TopEigen, DEFAULT_TOL};

/// Dense rectangular matrix, column-major: column `j` is the contiguous
/// slice `data[j*rows .. (j+1)*rows]`. For observation matrices the columns
/// are the observations `Y_1, ..., Y_n`.
#[derive(Debug, Clone, PartialEq)]
pub struct Matrix {
    rows: usize,
    cols: usize,
    data: Vec<f64>,
}

impl Matrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Matrix {
            rows,
            cols,
            data: vec![0.0; rows * cols],
        }
    }

    pub fn from_data(rows: usize, cols: usize, data: Vec<f64>) -> Result<Self> {
        if data.len() != rows * cols {
            return Err(Error::DimensionMismatch {
                what: "matrix data length",
                expected: rows * cols,
                got: data.len(),
            });
        }
        Ok(Matrix { rows, cols, data })
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> f64) -> Self {
        let mut m = Matrix::zeros(rows, cols);
        for j in 0..cols {
            for i in 0..rows {
                m.data[j * rows + i] = f(i, j);
            }
        }
        m
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.data[j * self.rows + i]
    }

    pub fn set(&mut self, i: usize, j: usize, v: f64) {
        self.data[j * self.rows + i] = v;
    }

    pub fn col(&self, j: usize) -> &[f64] {
        &self.data[j * self.rows..(j + 1) * self.rows]
    }

    pub fn col_mut(&mut self, j: usize) -> &mut [f64] {
        &mut self.data[j * self.rows..(j + 1) * self.rows]
    }

    pub fn data(&self) -> &[f64] {
        &self.data
    }

    pub fn transposed(&self) -> Matrix {
        Matrix::from_fn(self.cols, self.rows, |i, j| self.get(j, i))
    }
}

/// Symmetric matrix with full row-major storage. Exact symmetry
/// `m[i][j] == m[j][i]` is an invariant of every constructor.
#[derive(Debug, Clone, PartialEq)]
pub struct SymMatrix {
    order: usize,
    data: Vec<f64>,
}

impl SymMatrix {
    /// Builds from arbitrary square data, symmetrizing as `(M + M') / 2`.
    pub fn from_entries(order: usize, data: Vec<f64>) -> Result<Self> {
        if data.len() != order * order {
            return Err(Error::DimensionMismatch {
                what: "square matrix data length",
                expected: order * order,
                got: data.len(),
            });
        }
        let mut m = SymMatrix { order, data };
        for i in 0..order {
            for j in (i + 1)..order {
                let avg = 0.5 * (m.data[i * order + j] + m.data[j * order + i]);
                m.data[i * order + j] = avg;
                m.data[j * order + i] = avg;
            }
        }
        Ok(m)
    }

    pub fn from_fn(order: usize, mut f: impl FnMut(usize, usize) -> f64) -> Self {
        let mut data = vec![0.0; order * order];
        for i in 0..order {
            for j in i..order {
                let v = 0.5 * (f(i, j) + f(j, i));
                data[i * order + j] = v;
                data[j * order + i] = v;
            }
        }
        SymMatrix { order, data }
    }

    /// Caller guarantees `data` is exactly symmetric (used by [`gram`],
    /// which mirrors the upper triangle it computes).
    fn from_symmetric_unchecked(order: usize, data: Vec<f64>) -> Self {
        SymMatrix { order, data }
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.data[i * self.order + j]
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.data[i * self.order..(i + 1) * self.order]
    }

    pub fn data(&self) -> &[f64] {
        &self.data
    }

    /// Dense matrix-vector product; rows are reduced in index order with
    /// four-way partial sums (fixed summation order, so results are
    /// bit-stable run to run).
    pub(crate) fn matvec(&self, x: &[f64], out: &mut [f64]) {
        debug_assert_eq!(x.len(), self.order);
        debug_assert_eq!(out.len(), self.order);
        for (slot, row) in out
            .iter_mut()
            .zip(self.data.chunks_exact(self.order.max(1)))
        {
            *slot = dot(row, x);
        }
    }

    pub fn frobenius_norm(&self) -> f64 {
        math::norm2(&self.data)
    }
}

/// Symmetric matrix with an identically zero diagonal: the image of the
/// hollowing operator `H(M) = M - diag(M)`.
#[derive(Debug, Clone, PartialEq)]
pub struct HollowGram {
    base: SymMatrix,
}

impl HollowGram {
    pub fn order(&self) -> usize {
        self.base.order
    }

    pub fn as_sym(&self) -> &SymMatrix {
        &self.base
    }
}

/// Four-way unrolled dot product; partial sums are folded pairwise at the
/// end, and the element order is the index order.
#[inline]
pub(crate) fn dot(a: &[f64], b: &[f64]) -> f64 {
    let mut s0 = 0.0;
    let mut s1 = 0.0;
    let mut s2 = 0.0;
    let mut s3 = 0.0;
    let mut ai = a.chunks_exact(4);
    let mut bi = b.chunks_exact(4);
    for (ca, cb) in (&mut ai).zip(&mut bi) {
        s0 += ca[0] * cb[0];
        s1 += ca[1] * cb[1];
        s2 += ca[2] * cb[2];
        s3 += ca[3] * cb[3];
    }
    let mut tail = 0.0;
    for (x, y) in ai.remainder().iter().zip(bi.remainder()) {
        tail += x * y;
    }
    (s0 + s1) + (s2 + s3) + tail
}

/// 3x3 column tile of the Gram product: nine simultaneous dot products
/// over the shared index range. Each entry has a single accumulator
/// updated in ascending `k` order; the nine-accumulator body vectorizes
/// well without manual unrolling.
#[inline(always)]
fn gram_tile_3x3(a: [&[f64]; 3], b: [&[f64]; 3]) -> [f64; 9] {
    let p = a[0].len();
    // re-slice everything to the shared length so the indexing below is
    // provably in bounds (this is what lets the loop vectorize)
    let (a0, a1, a2) = (&a[0][..p], &a[1][..p], &a[2][..p]);
    let (b0, b1, b2) = (&b[0][..p], &b[1][..p], &b[2][..p]);
    let mut acc = [0.0f64; 9];
    for k in 0..p {
        let x0 = a0[k];
        let x1 = a1[k];
        let x2 = a2[k];
        let y0 = b0[k];
        let y1 = b1[k];
        let y2 = b2[k];
        acc[0] += x0 * y0;
        acc[1] += x0 * y1;
        acc[2] += x0 * y2;
        acc[3] += x1 * y0;
        acc[4] += x1 * y1;
        acc[5] += x1 * y2;
        acc[6] += x2 * y0;
        acc[7] += x2 * y1;
        acc[8] += x2 * y2;
    }
    acc
}

/// Shared-dimension block length of the Gram kernel: 256 f64 per column
/// chunk keeps a whole block panel of a few hundred columns L2-resident,
/// which is what makes the product compute-bound instead of memory-bound.
const GRAM_K_BLOCK: usize = 256;

/// Accumulates the upper triangle of `Y'Y` into `data`, k-blocked.
///
/// Shared between the portable and the AVX2-recompiled entry points;
/// `inline(always)` so each wrapper compiles its own copy with its own
/// instruction set. The operation order is fixed by this source alone, so
/// both copies produce bit-identical results.
#[inline(always)]
fn gram_accumulate(data: &mut [f64], y: &Matrix) {
    let n = y.cols;
    let p = y.rows;
    let mut k0 = 0;
    while k0 < p {
        let k1 = (k0 + GRAM_K_BLOCK).min(p);
        let chunk = |j: usize| &y.col(j)[k0..k1];
        let mut i = 0;
        while i + 3 <= n {
            let rows = [chunk(i), chunk(i + 1), chunk(i + 2)];
            let mut j = i;
            while j + 3 <= n {
                let tile = gram_tile_3x3(rows, [chunk(j), chunk(j + 1), chunk(j + 2)]);
                for (r, partial) in tile.chunks_exact(3).enumerate() {
                    let row = (i + r) * n + j;
                    data[row] += partial[0];
                    data[row + 1] += partial[1];
                    data[row + 2] += partial[2];
                }
                j += 3;
            }
            while j < n {
                let col = chunk(j);
                for (r, row) in rows.iter().enumerate() {
                    data[(i + r) * n + j] += dot(row, col);
                }
                j += 1;
            }
            i += 3;
        }
        while i < n {
            let row = chunk(i);
            for j in i..n {
                data[i * n + j] += dot(row, chunk(j));
            }
            i += 1;
        }
        k0 = k1;
    }
}

/// [`gram_accumulate`] recompiled with AVX2 enabled. Same source, wider
/// vectors; rustc never contracts `mul` + `add` into fused operations, so
/// the two paths agree bit for bit.
#[cfg(all(feature = "std", target_arch = "x86_64"))]
#[target_feature(enable = "avx2")]
unsafe fn gram_accumulate_avx2(data: &mut [f64], y: &Matrix) {
    gram_accumulate(data, y)
}

/// Gram matrix `Y'Y` of a `p x n` observation matrix, cache-blocked.
///
/// The shared dimension is split into blocks of [`GRAM_K_BLOCK`]; for each
/// block the upper triangle is accumulated with register-tiled 3x3 column
/// chunks (plain dot products on the ragged edges), then mirrored. The
/// summation order of every entry is fixed: k-blocks in ascending order,
/// and within a block a single f64 accumulator in ascending index order
/// for tiled entries or the four-way partial sums of [`dot`] on edges.
/// On x86-64 with `std`, an AVX2 recompilation of the same accumulation
/// is dispatched at runtime; results do not depend on the path taken.
pub fn gram(y: &Matrix) -> Result<SymMatrix> {
    let n = y.cols;
    let p = y.rows;
    if p < 1 || n < 2 {
        return Err(Error::InvalidParameter("gram requires p >= 1 and n >= 2"));
    }
    let mut data = vec![0.0f64; n * n];
    #[cfg(all(feature = "std", target_arch = "x86_64"))]
    let accumulated = if std::arch::is_x86_feature_detected!("avx2") {
        // SAFETY: the required target feature was just detected.
        unsafe { gram_accumulate_avx2(&mut data, y) };
        true
    } else {
        false
    };
    #[cfg(not(all(feature = "std", target_arch = "x86_64")))]
    let accumulated = false;
    if !accumulated {
        gram_accumulate(&mut data, y);
    }
    // mirror the computed upper triangle (diagonal tiles spill below the
    // diagonal with values equal to their mirror, so this overwrite is a
    // no-op there)
    for i in 0..n {
        for j in (i + 1)..n {
            data[j * n + i] = data[i * n + j];
        }
    }
    Ok(SymMatrix::from_symmetric_unchecked(n, data))
}

/// The hollowing operator `H(M) = M - diag(M)`: zeroes the diagonal and
/// leaves every off-diagonal entry untouched. Idempotent.
pub fn hollow(mut m: SymMatrix) -> HollowGram {
    let n = m.order;
    for i in 0..n {
        m.data[i * n + i] = 0.0;
    }
    HollowGram { base: m }
}

/// Dense product `H x`, the workhorse of both the power iteration and the
/// Lloyd steps.
pub fn matvec_hollow(hg: &HollowGram, x: &[f64]) -> Result<Vec<f64>> {
    if x.len() != hg.order() {
        return Err(Error::DimensionMismatch {
            what: "matvec operand",
            expected: hg.order(),
            got: x.len(),
        });
    }
    let mut out = vec![0.0; hg.order()];
    hg.base.matvec(x, &mut out);
    Ok(out)
}
