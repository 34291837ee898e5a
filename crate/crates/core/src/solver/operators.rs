//! Constraint operators in diagonal-trace coordinates.
//!
//! Every row is a combination of `Tr_i` applied to one or two free
//! matrices, so `A(X)` factors through the coefficient vectors of the
//! expanded matrices and `A^*(y)` is a symmetric Toeplitz matrix per free
//! matrix. The Schur complement `tr(A_r X A_s Y)` reduces to the kernel
//! `K(i, j) = tr(D_i X D_j Y)` with `D_i = (S_i + S_i^T)/2`, which is a
//! two-dimensional cross-correlation of `X` and `Y`.

use nalgebra::DMatrix;
use num_complex::Complex64;
use rustfft::FftPlanner;

use crate::laurent::diagonal_trace;
use crate::sdp_model::{BasisChange, BlockPair, RowTerm};

/// `Tr_i` of a full symmetric matrix for `i = 0..n`.
pub(crate) fn coefficients(x: &DMatrix<f64>) -> Vec<f64> {
    (0..x.nrows()).map(|i| diagonal_trace(x, i as isize)).collect()
}

/// `sum_i w_i D_i`: diagonal `w_0`, off-diagonals `w_|r-c| / 2`.
pub(crate) fn toeplitz(w: &[f64]) -> DMatrix<f64> {
    let n = w.len();
    DMatrix::from_fn(n, n, |r, c| {
        let d = r.abs_diff(c);
        if d == 0 {
            w[0]
        } else {
            0.5 * w[d]
        }
    })
}

/// Squared Frobenius norm of `D_i`.
pub(crate) fn diag_norm_sq(n: usize, i: usize) -> f64 {
    if i == 0 {
        n as f64
    } else {
        0.5 * (n - i) as f64
    }
}

/// Sparse rows over the coefficients of `count` free matrices.
#[derive(Debug, Clone)]
pub(crate) struct RowSet {
    pub n: usize,
    pub count: usize,
    pub rows: Vec<Vec<RowTerm>>,
    pub rhs: Vec<f64>,
}

impl RowSet {
    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn apply(&self, coeffs: &[Vec<f64>]) -> Vec<f64> {
        self.rows
            .iter()
            .map(|terms| terms.iter().map(|t| t.coef * coeffs[t.matrix][t.diag]).sum())
            .collect()
    }

    /// `R^T y`, one coefficient vector per free matrix.
    pub fn adjoint_coeffs(&self, y: &[f64]) -> Vec<Vec<f64>> {
        let mut w = vec![vec![0.0; self.n]; self.count];
        for (terms, &yr) in self.rows.iter().zip(y) {
            for t in terms {
                w[t.matrix][t.diag] += t.coef * yr;
            }
        }
        w
    }

    /// Gram matrix `<A_r, A_s>` under the Frobenius inner product.
    pub fn gram(&self) -> DMatrix<f64> {
        let m = self.len();
        let mut g = DMatrix::zeros(m, m);
        for r in 0..m {
            for s in 0..=r {
                let mut acc = 0.0;
                for a in &self.rows[r] {
                    for b in &self.rows[s] {
                        if a.matrix == b.matrix && a.diag == b.diag {
                            acc += a.coef * b.coef * diag_norm_sq(self.n, a.diag);
                        }
                    }
                }
                g[(r, s)] = acc;
                g[(s, r)] = acc;
            }
        }
        g
    }

    /// `M += R_t K R_t^T` for the rows touching free matrix `t`.
    pub fn accumulate_schur(&self, t: usize, kernel: &DMatrix<f64>, m: &mut DMatrix<f64>) {
        let touching: Vec<(usize, Vec<(usize, f64)>)> = self
            .rows
            .iter()
            .enumerate()
            .filter_map(|(r, terms)| {
                let local: Vec<(usize, f64)> = terms
                    .iter()
                    .filter(|term| term.matrix == t)
                    .map(|term| (term.diag, term.coef))
                    .collect();
                (!local.is_empty()).then_some((r, local))
            })
            .collect();
        // kr[s][i] = sum_j K(i, j) R_sj
        let kr: Vec<Vec<f64>> = touching
            .iter()
            .map(|(_, local)| {
                (0..self.n)
                    .map(|i| local.iter().map(|&(j, c)| c * kernel[(i, j)]).sum())
                    .collect()
            })
            .collect();
        for (a, (r, local)) in touching.iter().enumerate() {
            for (b, (s, _)) in touching.iter().enumerate().take(a + 1) {
                let v: f64 = local.iter().map(|&(i, c)| c * kr[b][i]).sum();
                m[(*r, *s)] += v;
                if r != s {
                    m[(*s, *r)] += v;
                }
            }
        }
    }
}

/// Maps between block pairs and full matrices for one list size.
pub(crate) struct Blocks {
    pub basis: BasisChange,
}

impl Blocks {
    pub fn new(n: usize) -> Self {
        Self {
            basis: BasisChange::new(n),
        }
    }

    pub fn expand(&self, b: &BlockPair) -> DMatrix<f64> {
        self.basis.expand(b).expect("block sizes fixed by construction")
    }

    pub fn coefficients(&self, b: &BlockPair) -> Vec<f64> {
        coefficients(&self.expand(b))
    }

    pub fn from_coefficients(&self, w: &[f64]) -> BlockPair {
        self.basis.reduce(&toeplitz(w))
    }
}

/// `K(i, j) = tr(D_i X D_j Y)` for symmetric `X`, `Y`, `i, j = 0..n`.
pub(crate) fn trace_kernel(x: &DMatrix<f64>, y: &DMatrix<f64>, exact: bool) -> DMatrix<f64> {
    let n = x.nrows();
    let corr = if exact {
        exact_correlation(x, y)
    } else {
        cross_correlation(x, y)
    };
    let len = 2 * n;
    let at = |u: isize, v: isize| -> f64 {
        let r = u.rem_euclid(len as isize) as usize;
        let c = v.rem_euclid(len as isize) as usize;
        corr[r * len + c]
    };
    DMatrix::from_fn(n, n, |i, j| {
        let (i, j) = (i as isize, j as isize);
        0.25 * (at(i, j) + at(i, -j) + at(-i, j) + at(-i, -j))
    })
}

/// `c(u, v) = sum_{a, b} X(a + u, b + v) Y(a, b)` on a `2n x 2n` torus,
/// row-major.
fn cross_correlation(x: &DMatrix<f64>, y: &DMatrix<f64>) -> Vec<f64> {
    let n = x.nrows();
    let len = 2 * n;
    let mut planner = FftPlanner::<f64>::new();
    let fwd = planner.plan_fft_forward(len);
    let inv = planner.plan_fft_inverse(len);

    // pack X + iY so one forward transform serves both
    let mut grid = vec![Complex64::new(0.0, 0.0); len * len];
    for r in 0..n {
        for c in 0..n {
            grid[r * len + c] = Complex64::new(x[(r, c)], y[(r, c)]);
        }
    }
    for r in 0..n {
        fwd.process(&mut grid[r * len..(r + 1) * len]);
    }
    transform_columns(&mut grid, len, &*fwd);

    let mut prod = vec![Complex64::new(0.0, 0.0); len * len];
    for u in 0..len {
        for v in 0..len {
            let w = grid[u * len + v];
            let mirror = grid[((len - u) % len) * len + (len - v) % len].conj();
            let fx = (w + mirror) * 0.5;
            let fy = (w - mirror) * Complex64::new(0.0, -0.5);
            prod[u * len + v] = fx * fy.conj();
        }
    }
    for r in 0..len {
        inv.process(&mut prod[r * len..(r + 1) * len]);
    }
    transform_columns(&mut prod, len, &*inv);
    let scale = 1.0 / (len * len) as f64;
    prod.iter().map(|z| z.re * scale).collect()
}

/// The same correlation by one matrix product per row shift. `O(n^4)`
/// flops but free of the global `eps |X| |Y|` error of the transform.
fn exact_correlation(x: &DMatrix<f64>, y: &DMatrix<f64>) -> Vec<f64> {
    let n = x.nrows();
    let len = 2 * n;
    let mut out = vec![0.0; len * len];
    let idx = |u: isize, v: isize| {
        (u.rem_euclid(len as isize) as usize) * len + v.rem_euclid(len as isize) as usize
    };
    for u in 0..n {
        let rows = n - u;
        // p(c', c) = sum_a X(a + u, c') Y(a, c)
        let p = x.rows(u, rows).transpose() * y.rows(0, rows);
        // q(c', c) = sum_a Y(a + u, c') X(a, c), which gives c(-u, -v) = q-diagonals
        let q = y.rows(u, rows).transpose() * x.rows(0, rows);
        for v in 0..n {
            let (mut pos, mut neg, mut qpos, mut qneg) = (0.0, 0.0, 0.0, 0.0);
            for c in 0..n - v {
                pos += p[(c + v, c)];
                neg += p[(c, c + v)];
                qpos += q[(c + v, c)];
                qneg += q[(c, c + v)];
            }
            let (u, v) = (u as isize, v as isize);
            out[idx(u, v)] = pos;
            out[idx(u, -v)] = neg;
            out[idx(-u, -v)] = qpos;
            out[idx(-u, v)] = qneg;
        }
    }
    out
}

fn transform_columns(grid: &mut [Complex64], len: usize, fft: &dyn rustfft::Fft<f64>) {
    let mut col = vec![Complex64::new(0.0, 0.0); len];
    for c in 0..len {
        for r in 0..len {
            col[r] = grid[r * len + c];
        }
        fft.process(&mut col);
        for r in 0..len {
            grid[r * len + c] = col[r];
        }
    }
}
