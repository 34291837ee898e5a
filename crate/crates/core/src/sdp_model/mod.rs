//! The feasibility program for `k`-query, `N`-item translation-invariant
//! ordered search.
//!
//! Variables are the Gram matrices `Q_1..Q_{k-1}`; `Q_0 = E/N` and
//! `Q_k = I/N` are fixed and folded into right-hand sides. Every equality
//! row is a sparse functional on the diagonal traces `q_i = Tr_i Q_t` of the
//! free matrices, so rows are stored as `(matrix, diagonal, coefficient)`
//! triplets.

mod reduction;

pub use reduction::{
    functional_mismatch, j_symmetrize, reduce, BasisChange, BlockFunctional, BlockPair,
    ReducedInstance,
};

use std::f64::consts::PI;

use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::laurent::{check_symmetric, diagonal_trace, hermite_kernel, SymmetricLaurent};

/// `Tr_i X + (-1)^t Tr_{i-n} X` for `1 <= i <= n-1`.
pub fn signed_trace(x: &DMatrix<f64>, t: usize, i: usize) -> Result<f64> {
    let n = x.nrows();
    if x.ncols() != n {
        return Err(Error::NotSquare {
            rows: n,
            cols: x.ncols(),
        });
    }
    if i == 0 || i >= n {
        return Err(Error::IndexOutOfRange {
            index: i,
            max: n.saturating_sub(1),
        });
    }
    let sign = parity_sign(t);
    Ok(diagonal_trace(x, i as isize) + sign * diagonal_trace(x, i as isize - n as isize))
}

pub(crate) fn parity_sign(t: usize) -> f64 {
    if t % 2 == 0 {
        1.0
    } else {
        -1.0
    }
}

/// One coefficient `coef * Tr_diag Q_{matrix + 1}` of an equality row.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RowTerm {
    /// Index into the free matrices (`0` is `Q_1`).
    pub matrix: usize,
    pub diag: usize,
    pub coef: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum RowKind {
    /// `(T_t Q_t)_i = (T_t Q_{t-1})_i`.
    SignedTrace { t: usize, i: usize },
    /// `Tr Q_t = 1`.
    Trace { t: usize },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EqualityRow {
    pub kind: RowKind,
    pub terms: Vec<RowTerm>,
    pub rhs: f64,
}

impl EqualityRow {
    /// Left-hand side evaluated on per-matrix coefficient vectors.
    pub fn eval_coeffs(&self, coeffs: &[Vec<f64>]) -> f64 {
        self.terms
            .iter()
            .map(|t| t.coef * coeffs[t.matrix][t.diag])
            .sum()
    }
}

/// The program `S(k, N)` with constant endpoints folded away.
#[derive(Debug, Clone)]
pub struct SdpInstance {
    k: usize,
    n: usize,
    rows: Vec<EqualityRow>,
}

/// Size summary written next to solver artifacts.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct InstanceSummary {
    pub k: usize,
    pub n: usize,
    pub rows: usize,
    pub reduced_params: usize,
}

/// Builds `S(k, N)`.
pub fn build_instance(k: usize, n: usize) -> Result<SdpInstance> {
    if k == 0 {
        return Err(Error::InvalidArgument("query count k must be >= 1".into()));
    }
    if n == 0 {
        return Err(Error::InvalidArgument("list size N must be >= 1".into()));
    }
    let nf = n as f64;
    let free = |t: usize| (1..k).contains(&t).then(|| t - 1);
    // T_t applied to the constant endpoint t (0 or k), entry i
    let endpoint_signed = |t_side: usize, t: usize, i: usize| -> f64 {
        if t_side == 0 {
            (nf - i as f64) / nf + parity_sign(t) * (i as f64) / nf
        } else {
            0.0
        }
    };

    let mut rows = Vec::with_capacity(k * (n - 1) + k - 1);
    for t in 1..=k {
        let s = parity_sign(t);
        for i in 1..n {
            let mut terms: Vec<RowTerm> = Vec::with_capacity(4);
            let mut rhs = 0.0;
            for (side, sign) in [(t, 1.0), (t - 1, -1.0)] {
                match free(side) {
                    Some(m) => {
                        push_term(&mut terms, m, i, sign);
                        push_term(&mut terms, m, n - i, sign * s);
                    }
                    None => rhs -= sign * endpoint_signed(side, t, i),
                }
            }
            terms.retain(|term| term.coef != 0.0);
            rows.push(EqualityRow {
                kind: RowKind::SignedTrace { t, i },
                terms,
                rhs,
            });
        }
    }
    for t in 1..k {
        rows.push(EqualityRow {
            kind: RowKind::Trace { t },
            terms: vec![RowTerm {
                matrix: t - 1,
                diag: 0,
                coef: 1.0,
            }],
            rhs: 1.0,
        });
    }
    Ok(SdpInstance { k, n, rows })
}

fn push_term(terms: &mut Vec<RowTerm>, matrix: usize, diag: usize, coef: f64) {
    match terms
        .iter_mut()
        .find(|t| t.matrix == matrix && t.diag == diag)
    {
        Some(t) => t.coef += coef,
        None => terms.push(RowTerm { matrix, diag, coef }),
    }
}

/// Residual report for a candidate point.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Residuals {
    pub max_eq_violation: f64,
    pub min_eigenvalue: f64,
}

impl SdpInstance {
    pub fn k(&self) -> usize {
        self.k
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn free_count(&self) -> usize {
        self.k - 1
    }

    pub fn rows(&self) -> &[EqualityRow] {
        &self.rows
    }

    /// The fixed matrix `Q_0 = E/N` or `Q_k = I/N`; `None` for free indices.
    pub fn endpoint(&self, t: usize) -> Option<DMatrix<f64>> {
        let nf = self.n as f64;
        if t == 0 {
            Some(DMatrix::from_element(self.n, self.n, 1.0 / nf))
        } else if t == self.k {
            Some(DMatrix::identity(self.n, self.n) / nf)
        } else {
            None
        }
    }

    pub fn summary(&self) -> InstanceSummary {
        let (floor, ceil) = (self.n / 2, self.n.div_ceil(2));
        InstanceSummary {
            k: self.k,
            n: self.n,
            rows: self.rows.len(),
            reduced_params: self.free_count() * (floor * (floor + 1) / 2 + ceil * (ceil + 1) / 2),
        }
    }

    /// Rows with no variable left and a nonzero right-hand side.
    pub fn trivially_violated_rows(&self) -> impl Iterator<Item = (usize, &EqualityRow)> {
        self.rows
            .iter()
            .enumerate()
            .filter(|(_, r)| r.terms.is_empty() && r.rhs != 0.0)
    }

    /// Max equality violation and smallest eigenvalue of `point`
    /// (`Q_1..Q_{k-1}`).
    pub fn residuals(&self, point: &[DMatrix<f64>]) -> Result<Residuals> {
        let coeffs = self.point_coefficients(point)?;
        let max_eq_violation = self
            .rows
            .iter()
            .map(|r| (r.eval_coeffs(&coeffs) - r.rhs).abs())
            .fold(0.0, f64::max);
        let min_eigenvalue = point
            .iter()
            .map(min_eigenvalue)
            .fold(f64::INFINITY, f64::min);
        Ok(Residuals {
            max_eq_violation,
            min_eigenvalue,
        })
    }

    fn point_coefficients(&self, point: &[DMatrix<f64>]) -> Result<Vec<Vec<f64>>> {
        if point.len() != self.free_count() {
            return Err(Error::DimensionMismatch {
                expected: self.free_count(),
                found: point.len(),
            });
        }
        point
            .iter()
            .map(|m| {
                if m.nrows() != self.n || m.ncols() != self.n {
                    return Err(Error::DimensionMismatch {
                        expected: self.n,
                        found: m.nrows(),
                    });
                }
                check_symmetric(m)?;
                Ok((0..self.n)
                    .map(|i| diagonal_trace(m, i as isize))
                    .collect())
            })
            .collect()
    }

    /// All `k + 1` polynomials of a point, endpoints included.
    pub fn polynomial_view(&self, point: &[DMatrix<f64>]) -> Result<Vec<SymmetricLaurent>> {
        let mut view = Vec::with_capacity(self.k + 1);
        view.push(hermite_kernel(self.n)?);
        for m in point {
            view.push(SymmetricLaurent::from_gram(m)?);
        }
        view.push(SymmetricLaurent::constant(self.n, 1.0)?);
        Ok(view)
    }
}

/// Smallest eigenvalue of a symmetric matrix (`+inf` when empty).
pub fn min_eigenvalue(m: &DMatrix<f64>) -> f64 {
    if m.nrows() == 0 {
        return f64::INFINITY;
    }
    m.clone()
        .symmetric_eigenvalues()
        .iter()
        .copied()
        .fold(f64::INFINITY, f64::min)
}

/// Direct check of the polynomial characterization: agreement at the roots
/// of `z^N = (-1)^t`, unit mean, fixed endpoints and nonnegativity.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PolynomialChecks {
    pub root_mismatch: f64,
    pub normalization_error: f64,
    pub endpoint_error: f64,
    pub min_value: f64,
}

impl PolynomialChecks {
    pub fn passes(&self, tol: f64) -> bool {
        self.root_mismatch <= tol
            && self.normalization_error <= tol
            && self.endpoint_error <= tol
            && self.min_value >= -tol
    }
}

pub fn polynomial_checks(polys: &[SymmetricLaurent]) -> Result<PolynomialChecks> {
    let Some(first) = polys.first() else {
        return Err(Error::InvalidArgument("no polynomials supplied".into()));
    };
    if polys.len() < 2 {
        return Err(Error::InvalidArgument("need at least Q_0 and Q_k".into()));
    }
    let n = first.n();
    if let Some(p) = polys.iter().find(|p| p.n() != n) {
        return Err(Error::DimensionMismatch {
            expected: n,
            found: p.n(),
        });
    }
    let k = polys.len() - 1;
    let mut root_mismatch: f64 = 0.0;
    for t in 1..=k {
        let offset = if t % 2 == 0 { 0.0 } else { 1.0 };
        for m in 0..n {
            let z = Complex64::from_polar(1.0, PI * (2.0 * m as f64 + offset) / n as f64);
            root_mismatch = root_mismatch.max((polys[t].eval(z) - polys[t - 1].eval(z)).norm());
        }
    }
    let normalization_error = polys
        .iter()
        .map(|p| (p.coeffs()[0] - 1.0).abs())
        .fold(0.0, f64::max);
    let endpoint_error = polys[0]
        .max_abs_diff(&hermite_kernel(n)?)
        .max(polys[k].max_abs_diff(&SymmetricLaurent::constant(n, 1.0)?));
    let min_value = polys
        .iter()
        .map(|p| p.min_on_circle(8 * n).1)
        .fold(f64::INFINITY, f64::min);
    Ok(PolynomialChecks {
        root_mismatch,
        normalization_error,
        endpoint_error,
        min_value,
    })
}
