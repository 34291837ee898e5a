//! Statevector simulation of the phase-oracle query model on `Z/2N`.

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fourier::Dft;
use crate::reconstruct::QueryAlgorithm;

/// `g_j` sign vector over `Z/2N`, with `j` taken modulo `2N`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OracleSpec {
    pub n: usize,
    pub j: usize,
    pub g_diag: Vec<f64>,
}

impl OracleSpec {
    /// `g_j(x) = g_0(x - j)` where `g_0` is `+1` on the first half and `-1`
    /// on the second.
    pub fn new(n: usize, j: usize) -> Self {
        let len = 2 * n;
        let j = j % len;
        let g_diag = (0..len)
            .map(|x| if (x + len - j) % len < n { 1.0 } else { -1.0 })
            .collect();
        Self { n, j, g_diag }
    }

    /// Extends `f` on `0..N` to `g(x) = f(x)`, `g(x + N) = -f(x)`.
    pub fn from_f(f: &[f64]) -> Self {
        let n = f.len();
        let g_diag = f.iter().copied().chain(f.iter().map(|v| -v)).collect();
        let j = f.iter().position(|&v| v > 0.0).unwrap_or(n);
        Self { n, j, g_diag }
    }

    pub fn apply(&self, v: &mut [Complex64]) {
        for (c, g) in v.iter_mut().zip(&self.g_diag) {
            *c *= *g;
        }
    }
}

/// `f_j` for the insertion index `j` of a target in a sorted list.
#[derive(Debug, Clone, PartialEq)]
pub struct ComparisonOracle {
    pub j: usize,
    pub f: Vec<f64>,
}

/// Builds `f(x) = +1` if `list[x] >= target`, else `-1`.
pub fn comparison_oracle<T: PartialOrd>(list: &[T], target: &T) -> Result<ComparisonOracle> {
    if list.windows(2).any(|w| !(w[0] <= w[1])) {
        return Err(Error::Unsorted);
    }
    let f: Vec<f64> = list
        .iter()
        .map(|v| if v >= target { 1.0 } else { -1.0 })
        .collect();
    let j = f.iter().position(|&v| v > 0.0).unwrap_or(list.len());
    Ok(ComparisonOracle { j, f })
}

impl ComparisonOracle {
    pub fn query(&self, x: usize) -> f64 {
        self.f[x]
    }

    /// The `g` wrapper over `Z/2N`.
    pub fn g(&self) -> OracleSpec {
        OracleSpec::from_f(&self.f)
    }
}

/// Cyclic shift `T^s`: `(T^s v)(x) = v(x - s)`.
pub fn translate(v: &[Complex64], s: usize) -> Vec<Complex64> {
    let len = v.len();
    (0..len).map(|x| v[(x + len - s % len) % len]).collect()
}

/// `U_k G ... U_1 G psi_0` for an arbitrary sign oracle.
pub fn run_with_oracle(algo: &QueryAlgorithm, dft: &Dft, oracle: &OracleSpec) -> Vec<Complex64> {
    let mut state = algo.states[0].clone();
    for t in 1..=algo.k {
        oracle.apply(&mut state);
        state = algo.apply_unitary(dft, t, &state);
    }
    state
}

/// Final state for target `j`.
pub fn run(algo: &QueryAlgorithm, j: usize) -> Result<Vec<Complex64>> {
    if j >= algo.n {
        return Err(Error::IndexOutOfRange {
            index: j,
            max: algo.n - 1,
        });
    }
    Ok(run_with_oracle(algo, &Dft::new(2 * algo.n), &OracleSpec::new(algo.n, j)))
}

/// Gram matrix of final states over all targets and derived exactness data.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SimulationReport {
    pub n: usize,
    pub k: usize,
    pub tol: f64,
    /// Row-major `N x N`.
    pub gram: Vec<Vec<Complex64>>,
    pub max_offdiag: f64,
    /// Smallest `<phi_j|phi_j>`.
    pub min_diag: f64,
    pub exact: bool,
    /// `|<(|j> + (-1)^k |j+N>)/sqrt(2) | phi_j>|^2` per target.
    pub success: Vec<f64>,
    pub min_success: f64,
    pub max_norm_error: f64,
}

pub fn exactness_report(algo: &QueryAlgorithm, tol: f64) -> SimulationReport {
    let n = algo.n;
    let dft = Dft::new(2 * n);
    let finals: Vec<Vec<Complex64>> = (0..n)
        .into_par_iter()
        .map(|j| run_with_oracle(algo, &dft, &OracleSpec::new(n, j)))
        .collect();
    let gram: Vec<Vec<Complex64>> = (0..n)
        .into_par_iter()
        .map(|a| (0..n).map(|b| inner(&finals[a], &finals[b])).collect())
        .collect();
    let mut max_offdiag = 0.0f64;
    let mut min_diag = f64::INFINITY;
    for (a, row) in gram.iter().enumerate() {
        for (b, g) in row.iter().enumerate() {
            if a == b {
                min_diag = min_diag.min(g.re);
            } else {
                max_offdiag = max_offdiag.max(g.norm());
            }
        }
    }
    let sign = if algo.k % 2 == 0 { 1.0 } else { -1.0 };
    let success: Vec<f64> = finals
        .iter()
        .enumerate()
        .map(|(j, phi)| outcome_probability(phi, n, j, sign))
        .collect();
    let max_norm_error = gram
        .iter()
        .enumerate()
        .map(|(j, row)| (row[j].re.sqrt() - 1.0).abs())
        .fold(0.0, f64::max);
    SimulationReport {
        n,
        k: algo.k,
        tol,
        gram,
        max_offdiag,
        min_diag,
        exact: max_offdiag <= tol && min_diag >= 1.0 - tol,
        min_success: success.iter().copied().fold(f64::INFINITY, f64::min),
        success,
        max_norm_error,
    }
}

fn inner(a: &[Complex64], b: &[Complex64]) -> Complex64 {
    a.iter().zip(b).map(|(x, y)| x.conj() * y).sum()
}

fn outcome_probability(phi: &[Complex64], n: usize, b: usize, sign: f64) -> f64 {
    ((phi[b] + phi[b + n] * sign) * std::f64::consts::FRAC_1_SQRT_2).norm_sqr()
}

/// Result of a recursive search.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct SearchResult {
    pub index: usize,
    pub queries_used: usize,
}

/// Composes an exact base algorithm into a search over lists of any size.
pub struct RecursiveSearcher<'a> {
    base: &'a QueryAlgorithm,
    dft: Dft,
    tol: f64,
}

impl<'a> RecursiveSearcher<'a> {
    pub fn new(base: &'a QueryAlgorithm, tol: f64) -> Result<Self> {
        let report = exactness_report(base, tol);
        if !report.exact {
            return Err(Error::InexactBase {
                max_offdiag: report.max_offdiag,
                min_diag: report.min_diag,
            });
        }
        Ok(Self {
            base,
            dft: Dft::new(2 * base.n),
            tol,
        })
    }

    /// Number of levels `ceil(log_{N*} m)`.
    pub fn levels(&self, m: usize) -> usize {
        let mut levels = 0;
        let mut span = 1usize;
        while span < m {
            span = span.saturating_mul(self.base.n);
            levels += 1;
        }
        levels
    }

    /// Insertion index of `target`, which must not exceed the last element.
    pub fn search<T: PartialOrd>(&self, list: &[T], target: &T) -> Result<SearchResult> {
        let m = list.len();
        if m == 0 {
            return Err(Error::InvalidArgument("empty list".into()));
        }
        if list.windows(2).any(|w| !(w[0] <= w[1])) {
            return Err(Error::Unsorted);
        }
        if !(list[m - 1] >= *target) {
            return Err(Error::PromiseViolated);
        }
        let nb = self.base.n;
        if m > 1 && nb < 2 {
            return Err(Error::InvalidArgument(
                "base algorithm must distinguish at least two sublists".into(),
            ));
        }
        let levels = self.levels(m);
        let mut size = nb.pow(levels as u32) / nb.max(1);
        let mut lo = 0usize;
        let mut queries = 0usize;
        let sign = if self.base.k % 2 == 0 { 1.0 } else { -1.0 };
        for _ in 0..levels {
            // representatives past the end behave like +infinity
            let f: Vec<f64> = (0..nb)
                .map(|b| {
                    let rep = lo + (b + 1) * size - 1;
                    if rep >= m || list[rep] >= *target {
                        1.0
                    } else {
                        -1.0
                    }
                })
                .collect();
            let phi = run_with_oracle(self.base, &self.dft, &OracleSpec::from_f(&f));
            queries += self.base.k;
            let (best, p) = (0..nb)
                .map(|b| (b, outcome_probability(&phi, nb, b, sign)))
                .fold((0, f64::NEG_INFINITY), |acc, x| if x.1 > acc.1 { x } else { acc });
            if p <= 1.0 - 10.0 * self.tol {
                return Err(Error::AmbiguousMeasurement(p));
            }
            lo += best * size;
            size /= nb;
        }
        Ok(SearchResult {
            index: lo,
            queries_used: queries,
        })
    }
}

/// One-shot form of [`RecursiveSearcher::search`].
pub fn recursive_search<T: PartialOrd>(
    list: &[T],
    target: &T,
    base: &QueryAlgorithm,
    tol: f64,
) -> Result<SearchResult> {
    if list.len() == 1 {
        return RecursiveSearcher {
            base,
            dft: Dft::new(2 * base.n),
            tol,
        }
        .search(list, target);
    }
    RecursiveSearcher::new(base, tol)?.search(list, target)
}
