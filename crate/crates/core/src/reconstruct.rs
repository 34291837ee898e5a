//! From polynomials to an explicit query algorithm.
//!
//! For target `j = 0` the state after `t` queries lives in the
//! `(-1)^t` eigenspace of `T^N`, so its second half is the first half times
//! `(-1)^t`. The first half is a spectral factor of `Q_t` scaled by
//! `1/sqrt(2)`. Each `U_t` is diagonal in the Fourier basis of `Z/2N` and
//! maps `G_0 psi_{t-1}` to `psi_t`.

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fourier::Dft;
use crate::laurent::SymmetricLaurent;
use crate::solver::FeasiblePoint;

/// Default tolerance for factorization roundtrips and magnitude matching.
pub const RECONSTRUCT_TOL: f64 = 1e-8;

/// A `k`-query translation-invariant algorithm on `Z/2N`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawAlgorithm")]
pub struct QueryAlgorithm {
    pub n: usize,
    pub k: usize,
    /// `psi_0..psi_k` for target `0`, each of length `2N`.
    pub states: Vec<Vec<Complex64>>,
    /// Fourier phases of `U_1..U_k`, each of length `2N`.
    pub phases: Vec<Vec<f64>>,
}

#[derive(Deserialize)]
struct RawAlgorithm {
    n: usize,
    k: usize,
    states: Vec<Vec<Complex64>>,
    phases: Vec<Vec<f64>>,
}

impl TryFrom<RawAlgorithm> for QueryAlgorithm {
    type Error = Error;

    fn try_from(raw: RawAlgorithm) -> Result<Self> {
        QueryAlgorithm::new(raw.n, raw.k, raw.states, raw.phases)
    }
}

impl QueryAlgorithm {
    /// Checks shapes and finiteness.
    pub fn new(
        n: usize,
        k: usize,
        states: Vec<Vec<Complex64>>,
        phases: Vec<Vec<f64>>,
    ) -> Result<Self> {
        if n == 0 || k == 0 {
            return Err(Error::Schema("n and k must be positive".into()));
        }
        if states.len() != k + 1 || phases.len() != k {
            return Err(Error::Schema(format!(
                "expected {} states and {k} phase lists, found {} and {}",
                k + 1,
                states.len(),
                phases.len()
            )));
        }
        if let Some(s) = states.iter().find(|s| s.len() != 2 * n) {
            return Err(Error::Schema(format!(
                "state of length {} (expected {})",
                s.len(),
                2 * n
            )));
        }
        if let Some(p) = phases.iter().find(|p| p.len() != 2 * n) {
            return Err(Error::Schema(format!(
                "phase list of length {} (expected {})",
                p.len(),
                2 * n
            )));
        }
        let finite = states.iter().flatten().all(|c| c.re.is_finite() && c.im.is_finite())
            && phases.iter().flatten().all(|p| p.is_finite());
        if !finite {
            return Err(Error::Schema("non-finite amplitude or phase".into()));
        }
        Ok(Self {
            n,
            k,
            states,
            phases,
        })
    }

    /// Applies `U_t` (1-based) to a state.
    pub fn apply_unitary(&self, dft: &Dft, t: usize, v: &[Complex64]) -> Vec<Complex64> {
        let mut spec = dft.forward(v);
        for (c, &theta) in spec.iter_mut().zip(&self.phases[t - 1]) {
            *c *= Complex64::from_polar(1.0, theta);
        }
        dft.inverse(&spec)
    }
}

/// Uniform state over `Z/2N`.
pub fn uniform_state(n: usize) -> Vec<Complex64> {
    vec![Complex64::new(1.0 / ((2 * n) as f64).sqrt(), 0.0); 2 * n]
}

/// `(|0> + (-1)^t |N>) / sqrt(2)`.
pub fn final_state(n: usize, t: usize) -> Vec<Complex64> {
    let mut v = vec![Complex64::new(0.0, 0.0); 2 * n];
    let a = std::f64::consts::FRAC_1_SQRT_2;
    v[0] = Complex64::new(a, 0.0);
    v[n] += Complex64::new(if t % 2 == 0 { a } else { -a }, 0.0);
    v
}

/// `2 sum_{a=i}^{N-1} conj(psi(a)) psi(a-i)` for `i = 0..N`.
pub fn state_autocorrelation(psi: &[Complex64], n: usize) -> Vec<Complex64> {
    (0..n)
        .map(|i| {
            (i..n)
                .map(|a| psi[a].conj() * psi[a - i])
                .sum::<Complex64>()
                * 2.0
        })
        .collect()
}

/// State after `t` queries whose autocorrelation is `q`.
pub fn state_from_polynomial(
    q: &SymmetricLaurent,
    t: usize,
    n: usize,
    tol: f64,
) -> Result<Vec<Complex64>> {
    if q.n() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            found: q.n(),
        });
    }
    let factor = q.spectral_factorize(tol)?;
    let sign = if t % 2 == 0 { 1.0 } else { -1.0 };
    let scale = std::f64::consts::FRAC_1_SQRT_2;
    let mut psi = vec![Complex64::new(0.0, 0.0); 2 * n];
    for (x, p) in factor.coeffs.iter().enumerate() {
        psi[x] = p * scale;
        psi[x + n] = p * (scale * sign);
    }
    let bound = tol * (1.0 + q.max_abs());
    let residual = state_autocorrelation(&psi, n)
        .iter()
        .zip(q.coeffs())
        .map(|(c, &qi)| (c - qi).norm())
        .fold(0.0, f64::max);
    if residual > bound {
        return Err(Error::ReconstructionMismatch {
            residual,
            tol: bound,
        });
    }
    Ok(psi)
}

/// Fourier phases of the translation-invariant unitary taking `prev` to `next`.
///
/// Components where both magnitudes are below `tol` get phase `0`;
/// magnitudes differing by more than `tol` admit no such unitary.
pub fn build_phases(prev: &[Complex64], next: &[Complex64], tol: f64) -> Result<Vec<f64>> {
    if prev.len() != next.len() {
        return Err(Error::DimensionMismatch {
            expected: prev.len(),
            found: next.len(),
        });
    }
    let dft = Dft::new(prev.len());
    let a = dft.forward(prev);
    let b = dft.forward(next);
    a.iter()
        .zip(&b)
        .enumerate()
        .map(|(freq, (a, b))| {
            let (ma, mb) = (a.norm(), b.norm());
            if (ma - mb).abs() > tol {
                return Err(Error::MagnitudeMismatch {
                    freq,
                    prev: ma,
                    next: mb,
                });
            }
            if ma < tol && mb < tol {
                return Ok(0.0);
            }
            Ok(wrap_phase(b.arg() - a.arg()))
        })
        .collect()
}

/// Maps an angle into `(-pi, pi]`.
pub fn wrap_phase(theta: f64) -> f64 {
    let mut t = theta.rem_euclid(2.0 * PI);
    if t > PI {
        t -= 2.0 * PI;
    }
    t
}

/// `G_0`: identity on the first half, sign flip on the second.
pub fn apply_g0(v: &[Complex64]) -> Vec<Complex64> {
    let n = v.len() / 2;
    v.iter()
        .enumerate()
        .map(|(x, &c)| if x < n { c } else { -c })
        .collect()
}

/// Builds the algorithm encoded by a feasible point.
pub fn reconstruct_algorithm(fp: &FeasiblePoint) -> Result<QueryAlgorithm> {
    reconstruct_with(fp, RECONSTRUCT_TOL)
}

pub fn reconstruct_with(fp: &FeasiblePoint, tol: f64) -> Result<QueryAlgorithm> {
    let (n, k) = (fp.n, fp.k);
    if fp.polynomial_view.len() != k + 1 {
        return Err(Error::DimensionMismatch {
            expected: k + 1,
            found: fp.polynomial_view.len(),
        });
    }
    let mut states = Vec::with_capacity(k + 1);
    states.push(uniform_state(n));
    for t in 1..k {
        let psi = state_from_polynomial(&fp.polynomial_view[t], t, n, tol)
            .map_err(|e| Error::at_query(t, e))?;
        states.push(psi);
    }
    states.push(final_state(n, k));
    let phases = (1..=k)
        .map(|t| build_phases(&apply_g0(&states[t - 1]), &states[t], tol).map_err(|e| Error::at_query(t, e)))
        .collect::<Result<Vec<_>>>()?;
    QueryAlgorithm::new(n, k, states, phases)
}
