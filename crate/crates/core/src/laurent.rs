//! Real symmetric Laurent polynomials.
//!
//! A polynomial of degree bound `n - 1` is stored by its non-negative half
//! `q_0..q_{n-1}`; the coefficient of `z^{-i}` equals that of `z^i`. On the
//! unit circle such a polynomial is the cosine series
//! `q_0 + 2 * sum_i q_i cos(i * theta)`.

use std::f64::consts::PI;

use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Relative asymmetry accepted by [`SymmetricLaurent::from_gram`].
pub const SYMMETRY_TOL: f64 = 1e-12;

/// Real symmetric Laurent polynomial `sum_{|i| < n} q_{|i|} z^i`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawLaurent")]
pub struct SymmetricLaurent {
    n: usize,
    coeffs: Vec<f64>,
}

#[derive(Deserialize)]
struct RawLaurent {
    n: usize,
    coeffs: Vec<f64>,
}

impl TryFrom<RawLaurent> for SymmetricLaurent {
    type Error = Error;

    fn try_from(raw: RawLaurent) -> Result<Self> {
        if raw.coeffs.len() != raw.n {
            return Err(Error::DimensionMismatch {
                expected: raw.n,
                found: raw.coeffs.len(),
            });
        }
        SymmetricLaurent::new(raw.coeffs)
    }
}

impl SymmetricLaurent {
    /// Builds a polynomial from `q_0..q_{n-1}`.
    pub fn new(coeffs: Vec<f64>) -> Result<Self> {
        if coeffs.is_empty() {
            return Err(Error::InvalidArgument(
                "a Laurent polynomial needs at least one coefficient".into(),
            ));
        }
        if let Some(bad) = coeffs.iter().find(|c| !c.is_finite()) {
            return Err(Error::InvalidArgument(format!(
                "non-finite coefficient {bad}"
            )));
        }
        Ok(Self {
            n: coeffs.len(),
            coeffs,
        })
    }

    /// The constant polynomial `c` with degree bound `n - 1`.
    pub fn constant(n: usize, c: f64) -> Result<Self> {
        if n == 0 {
            return Err(Error::InvalidArgument("degree bound n must be >= 1".into()));
        }
        let mut coeffs = vec![0.0; n];
        coeffs[0] = c;
        Self::new(coeffs)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn coeffs(&self) -> &[f64] {
        &self.coeffs
    }

    /// Coefficient of `z^i` for any signed `i`; zero outside the support.
    pub fn coeff(&self, i: isize) -> f64 {
        self.coeffs
            .get(i.unsigned_abs())
            .copied()
            .unwrap_or(0.0)
    }

    /// Value on the unit circle at angle `theta`.
    pub fn eval_unit_circle(&self, theta: f64) -> f64 {
        let tail: f64 = self
            .coeffs
            .iter()
            .enumerate()
            .skip(1)
            .map(|(i, q)| q * (i as f64 * theta).cos())
            .sum();
        self.coeffs[0] + 2.0 * tail
    }

    /// Value at an arbitrary complex point, including negative powers.
    pub fn eval(&self, z: Complex64) -> Complex64 {
        let inv = z.inv();
        let mut acc = Complex64::new(self.coeffs[0], 0.0);
        let (mut zp, mut zm) = (z, inv);
        for &q in &self.coeffs[1..] {
            acc += (zp + zm) * q;
            zp *= z;
            zm *= inv;
        }
        acc
    }

    /// Extracts `q_i = Tr_i Q` from a real symmetric Gram matrix.
    pub fn from_gram(q: &DMatrix<f64>) -> Result<Self> {
        check_symmetric(q)?;
        let n = q.nrows();
        let coeffs = (0..n).map(|i| diagonal_trace(q, i as isize)).collect();
        Self::new(coeffs)
    }

    /// Locates the minimum on the unit circle by dense sampling followed by
    /// ternary refinement around the best sample. Returns `(theta, value)`.
    pub fn min_on_circle(&self, grid: usize) -> (f64, f64) {
        let grid = grid.max(4 * self.n);
        let step = 2.0 * PI / grid as f64;
        let (best, _) = (0..grid)
            .map(|g| (g, self.eval_unit_circle(g as f64 * step)))
            .fold((0, f64::INFINITY), |acc, (g, v)| if v < acc.1 { (g, v) } else { acc });

        let center = best as f64 * step;
        let (mut lo, mut hi) = (center - step, center + step);
        for _ in 0..100 {
            let m1 = lo + (hi - lo) / 3.0;
            let m2 = hi - (hi - lo) / 3.0;
            if self.eval_unit_circle(m1) <= self.eval_unit_circle(m2) {
                hi = m2;
            } else {
                lo = m1;
            }
        }
        let refined = 0.5 * (lo + hi);
        let (theta, value) = [(center, self.eval_unit_circle(center)), (refined, self.eval_unit_circle(refined))]
            .into_iter()
            .fold((center, f64::INFINITY), |acc, (t, v)| if v < acc.1 { (t, v) } else { acc });
        (theta.rem_euclid(2.0 * PI), value)
    }

    /// Spectral factorization `Q(z) = P(z) * conj(P(1/conj(z)))`.
    ///
    /// Roots of `z^{d} Q(z)` come in reciprocal-conjugate pairs. One root
    /// of each pair inside the disk is kept; roots within `sqrt(tol)` of the
    /// circle are matched into double roots and placed on the circle.
    pub fn spectral_factorize(&self, tol: f64) -> Result<SpectralFactor> {
        let scale = 1.0 + self.max_abs();
        let bound = tol * scale;
        if self.coeffs.iter().all(|&c| c == 0.0) {
            return Err(Error::FactorizationFailed(
                "polynomial is identically zero".into(),
            ));
        }
        let (_, min) = self.min_on_circle(8 * self.n);
        if min < -bound {
            return Err(Error::FactorizationFailed(format!(
                "polynomial is negative on the unit circle (min {min:e})"
            )));
        }

        let threshold = 1e-14 * scale;
        let degree = self
            .coeffs
            .iter()
            .rposition(|c| c.abs() > threshold)
            .unwrap_or(0);

        let roots = if degree == 0 {
            Vec::new()
        } else {
            select_half_roots(&self.coeffs[..=degree], degree, tol)?
        };

        let monic = poly_from_roots(&roots);
        let energy: f64 = monic.iter().map(|c| c.norm_sqr()).sum();
        if self.coeffs[0] <= 0.0 || energy <= 0.0 {
            return Err(Error::FactorizationFailed(format!(
                "non-positive constant term {}",
                self.coeffs[0]
            )));
        }
        let gain = (self.coeffs[0] / energy).sqrt();

        let mut coeffs = vec![Complex64::new(0.0, 0.0); self.n];
        for (dst, c) in coeffs.iter_mut().zip(&monic) {
            *dst = c * gain;
        }
        let mut residual = roundtrip_residual(&coeffs, &self.coeffs);
        if residual > POLISH_FRACTION * bound {
            residual = polish_factor(&mut coeffs, &self.coeffs, POLISH_FRACTION * bound, residual);
        }
        fix_global_phase(&mut coeffs);
        if residual > bound {
            return Err(Error::FactorizationFailed(format!(
                "roundtrip residual {residual:e} exceeds {bound:e}"
            )));
        }
        Ok(SpectralFactor { coeffs, residual })
    }

    /// Largest coefficient magnitude.
    pub fn max_abs(&self) -> f64 {
        self.coeffs.iter().fold(0.0, |m, c| f64::max(m, c.abs()))
    }

    /// Largest coefficientwise difference to another polynomial (shorter
    /// operands are zero-extended).
    pub fn max_abs_diff(&self, other: &SymmetricLaurent) -> f64 {
        let len = self.n.max(other.n);
        (0..len as isize)
            .map(|i| (self.coeff(i) - other.coeff(i)).abs())
            .fold(0.0, f64::max)
    }
}

/// Hermite kernel `H_n` with coefficients `1 - i/n`.
pub fn hermite_kernel(n: usize) -> Result<SymmetricLaurent> {
    if n == 0 {
        return Err(Error::InvalidArgument("Hermite kernel needs n >= 1".into()));
    }
    let nf = n as f64;
    SymmetricLaurent::new((0..n).map(|i| 1.0 - i as f64 / nf).collect())
}

/// Polynomial `P(z) = sum_i p_i z^i` whose squared magnitude on the unit
/// circle reproduces a nonnegative [`SymmetricLaurent`].
#[derive(Debug, Clone, PartialEq)]
pub struct SpectralFactor {
    pub coeffs: Vec<Complex64>,
    /// Max coefficient mismatch of the roundtrip product.
    pub residual: f64,
}

impl SpectralFactor {
    /// `P(z) * conj(P(1/conj(z)))` as a symmetric polynomial (real parts).
    pub fn multiply_out(&self) -> Result<SymmetricLaurent> {
        SymmetricLaurent::new(autocorrelation(&self.coeffs).iter().map(|c| c.re).collect())
    }
}

/// Trace along the `i`-th superdiagonal (`i >= 0`) or `|i|`-th subdiagonal.
pub fn diagonal_trace(x: &DMatrix<f64>, i: isize) -> f64 {
    let n = x.nrows().min(x.ncols()) as isize;
    if i.abs() >= n {
        return 0.0;
    }
    if i >= 0 {
        (0..n - i).map(|l| x[(l as usize, (l + i) as usize)]).sum()
    } else {
        (0..n + i).map(|l| x[((l - i) as usize, l as usize)]).sum()
    }
}

pub(crate) fn check_symmetric(q: &DMatrix<f64>) -> Result<()> {
    if q.nrows() != q.ncols() {
        return Err(Error::NotSquare {
            rows: q.nrows(),
            cols: q.ncols(),
        });
    }
    let scale = q.iter().fold(1.0, |m: f64, v| m.max(v.abs()));
    let asym = (0..q.nrows())
        .flat_map(|r| (0..r).map(move |c| (r, c)))
        .map(|(r, c)| (q[(r, c)] - q[(c, r)]).abs())
        .fold(0.0, f64::max);
    if asym > SYMMETRY_TOL * scale {
        return Err(Error::Asymmetric(asym));
    }
    Ok(())
}

/// `c_i = sum_b p_{b+i} conj(p_b)` for `i = 0..len`.
pub(crate) fn autocorrelation(p: &[Complex64]) -> Vec<Complex64> {
    (0..p.len())
        .map(|i| (0..p.len() - i).map(|b| p[b + i] * p[b].conj()).sum())
        .collect()
}

/// Polishing stops once the residual is this fraction of the tolerance.
const POLISH_FRACTION: f64 = 1e-2;
const POLISH_STEPS: usize = 50;

fn roundtrip_residual(p: &[Complex64], q: &[f64]) -> f64 {
    autocorrelation(p)
        .iter()
        .zip(q)
        .map(|(c, q)| (c - q).norm())
        .fold(0.0, f64::max)
}

/// Levenberg-Marquardt on `autocorrelation(p) = q` over the real and
/// imaginary parts of `p`. Root-based factors lose accuracy when roots
/// cluster; a few steps from that start restore it. Returns the residual.
fn polish_factor(p: &mut [Complex64], q: &[f64], target: f64, mut residual: f64) -> f64 {
    let n = p.len();
    let mut lambda = 1e-10;
    for _ in 0..POLISH_STEPS {
        if residual <= target {
            break;
        }
        let c = autocorrelation(p);
        // rows: Re c_0..c_{n-1}, then Im c_1..c_{n-1}; columns: Re p, Im p
        let rows = 2 * n - 1;
        let mut jac = DMatrix::<f64>::zeros(rows, 2 * n);
        let mut f = nalgebra::DVector::<f64>::zeros(rows);
        for i in 0..n {
            f[i] = c[i].re - q[i];
            if i > 0 {
                f[n + i - 1] = c[i].im;
            }
            for m in 0..n {
                let mut d_re = Complex64::new(0.0, 0.0);
                let mut d_im = Complex64::new(0.0, 0.0);
                if m >= i {
                    d_re += p[m - i].conj();
                    d_im += Complex64::i() * p[m - i].conj();
                }
                if m + i < n {
                    d_re += p[m + i];
                    d_im -= Complex64::i() * p[m + i];
                }
                jac[(i, m)] = d_re.re;
                jac[(i, n + m)] = d_im.re;
                if i > 0 {
                    jac[(n + i - 1, m)] = d_re.im;
                    jac[(n + i - 1, n + m)] = d_im.im;
                }
            }
        }
        let jt = jac.transpose();
        let normal = &jt * &jac;
        let rhs = -(&jt * &f);
        let scale = normal.diagonal().max().max(1e-300);
        let mut improved = false;
        for _ in 0..6 {
            let mut damped = normal.clone();
            for d in 0..2 * n {
                damped[(d, d)] += lambda * scale;
            }
            let Some(chol) = damped.cholesky() else {
                lambda *= 100.0;
                continue;
            };
            let step = chol.solve(&rhs);
            let trial: Vec<Complex64> = (0..n)
                .map(|m| p[m] + Complex64::new(step[m], step[n + m]))
                .collect();
            let r = roundtrip_residual(&trial, q);
            if r < residual {
                p.copy_from_slice(&trial);
                residual = r;
                lambda = (lambda * 0.1).max(1e-14);
                improved = true;
                break;
            }
            lambda *= 100.0;
        }
        if !improved {
            break;
        }
    }
    residual
}

fn fix_global_phase(p: &mut [Complex64]) {
    let Some(lead) = p
        .iter()
        .copied()
        .max_by(|a, b| a.norm().total_cmp(&b.norm()))
    else {
        return;
    };
    if lead.norm() == 0.0 {
        return;
    }
    let rot = lead.conj() / lead.norm();
    for c in p.iter_mut() {
        *c *= rot;
    }
    // the leading entry is real by construction; drop rounding noise
    if let Some(c) = p.iter_mut().max_by(|a, b| a.norm().total_cmp(&b.norm())) {
        c.im = 0.0;
    }
}

/// Roots of `z^d Q(z)`, reduced to the `d` roots defining a spectral factor.
fn select_half_roots(half: &[f64], degree: usize, tol: f64) -> Result<Vec<Complex64>> {
    // palindromic coefficients c_j = q_{|j - d|}, j = 0..=2d
    let full: Vec<f64> = (0..=2 * degree)
        .map(|j| half[(j as isize - degree as isize).unsigned_abs()])
        .collect();
    let roots = polynomial_roots(&full);

    let band = tol.sqrt().clamp(1e-7, 1e-2);
    let mut chosen = Vec::with_capacity(degree);
    let mut near = Vec::new();
    for r in roots {
        let radius = r.norm();
        if radius < 1.0 - band {
            chosen.push(r);
        } else if radius <= 1.0 + band {
            near.push(r);
        }
    }
    if near.len() % 2 != 0 {
        return Err(Error::FactorizationFailed(format!(
            "{} roots near the unit circle cannot be paired",
            near.len()
        )));
    }
    while let Some(r) = near.pop() {
        let (idx, _) = near
            .iter()
            .enumerate()
            .map(|(i, s)| (i, (s - r).norm()))
            .min_by(|a, b| a.1.total_cmp(&b.1))
            .expect("even count guarantees a partner");
        let partner = near.swap_remove(idx);
        let mid = (r + partner) * 0.5;
        if (r - partner).norm() > 4.0 * band || mid.norm() == 0.0 {
            return Err(Error::FactorizationFailed(format!(
                "unit-circle root {r} has no double partner"
            )));
        }
        chosen.push(mid / mid.norm());
    }
    if chosen.len() != degree {
        return Err(Error::FactorizationFailed(format!(
            "selected {} roots, expected {degree}",
            chosen.len()
        )));
    }
    Ok(chosen)
}

/// All complex roots of `sum_j c_j z^j` (`c_last != 0`) via companion-matrix
/// eigenvalues, polished by a few guarded Newton steps.
pub(crate) fn polynomial_roots(c: &[f64]) -> Vec<Complex64> {
    let deg = c.len() - 1;
    if deg == 0 {
        return Vec::new();
    }
    let lead = c[deg];
    let mut comp = DMatrix::<f64>::zeros(deg, deg);
    for j in 0..deg {
        comp[(0, j)] = -c[deg - 1 - j] / lead;
    }
    for i in 1..deg {
        comp[(i, i - 1)] = 1.0;
    }
    let eig = comp.complex_eigenvalues();
    eig.iter()
        .map(|&z0| {
            let mut z = z0;
            let mut fz = horner(c, z).0.norm();
            for _ in 0..4 {
                let (f, df) = horner(c, z);
                if df.norm() == 0.0 {
                    break;
                }
                let cand = z - f / df;
                let fc = horner(c, cand).0.norm();
                if fc < fz {
                    z = cand;
                    fz = fc;
                } else {
                    break;
                }
            }
            z
        })
        .collect()
}

fn horner(c: &[f64], z: Complex64) -> (Complex64, Complex64) {
    let mut f = Complex64::new(0.0, 0.0);
    let mut df = Complex64::new(0.0, 0.0);
    for &coef in c.iter().rev() {
        df = df * z + f;
        f = f * z + coef;
    }
    (f, df)
}

/// Monic coefficients of `prod (z - r)` by sampling on the unit circle and
/// inverting the DFT; avoids the cancellation of sequential expansion.
fn poly_from_roots(roots: &[Complex64]) -> Vec<Complex64> {
    let len = roots.len() + 1;
    let samples: Vec<Complex64> = (0..len)
        .map(|s| {
            let w = Complex64::from_polar(1.0, 2.0 * PI * s as f64 / len as f64);
            roots.iter().map(|r| w - r).product()
        })
        .collect();
    // coefficient a_i = (1/len) sum_s P(w_s) w_s^{-i}
    let mut coeffs: Vec<Complex64> = (0..len)
        .map(|i| {
            samples
                .iter()
                .enumerate()
                .map(|(s, v)| {
                    let phase = -2.0 * PI * ((i * s) % len) as f64 / len as f64;
                    v * Complex64::from_polar(1.0, phase)
                })
                .sum::<Complex64>()
                / len as f64
        })
        .collect();
    coeffs[len - 1] = Complex64::new(1.0, 0.0);
    coeffs
}
