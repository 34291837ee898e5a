//! Feasibility decisions for `S(k, N)`.
//!
//! `solve_feasibility` runs a phase-I interior-point method on the reduced
//! instance and returns a feasible point, a Farkas certificate, or
//! diagnostics. Both positive outcomes are re-checked against the full
//! instance by code that shares nothing with the solver beyond the row list.

mod ipm;
mod operators;

use std::collections::BTreeMap;

use nalgebra::{Cholesky, DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::laurent::{diagonal_trace, SymmetricLaurent};
use crate::sdp_model::{
    min_eigenvalue, polynomial_checks, reduce, build_instance, PolynomialChecks, RowKind,
    SdpInstance,
};
use ipm::{block_min_eig, Iterate, Origin, PhaseOne, Progress};
use operators::{toeplitz, RowSet};

/// Primal residual below which an iterate is worth rounding.
const CANDIDATE_PINF: f64 = 1e-6;
/// Relative gap at which the witness is taken as final.
const SETTLED_GAP: f64 = 1e-8;

/// Tolerances and limits of one solve.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct SolverOptions {
    /// Largest accepted equality violation of a feasible point.
    pub feas_tol: f64,
    /// Largest accepted negative eigenvalue of a feasible point; also the
    /// phase-I margin a point must exceed.
    pub psd_tol: f64,
    /// Slack PSD tolerance of a certificate, relative to `|y|`.
    pub cert_tol: f64,
    /// Smallest accepted gap `b.y / |y|` of a certificate.
    pub cert_gap: f64,
    pub max_iters: usize,
    /// Relative residual and gap at which the interior-point iteration stops.
    pub ipm_tol: f64,
}

impl Default for SolverOptions {
    fn default() -> Self {
        Self {
            feas_tol: 1e-8,
            psd_tol: 1e-9,
            cert_tol: 1e-8,
            cert_gap: 1e-6,
            max_iters: 200,
            ipm_tol: 1e-10,
        }
    }
}

/// Gram matrices `Q_1..Q_{k-1}` solving `S(k, N)`.
#[derive(Debug, Clone, PartialEq)]
pub struct FeasiblePoint {
    pub k: usize,
    pub n: usize,
    pub matrices: Vec<DMatrix<f64>>,
    pub eq_violation: f64,
    pub min_eig: f64,
    /// `H_N, Q_1(z), .., Q_{k-1}(z), 1`.
    pub polynomial_view: Vec<SymmetricLaurent>,
    /// Phase-I margin `-s*` reached by the solver (0 when not solved).
    pub margin: f64,
    /// Whether the affine projection was kept.
    pub rounded: bool,
}

/// Equality multipliers refuting feasibility.
#[derive(Debug, Clone, PartialEq)]
pub struct InfeasibilityCertificate {
    pub k: usize,
    pub n: usize,
    /// One multiplier per row of the instance.
    pub y: Vec<f64>,
    /// `S_t = -(A^* y)_t` for each free matrix.
    pub slack_blocks: Vec<DMatrix<f64>>,
    /// `b . y`.
    pub gap: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CertificateCheck {
    pub ok: bool,
    /// Smallest eigenvalue over the recomputed slack matrices.
    pub min_slack_eig: f64,
    /// `b . y / |y|`.
    pub gap_ratio: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PointCheck {
    pub ok: bool,
    pub eq_violation: f64,
    pub min_eig: f64,
    pub polynomials: PolynomialChecks,
}

/// State of the iteration when no verdict could be verified.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Diagnostics {
    pub k: usize,
    pub n: usize,
    pub iterations: usize,
    pub primal_infeasibility: f64,
    pub dual_infeasibility: f64,
    pub relative_gap: f64,
    /// Current estimate of the phase-I value `s`.
    pub phase_value: f64,
    /// Dual lower bound on `s`.
    pub dual_bound: f64,
    pub step_primal: f64,
    pub step_dual: f64,
    pub reason: String,
}

#[derive(Debug, Clone, PartialEq)]
pub enum SolveOutcome {
    Feasible(FeasiblePoint),
    Infeasible(InfeasibilityCertificate),
    Indeterminate(Diagnostics),
}

impl SolveOutcome {
    pub fn is_feasible(&self) -> bool {
        matches!(self, SolveOutcome::Feasible(_))
    }

    pub fn is_infeasible(&self) -> bool {
        matches!(self, SolveOutcome::Infeasible(_))
    }

    pub fn exit_code(&self) -> i32 {
        match self {
            SolveOutcome::Feasible(_) => 0,
            SolveOutcome::Infeasible(_) => 1,
            SolveOutcome::Indeterminate(_) => 2,
        }
    }
}

/// Decides `S(k, N)`.
pub fn solve_feasibility(inst: &SdpInstance, opts: &SolverOptions) -> Result<SolveOutcome> {
    validate_options(opts)?;
    let (k, n) = (inst.k(), inst.n());
    if k == 1 {
        return Ok(solve_constant(inst, opts));
    }
    if n == 1 {
        let matrices = vec![DMatrix::from_element(1, 1, 1.0); k - 1];
        return finish_point(inst, matrices, 0.0, false, opts)
            .map(SolveOutcome::Feasible)
            .ok_or_else(|| Error::InvalidArgument("N = 1 point rejected".into()));
    }

    let red = reduce(inst);
    let phase = PhaseOne::new(&red);
    let nf = n as f64;
    // first verified point, upgraded once the iteration settles
    let mut best: Option<FeasiblePoint> = None;
    let mut best_cert: Option<(f64, InfeasibilityCertificate)> = None;
    let (it, prog, verdict) = phase.run(opts.max_iters, opts.ipm_tol, |it, prog, last| {
        let settled = prog.relative_gap < SETTLED_GAP || last;
        if prog.dual_objective > 1.0 {
            if let Some(cert) = try_certificate(&phase, inst, it, opts) {
                log::debug!("certificate with gap ratio {:e}", cert.gap);
                if best_cert.as_ref().is_none_or(|(g, _)| cert.gap >= *g) {
                    best_cert = Some((cert.gap, cert));
                }
            }
        }
        if best_cert.is_some() && (settled || prog.dual_infeasibility >= CANDIDATE_PINF) {
            return best_cert.take().map(|(_, c)| SolveOutcome::Infeasible(c));
        }
        let below = (prog.primal_objective - 1.0) / nf < -opts.psd_tol
            && prog.primal_infeasibility < CANDIDATE_PINF;
        if below && (best.is_none() || settled) {
            if let Some(p) = extract_point(&phase, inst, it, opts) {
                if best.as_ref().is_none_or(|b| p.margin >= b.margin) {
                    best = Some(p);
                }
            }
        }
        let degraded = prog.primal_infeasibility >= CANDIDATE_PINF;
        if best.is_some() && (settled || degraded) {
            return best.take().map(SolveOutcome::Feasible);
        }
        None
    });

    let out = match verdict {
        Some(v) => v,
        None => {
            let reason = if prog.iterations >= opts.max_iters {
                "iteration cap reached without a verified point or certificate"
            } else if (prog.primal_objective - 1.0).abs() / nf <= opts.psd_tol {
                "phase-I value within psd_tol of zero"
            } else {
                "iteration stalled without a verified point or certificate"
            };
            return Ok(SolveOutcome::Indeterminate(diagnostics(k, n, &prog, reason)));
        }
    };
    // weak duality: the opposite verdict must fail at the same iterate
    let contradiction = match &out {
        SolveOutcome::Feasible(_) => try_certificate(&phase, inst, &it, opts).is_some(),
        SolveOutcome::Infeasible(_) => {
            (prog.primal_objective - 1.0) / nf < -opts.psd_tol
                && extract_point(&phase, inst, &it, opts).is_some()
        }
        SolveOutcome::Indeterminate(_) => false,
    };
    if contradiction {
        return Ok(SolveOutcome::Indeterminate(diagnostics(
            k,
            n,
            &prog,
            "both a point and a certificate verified",
        )));
    }
    Ok(out)
}

fn validate_options(opts: &SolverOptions) -> Result<()> {
    let tols = [
        ("feas_tol", opts.feas_tol),
        ("psd_tol", opts.psd_tol),
        ("cert_tol", opts.cert_tol),
        ("cert_gap", opts.cert_gap),
        ("ipm_tol", opts.ipm_tol),
    ];
    for (name, v) in tols {
        if !(v.is_finite() && v >= 0.0) {
            return Err(Error::InvalidArgument(format!("{name} must be finite and >= 0")));
        }
    }
    Ok(())
}

fn diagnostics(k: usize, n: usize, prog: &Progress, reason: &str) -> Diagnostics {
    let nf = n as f64;
    Diagnostics {
        k,
        n,
        iterations: prog.iterations,
        primal_infeasibility: prog.primal_infeasibility,
        dual_infeasibility: prog.dual_infeasibility,
        relative_gap: prog.relative_gap,
        phase_value: (prog.primal_objective - 1.0) / nf,
        dual_bound: (prog.dual_objective - 1.0) / nf,
        step_primal: prog.step_primal,
        step_dual: prog.step_dual,
        reason: reason.to_string(),
    }
}

/// `k = 1`: both endpoints are fixed, so every row is a constant.
fn solve_constant(inst: &SdpInstance, opts: &SolverOptions) -> SolveOutcome {
    let worst = inst
        .rows()
        .iter()
        .enumerate()
        .max_by(|a, b| a.1.rhs.abs().total_cmp(&b.1.rhs.abs()));
    match worst {
        Some((idx, row)) if row.rhs.abs() > opts.feas_tol => {
            let mut y = vec![0.0; inst.rows().len()];
            y[idx] = row.rhs.signum();
            SolveOutcome::Infeasible(InfeasibilityCertificate {
                k: inst.k(),
                n: inst.n(),
                gap: row.rhs.abs(),
                y,
                slack_blocks: Vec::new(),
            })
        }
        _ => SolveOutcome::Feasible(
            finish_point(inst, Vec::new(), 0.0, false, opts).expect("constant point"),
        ),
    }
}

fn row_index_of_trace(inst: &SdpInstance) -> BTreeMap<usize, usize> {
    inst.rows()
        .iter()
        .enumerate()
        .filter_map(|(idx, r)| match r.kind {
            RowKind::Trace { t } => Some((t, idx)),
            _ => None,
        })
        .collect()
}

/// Farkas multipliers from the phase-I dual, normalized to unit length.
fn assemble_certificate(phase: &PhaseOne, inst: &SdpInstance, y: &DVector<f64>) -> Vec<f64> {
    let traces = row_index_of_trace(inst);
    let mut out = vec![0.0; inst.rows().len()];
    let mut gap_sum = 0.0;
    for (r, origin) in phase.origin.iter().enumerate() {
        match *origin {
            Origin::Parent(idx) => out[idx] = y[r],
            Origin::TraceGap(m) => {
                out[traces[&(m + 1)]] += y[r];
                gap_sum += y[r];
            }
        }
    }
    out[traces[&1]] = -1.0 - gap_sum;
    let norm = out.iter().map(|v| v * v).sum::<f64>().sqrt();
    out.iter().map(|v| v / norm).collect()
}

fn try_certificate(
    phase: &PhaseOne,
    inst: &SdpInstance,
    it: &Iterate,
    opts: &SolverOptions,
) -> Option<InfeasibilityCertificate> {
    let y = assemble_certificate(phase, inst, &it.y);
    // cheap screen on the blocks before the full recomputation
    let w = multiplier_coeffs(inst, &y).ok()?;
    let floor = w
        .iter()
        .map(|wt| {
            let p = phase.blocks.from_coefficients(wt);
            block_min_eig(&(-&p.sym)).min(block_min_eig(&(-&p.anti)))
        })
        .fold(f64::INFINITY, f64::min);
    let gap: f64 = inst.rows().iter().zip(&y).map(|(r, v)| r.rhs * v).sum();
    if floor < -opts.cert_tol || gap < opts.cert_gap {
        return None;
    }
    let cert = InfeasibilityCertificate {
        k: inst.k(),
        n: inst.n(),
        slack_blocks: slack_matrices(inst, &y).ok()?,
        gap,
        y,
    };
    verify_certificate_with(&cert, inst, opts.cert_tol, opts.cert_gap)
        .ok()?
        .ok
        .then_some(cert)
}

/// `(A^* y)` as coefficient vectors, one per free matrix.
fn multiplier_coeffs(inst: &SdpInstance, y: &[f64]) -> Result<Vec<Vec<f64>>> {
    if y.len() != inst.rows().len() {
        return Err(Error::DimensionMismatch {
            expected: inst.rows().len(),
            found: y.len(),
        });
    }
    let mut w = vec![vec![0.0; inst.n()]; inst.free_count()];
    for (row, &v) in inst.rows().iter().zip(y) {
        for t in &row.terms {
            w[t.matrix][t.diag] += t.coef * v;
        }
    }
    Ok(w)
}

/// `S_t = -(A^* y)_t` on full `N x N` matrices.
pub fn slack_matrices(inst: &SdpInstance, y: &[f64]) -> Result<Vec<DMatrix<f64>>> {
    Ok(multiplier_coeffs(inst, y)?
        .iter()
        .map(|w| -toeplitz(w))
        .collect())
}

/// Checks a certificate with the default tolerances.
pub fn verify_certificate(
    cert: &InfeasibilityCertificate,
    inst: &SdpInstance,
) -> Result<CertificateCheck> {
    let d = SolverOptions::default();
    verify_certificate_with(cert, inst, d.cert_tol, d.cert_gap)
}

/// Recomputes slacks and gap from `y` alone; stored slacks must agree.
pub fn verify_certificate_with(
    cert: &InfeasibilityCertificate,
    inst: &SdpInstance,
    cert_tol: f64,
    cert_gap: f64,
) -> Result<CertificateCheck> {
    let slacks = slack_matrices(inst, &cert.y)?;
    let norm = cert.y.iter().map(|v| v * v).sum::<f64>().sqrt();
    let gap: f64 = inst.rows().iter().zip(&cert.y).map(|(r, v)| r.rhs * v).sum();
    let min_slack_eig = slacks
        .iter()
        .map(min_eigenvalue)
        .fold(f64::INFINITY, f64::min);
    let stored_ok = cert.slack_blocks.len() == slacks.len()
        && cert
            .slack_blocks
            .iter()
            .zip(&slacks)
            .all(|(a, b)| a.shape() == b.shape() && (a - b).amax() <= cert_tol * norm.max(1.0));
    let gap_ratio = if norm > 0.0 { gap / norm } else { 0.0 };
    let psd_ok = slacks.is_empty() || min_slack_eig >= -cert_tol * norm;
    let ok = norm > 0.0
        && gap > 0.0
        && gap_ratio >= cert_gap
        && psd_ok
        && stored_ok
        && (cert.gap - gap).abs() <= cert_tol * norm.max(1.0);
    Ok(CertificateCheck {
        ok,
        min_slack_eig,
        gap_ratio,
    })
}

/// Recomputes residuals and polynomial checks of a point.
pub fn verify_point(point: &FeasiblePoint, opts: &SolverOptions) -> Result<PointCheck> {
    let inst = build_instance(point.k, point.n)?;
    check_matrices(&inst, &point.matrices, opts)
}

fn check_matrices(
    inst: &SdpInstance,
    matrices: &[DMatrix<f64>],
    opts: &SolverOptions,
) -> Result<PointCheck> {
    let res = inst.residuals(matrices)?;
    let view = inst.polynomial_view(matrices)?;
    let polynomials = polynomial_checks(&view)?;
    let ok = res.max_eq_violation <= opts.feas_tol
        && res.min_eigenvalue >= -opts.psd_tol
        && polynomials.passes(opts.feas_tol);
    Ok(PointCheck {
        ok,
        eq_violation: res.max_eq_violation,
        min_eig: res.min_eigenvalue,
        polynomials,
    })
}

fn finish_point(
    inst: &SdpInstance,
    matrices: Vec<DMatrix<f64>>,
    margin: f64,
    rounded: bool,
    opts: &SolverOptions,
) -> Option<FeasiblePoint> {
    let check = check_matrices(inst, &matrices, opts).ok()?;
    if !check.ok {
        return None;
    }
    Some(FeasiblePoint {
        k: inst.k(),
        n: inst.n(),
        polynomial_view: inst.polynomial_view(&matrices).ok()?,
        matrices,
        eq_violation: check.eq_violation,
        min_eig: check.min_eig,
        margin,
        rounded,
    })
}

/// `Q_t = X_t - s I`, projected onto the affine set when that keeps PSD.
fn extract_point(
    phase: &PhaseOne,
    inst: &SdpInstance,
    it: &Iterate,
    opts: &SolverOptions,
) -> Option<FeasiblePoint> {
    let n = inst.n();
    let s = (it.x[0].trace() + it.x[1].trace() - 1.0) / n as f64;
    let raw: Vec<DMatrix<f64>> = (0..phase.nf)
        .map(|t| {
            let x = phase.blocks.expand(&PhaseOne::pair(&it.x, t));
            ipm::sym(&x) - DMatrix::identity(n, n) * s
        })
        .collect();
    if let Some(rounded) = project(inst, &raw) {
        if let Some(p) = finish_point(inst, rounded, -s, true, opts) {
            return Some(p);
        }
    }
    finish_point(inst, raw, -s, false, opts)
}

/// Minimum-norm correction onto the independent equality rows.
fn project(inst: &SdpInstance, point: &[DMatrix<f64>]) -> Option<Vec<DMatrix<f64>>> {
    let red = reduce(inst);
    let idx = red.independent_rows();
    let rows = RowSet {
        n: inst.n(),
        count: inst.free_count(),
        rows: idx.iter().map(|&i| inst.rows()[i].terms.clone()).collect(),
        rhs: idx.iter().map(|&i| inst.rows()[i].rhs).collect(),
    };
    let coeffs: Vec<Vec<f64>> = point
        .iter()
        .map(|m| (0..m.nrows()).map(|i| diagonal_trace(m, i as isize)).collect())
        .collect();
    let lhs = rows.apply(&coeffs);
    let r = DVector::from_iterator(
        rows.len(),
        rows.rhs.iter().zip(&lhs).map(|(b, a)| b - a),
    );
    let lambda = Cholesky::new(rows.gram())?.solve(&r);
    let w = rows.adjoint_coeffs(lambda.as_slice());
    Some(
        point
            .iter()
            .zip(&w)
            .map(|(q, wt)| q + toeplitz(wt))
            .collect(),
    )
}

/// Boundary located by `search_nstar`.
#[derive(Debug, Clone)]
pub struct NstarResult {
    pub k: usize,
    pub n_star: usize,
    pub witness: FeasiblePoint,
    pub refutation: InfeasibilityCertificate,
    /// Every size solved, with its verdict (`true` = feasible).
    pub evaluations: Vec<(usize, bool)>,
    /// The boundary relies on feasibility being monotone in `N`.
    pub conditional_on_monotonicity: bool,
}

/// Exponential bracketing from `n_lo`, then bisection, for the largest
/// feasible `N` in `n_lo..=n_hi`.
pub fn search_nstar(k: usize, n_lo: usize, n_hi: usize, opts: &SolverOptions) -> Result<NstarResult> {
    search_nstar_with(k, n_lo, n_hi, opts, |_, _| {})
}

/// As [`search_nstar`], reporting each verdict as it is reached.
pub fn search_nstar_with(
    k: usize,
    n_lo: usize,
    n_hi: usize,
    opts: &SolverOptions,
    mut on_solve: impl FnMut(usize, &SolveOutcome),
) -> Result<NstarResult> {
    if n_lo == 0 || n_lo > n_hi {
        return Err(Error::InvalidArgument(format!(
            "need 1 <= n_lo <= n_hi, got {n_lo}..{n_hi}"
        )));
    }
    let mut cache: BTreeMap<usize, SolveOutcome> = BTreeMap::new();
    let mut solve = |n: usize, cache: &mut BTreeMap<usize, SolveOutcome>| -> Result<bool> {
        if let Some(o) = cache.get(&n) {
            return Ok(o.is_feasible());
        }
        let out = solve_feasibility(&build_instance(k, n)?, opts)?;
        on_solve(n, &out);
        let feasible = match &out {
            SolveOutcome::Feasible(_) => true,
            SolveOutcome::Infeasible(_) => false,
            SolveOutcome::Indeterminate(d) => {
                return Err(Error::Indeterminate {
                    k,
                    n,
                    reason: d.reason.clone(),
                })
            }
        };
        cache.insert(n, out);
        Ok(feasible)
    };

    if !solve(n_lo, &mut cache)? {
        return Err(Error::BoundaryNotBracketed {
            lo: n_lo,
            hi: n_hi,
            side: "infeasible",
        });
    }
    let (mut good, mut bad) = (n_lo, None);
    let mut step = 1;
    while bad.is_none() {
        if good == n_hi {
            return Err(Error::BoundaryNotBracketed {
                lo: n_lo,
                hi: n_hi,
                side: "feasible",
            });
        }
        let probe = (good + step).min(n_hi);
        if solve(probe, &mut cache)? {
            good = probe;
            step *= 2;
        } else {
            bad = Some(probe);
        }
    }
    let mut bad = bad.expect("loop exits with a bracket");
    while bad - good > 1 {
        let mid = good + (bad - good) / 2;
        if solve(mid, &mut cache)? {
            good = mid;
        } else {
            bad = mid;
        }
    }
    // both sides of the boundary are solved explicitly (cached solves count)
    solve(good, &mut cache)?;
    solve(good + 1, &mut cache)?;
    let evaluations = cache.iter().map(|(&n, o)| (n, o.is_feasible())).collect();
    let witness = match cache.remove(&good) {
        Some(SolveOutcome::Feasible(p)) => p,
        _ => unreachable!("boundary sides are cached verdicts"),
    };
    let refutation = match cache.remove(&(good + 1)) {
        Some(SolveOutcome::Infeasible(c)) => c,
        _ => unreachable!("boundary sides are cached verdicts"),
    };
    Ok(NstarResult {
        k,
        n_star: good,
        witness,
        refutation,
        evaluations,
        conditional_on_monotonicity: true,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn solve(k: usize, n: usize) -> SolveOutcome {
        solve_feasibility(&build_instance(k, n).unwrap(), &SolverOptions::default()).unwrap()
    }

    #[test]
    fn k1_boundary() {
        assert!(solve(1, 1).is_feasible());
        assert!(solve(1, 2).is_feasible());
        let SolveOutcome::Infeasible(c) = solve(1, 3) else {
            panic!("k=1 N=3 must be infeasible")
        };
        assert!(verify_certificate(&c, &build_instance(1, 3).unwrap()).unwrap().ok);
    }

    #[test]
    fn k2_matches_closed_form() {
        for n in 2..=6 {
            let SolveOutcome::Feasible(p) = solve(2, n) else {
                panic!("k=2 N={n} should be feasible")
            };
            let q = p.polynomial_view[1].coeffs();
            for (i, &qi) in q.iter().enumerate() {
                let want = if i == 0 { 1.0 } else { 0.5 - i as f64 / n as f64 };
                assert!((qi - want).abs() < 1e-6, "N={n} i={i}: {qi} vs {want}");
            }
        }
        for n in 7..=9 {
            let inst = build_instance(2, n).unwrap();
            let SolveOutcome::Infeasible(c) = solve(2, n) else {
                panic!("k=2 N={n} should be infeasible")
            };
            assert!(verify_certificate(&c, &inst).unwrap().ok);
        }
    }

    #[test]
    fn certificate_does_not_transfer() {
        let SolveOutcome::Infeasible(c) = solve(2, 7) else {
            panic!()
        };
        let other = build_instance(2, 6).unwrap();
        assert!(verify_certificate(&c, &other).is_err());

        // carry each multiplier over to the row of the same kind
        let source = build_instance(2, 7).unwrap();
        let y: Vec<f64> = other
            .rows()
            .iter()
            .map(|row| {
                source
                    .rows()
                    .iter()
                    .position(|r| r.kind == row.kind)
                    .map_or(0.0, |p| c.y[p])
            })
            .collect();
        let moved = InfeasibilityCertificate {
            n: 6,
            slack_blocks: slack_matrices(&other, &y).unwrap(),
            gap: other.rows().iter().zip(&y).map(|(r, v)| r.rhs * v).sum(),
            y,
            ..c.clone()
        };
        assert!(!verify_certificate(&moved, &other).unwrap().ok);
        let zero = InfeasibilityCertificate {
            y: vec![0.0; c.y.len()],
            slack_blocks: c.slack_blocks.iter().map(|s| s * 0.0).collect(),
            gap: 0.0,
            ..c.clone()
        };
        let inst = build_instance(2, 7).unwrap();
        assert!(!verify_certificate(&zero, &inst).unwrap().ok);
    }
}
