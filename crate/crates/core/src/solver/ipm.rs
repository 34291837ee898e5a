//! Phase-I primal-dual interior-point method (HKM direction, Mehrotra
//! predictor-corrector) on the J-reduced blocks.
//!
//! Substituting `X_t = Q_t + s I` with `s = (Tr X_1 - 1)/N` turns the
//! phase-I problem into `min Tr X_1` subject to the signed-trace rows
//! (unchanged, since they annihilate `I`) and `Tr X_t = Tr X_1` for
//! `t >= 2`. Both sides are strictly feasible for every instance, so the
//! method converges to `p* = d* = 1 + N s*`.

use nalgebra::{Cholesky, DMatrix, DVector};

use super::operators::{trace_kernel, Blocks, RowSet};
use crate::sdp_model::{BlockPair, ReducedInstance, RowKind, RowTerm};

const REFINE_STEPS: usize = 10;
/// Below this list size the direct kernel is cheap enough to use throughout.
const EXACT_KERNEL_MAX_N: usize = 160;
/// Relative gap below which the transform kernel is too inaccurate.
const EXACT_KERNEL_GAP: f64 = 1e-5;

/// Where a phase-I row came from.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub(crate) enum Origin {
    /// An independent row of the original instance.
    Parent(usize),
    /// `Tr X_{m} - Tr X_0 = 0` for free matrix `m >= 1`.
    TraceGap(usize),
}

pub(crate) struct PhaseOne {
    pub n: usize,
    pub nf: usize,
    pub blocks: Blocks,
    pub rows: RowSet,
    pub origin: Vec<Origin>,
}

/// Flat block list: `2t` is the sym block of free matrix `t`, `2t+1` the anti block.
pub(crate) type Flat = Vec<DMatrix<f64>>;

#[derive(Debug, Clone)]
pub(crate) struct Iterate {
    pub x: Flat,
    pub z: Flat,
    pub y: DVector<f64>,
}

#[derive(Debug, Clone, Copy, Default)]
pub(crate) struct Progress {
    pub iterations: usize,
    pub primal_infeasibility: f64,
    pub dual_infeasibility: f64,
    pub relative_gap: f64,
    pub primal_objective: f64,
    pub dual_objective: f64,
    pub step_primal: f64,
    pub step_dual: f64,
}

impl PhaseOne {
    pub fn new(red: &ReducedInstance) -> Self {
        let n = red.n();
        let nf = red.free_count();
        let mut terms = Vec::new();
        let mut rhs = Vec::new();
        let mut origin = Vec::new();
        for idx in red.independent_rows() {
            let row = &red.rows()[idx];
            match row.kind {
                RowKind::SignedTrace { .. } => {
                    terms.push(row.terms.clone());
                    rhs.push(row.rhs);
                    origin.push(Origin::Parent(idx));
                }
                RowKind::Trace { t } if t >= 2 => {
                    terms.push(vec![
                        RowTerm {
                            matrix: t - 1,
                            diag: 0,
                            coef: 1.0,
                        },
                        RowTerm {
                            matrix: 0,
                            diag: 0,
                            coef: -1.0,
                        },
                    ]);
                    rhs.push(0.0);
                    origin.push(Origin::TraceGap(t - 1));
                }
                RowKind::Trace { .. } => {}
            }
        }
        Self {
            n,
            nf,
            blocks: Blocks::new(n),
            rows: RowSet {
                n,
                count: nf,
                rows: terms,
                rhs,
            },
            origin,
        }
    }

    pub fn pair(v: &[DMatrix<f64>], t: usize) -> BlockPair {
        BlockPair {
            sym: v[2 * t].clone(),
            anti: v[2 * t + 1].clone(),
        }
    }

    fn sizes(&self) -> [usize; 2] {
        [self.blocks.basis.sym_size(), self.blocks.basis.anti_size()]
    }

    pub fn apply(&self, x: &[DMatrix<f64>]) -> DVector<f64> {
        let coeffs: Vec<Vec<f64>> = (0..self.nf)
            .map(|t| self.blocks.coefficients(&Self::pair(x, t)))
            .collect();
        DVector::from_vec(self.rows.apply(&coeffs))
    }

    pub fn adjoint(&self, y: &DVector<f64>) -> Flat {
        let w = self.rows.adjoint_coeffs(y.as_slice());
        let mut out = Vec::with_capacity(2 * self.nf);
        for wt in &w {
            let p = self.blocks.from_coefficients(wt);
            out.push(p.sym);
            out.push(p.anti);
        }
        out
    }

    pub fn objective(&self) -> Flat {
        let [s, a] = self.sizes();
        let mut c = Vec::with_capacity(2 * self.nf);
        for t in 0..self.nf {
            let scale = if t == 0 { 1.0 } else { 0.0 };
            c.push(DMatrix::identity(s, s) * scale);
            c.push(DMatrix::identity(a, a) * scale);
        }
        c
    }

    fn identity(&self, scale: f64) -> Flat {
        let [s, a] = self.sizes();
        (0..self.nf)
            .flat_map(|_| [DMatrix::identity(s, s) * scale, DMatrix::identity(a, a) * scale])
            .collect()
    }

    pub fn b(&self) -> DVector<f64> {
        DVector::from_column_slice(&self.rows.rhs)
    }

    /// Total order of the cone (sum of block sizes).
    fn order(&self) -> f64 {
        (self.nf * self.n) as f64
    }

    pub fn start(&self) -> Iterate {
        Iterate {
            x: self.identity(1.0),
            z: self.identity(1.0),
            y: DVector::zeros(self.rows.len()),
        }
    }

    fn schur(&self, x: &[DMatrix<f64>], zinv: &[DMatrix<f64>], exact: bool) -> DMatrix<f64> {
        let m = self.rows.len();
        let mut out = DMatrix::zeros(m, m);
        for t in 0..self.nf {
            let xf = self.blocks.expand(&Self::pair(x, t));
            let yf = self.blocks.expand(&Self::pair(zinv, t));
            let kernel = trace_kernel(&xf, &yf, exact);
            self.rows.accumulate_schur(t, &kernel, &mut out);
        }
        out
    }

    /// Runs the method, calling `accept` after every residual evaluation.
    /// `accept` returns `Some` to stop early with a verdict.
    pub fn run<T>(
        &self,
        max_iters: usize,
        tol: f64,
        mut accept: impl FnMut(&Iterate, &Progress, bool) -> Option<T>,
    ) -> (Iterate, Progress, Option<T>) {
        let b = self.b();
        let c = self.objective();
        let norm_b = b.norm();
        let norm_c = fro(&c);
        let order = self.order();
        let mut it = self.start();
        let mut prog = Progress::default();
        let mut stalls = 0;
        let mut infeas0 = None;
        let mut best_rp = f64::INFINITY;
        let mut flat = 0;
        let mut last_dobj = f64::NAN;

        for iter in 0..=max_iters {
            let rp = &b - self.apply(&it.x);
            let aty = self.adjoint(&it.y);
            let rd: Flat = (0..c.len()).map(|i| &c[i] - &aty[i] - &it.z[i]).collect();
            let xz = dot(&it.x, &it.z);
            let pobj = dot(&c, &it.x);
            let dobj = b.dot(&it.y);
            prog.iterations = iter;
            prog.primal_infeasibility = rp.norm() / (1.0 + norm_b);
            prog.dual_infeasibility = fro(&rd) / (1.0 + norm_c);
            prog.relative_gap = xz / (1.0 + pobj.abs() + dobj.abs());
            prog.primal_objective = pobj;
            prog.dual_objective = dobj;

            log::debug!(
                "iter {iter:3} pinf {:.2e} dinf {:.2e} gap {:.2e} pobj {:.12} dobj {:.12} step {:.3}/{:.3}",
                prog.primal_infeasibility,
                prog.dual_infeasibility,
                prog.relative_gap,
                pobj,
                dobj,
                prog.step_primal,
                prog.step_dual
            );
            let converged = prog.primal_infeasibility < tol
                && prog.dual_infeasibility < tol
                && prog.relative_gap < tol;
            // stagnation at the noise floor of the Schur solve
            let moved = (dobj - last_dobj).abs() > 1e-13 * (1.0 + dobj.abs());
            flat = if !moved && prog.primal_infeasibility < 1e-6 { flat + 1 } else { 0 };
            last_dobj = dobj;
            let last = converged || iter == max_iters || stalls >= 3 || flat >= 5;
            if let Some(v) = accept(&it, &prog, last) {
                return (it, prog, Some(v));
            }
            if last {
                break;
            }

            let mu = xz / order;
            // keep complementarity from outrunning primal infeasibility
            let (r0, mu0) = *infeas0.get_or_insert((rp.norm().max(f64::MIN_POSITIVE), mu));
            best_rp = best_rp.min(rp.norm());
            let floor = 0.1 * mu0 * best_rp / r0;
            let Some(zinv) = it.z.iter().map(inverse_spd).collect::<Option<Flat>>() else {
                break;
            };
            let exact = self.n <= EXACT_KERNEL_MAX_N || prog.relative_gap < EXACT_KERNEL_GAP;
            let schur = self.schur(&it.x, &zinv, exact);
            let Some(solver) = SchurSolver::new(schur) else {
                break;
            };
            let xrz: Flat = (0..c.len())
                .map(|i| sym(&(&it.x[i] * &rd[i] * &zinv[i])))
                .collect();
            let base = &b + self.apply(&xrz);

            let refine = |rhs: &DVector<f64>| self.refined_solve(&solver, &it.x, &zinv, rhs);

            // predictor
            let dy_p = refine(&base);
            let (dx_p, dz_p) = self.directions(&it, &rd, &zinv, &dy_p, None);
            let ap = step_length(&it.x, &dx_p);
            let ad = step_length(&it.z, &dz_p);
            let trial = dot_stepped(&it.x, &dx_p, ap, &it.z, &dz_p, ad);
            let sigma = (trial / xz)
                .clamp(0.0, 1.0)
                .powi(3)
                .max((floor / mu).min(1.0));

            // corrector
            let phi: Flat = (0..c.len())
                .map(|i| {
                    let n = it.x[i].nrows();
                    DMatrix::identity(n, n) * (sigma * mu) - &dx_p[i] * &dz_p[i]
                })
                .collect();
            let phi_zinv: Flat = (0..c.len()).map(|i| sym(&(&phi[i] * &zinv[i]))).collect();
            let dy = refine(&(&base - self.apply(&phi_zinv)));
            let (dx, dz) = self.directions(&it, &rd, &zinv, &dy, Some(&phi));
            let ap = (0.98 * step_length(&it.x, &dx)).min(1.0);
            let ad = (0.98 * step_length(&it.z, &dz)).min(1.0);
            prog.step_primal = ap;
            prog.step_dual = ad;
            stalls = if ap.max(ad) < 1e-7 { stalls + 1 } else { 0 };

            for i in 0..c.len() {
                it.x[i] += &dx[i] * ap;
                it.z[i] += &dz[i] * ad;
            }
            it.y += dy * ad;
        }
        (it, prog, None)
    }

    /// `A(sym(X A^*(v) Z^{-1}))` by explicit block products.
    fn schur_apply(&self, x: &[DMatrix<f64>], zinv: &[DMatrix<f64>], v: &DVector<f64>) -> DVector<f64> {
        let w = self.adjoint(v);
        let prod: Flat = (0..w.len()).map(|i| sym(&(&x[i] * &w[i] * &zinv[i]))).collect();
        self.apply(&prod)
    }

    /// The assembled Schur matrix carries a correlation error of order
    /// `eps |X| |Z^{-1}|`; refine against the exact operator.
    fn refined_solve(
        &self,
        solver: &SchurSolver,
        x: &[DMatrix<f64>],
        zinv: &[DMatrix<f64>],
        rhs: &DVector<f64>,
    ) -> DVector<f64> {
        let mut dy = solver.solve(rhs);
        let mut res = rhs - self.schur_apply(x, zinv, &dy);
        let target = 1e-15 * rhs.norm();
        for _ in 0..REFINE_STEPS {
            if res.norm() <= target {
                break;
            }
            let next = &dy + solver.solve(&res);
            let next_res = rhs - self.schur_apply(x, zinv, &next);
            if next_res.norm() >= res.norm() {
                break;
            }
            dy = next;
            res = next_res;
        }
        dy
    }

    fn directions(
        &self,
        it: &Iterate,
        rd: &[DMatrix<f64>],
        zinv: &[DMatrix<f64>],
        dy: &DVector<f64>,
        phi: Option<&Flat>,
    ) -> (Flat, Flat) {
        let aty = self.adjoint(dy);
        let dz: Flat = (0..rd.len()).map(|i| &rd[i] - &aty[i]).collect();
        let dx = (0..rd.len())
            .map(|i| {
                let mut lead = -(&it.x[i] * &dz[i]);
                if let Some(phi) = phi {
                    lead += &phi[i];
                }
                sym(&(lead * &zinv[i])) - &it.x[i]
            })
            .collect();
        (dx, dz)
    }
}

struct SchurSolver {
    chol: Option<Cholesky<f64, nalgebra::Dyn>>,
    lu: Option<nalgebra::LU<f64, nalgebra::Dyn, nalgebra::Dyn>>,
}

impl SchurSolver {
    fn new(m: DMatrix<f64>) -> Option<Self> {
        if m.nrows() == 0 {
            return Some(Self {
                chol: None,
                lu: None,
            });
        }
        if let Some(chol) = Cholesky::new(m.clone()) {
            return Some(Self {
                chol: Some(chol),
                lu: None,
            });
        }
        let lu = m.lu();
        lu.is_invertible().then_some(Self {
            chol: None,
            lu: Some(lu),
        })
    }

    fn solve(&self, r: &DVector<f64>) -> DVector<f64> {
        match (&self.chol, &self.lu) {
            (Some(c), _) => c.solve(r),
            (None, Some(lu)) => lu.solve(r).unwrap_or_else(|| DVector::zeros(r.len())),
            _ => DVector::zeros(r.len()),
        }
    }
}

pub(crate) fn sym(m: &DMatrix<f64>) -> DMatrix<f64> {
    (m + m.transpose()) * 0.5
}

pub(crate) fn dot(a: &[DMatrix<f64>], b: &[DMatrix<f64>]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x.dot(y)).sum()
}

fn fro(a: &[DMatrix<f64>]) -> f64 {
    dot(a, a).sqrt()
}

fn dot_stepped(
    x: &[DMatrix<f64>],
    dx: &[DMatrix<f64>],
    ap: f64,
    z: &[DMatrix<f64>],
    dz: &[DMatrix<f64>],
    ad: f64,
) -> f64 {
    (0..x.len())
        .map(|i| (&x[i] + &dx[i] * ap).dot(&(&z[i] + &dz[i] * ad)))
        .sum()
}

fn inverse_spd(m: &DMatrix<f64>) -> Option<DMatrix<f64>> {
    if m.nrows() == 0 {
        return Some(m.clone());
    }
    Cholesky::new(m.clone()).map(|c| c.inverse())
}

/// Largest `a` (capped at 1e30) with `x + a dx` positive semidefinite, across all blocks.
fn step_length(x: &[DMatrix<f64>], dx: &[DMatrix<f64>]) -> f64 {
    x.iter()
        .zip(dx)
        .map(|(x, dx)| block_step(x, dx))
        .fold(1e30, f64::min)
}

fn block_step(x: &DMatrix<f64>, dx: &DMatrix<f64>) -> f64 {
    if x.nrows() == 0 {
        return 1e30;
    }
    let Some(chol) = Cholesky::new(x.clone()) else {
        return 0.0;
    };
    let l = chol.l();
    let Some(a) = l.solve_lower_triangular(dx) else {
        return 0.0;
    };
    let Some(m) = l.solve_lower_triangular(&a.transpose()) else {
        return 0.0;
    };
    let lam = sym(&m)
        .symmetric_eigenvalues()
        .iter()
        .copied()
        .fold(f64::INFINITY, f64::min);
    if lam >= 0.0 {
        1e30
    } else {
        -1.0 / lam
    }
}

pub(crate) fn block_min_eig(m: &DMatrix<f64>) -> f64 {
    if m.nrows() == 0 {
        return f64::INFINITY;
    }
    sym(m)
        .symmetric_eigenvalues()
        .iter()
        .copied()
        .fold(f64::INFINITY, f64::min)
}
