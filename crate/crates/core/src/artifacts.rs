//! JSON and CSV forms of solver results.
//!
//! Solution files store each `Q_t` by the packed lower triangles of its two
//! `J`-symmetry blocks; certificate files store the multipliers and a
//! summary of the slack spectra. Loading rebuilds everything else from the
//! instance so that verification never trusts derived fields.

use std::fmt::Write as _;

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::laurent::SymmetricLaurent;
use crate::reconstruct::QueryAlgorithm;
use crate::sdp_model::{build_instance, min_eigenvalue, BasisChange, BlockPair, SdpInstance};
use crate::simulator::SimulationReport;
use crate::solver::{
    slack_matrices, verify_certificate_with, verify_point, FeasiblePoint,
    InfeasibilityCertificate, PointCheck, SolverOptions,
};

/// Lower triangle of a symmetric matrix, row by row.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PackedSymmetric {
    pub dim: usize,
    pub lower: Vec<f64>,
}

impl PackedSymmetric {
    pub fn pack(m: &DMatrix<f64>) -> Self {
        let dim = m.nrows();
        let lower = (0..dim).flat_map(|r| (0..=r).map(move |c| m[(r, c)])).collect();
        Self { dim, lower }
    }

    pub fn unpack(&self) -> Result<DMatrix<f64>> {
        if self.lower.len() != self.dim * (self.dim + 1) / 2 {
            return Err(Error::Schema(format!(
                "packed block of dimension {} has {} entries",
                self.dim,
                self.lower.len()
            )));
        }
        let mut m = DMatrix::zeros(self.dim, self.dim);
        let mut it = self.lower.iter();
        for r in 0..self.dim {
            for c in 0..=r {
                let v = *it.next().unwrap();
                m[(r, c)] = v;
                m[(c, r)] = v;
            }
        }
        Ok(m)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PackedBlocks {
    pub t: usize,
    pub sym: PackedSymmetric,
    pub anti: PackedSymmetric,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ResidualReport {
    pub eq_violation: f64,
    pub min_eig: f64,
    pub margin: f64,
    pub rounded: bool,
    pub root_mismatch: f64,
    pub normalization_error: f64,
    pub endpoint_error: f64,
    pub min_value: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SolutionFile {
    pub k: usize,
    pub n: usize,
    pub blocks: Vec<PackedBlocks>,
    /// `q_0..q_{N-1}` of `Q_0..Q_k`.
    pub polynomials: Vec<Vec<f64>>,
    pub residuals: ResidualReport,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SlackSummary {
    pub t: usize,
    pub min_eig: f64,
    pub max_eig: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CertificateFile {
    pub k: usize,
    pub n: usize,
    pub y: Vec<f64>,
    pub gap: f64,
    pub gap_ratio: f64,
    pub slack: Vec<SlackSummary>,
}

/// Any file the tool writes and reads back.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Artifact {
    Solution(SolutionFile),
    Certificate(CertificateFile),
}

/// Parses a solver artifact or a bare algorithm file.
pub enum Loaded {
    Solution(SolutionFile),
    Certificate(CertificateFile),
    Algorithm(QueryAlgorithm),
}

pub fn load(text: &str) -> Result<Loaded> {
    let value: serde_json::Value = serde_json::from_str(text)?;
    if value.get("kind").is_some() {
        return Ok(match serde_json::from_value::<Artifact>(value)? {
            Artifact::Solution(s) => Loaded::Solution(s),
            Artifact::Certificate(c) => Loaded::Certificate(c),
        });
    }
    if value.get("states").is_some() {
        return Ok(Loaded::Algorithm(serde_json::from_value(value)?));
    }
    Err(Error::Schema("unrecognized artifact".into()))
}

/// Serializes with a trailing newline; output depends only on the value.
pub fn to_json<T: Serialize>(value: &T) -> Result<String> {
    let mut s = serde_json::to_string_pretty(value)?;
    s.push('\n');
    Ok(s)
}

impl SolutionFile {
    pub fn from_point(fp: &FeasiblePoint) -> Self {
        let basis = BasisChange::new(fp.n);
        let blocks = fp
            .matrices
            .iter()
            .enumerate()
            .map(|(i, m)| {
                let b = basis.reduce(m);
                PackedBlocks {
                    t: i + 1,
                    sym: PackedSymmetric::pack(&b.sym),
                    anti: PackedSymmetric::pack(&b.anti),
                }
            })
            .collect();
        let checks = crate::sdp_model::polynomial_checks(&fp.polynomial_view).ok();
        Self {
            k: fp.k,
            n: fp.n,
            blocks,
            polynomials: fp.polynomial_view.iter().map(|p| p.coeffs().to_vec()).collect(),
            residuals: ResidualReport {
                eq_violation: fp.eq_violation,
                min_eig: fp.min_eig,
                margin: fp.margin,
                rounded: fp.rounded,
                root_mismatch: checks.map_or(f64::NAN, |c| c.root_mismatch),
                normalization_error: checks.map_or(f64::NAN, |c| c.normalization_error),
                endpoint_error: checks.map_or(f64::NAN, |c| c.endpoint_error),
                min_value: checks.map_or(f64::NAN, |c| c.min_value),
            },
        }
    }

    /// Rebuilds the point from its blocks; stored residuals are ignored.
    pub fn to_point(&self) -> Result<FeasiblePoint> {
        let inst = build_instance(self.k, self.n)?;
        if self.blocks.len() != inst.free_count() {
            return Err(Error::Schema(format!(
                "expected {} matrices, found {}",
                inst.free_count(),
                self.blocks.len()
            )));
        }
        let basis = BasisChange::new(self.n);
        let matrices = self
            .blocks
            .iter()
            .map(|b| {
                let pair = BlockPair {
                    sym: b.sym.unpack()?,
                    anti: b.anti.unpack()?,
                };
                basis
                    .expand(&pair)
                    .map_err(|e| Error::Schema(format!("block {}: {e}", b.t)))
            })
            .collect::<Result<Vec<_>>>()?;
        let res = inst.residuals(&matrices)?;
        Ok(FeasiblePoint {
            k: self.k,
            n: self.n,
            polynomial_view: inst.polynomial_view(&matrices)?,
            matrices,
            eq_violation: res.max_eq_violation,
            min_eig: res.min_eigenvalue,
            margin: self.residuals.margin,
            rounded: self.residuals.rounded,
        })
    }

    pub fn verify(&self, opts: &SolverOptions) -> Result<PointCheck> {
        verify_point(&self.to_point()?, opts)
    }
}

/// Outcome of re-checking a certificate file.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CertificateFileCheck {
    pub ok: bool,
    pub min_slack_eig: f64,
    pub gap_ratio: f64,
    /// Largest disagreement between stored and recomputed summaries.
    pub summary_error: f64,
}

impl CertificateFile {
    pub fn from_certificate(cert: &InfeasibilityCertificate) -> Self {
        let norm = cert.y.iter().map(|v| v * v).sum::<f64>().sqrt();
        Self {
            k: cert.k,
            n: cert.n,
            y: cert.y.clone(),
            gap: cert.gap,
            gap_ratio: if norm > 0.0 { cert.gap / norm } else { 0.0 },
            slack: summarize(&cert.slack_blocks),
        }
    }

    pub fn to_certificate(&self, inst: &SdpInstance) -> Result<InfeasibilityCertificate> {
        Ok(InfeasibilityCertificate {
            k: self.k,
            n: self.n,
            slack_blocks: slack_matrices(inst, &self.y)?,
            y: self.y.clone(),
            gap: self.gap,
        })
    }

    pub fn verify(&self, opts: &SolverOptions) -> Result<CertificateFileCheck> {
        let inst = build_instance(self.k, self.n)?;
        let cert = self.to_certificate(&inst)?;
        let check = verify_certificate_with(&cert, &inst, opts.cert_tol, opts.cert_gap)?;
        let fresh = summarize(&cert.slack_blocks);
        let norm = self.y.iter().map(|v| v * v).sum::<f64>().sqrt().max(1.0);
        let summary_error = if fresh.len() == self.slack.len() {
            fresh
                .iter()
                .zip(&self.slack)
                .map(|(a, b)| (a.min_eig - b.min_eig).abs().max((a.max_eig - b.max_eig).abs()))
                .fold((self.gap_ratio - check.gap_ratio).abs(), f64::max)
        } else {
            f64::INFINITY
        };
        Ok(CertificateFileCheck {
            ok: check.ok && summary_error <= opts.cert_tol * norm,
            min_slack_eig: check.min_slack_eig,
            gap_ratio: check.gap_ratio,
            summary_error,
        })
    }
}

fn summarize(slacks: &[DMatrix<f64>]) -> Vec<SlackSummary> {
    slacks
        .iter()
        .enumerate()
        .map(|(i, s)| SlackSummary {
            t: i + 1,
            min_eig: min_eigenvalue(s),
            max_eig: -min_eigenvalue(&-s),
        })
        .collect()
}

/// Rows `i,t,q` for every polynomial and coefficient.
pub fn coefficient_csv(polys: &[SymmetricLaurent]) -> String {
    let mut out = String::from("i,t,q\n");
    for (t, p) in polys.iter().enumerate() {
        for (i, q) in p.coeffs().iter().enumerate() {
            writeln!(out, "{i},{t},{q:?}").unwrap();
        }
    }
    out
}

/// `theta` and `Q_t(e^{i theta})` for each `t` on `points` samples of `[0, 2pi)`.
pub fn curve_csv(polys: &[SymmetricLaurent], points: usize) -> String {
    let mut out = String::from("theta");
    for t in 0..polys.len() {
        write!(out, ",Q{t}").unwrap();
    }
    out.push('\n');
    for s in 0..points {
        let theta = 2.0 * std::f64::consts::PI * s as f64 / points as f64;
        write!(out, "{theta:?}").unwrap();
        for p in polys {
            write!(out, ",{:?}", p.eval_unit_circle(theta)).unwrap();
        }
        out.push('\n');
    }
    out
}

/// Gram matrix moduli as CSV, one row per target.
pub fn gram_csv(report: &SimulationReport) -> String {
    let mut out = String::new();
    for row in &report.gram {
        let line: Vec<String> = row.iter().map(|g| format!("{:?}", g.norm())).collect();
        out.push_str(&line.join(","));
        out.push('\n');
    }
    out
}
