//! Tolerances from defaults, an optional TOML file, then flags.

use std::path::Path;

use anyhow::Context;
use clap::Args;
use serde::{Deserialize, Serialize};

use ordsearch::reconstruct::RECONSTRUCT_TOL;
use ordsearch::SolverOptions;

/// Default exactness tolerance for simulation reports.
pub const SIM_TOL: f64 = 1e-7;

#[derive(Args, Debug, Clone, Default)]
pub struct Tolerances {
    /// Equality violation accepted in a feasible point [1e-8]
    #[arg(long, global = true)]
    pub tol_feas: Option<f64>,
    /// Negative eigenvalue accepted in a feasible point [1e-9]
    #[arg(long, global = true)]
    pub tol_psd: Option<f64>,
    /// Certificate slack PSD tolerance relative to |y| [1e-8]
    #[arg(long, global = true)]
    pub tol_cert: Option<f64>,
    /// Smallest certificate gap ratio [1e-6]
    #[arg(long, global = true)]
    pub tol_gap: Option<f64>,
    /// Interior-point stopping tolerance [1e-10]
    #[arg(long, global = true)]
    pub tol_ipm: Option<f64>,
    /// Interior-point iteration cap [200]
    #[arg(long, global = true)]
    pub max_iters: Option<usize>,
    /// Gram matrix exactness tolerance [1e-7]
    #[arg(long, global = true)]
    pub tol_sim: Option<f64>,
    /// Reconstruction magnitude and factorization tolerance [1e-8]
    #[arg(long, global = true)]
    pub tol_reconstruct: Option<f64>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct ConfigFile {
    #[serde(default)]
    tolerances: FileTolerances,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct FileTolerances {
    feas: Option<f64>,
    psd: Option<f64>,
    cert: Option<f64>,
    gap: Option<f64>,
    ipm: Option<f64>,
    max_iters: Option<usize>,
    sim: Option<f64>,
    reconstruct: Option<f64>,
}

#[derive(Debug, Clone, Serialize)]
pub struct Settings {
    pub solver: SolverOptions,
    pub sim_tol: f64,
    pub reconstruct_tol: f64,
}

impl Settings {
    pub fn resolve(config: Option<&Path>, flags: &Tolerances) -> anyhow::Result<Self> {
        let file = match config {
            Some(p) => {
                let text = std::fs::read_to_string(p)
                    .with_context(|| format!("reading {}", p.display()))?;
                toml::from_str::<ConfigFile>(&text)
                    .map_err(|e| ordsearch::Error::Schema(format!("{}: {e}", p.display())))?
            }
            None => ConfigFile::default(),
        };
        let f = file.tolerances;
        let mut s = Settings {
            solver: SolverOptions::default(),
            sim_tol: SIM_TOL,
            reconstruct_tol: RECONSTRUCT_TOL,
        };
        let o = &mut s.solver;
        set(&mut o.feas_tol, f.feas, flags.tol_feas);
        set(&mut o.psd_tol, f.psd, flags.tol_psd);
        set(&mut o.cert_tol, f.cert, flags.tol_cert);
        set(&mut o.cert_gap, f.gap, flags.tol_gap);
        set(&mut o.ipm_tol, f.ipm, flags.tol_ipm);
        set(&mut o.max_iters, f.max_iters, flags.max_iters);
        set(&mut s.sim_tol, f.sim, flags.tol_sim);
        set(&mut s.reconstruct_tol, f.reconstruct, flags.tol_reconstruct);
        for (name, v) in [("tol-sim", s.sim_tol), ("tol-reconstruct", s.reconstruct_tol)] {
            if !(v > 0.0 && v.is_finite()) {
                return Err(ordsearch::Error::InvalidArgument(format!(
                    "{name} must be positive, got {v}"
                ))
                .into());
            }
        }
        Ok(s)
    }
}

fn set<T: Copy>(slot: &mut T, file: Option<T>, flag: Option<T>) {
    if let Some(v) = flag.or(file) {
        *slot = v;
    }
}
