pub mod artifacts;
pub mod error;
pub mod fourier;
pub mod laurent;
pub mod reconstruct;
pub mod sdp_model;
pub mod simulator;
pub mod solver;
pub mod stats;

pub use error::{Error, Result};
pub use laurent::SymmetricLaurent;
pub use reconstruct::QueryAlgorithm;
pub use sdp_model::{build_instance, SdpInstance};
pub use simulator::{exactness_report, SimulationReport};
pub use solver::{solve_feasibility, SolveOutcome, SolverOptions};
