//! Fixtures shared by the benchmarks.

use ordsearch::reconstruct::{reconstruct_algorithm, QueryAlgorithm};
use ordsearch::solver::FeasiblePoint;
use ordsearch::{build_instance, solve_feasibility, SolveOutcome, SolverOptions};

/// Feasible point of `S(k, n)`; panics if the instance is not feasible.
pub fn witness(k: usize, n: usize) -> FeasiblePoint {
    let inst = build_instance(k, n).expect("valid sizes");
    match solve_feasibility(&inst, &SolverOptions::default()).expect("solver runs") {
        SolveOutcome::Feasible(p) => p,
        other => panic!("S({k}, {n}) not feasible: {other:?}"),
    }
}

pub fn algorithm(k: usize, n: usize) -> QueryAlgorithm {
    reconstruct_algorithm(&witness(k, n)).expect("reconstruction succeeds")
}
