//! Solves `S(K, N)` for a range of `N` and prints one line per size.
//!
//! `cargo run --release -p ordsearch --example sweep -- K NLO NHI`
//! (set `RUST_LOG=debug` for per-iteration solver output).

use std::time::Instant;

use ordsearch::{build_instance, solve_feasibility, SolveOutcome, SolverOptions};

fn main() {
    env_logger::init();
    let args: Vec<usize> = std::env::args()
        .skip(1)
        .map(|a| a.parse().expect("integer argument"))
        .collect();
    let [k, lo, hi] = args[..] else {
        eprintln!("usage: sweep K NLO NHI");
        std::process::exit(4);
    };
    for n in lo..=hi {
        let t = Instant::now();
        let inst = build_instance(k, n).expect("valid sizes");
        let out = solve_feasibility(&inst, &SolverOptions::default()).expect("solver runs");
        let secs = t.elapsed().as_secs_f64();
        match out {
            SolveOutcome::Feasible(p) => println!(
                "N={n} feasible margin {:.3e} eq {:.1e} min_eig {:.3e} ({secs:.1}s)",
                p.margin, p.eq_violation, p.min_eig
            ),
            SolveOutcome::Infeasible(c) => {
                let norm = c.y.iter().map(|v| v * v).sum::<f64>().sqrt();
                println!("N={n} infeasible gap ratio {:.3e} ({secs:.1}s)", c.gap / norm)
            }
            SolveOutcome::Indeterminate(d) => {
                println!("N={n} indeterminate: {} ({secs:.1}s)", d.reason)
            }
        }
    }
}
