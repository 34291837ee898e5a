use num_complex::Complex64;
use ordsearch::reconstruct::{
    final_state, reconstruct_algorithm, state_autocorrelation, uniform_state, QueryAlgorithm,
};
use ordsearch::sdp_model::build_instance;
use ordsearch::simulator::{
    exactness_report, recursive_search, run, translate, RecursiveSearcher,
};
use ordsearch::solver::{solve_feasibility, SolveOutcome, SolverOptions};
use ordsearch::Error;

fn algorithm(k: usize, n: usize) -> QueryAlgorithm {
    let inst = build_instance(k, n).unwrap();
    match solve_feasibility(&inst, &SolverOptions::default()).unwrap() {
        SolveOutcome::Feasible(fp) => reconstruct_algorithm(&fp).unwrap(),
        other => panic!("k={k} N={n} not feasible: {other:?}"),
    }
}

fn dist(a: &[Complex64], b: &[Complex64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).norm_sqr()).sum::<f64>().sqrt()
}

/// Insertion index by linear scan.
fn insertion(list: &[usize], target: usize) -> usize {
    list.iter().position(|&v| v >= target).unwrap()
}

#[test]
fn k2_n6_runs_are_translates() {
    let algo = algorithm(2, 6);
    let phi0 = run(&algo, 0).unwrap();
    assert!(dist(&phi0, &final_state(6, 2)) < 1e-8);
    for j in 0..6 {
        let phi = run(&algo, j).unwrap();
        assert!(dist(&phi, &translate(&phi0, j)) < 1e-8, "j={j}");
        let norm: f64 = phi.iter().map(|c| c.norm_sqr()).sum();
        assert!((norm - 1.0).abs() < 1e-10);
    }
    assert!(run(&algo, 6).is_err());
    let report = exactness_report(&algo, 1e-7);
    assert!(report.exact, "{} {}", report.max_offdiag, report.min_diag);
    assert!(report.max_offdiag <= 1e-8);
    assert!(report.min_success > 1.0 - 1e-8);
}

#[test]
fn corrupted_phases_break_exactness() {
    let mut algo = algorithm(2, 6);
    // U_1; the last unitary cannot affect orthogonality
    algo.phases[0].iter_mut().for_each(|t| *t = 0.0);
    assert!(!exactness_report(&algo, 1e-7).exact);
    assert!(matches!(
        RecursiveSearcher::new(&algo, 1e-7),
        Err(Error::InexactBase { .. })
    ));
}

#[test]
fn k3_n56_is_exact() {
    let inst = build_instance(3, 56).unwrap();
    let SolveOutcome::Feasible(fp) = solve_feasibility(&inst, &SolverOptions::default()).unwrap()
    else {
        panic!("k=3 N=56 not feasible");
    };
    let algo = reconstruct_algorithm(&fp).unwrap();
    assert_eq!(algo.states[0], uniform_state(56));
    for t in 1..3 {
        let want = fp.polynomial_view[t].coeffs();
        let got = state_autocorrelation(&algo.states[t], 56);
        let err = got
            .iter()
            .zip(want)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max);
        assert!(err < 1e-8, "t={t} err={err:e}");
    }
    let report = exactness_report(&algo, 1e-7);
    assert!(report.exact, "{} {}", report.max_offdiag, report.min_diag);
}

#[test]
fn json_roundtrip() {
    let algo = algorithm(2, 4);
    let text = serde_json::to_string(&algo).unwrap();
    let back: QueryAlgorithm = serde_json::from_str(&text).unwrap();
    assert_eq!(back, algo);
}

#[test]
fn recursive_search_is_exhaustively_correct() {
    let algo = algorithm(2, 6);
    let searcher = RecursiveSearcher::new(&algo, 1e-7).unwrap();
    for (m, queries) in [(36usize, 4usize), (216, 6), (7, 4), (6, 2)] {
        let list: Vec<usize> = (0..m).map(|i| 3 * i + 1).collect();
        for target in 0..=list[m - 1] {
            let r = searcher.search(&list, &target).unwrap();
            assert_eq!(r.index, insertion(&list, target), "m={m} target={target}");
            assert_eq!(r.queries_used, queries);
        }
        assert!(matches!(
            searcher.search(&list, &(list[m - 1] + 1)),
            Err(Error::PromiseViolated)
        ));
    }
    let single = recursive_search(&[5usize], &5, &algo, 1e-7).unwrap();
    assert_eq!((single.index, single.queries_used), (0, 0));
}
