//! Invariants that hold independently of any solver run.

use nalgebra::DMatrix;
use num_complex::Complex64;
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use ordsearch::fourier::Dft;
use ordsearch::laurent::SymmetricLaurent;
use ordsearch::reconstruct::QueryAlgorithm;
use ordsearch::sdp_model::{
    build_instance, j_symmetrize, min_eigenvalue, reduce, signed_trace, BasisChange,
};
use ordsearch::simulator::{comparison_oracle, translate, OracleSpec};

fn gaussianish(rng: &mut ChaCha8Rng) -> f64 {
    // sum of uniforms; shape does not matter, only spread
    (0..4).map(|_| rng.random::<f64>() - 0.5).sum()
}

/// `A A^T / tr` for a random `n x rank` matrix `A`.
fn random_psd(n: usize, rank: usize, seed: u64) -> DMatrix<f64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let a = DMatrix::from_fn(n, rank, |_, _| gaussianish(&mut rng));
    let q = &a * a.transpose();
    let tr = q.trace().max(1e-300);
    q / tr
}

fn random_symmetric(n: usize, seed: u64) -> DMatrix<f64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let a = DMatrix::from_fn(n, n, |_, _| gaussianish(&mut rng));
    (&a + a.transpose()) * 0.5
}

fn psd_case() -> impl Strategy<Value = (usize, usize, u64)> {
    (1usize..=32)
        .prop_flat_map(|n| (Just(n), 1..=n, any::<u64>()))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(1000))]

    /// PSD Gram matrices give polynomials nonnegative on the circle, and
    /// their spectral factors multiply back to the same coefficients.
    #[test]
    fn lemma1_and_factorization_roundtrip((n, rank, seed) in psd_case()) {
        let q = random_psd(n, rank, seed);
        let poly = SymmetricLaurent::from_gram(&q).unwrap();
        let (_, min) = poly.min_on_circle(8 * n);
        prop_assert!(min >= -1e-9 * (1.0 + q.trace()), "n={} min={}", n, min);

        let factor = poly.spectral_factorize(1e-8).unwrap();
        let back = factor.multiply_out().unwrap();
        let residual = back.max_abs_diff(&poly);
        prop_assert!(residual <= 1e-8 * (1.0 + poly.max_abs()), "n={} residual={:e}", n, residual);

        // converse direction: Re(p p^H) is a PSD Gram matrix of the same polynomial
        let p = &factor.coeffs;
        let gram = DMatrix::from_fn(n, n, |r, c| (p[r] * p[c].conj()).re);
        prop_assert!(min_eigenvalue(&gram) >= -1e-12);
        let again = SymmetricLaurent::from_gram(&gram).unwrap();
        prop_assert!(again.max_abs_diff(&poly) <= 1e-8 * (1.0 + poly.max_abs()));
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(300))]

    #[test]
    fn signed_trace_depends_on_parity_only(n in 2usize..=20, t in 0usize..8, seed in any::<u64>()) {
        let x = random_symmetric(n, seed);
        for i in 1..n {
            prop_assert_eq!(signed_trace(&x, t, i).unwrap(), signed_trace(&x, t + 2, i).unwrap());
        }
    }

    #[test]
    fn reduce_then_expand_is_identity_on_j_commuting(n in 1usize..=20, seed in any::<u64>()) {
        let q = j_symmetrize(&random_symmetric(n, seed));
        let basis = BasisChange::new(n);
        let back = basis.expand(&basis.reduce(&q)).unwrap();
        prop_assert!((back - &q).amax() <= 1e-12 * (1.0 + q.amax()));
    }

    #[test]
    fn circle_values_are_even_and_average_to_q0(
        coeffs in prop::collection::vec(-2.0f64..2.0, 1..24),
        theta in 0.0f64..6.3,
    ) {
        let p = SymmetricLaurent::new(coeffs.clone()).unwrap();
        prop_assert_eq!(p.eval_unit_circle(theta), p.eval_unit_circle(-theta));
        let grid = 4 * coeffs.len();
        let mean: f64 = (0..grid)
            .map(|g| p.eval_unit_circle(2.0 * std::f64::consts::PI * g as f64 / grid as f64))
            .sum::<f64>() / grid as f64;
        prop_assert!((mean - coeffs[0]).abs() <= 1e-12 * (1.0 + p.max_abs()));
    }

    /// Fourier-diagonal unitaries commute with the cyclic shift.
    #[test]
    fn unitaries_commute_with_translation(n in 1usize..=40, seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let len = 2 * n;
        let phases = vec![(0..len).map(|_| rng.random::<f64>() * 6.0 - 3.0).collect()];
        let states = vec![vec![Complex64::new(0.0, 0.0); len]; 2];
        let algo = QueryAlgorithm::new(n, 1, states, phases).unwrap();
        let v: Vec<Complex64> = (0..len)
            .map(|_| Complex64::new(gaussianish(&mut rng), gaussianish(&mut rng)))
            .collect();
        let dft = Dft::new(len);
        let lhs = algo.apply_unitary(&dft, 1, &translate(&v, 1));
        let rhs = translate(&algo.apply_unitary(&dft, 1, &v), 1);
        let err = lhs.iter().zip(&rhs).map(|(a, b)| (a - b).norm()).fold(0.0, f64::max);
        prop_assert!(err <= 1e-10, "err={:e}", err);
        let norm_in: f64 = v.iter().map(|c| c.norm_sqr()).sum();
        let norm_out: f64 = rhs.iter().map(|c| c.norm_sqr()).sum();
        prop_assert!((norm_in - norm_out).abs() <= 1e-10 * norm_in);
    }

    #[test]
    fn comparison_oracle_extends_to_g(values in prop::collection::vec(0u32..50, 1..30), target in 0u32..55) {
        let mut list = values;
        list.sort();
        let o = comparison_oracle(&list, &target).unwrap();
        let n = list.len();
        let g = o.g();
        for x in 0..n {
            prop_assert_eq!(g.g_diag[x], o.query(x));
            prop_assert_eq!(g.g_diag[x + n], -o.query(x));
        }
        if o.j < n {
            prop_assert_eq!(g, OracleSpec::new(n, o.j));
        }
    }
}

/// `g_{j+l}(x) = g_j(x - l)` over all of `Z/2N`, and the signs agree with
/// the direct extension of `f_j`.
#[test]
fn oracle_equivariance_exhaustive() {
    for n in 1..=64usize {
        let len = 2 * n;
        let g: Vec<Vec<f64>> = (0..len).map(|j| OracleSpec::new(n, j).g_diag).collect();
        for j in 0..n {
            for x in 0..n {
                let f = if x < j { -1.0 } else { 1.0 };
                assert_eq!(g[j][x], f);
                assert_eq!(g[j][x + n], -f);
            }
        }
        for j in 0..len {
            for l in 0..len {
                for x in 0..len {
                    assert_eq!(g[(j + l) % len][x], g[j][(x + len - l) % len], "n={n} j={j} l={l} x={x}");
                }
            }
        }
    }
}

/// `T G_j T^{-1} = G_{j+1}` as operators, checked on every basis vector.
#[test]
fn conjugation_identity_exhaustive() {
    for n in 1..=64usize {
        let len = 2 * n;
        for j in 0..len {
            let gj = OracleSpec::new(n, j);
            let next = OracleSpec::new(n, j + 1);
            for x in 0..len {
                let mut e = vec![Complex64::new(0.0, 0.0); len];
                e[x] = Complex64::new(1.0, 0.0);
                let mut v = translate(&e, len - 1);
                gj.apply(&mut v);
                let lhs = translate(&v, 1);
                let mut rhs = e;
                next.apply(&mut rhs);
                assert_eq!(lhs, rhs, "n={n} j={j} x={x}");
            }
        }
    }
}

#[test]
fn parameter_and_row_counts() {
    for k in 1..=5usize {
        for n in 1..=50usize {
            let inst = build_instance(k, n).unwrap();
            assert_eq!(inst.rows().len(), k * (n - 1) + (k - 1), "k={k} n={n}");
            let red = reduce(&inst);
            let (small, large) = (n / 2, n.div_ceil(2));
            assert_eq!(
                red.params_per_matrix(),
                small * (small + 1) / 2 + large * (large + 1) / 2
            );
            // closed forms, scaled to stay in integers
            let total = red.total_params();
            if n % 2 == 0 {
                assert_eq!(4 * total, n * (n + 2) * (k - 1), "k={k} n={n}");
            } else {
                assert_eq!(4 * total, (n + 1) * (n + 1) * (k - 1), "k={k} n={n}");
            }
            assert_eq!(inst.summary().reduced_params, total);
        }
    }
}
