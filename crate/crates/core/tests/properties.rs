// Copyright 2026 The hetero-oracle Contributors
// SPDX-License-Identifier: Apache-2.0

use hetero_oracle::*;
use proptest::prelude::*;

fn odd_n() -> impl Strategy<Value = usize> {
    (1usize..40).prop_map(|h| 2 * h + 1)
}

fn vec_of(n: usize, lo: f64, hi: f64) -> impl Strategy<Value = Vec<f64>> {
    proptest::collection::vec(lo..hi, n)
}

fn direct_norm_sq(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).powi(2)).sum::<f64>() / a.len() as f64
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn basis_is_bounded(j in 1usize..500, x in 0.0f64..1.0) {
        prop_assert!(phi(j, x).unwrap().abs() <= 2f64.sqrt() + 1e-12);
        prop_assert!((phi_bar(j, x).unwrap() - (phi(j, x).unwrap().powi(2) - 1.0)).abs() < 1e-9);
    }

    #[test]
    fn dft_round_trip_and_parseval(y in odd_n().prop_flat_map(|n| vec_of(n, -5.0, 5.0))) {
        let n = y.len();
        let grid = Grid::new(n).unwrap();
        let table = grid.basis_table();
        let theta = table.dft(&y).unwrap();
        let back = table.reconstruct(&theta, &vec![1.0; n]).unwrap();
        for (a, b) in back.iter().zip(&y) {
            prop_assert!((a - b).abs() < 1e-9);
        }
        let lhs: f64 = y.iter().map(|v| v * v).sum::<f64>() / n as f64;
        let rhs: f64 = theta.iter().map(|t| t * t).sum();
        prop_assert!((lhs - rhs).abs() < 1e-9 * (1.0 + lhs));
    }

    #[test]
    fn err_matches_direct_norm(
        (theta_hat, theta, lambda) in odd_n().prop_flat_map(|n| (vec_of(n, -3.0, 3.0), vec_of(n, -3.0, 3.0), vec_of(n, 0.0, 1.0)))
    ) {
        let n = theta.len();
        let grid = Grid::new(n).unwrap();
        let table = grid.basis_table();
        let fit = table.reconstruct(&theta_hat, &lambda).unwrap();
        let truth = table.reconstruct(&theta, &vec![1.0; n]).unwrap();
        let e = err_n(&lambda, &theta_hat, &theta).unwrap();
        prop_assert!((e - direct_norm_sq(&fit, &truth)).abs() < 1e-9);
        prop_assert!(e >= 0.0);
    }

    #[test]
    fn variance_estimate_nonnegative(theta in odd_n().prop_flat_map(|n| vec_of(n, -10.0, 10.0))) {
        let n = theta.len();
        let v = variance_estimate(&theta, default_m_n(n)).unwrap();
        prop_assert!(v >= 0.0);
    }

    #[test]
    fn pinsker_is_monotone_and_bounded(beta in 1u32..4, t in 0.01f64..3.0, h in 10usize..300) {
        let n = 2 * h + 1;
        let w = pinsker_weight(beta, t, n).unwrap();
        let c = w.coeffs();
        prop_assert!(c.iter().all(|&v| (0.0..=1.0).contains(&v)));
        prop_assert!(c.windows(2).all(|p| p[1] <= p[0]));
    }

    #[test]
    fn cost_matches_expansion(
        (theta, lambda) in odd_n().prop_flat_map(|n| (vec_of(n, -3.0, 3.0), vec_of(n, 0.0, 1.0))),
        rho in 0.01f64..0.3,
    ) {
        let n = theta.len();
        let m_n = default_m_n(n).min(n - 1);
        let state = State::new(theta.clone(), m_n, rho, None).unwrap();
        let vs = state.varsigma_hat;
        let nf = n as f64;
        let expected: f64 = theta.iter().zip(&lambda).map(|(t, l)| l * l * t * t - 2.0 * l * (t * t - vs / nf)).sum::<f64>()
            + rho * lambda.iter().map(|l| l * l).sum::<f64>() * vs / nf;
        prop_assert!((cost(&lambda, &state).unwrap() - expected).abs() < 1e-9 * (1.0 + expected.abs()));
    }
}

#[test]
fn orthonormal_for_several_sizes() {
    for n in [5usize, 11, 51] {
        let grid = Grid::new(n).unwrap();
        let table = grid.basis_table();
        for i in 1..=n {
            for j in 1..=n {
                let ip = empirical_inner(table.row(i), table.row(j), &grid).unwrap();
                let want = if i == j { 1.0 } else { 0.0 };
                assert!((ip - want).abs() < 1e-9, "n={n} i={i} j={j} ip={ip}");
            }
        }
    }
}

#[test]
fn f32_pipeline_runs() {
    let grid = Grid32::new(51).unwrap();
    let signal = Signal32::sine(1.0, 1).unwrap();
    let vol = VolatilitySpec::calibrated(VolatilityKind::budget(1.0, 1.0, 1.0).unwrap(), &signal, &grid).unwrap();
    let sample = generate_sample(&signal, &vol, NoiseSpec::Gaussian, &grid, 1).unwrap();
    let fit = estimate(&sample, &Config32::default()).unwrap();
    assert!(fit.eval(0.3).is_finite());
}
