use approx::assert_relative_eq;
use proptest::prelude::*;
use statrs::function::gamma::gamma;

use gtheta::suzuki::estimate_contraction;

use gtheta::fractional::{apply_h, rl_integral, solve_fde, FdeProblem, GridFunction, Rhs};

/// Solution of `f = I^eta[lambda f + tau] + 2t ∫₀¹ I^eta[lambda f + tau]` as
/// `sum_m a_m t^{1 + m eta}`, found by iterating on the coefficients.
fn series_solution(eta: f64, lambda: f64, terms: usize) -> Vec<f64> {
    let mut a = vec![0.0; terms];
    for _ in 0..200 {
        // inner = I^eta[lambda f + tau], exponents 1 + m eta for m >= 1
        let mut inner = vec![0.0; terms];
        inner[1] = 1.0 / gamma(2.0 + eta);
        for m in 0..terms - 1 {
            let p = 1.0 + m as f64 * eta;
            inner[m + 1] += lambda * a[m] * gamma(p + 1.0) / gamma(p + eta + 1.0);
        }
        let k: f64 = inner.iter().enumerate().map(|(m, c)| c / (2.0 + m as f64 * eta)).sum();
        let mut next = inner;
        next[0] = 2.0 * k;
        let delta = next.iter().zip(&a).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max);
        a = next;
        if delta < 1e-16 {
            break;
        }
    }
    a
}

fn eval_series(a: &[f64], eta: f64, t: f64) -> f64 {
    a.iter().enumerate().map(|(m, c)| c * t.powf(1.0 + m as f64 * eta)).sum()
}

#[test]
fn solver_matches_the_series_solution() {
    let (eta, lambda) = (1.5, 0.2);
    let a = series_solution(eta, lambda, 40);
    let problem = FdeProblem::new(eta, Rhs::linear(lambda, vec![0.0, 1.0]), 2000, 1e-12, 500).unwrap();
    let sol = solve_fde(&problem, None).unwrap();
    let err = (0..=2000)
        .map(|i| (sol.solution.values()[i] - eval_series(&a, eta, sol.solution.node(i))).abs())
        .fold(0.0, f64::max);
    assert!(err < 1e-6, "sup error {err}");
    // the exact solution satisfies the boundary relation exactly
    let integral: f64 = a.iter().enumerate().map(|(m, c)| c / (2.0 + m as f64 * eta)).sum();
    assert_relative_eq!(integral, a[0], max_relative = 1e-12);
}

#[test]
fn solver_error_is_second_order() {
    let (eta, lambda) = (1.5, 0.2);
    let a = series_solution(eta, lambda, 40);
    let errs: Vec<f64> = [125, 250, 500, 1000]
        .iter()
        .map(|&n| {
            let p = FdeProblem::new(eta, Rhs::linear(lambda, vec![0.0, 1.0]), n, 1e-13, 500).unwrap();
            let s = solve_fde(&p, None).unwrap();
            (s.solution.values()[n] - eval_series(&a, eta, 1.0)).abs()
        })
        .collect();
    for w in errs.windows(2) {
        let order = (w[0] / w[1]).log2();
        assert!((1.8..=2.2).contains(&order), "errors {errs:?}");
    }
}

/// Literal refinement invariant: the n and 2n solutions agree within four
/// times the single-grid residual.
#[test]
fn refinement_agrees_within_four_residuals() {
    let solve = |n| {
        let p = FdeProblem::new(1.5, Rhs::linear(0.2, vec![0.0, 1.0]), n, 1e-10, 500).unwrap();
        solve_fde(&p, None).unwrap()
    };
    let (coarse, fine) = (solve(1000), solve(2000));
    let gap = (0..=1000).map(|i| (coarse.solution.values()[i] - fine.solution.values()[2 * i]).abs()).fold(0.0, f64::max);
    assert!(gap <= 4.0 * coarse.residual, "sup gap {gap:.3e} vs 4 x residual {:.3e}", 4.0 * coarse.residual);
}

#[test]
fn observed_ratio_stays_below_the_bound() {
    let p = FdeProblem::new(1.5, Rhs::linear(0.2, vec![0.0, 1.0]), 2000, 1e-10, 500).unwrap();
    let s = solve_fde(&p, None).unwrap();
    assert!(s.observed_ratio.unwrap() <= p.r() + 0.05);
    assert!(estimate_contraction(&s.trace).unwrap() <= p.r() + 0.05);
}

#[test]
fn power_law_identity_at_several_points() {
    // I^eta s^k (t) = k! / Gamma(k + eta + 1) t^{k + eta}
    for eta in [1.25, 1.5, 2.0] {
        for k in 0..3 {
            let f = GridFunction::from_fn(1000, |s| s.powi(k));
            for t in [0.3f64, 0.77, 1.0] {
                let exact = gamma(k as f64 + 1.0) / gamma(k as f64 + eta + 1.0) * t.powf(k as f64 + eta);
                // linear interpolation of s^k misses by at most |f''| h^2 / 8
                let h = 1e-3;
                let bound = (k * (k - 1)) as f64 * h * h / 8.0 * t.powf(eta) / gamma(eta + 1.0);
                let err = (rl_integral(&f, eta, t).unwrap() - exact).abs();
                assert!(err <= bound + 1e-14 * exact.abs(), "eta {eta}, k {k}, t {t}: {err:e} > {bound:e}");
            }
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn h_is_affine_linear_for_linear_rhs(c in -0.5f64..0.5, a in -3.0f64..3.0, b in -3.0f64..3.0, seed in 0u64..1000) {
        let p = FdeProblem::new(1.5, Rhs::linear(c, vec![]), 64, 1e-10, 10).unwrap();
        let x = GridFunction::from_fn(64, |t| (seed as f64 * 0.37 + 3.0 * t).sin());
        let y = GridFunction::from_fn(64, |t| t * t - (seed as f64 * 0.11 * t).cos());
        let combo = GridFunction::new(x.values().iter().zip(y.values()).map(|(u, v)| a * u + b * v).collect());
        let lhs = apply_h(&p, &combo).unwrap();
        let (hx, hy) = (apply_h(&p, &x).unwrap(), apply_h(&p, &y).unwrap());
        for i in 0..=64 {
            let rhs = a * hx.values()[i] + b * hy.values()[i];
            prop_assert!((lhs.values()[i] - rhs).abs() <= 1e-12 * (1.0 + rhs.abs()));
        }
    }

    #[test]
    fn h_vanishes_exactly_at_the_origin(vals in proptest::collection::vec(-1e3f64..1e3, 33), lambda in -2.0f64..2.0) {
        let p = FdeProblem::new(1.7, Rhs::linear(lambda, vec![1.0, -2.0, 0.5]), 32, 1e-10, 10).unwrap();
        let out = apply_h(&p, &GridFunction::new(vals)).unwrap();
        prop_assert_eq!(out.values()[0].to_bits(), 0f64.to_bits());
    }
}
