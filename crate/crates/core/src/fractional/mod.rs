//! The boundary-value problem `D^eta f = g(tau, f)` on `[0, 1]`, solved in its
//! integral form `f = H f` with
//! `H f (t) = I^eta[g(., f)](t) + 2t ∫₀¹ I^eta[g(., f)](s) ds`
//! by Picard iteration on the sup-metric grid-function space.

mod grid;
mod rhs;
mod rl;

pub use grid::GridFunction;
pub use rhs::Rhs;
pub use rl::{rl_integral, RlWeights};

use rand::Rng;
use serde::Serialize;
use statrs::function::gamma::gamma;

use crate::error::{Error, Result};
use crate::metric::{make_catalog_space, SpaceParams};
use crate::num::{ser_f64, ser_opt_f64, violates};
use crate::point::Point;
use crate::report::Verdict;
use crate::rng::batch_rng;
use crate::suzuki::{iterate_fixed_point, FixedPointResult, SelfMap};

#[derive(Clone, Debug)]
pub struct FdeProblem {
    pub eta: f64,
    pub g: Rhs,
    /// Lipschitz constant of `g` in `f`, used by the gate.
    pub lipschitz_l: f64,
    /// Number of grid cells.
    pub n: usize,
    pub tol: f64,
    pub max_iter: usize,
    weights: RlWeights,
}

impl FdeProblem {
    /// Needs `1 < eta <= 2`, `n >= 2`, `tol > 0` and `max_iter >= 1`. The
    /// Lipschitz constant defaults to the exact one of `g`.
    pub fn new(eta: f64, g: Rhs, n: usize, tol: f64, max_iter: usize) -> Result<Self> {
        if !(eta > 1.0 && eta <= 2.0) {
            return Err(Error::Domain(format!("eta must lie in (1, 2], got {eta}")));
        }
        if n < 2 || !(tol > 0.0) || max_iter == 0 {
            return Err(Error::Domain(format!("need n >= 2, tol > 0, max_iter >= 1; got n={n}, tol={tol}, max_iter={max_iter}")));
        }
        let weights = RlWeights::new(n, eta)?;
        Ok(Self { eta, lipschitz_l: g.lipschitz(), g, n, tol, max_iter, weights })
    }

    /// `r = 4 L / Γ(eta + 1)`.
    pub fn r(&self) -> f64 {
        contraction_bound(self.lipschitz_l, self.eta)
    }
}

/// `4 L / Γ(eta + 1)`.
pub fn contraction_bound(lipschitz_l: f64, eta: f64) -> f64 {
    4.0 * lipschitz_l / gamma(eta + 1.0)
}

/// One application of `H`; the outer integral is a composite trapezoid.
pub fn apply_h(problem: &FdeProblem, xi: &GridFunction) -> Result<GridFunction> {
    if xi.n() != problem.n {
        return Err(Error::Domain(format!("grid has {} cells, problem has {}", xi.n(), problem.n)));
    }
    let gv: Vec<f64> = xi.values().iter().enumerate().map(|(i, &f)| problem.g.eval(xi.node(i), f)).collect();
    if let Some((node, &value)) = gv.iter().enumerate().find(|(_, v)| !v.is_finite()) {
        return Err(Error::Evaluation { node, value });
    }
    let inner = GridFunction::new(problem.weights.apply(&GridFunction::new(gv)));
    let c = inner.trapezoid();
    let mut out: Vec<f64> = inner.values().iter().enumerate().map(|(i, v)| v + 2.0 * xi.node(i) * c).collect();
    out[0] = 0.0;
    Ok(GridFunction::new(out))
}

/// `H` as a self-map of grid-function points.
pub fn h_map(problem: &FdeProblem) -> SelfMap {
    let p = problem.clone();
    SelfMap::new("fde_H", move |x| {
        let g = x.as_grid().ok_or_else(|| Error::Domain(format!("{x} is not a grid function")))?;
        Ok(Point::Grid(apply_h(&p, g)?))
    })
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct FdeSolution {
    #[serde(skip)]
    pub solution: GridFunction,
    #[serde(skip)]
    pub trace: FixedPointResult,
    #[serde(serialize_with = "ser_f64")]
    pub eta: f64,
    pub g: String,
    pub n: usize,
    #[serde(serialize_with = "ser_f64")]
    pub tol: f64,
    #[serde(serialize_with = "ser_f64")]
    pub r: f64,
    pub iterations: usize,
    pub converged: bool,
    /// `max_i |H(f)_i - f_i|`.
    #[serde(serialize_with = "ser_f64")]
    pub residual: f64,
    #[serde(serialize_with = "ser_opt_f64")]
    pub observed_ratio: Option<f64>,
    #[serde(serialize_with = "ser_f64")]
    pub f_at_zero: f64,
    /// Trapezoid `∫₀¹ f`.
    #[serde(serialize_with = "ser_f64")]
    pub integral: f64,
    /// One-sided `f'(0)`.
    #[serde(serialize_with = "ser_f64")]
    pub derivative_at_zero: f64,
    #[serde(serialize_with = "ser_f64")]
    pub boundary_gap: f64,
}

/// Picard iteration from `initial` (zero when `None`). Problems with
/// `r >= 1` are rejected before iterating.
pub fn solve_fde(problem: &FdeProblem, initial: Option<&GridFunction>) -> Result<FdeSolution> {
    let r = problem.r();
    if r >= 1.0 {
        return Err(Error::GateRejected { r });
    }
    let start = initial.cloned().unwrap_or_else(|| GridFunction::zeros(problem.n));
    let space = make_catalog_space("sup_grid_space", &SpaceParams { n: Some(problem.n), ..Default::default() })?;
    let trace = iterate_fixed_point(&space, &h_map(problem), &Point::Grid(start), problem.tol, problem.max_iter, &[1.0])?;
    let solution = trace.fixed_point.as_grid().expect("iteration stays on grid functions").clone();
    let residual = apply_h(problem, &solution)?.sup_distance(&solution);
    let integral = solution.trapezoid();
    let derivative_at_zero = solution.derivative_at_zero();
    Ok(FdeSolution {
        eta: problem.eta,
        g: problem.g.to_string(),
        n: problem.n,
        tol: problem.tol,
        r,
        iterations: trace.iterations,
        converged: trace.converged,
        residual,
        observed_ratio: trace.observed_ratio,
        f_at_zero: solution.values()[0],
        integral,
        derivative_at_zero,
        boundary_gap: (integral - derivative_at_zero).abs(),
        solution,
        trace,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct LipschitzReport {
    pub verdict: Verdict,
    #[serde(serialize_with = "ser_f64")]
    pub lipschitz_l: f64,
    #[serde(serialize_with = "ser_f64")]
    pub r: f64,
    pub gate_passes: bool,
    pub samples: usize,
    /// `[tau, chi1, chi2, |g(tau,chi1) - g(tau,chi2)|, L |chi1 - chi2|]`.
    pub witness: Option<[f64; 5]>,
}

/// Samples `(tau, chi1, chi2)` with `chi` in `[-10, 10]` and checks the
/// declared Lipschitz constant.
pub fn verify_lipschitz(problem: &FdeProblem, samples: usize, seed: u64) -> Result<LipschitzReport> {
    if samples == 0 {
        return Err(Error::Domain("samples must be at least 1".into()));
    }
    let mut rng = batch_rng(seed, 0);
    let l = problem.lipschitz_l;
    let mut witness = None;
    for _ in 0..samples {
        let tau: f64 = rng.random();
        let (c1, c2) = (rng.random_range(-10.0..10.0), rng.random_range(-10.0..10.0));
        let lhs = (problem.g.eval(tau, c1) - problem.g.eval(tau, c2)).abs();
        let rhs = l * (c1 - c2).abs();
        if violates(lhs, rhs) {
            witness = Some([tau, c1, c2, lhs, rhs]);
            break;
        }
    }
    let r = problem.r();
    Ok(LipschitzReport {
        verdict: if witness.is_some() { Verdict::Fail } else { Verdict::Pass },
        lipschitz_l: l,
        r,
        gate_passes: r < 1.0,
        samples,
        witness,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn problem(lambda: f64, n: usize) -> FdeProblem {
        FdeProblem::new(1.5, Rhs::linear(lambda, vec![0.0, 1.0]), n, 1e-10, 500).unwrap()
    }

    #[test]
    fn constant_rhs_closed_form() {
        let p = FdeProblem::new(1.5, Rhs::linear(0.0, vec![1.0]), 64, 1e-10, 10).unwrap();
        let out = apply_h(&p, &GridFunction::zeros(64)).unwrap();
        let g25 = gamma(2.5);
        for (i, v) in out.values().iter().enumerate() {
            let t = out.node(i);
            let exact = t.powf(1.5) / g25 + 2.0 * t / (2.5 * g25);
            // only the outer trapezoid is inexact here
            assert!((v - exact).abs() < 1e-4, "node {i}");
        }
    }

    #[test]
    fn zero_rhs_gives_zero() {
        let p = FdeProblem::new(1.7, Rhs::zero(), 16, 1e-12, 10).unwrap();
        let s = solve_fde(&p, None).unwrap();
        assert!(s.converged);
        assert!(s.solution.values().iter().all(|&v| v == 0.0));
    }

    #[test]
    fn gate() {
        assert!((problem(0.2, 8).r() - 0.8 / gamma(2.5)).abs() < 1e-15);
        assert!(matches!(solve_fde(&problem(0.5, 8), None), Err(Error::GateRejected { .. })));
        let rep = verify_lipschitz(&problem(0.5, 8), 1000, 1).unwrap();
        assert_eq!(rep.verdict, Verdict::Pass);
        assert!(!rep.gate_passes);
        let mut lying = problem(0.2, 8);
        lying.lipschitz_l = 0.1;
        assert_eq!(verify_lipschitz(&lying, 1000, 1).unwrap().verdict, Verdict::Fail);
    }

    #[test]
    fn node_zero_is_exact() {
        let p = problem(0.2, 32);
        let xi = GridFunction::from_fn(32, |t| 5.0 + t);
        assert_eq!(apply_h(&p, &xi).unwrap().values()[0], 0.0);
    }

    #[test]
    fn bad_problems() {
        assert!(FdeProblem::new(1.0, Rhs::zero(), 8, 1e-8, 1).is_err());
        assert!(FdeProblem::new(2.5, Rhs::zero(), 8, 1e-8, 1).is_err());
        assert!(FdeProblem::new(1.5, Rhs::zero(), 1, 1e-8, 1).is_err());
    }
}
