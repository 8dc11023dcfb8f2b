//! Solves the Caputo boundary-value problem with g(tau, f) = 0.2 f + tau by
//! Picard iteration on the integral operator, and shows the Lipschitz gate
//! rejecting lambda = 0.5.

use gtheta::fractional::{rl_integral, solve_fde, verify_lipschitz, FdeProblem, GridFunction, Rhs};
use gtheta::Error;

fn main() -> gtheta::Result<()> {
    let one = GridFunction::from_fn(2000, |_| 1.0);
    println!("I^1.5[1](1) = {}", rl_integral(&one, 1.5, 1.0)?);

    let problem = FdeProblem::new(1.5, Rhs::parse("linear:lambda=0.2,c=tau")?, 2000, 1e-10, 500)?;
    let gate = verify_lipschitz(&problem, 10_000, 0)?;
    println!("r = {:.4}, Lipschitz check {}", gate.r, gate.verdict);

    let sol = solve_fde(&problem, None)?;
    println!(
        "{} iterations, residual {:.2e}, observed ratio {:.4}",
        sol.iterations,
        sol.residual,
        sol.observed_ratio.unwrap_or(f64::NAN)
    );
    println!("f(0) = {}, int f = {:.6}, f'(0) = {:.6}", sol.f_at_zero, sol.integral, sol.derivative_at_zero);
    for t in [0.25, 0.5, 0.75, 1.0] {
        println!("  f({t}) = {:.8}", sol.solution.interpolate(t));
    }

    let steep = FdeProblem::new(1.5, Rhs::linear(0.5, vec![0.0, 1.0]), 2000, 1e-10, 500)?;
    match solve_fde(&steep, None) {
        Err(Error::GateRejected { r }) => println!("lambda = 0.5 rejected: r = {r:.4}"),
        other => println!("unexpected: {:?}", other.map(|s| s.iterations)),
    }
    Ok(())
}
