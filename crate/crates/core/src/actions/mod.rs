//! B-actions and control pairs.
//!
//! A B-action is a binary operation on `[0, inf)` used in place of `+` in
//! triangle-type inequalities. The catalog holds the usual examples plus two
//! operations (`max`, `half_sum`) that break the strict axioms.

mod control;
mod verify;

use std::fmt;
use std::sync::Arc;

use serde::{Serialize, Serializer};

use crate::error::{Error, Result};
use crate::report::Axiom;

pub use control::{control_by_name, ControlPair, ControlSpec, F2_DEPTH};
pub use verify::{replay_action_witness, verify_action, verify_control};

type BinOp = Arc<dyn Fn(f64, f64) -> f64 + Send + Sync>;

/// Iteration cap for [`solve_action`].
pub const SOLVE_MAX_ITER: usize = 200;

/// A named binary operation on `[0, inf)`.
#[derive(Clone)]
pub struct BAction {
    name: String,
    eval: BinOp,
    known_violations: Vec<Axiom>,
}

impl BAction {
    /// Registers an action. `known_violations` lists the axioms it is known to
    /// fail, so the verifier's verdict can be compared against it.
    pub fn new(
        name: impl Into<String>,
        eval: impl Fn(f64, f64) -> f64 + Send + Sync + 'static,
        known_violations: Vec<Axiom>,
    ) -> Self {
        Self { name: name.into(), eval: Arc::new(eval), known_violations }
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn known_violations(&self) -> &[Axiom] {
        &self.known_violations
    }

    /// Unchecked evaluation for callers that already hold non-negative inputs.
    #[inline]
    pub fn apply(&self, a: f64, b: f64) -> f64 {
        (self.eval)(a, b)
    }
}

impl fmt::Debug for BAction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("BAction")
            .field("name", &self.name)
            .field("known_violations", &self.known_violations)
            .finish_non_exhaustive()
    }
}

impl Serialize for BAction {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&self.name)
    }
}

pub fn plus() -> BAction {
    BAction::new("plus", |a, b| a + b, vec![])
}

/// `a + b + ab`.
pub fn theta1() -> BAction {
    BAction::new("theta1", |a, b| a + b + a * b, vec![])
}

/// `ab / (1 + ab)`. Vanishes whenever either argument does and never reaches 1.
pub fn theta2() -> BAction {
    BAction::new("theta2", |a, b| a * b / (1.0 + a * b), vec![Axiom::B2, Axiom::B3])
}

/// `k (a + b + ab)` for `k` in `(0, 1]`; below `k = 1` targets above `k * target`
/// cannot be reached from `x = 0`.
pub fn theta3(k: f64) -> Result<BAction> {
    if !(k > 0.0 && k <= 1.0) {
        return Err(Error::Config(format!("theta3 needs k in (0, 1], got {k}")));
    }
    let known = if k < 1.0 { vec![Axiom::B3] } else { vec![] };
    let name = if k == 0.5 { "theta3".to_string() } else { format!("theta3:k={k}") };
    Ok(BAction::new(name, move |a, b| k * (a + b + a * b), known))
}

/// `sqrt(a^2 + b^2)`.
pub fn theta4() -> BAction {
    BAction::new("theta4", |a, b| (a * a + b * b).sqrt(), vec![])
}

/// `a + b + sqrt(ab)`.
pub fn sqrt_mix() -> BAction {
    BAction::new("sqrt_mix", |a, b| a + b + (a * b).sqrt(), vec![])
}

pub fn max() -> BAction {
    BAction::new("max", f64::max, vec![Axiom::B2])
}

/// `(a + b) / 2`.
pub fn half_sum() -> BAction {
    BAction::new("half_sum", |a, b| 0.5 * (a + b), vec![Axiom::B3])
}

/// Catalog names accepted by [`action_by_name`].
pub const ACTION_NAMES: [&str; 8] =
    ["plus", "theta1", "theta2", "theta3", "theta4", "sqrt_mix", "max", "half_sum"];

/// Every catalog action with default parameters.
pub fn catalog_actions() -> Vec<BAction> {
    ACTION_NAMES.iter().map(|n| action_by_name(n).expect("catalog name")).collect()
}

/// Looks up a catalog action. `theta3` accepts a parameter as `theta3:k=0.8`.
pub fn action_by_name(spec: &str) -> Result<BAction> {
    let (name, params) = match spec.split_once(':') {
        Some((n, p)) => (n.trim(), Some(p)),
        None => (spec.trim(), None),
    };
    let simple = |a: BAction| match params {
        None => Ok(a),
        Some(_) => Err(Error::Config(format!("action {name} takes no parameters"))),
    };
    match name {
        "plus" => simple(plus()),
        "theta1" => simple(theta1()),
        "theta2" => simple(theta2()),
        "theta4" => simple(theta4()),
        "sqrt_mix" => simple(sqrt_mix()),
        "max" => simple(max()),
        "half_sum" => simple(half_sum()),
        "theta3" => {
            let k = match params {
                None => 0.5,
                Some(p) => {
                    let v = p
                        .trim()
                        .strip_prefix("k=")
                        .ok_or_else(|| Error::Config(format!("theta3 parameter must be k=..., got {p:?}")))?;
                    v.parse().map_err(|_| Error::Config(format!("bad theta3 k {v:?}")))?
                }
            };
            theta3(k)
        }
        other => Err(Error::Config(format!("unknown action {other:?}"))),
    }
}

/// Checked evaluation.
pub fn eval_action(action: &BAction, a: f64, b: f64) -> Result<f64> {
    if !(a >= 0.0 && b >= 0.0) {
        return Err(Error::Domain(format!("{} needs non-negative inputs, got ({a}, {b})", action.name)));
    }
    Ok(action.apply(a, b))
}

/// Tolerance on the action value used by [`solve_action`].
pub fn solve_tolerance(target: f64) -> f64 {
    1e-12 * target.max(1.0)
}

/// Finds `omega` in `[0, target]` with `action(x, omega) = target` by bisection.
pub fn solve_action(action: &BAction, target: f64, x: f64) -> Result<f64> {
    if !(target >= 0.0 && x >= 0.0 && x <= target) {
        return Err(Error::Domain(format!("need 0 <= x <= target, got x = {x}, target = {target}")));
    }
    let tol = solve_tolerance(target);
    let g = |w: f64| action.apply(x, w) - target;
    let unsolvable = || Error::Unsolvable { action: action.name.clone(), target, x };

    let (g_lo, g_hi) = (g(0.0), g(target));
    if g_lo.abs() <= tol {
        return Ok(0.0);
    }
    if g_hi.abs() <= tol {
        return Ok(target);
    }
    if g_lo > 0.0 || g_hi < 0.0 {
        return Err(unsolvable());
    }
    let (mut lo, mut hi) = (0.0, target);
    for _ in 0..SOLVE_MAX_ITER {
        let mid = 0.5 * (lo + hi);
        let gm = g(mid);
        if gm.abs() <= tol {
            return Ok(mid);
        }
        if gm < 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Err(unsolvable())
}

/// Distance from `target` to the interval `[action(x, 0), action(x, target)]`,
/// i.e. how far the monotone branch misses. Zero when the target is in reach.
pub fn reach_gap(action: &BAction, target: f64, x: f64) -> f64 {
    let lo = action.apply(x, 0.0);
    let hi = action.apply(x, target);
    (lo - target).max(target - hi).max(0.0)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn theta1_value() {
        assert_eq!(eval_action(&theta1(), 2.0, 3.0).unwrap(), 11.0);
    }

    #[test]
    fn every_action_vanishes_at_origin() {
        for a in catalog_actions() {
            assert_eq!(eval_action(&a, 0.0, 0.0).unwrap(), 0.0, "{}", a.name());
        }
    }

    #[test]
    fn max_value_and_negative_input() {
        assert_eq!(eval_action(&max(), 3.0, 5.0).unwrap(), 5.0);
        assert!(matches!(eval_action(&plus(), -1.0, 1.0), Err(Error::Domain(_))));
        assert!(matches!(eval_action(&plus(), f64::NAN, 1.0), Err(Error::Domain(_))));
    }

    #[test]
    fn solves_plus_and_theta1() {
        assert_relative_eq!(solve_action(&plus(), 5.0, 2.0).unwrap(), 3.0, epsilon = 1e-11);
        // closed form (target - x) / (1 + x)
        assert_relative_eq!(solve_action(&theta1(), 5.0, 1.0).unwrap(), 2.0, epsilon = 1e-11);
    }

    #[test]
    fn half_sum_cannot_reach_from_zero() {
        let err = solve_action(&half_sum(), 2.0, 0.0).unwrap_err();
        assert!(matches!(err, Error::Unsolvable { target, x, .. } if target == 2.0 && x == 0.0));
        assert_eq!(reach_gap(&half_sum(), 2.0, 0.0), 1.0);
    }

    #[test]
    fn solve_rejects_x_above_target() {
        assert!(matches!(solve_action(&plus(), 1.0, 2.0), Err(Error::Domain(_))));
    }

    #[test]
    fn lookup_with_parameter() {
        let a = action_by_name("theta3:k=1").unwrap();
        assert!(a.known_violations().is_empty());
        assert_eq!(a.apply(1.0, 1.0), 3.0);
        assert!(action_by_name("theta3:k=2").is_err());
        assert!(action_by_name("plus:k=1").is_err());
        assert!(action_by_name("minus").is_err());
    }
}
