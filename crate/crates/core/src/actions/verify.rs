use rand::Rng;

use super::{reach_gap, solve_action, solve_tolerance, BAction, ControlPair};
use crate::error::Error;
use crate::report::{Axiom, AxiomReport, Relation, Witness};
use crate::rng::{batch_rng, nonneg_scalar, BATCH_SIZE};

/// `f(2^-k)` must drop below `-F2_FLOOR` for some `k <= K_max`.
const F2_FLOOR: f64 = 20.0;
/// Relative size of the coarse continuity probe step; the fine step is
/// `CONT_SHRINK` times smaller.
const CONT_STEP: f64 = 1e-6;
const CONT_SHRINK: f64 = 1e-6;

/// Recomputes `(lhs, rhs)` for an action witness from its arguments.
fn evaluate(action: &BAction, axiom: Axiom, args: &[f64]) -> Option<(f64, f64)> {
    let e = |a, b| action.apply(a, b);
    Some(match (axiom, args) {
        (Axiom::B1, &[a, b]) if a == 0.0 && b == 0.0 => (e(0.0, 0.0), 0.0),
        (Axiom::B1, &[a, b]) => (e(a, b), e(b, a)),
        (Axiom::B2, &[x, w1, u, w2]) => (e(x, w1), e(u, w2)),
        (Axiom::B3, &[target, x]) => (b3_miss(action, target, x), solve_tolerance(target)),
        (Axiom::B4, &[w]) => (e(w, 0.0), w),
        (Axiom::Continuity, &[a, b, h]) => {
            // flagged only when the fine increment is both non-negligible and
            // not shrinking relative to the coarse one, as across a jump
            let base = e(a, b);
            let fine = (e(a + h * CONT_SHRINK, b + h * CONT_SHRINK) - base).abs();
            let coarse = (e(a + h, b + h) - base).abs();
            (fine, (0.5 * coarse).max(1e-3 * (1.0 + base.abs())))
        }
        _ => return None,
    })
}

/// How far `action(x, .)` misses `target` on `[0, target]`: the gap to the
/// reachable interval, or the best residual over a dense scan when the gap is
/// closed but bisection still fails (a jump).
fn b3_miss(action: &BAction, target: f64, x: f64) -> f64 {
    let gap = reach_gap(action, target, x);
    if gap > 0.0 {
        return gap;
    }
    (0..=4096)
        .map(|i| (action.apply(x, target * i as f64 / 4096.0) - target).abs())
        .fold(f64::INFINITY, f64::min)
}

/// Replays a failing action report: recomputes both sides from the witness
/// arguments and checks they match bit-for-bit and still violate.
pub fn replay_action_witness(action: &BAction, report: &AxiomReport) -> bool {
    let Some(w) = &report.witness else { return false };
    let Some((lhs, rhs)) = evaluate(action, report.axiom, &w.args) else { return false };
    let same = lhs.to_bits() == w.lhs.to_bits() && rhs.to_bits() == w.rhs.to_bits();
    let b3_ok = report.axiom != Axiom::B3 || matches!(solve_action(action, w.args[0], w.args[1]), Err(Error::Unsolvable { .. }));
    same && b3_ok && w.relation.violated(lhs, rhs)
}

fn relation_for(axiom: Axiom, args: &[f64]) -> Relation {
    match axiom {
        Axiom::B1 if args.iter().all(|&a| a == 0.0) => Relation::Nonzero,
        Axiom::B1 => Relation::Differs,
        Axiom::B2 => Relation::NotBelow,
        _ => Relation::Exceeds,
    }
}

/// Evaluates one instance and records it on the report.
fn check(action: &BAction, report: &mut AxiomReport, args: Vec<f64>) {
    report.checked += 1;
    if report.failed() {
        return;
    }
    let Some((lhs, rhs)) = evaluate(action, report.axiom, &args) else { return };
    let relation = relation_for(report.axiom, &args);
    let violated = match report.axiom {
        Axiom::B3 => matches!(solve_action(action, args[0], args[1]), Err(Error::Unsolvable { .. })) && relation.violated(lhs, rhs),
        _ => relation.violated(lhs, rhs),
    };
    if violated {
        report.fail(Witness::scalar(args, lhs, rhs, relation));
    }
}

/// B2 in the form `x < u, w1 <= w2` or `x <= u, w1 < w2`. Quadruples whose
/// separation is below what doubles can resolve at that magnitude are skipped.
fn b2_instance(action: &BAction, x: f64, w1: f64, u: f64, w2: f64) -> Option<Vec<f64>> {
    let ordered = (x < u && w1 <= w2) || (x <= u && w1 < w2);
    let resolvable = (u - x) + (w2 - w1) >= 1e-6 * action.apply(u, w2).max(1.0);
    (ordered && resolvable).then(|| vec![x, w1, u, w2])
}

/// Checks B1 to B4 and continuity on a structured corner set followed by
/// `trials` seeded random draws. Deterministic in `seed`.
pub fn verify_action(action: &BAction, trials: usize, seed: u64) -> Vec<AxiomReport> {
    let axioms = [Axiom::B1, Axiom::B2, Axiom::B3, Axiom::B4, Axiom::Continuity];
    let mut reports: Vec<AxiomReport> = axioms.iter().map(|&a| AxiomReport::new(a, trials, seed)).collect();
    let [b1, b2, b3, b4, cont] = &mut reports[..] else { unreachable!() };

    // integer corner grid
    let grid: Vec<f64> = (0..=5).map(f64::from).collect();
    check(action, b1, vec![0.0, 0.0]);
    for &a in &grid {
        for &b in &grid {
            check(action, b1, vec![a, b]);
            check(action, cont, vec![a, b, CONT_STEP * (1.0 + a.max(b))]);
        }
        check(action, b4, vec![a]);
    }
    for &x in &grid {
        for &u in grid.iter().filter(|&&u| u >= x) {
            for &w2 in grid.iter().rev() {
                for &w1 in grid.iter().rev().filter(|&&w1| w1 <= w2) {
                    if let Some(args) = b2_instance(action, x, w1, u, w2) {
                        check(action, b2, args);
                    }
                }
            }
        }
    }
    for target in [2.0, 5.0, 1.0, 0.5, 0.1] {
        for frac in [0.0, 0.25, 0.5, 1.0] {
            check(action, b3, vec![target, target * frac]);
        }
    }

    let mut done = 0;
    let mut batch = 0u64;
    while done < trials {
        let mut rng = batch_rng(seed, batch);
        for _ in 0..BATCH_SIZE.min(trials - done) {
            let (a, b) = (nonneg_scalar(&mut rng), nonneg_scalar(&mut rng));
            check(action, b1, vec![a, b]);
            check(action, b4, vec![a]);
            check(action, cont, vec![a, b, CONT_STEP * (1.0 + a.max(b))]);

            let (mut x, mut u) = (a.min(b), a.max(b));
            let (c, d) = (nonneg_scalar(&mut rng), nonneg_scalar(&mut rng));
            let (mut w1, mut w2) = (c.min(d), c.max(d));
            match rng.random_range(0..3u8) {
                0 => u = x,
                1 => w2 = w1,
                _ => {}
            }
            if rng.random_bool(0.1) {
                std::mem::swap(&mut x, &mut w1);
                std::mem::swap(&mut u, &mut w2);
            }
            if let Some(args) = b2_instance(action, x, w1, u, w2) {
                check(action, b2, args);
            }

            let target = nonneg_scalar(&mut rng).max(1e-6);
            let x = target * rng.random_range(0.0..=1.0);
            check(action, b3, vec![target, x]);
            done += 1;
        }
        batch += 1;
    }
    reports
}

/// F1 (monotonicity on a fine geometric grid) and empirical F2 (descent to
/// `-20` along `2^-k` for some `k <= k_max`, and finite values on `[2^-4, 2^10]`).
pub fn verify_control(pair: &ControlPair, k_max: u32) -> Vec<AxiomReport> {
    let mut f1 = AxiomReport::new(Axiom::F1, 0, 0);
    let grid: Vec<f64> = (-160..=160).map(|j| 2f64.powf(j as f64 / 4.0)).collect();
    for w in grid.windows(2) {
        f1.checked += 1;
        let (lhs, rhs) = (pair.f(w[0]), pair.f(w[1]));
        if Relation::Exceeds.violated(lhs, rhs) {
            f1.fail(Witness::scalar(vec![w[0], w[1]], lhs, rhs, Relation::Exceeds));
        }
    }
    f1.trials = f1.checked;

    let mut f2 = AxiomReport::new(Axiom::F2, 0, 0);
    let k_max = k_max.max(1);
    let mut reached = false;
    for k in 1..=k_max {
        f2.checked += 1;
        if pair.f(2f64.powi(-(k as i32))) < -F2_FLOOR {
            reached = true;
            break;
        }
    }
    if !reached {
        let lhs = pair.f(2f64.powi(-(k_max as i32)));
        f2.fail(Witness::scalar(vec![f64::from(k_max)], lhs, -F2_FLOOR, Relation::NotBelow));
    }
    for j in -4..=10 {
        f2.checked += 1;
        let eps = 2f64.powi(j);
        let v = pair.f(eps);
        if !v.is_finite() {
            f2.fail(Witness::scalar(vec![eps], -v, f64::MAX, Relation::Exceeds));
        }
    }
    f2.trials = f2.checked;
    vec![f1, f2]
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::actions::{catalog_actions, control_by_name, half_sum, max, plus};
    use crate::report::Verdict;

    fn verdicts(reports: &[AxiomReport]) -> Vec<(Axiom, Verdict)> {
        reports.iter().map(|r| (r.axiom, r.verdict)).collect()
    }

    #[test]
    fn plus_passes_everything() {
        for r in verify_action(&plus(), 2000, 7) {
            assert!(r.passed(), "{r}");
        }
    }

    #[test]
    fn max_breaks_strict_monotonicity_at_the_corner() {
        let reports = verify_action(&max(), 100, 1);
        let b2 = reports.iter().find(|r| r.axiom == Axiom::B2).unwrap();
        let w = b2.witness.as_ref().unwrap();
        assert_eq!(w.args, vec![0.0, 5.0, 1.0, 5.0]);
        assert_eq!((w.lhs, w.rhs), (5.0, 5.0));
        assert!(replay_action_witness(&max(), b2));
    }

    #[test]
    fn half_sum_b3_witness() {
        let reports = verify_action(&half_sum(), 100, 1);
        let b3 = reports.iter().find(|r| r.axiom == Axiom::B3).unwrap();
        assert_eq!(b3.witness.as_ref().unwrap().args, vec![2.0, 0.0]);
        assert!(replay_action_witness(&half_sum(), b3));
    }

    #[test]
    fn b4_never_fails_in_catalog() {
        for a in catalog_actions() {
            let r = &verify_action(&a, 500, 3)[3];
            assert_eq!(r.axiom, Axiom::B4);
            assert!(r.passed(), "{}: {r}", a.name());
        }
    }

    #[test]
    fn jump_is_caught_by_continuity_probe() {
        let step = BAction::new("step", |a: f64, b: f64| if a.max(b) > 1.0 { a + b + 1.0 } else { a + b }, vec![]);
        let cont = verify_action(&step, 2000, 5).remove(4);
        assert!(cont.failed());
        assert!(replay_action_witness(&step, &cont));
    }

    #[test]
    fn control_catalog() {
        let ln = verify_control(&control_by_name("ln", 0.0).unwrap(), 64);
        assert_eq!(verdicts(&ln), vec![(Axiom::F1, Verdict::Pass), (Axiom::F2, Verdict::Pass)]);
        let nr = verify_control(&control_by_name("neg_recip", 0.5).unwrap(), 64);
        assert!(nr.iter().all(AxiomReport::passed));
        let id = verify_control(&control_by_name("identity", 0.0).unwrap(), 64);
        assert!(id[0].passed());
        assert!(id[1].failed());
    }

    #[test]
    fn decreasing_control_fails_f1() {
        let bad = ControlPair::new("neg_ln", |t: f64| -t.ln(), 0.0).unwrap();
        assert!(verify_control(&bad, 64)[0].failed());
    }
}
