//! Seeded certification and refutation of the three triangle-type axiom
//! systems on a [`GThetaSpace`]:
//!
//! * `Ptheta1`/`Ptheta2`: the generalized θ-parametric axioms, using the
//!   space's action and control pair;
//! * `PP3`: the un-relaxed parametric triangle `P(a, ν, p + t) <= P(a, x, p) θ P(ν, x, t)`;
//! * `dtheta3`: the same-parameter θ-triangle `d(ω, y, p) <= θ(d(ω, z, p), d(z, y, p))`.
//!
//! Each check runs a structured phase first (anchor points, then the head of an
//! enumerable carrier) and then `trials` random draws in batches with
//! per-batch seeds. The first violation found is kept; random witnesses are
//! shrunk before they are reported.

use rand::Rng;

use crate::metric::GThetaSpace;
use crate::num::{default_t_grid, power_grid};
use crate::point::Point;
use crate::report::{Axiom, AxiomReport, Relation, Witness};
use crate::rng::{batch_rng, parameter, BATCH_SIZE};

/// How many head points of an enumerable carrier the structured phase sweeps.
const HEAD_POINTS: usize = 24;
const SHRINK_ROUNDS: usize = 64;

/// The `t` values used to look for a positive distance between distinct
/// points: the default grid extended down to `2^-60`.
fn separation_grid() -> Vec<f64> {
    let mut g = power_grid(-60, -11);
    g.extend(default_t_grid());
    g
}

fn structured_params() -> Vec<f64> {
    power_grid(-3, 3)
}

/// Candidate instances for a triple-based axiom: `(points, s, p)`.
type Instance = (Vec<Point>, f64, f64);

/// Structured candidates: anchor triples with anchor parameters, then the
/// head of an enumerable carrier against a small parameter grid.
fn structured_triples(space: &GThetaSpace) -> Vec<Instance> {
    let mut out = Vec::new();
    let params = if space.anchor_params.is_empty() { vec![1.0] } else { space.anchor_params.clone() };
    for x in &space.anchors {
        for y in &space.anchors {
            for z in &space.anchors {
                for &s in &params {
                    for &p in &params {
                        out.push((vec![x.clone(), y.clone(), z.clone()], s, p));
                    }
                }
            }
        }
    }
    if let Ok(mut head) = space.carrier.enumerate() {
        head.truncate(HEAD_POINTS);
        let grid = structured_params();
        for x in &head {
            for y in &head {
                if x == y {
                    continue;
                }
                for z in &head {
                    for &s in &grid {
                        for &p in &grid {
                            out.push((vec![x.clone(), y.clone(), z.clone()], s, p));
                        }
                    }
                }
            }
        }
    }
    out
}

fn random_triple<R: Rng + ?Sized>(space: &GThetaSpace, rng: &mut R) -> Instance {
    let x = space.carrier.sample(rng);
    // occasionally reuse a point so degenerate configurations get exercised
    let y = if rng.random_bool(0.02) { x.clone() } else { space.carrier.sample(rng) };
    let z = match rng.random_range(0..20u8) {
        0 => x.clone(),
        1 => y.clone(),
        _ => space.carrier.sample(rng),
    };
    (vec![x, y, z], parameter(rng), parameter(rng))
}

/// Positivity premise of `Ptheta2` on the t-grid.
fn premise(space: &GThetaSpace, x: &Point, w: &Point, grid: &[f64]) -> bool {
    grid.iter().all(|&r| space.p(x, w, r) > 0.0)
}

/// Both sides of an axiom instance, or `None` when its premise fails.
fn sides(space: &GThetaSpace, axiom: Axiom, pts: &[Point], s: f64, p: f64, grid: &[f64]) -> Option<(f64, f64)> {
    let (a, b, c) = (&pts[0], &pts[1], &pts[2]);
    let th = |u: f64, v: f64| space.action.apply(u, v);
    match axiom {
        Axiom::PTheta2 => {
            if !premise(space, a, b, grid) {
                return None;
            }
            let lhs = space.f(space.p(a, b, s + p));
            let rhs = space.f(th(space.p(a, c, s), space.p(c, b, p))) + space.control.alpha();
            Some((lhs, rhs))
        }
        Axiom::ParametricTriangle => Some((space.p(a, b, s + p), th(space.p(a, c, s), space.p(b, c, p)))),
        Axiom::ThetaTriangle => Some((space.p(a, b, p), th(space.p(a, c, p), space.p(c, b, p)))),
        _ => None,
    }
}

fn witness_for(axiom: Axiom, pts: Vec<Point>, s: f64, p: f64, lhs: f64, rhs: f64) -> Witness {
    let s = (axiom != Axiom::ThetaTriangle).then_some(s);
    Witness { points: pts, s, p: Some(p), args: vec![], lhs, rhs, relation: Relation::Exceeds }
}

fn shrink_candidates(pts: &[Point], s: f64, p: f64) -> Vec<Instance> {
    let mut out = vec![(pts.to_vec(), s / 2.0, p), (pts.to_vec(), s, p / 2.0), (pts.to_vec(), s / 2.0, p / 2.0)];
    let tweak = |i: usize, q: Point, out: &mut Vec<Instance>| {
        let mut v = pts.to_vec();
        v[i] = q;
        out.push((v, s, p));
    };
    for (i, pt) in pts.iter().enumerate() {
        match *pt {
            Point::Real(v) => {
                tweak(i, Point::Real(v / 2.0), &mut out);
                tweak(i, Point::Real((v * 8.0).round() / 8.0), &mut out);
            }
            Point::Pair(a, b) => {
                tweak(i, Point::Pair(a / 2.0, b), &mut out);
                tweak(i, Point::Pair(a, b / 2.0), &mut out);
                tweak(i, Point::Pair((a * 8.0).round() / 8.0, (b * 8.0).round() / 8.0), &mut out);
            }
            _ => {}
        }
    }
    out.retain(|(_, s, p)| *s > 0.0 && *p > 0.0);
    out
}

/// Halves parameters and coordinates (and rounds coordinates) while the
/// violation persists.
fn shrink(space: &GThetaSpace, axiom: Axiom, mut inst: Instance, grid: &[f64]) -> Instance {
    for _ in 0..SHRINK_ROUNDS {
        let next = shrink_candidates(&inst.0, inst.1, inst.2).into_iter().find(|(pts, s, p)| {
            (pts.as_slice(), *s, *p) != (inst.0.as_slice(), inst.1, inst.2)
                && pts.iter().all(|q| space.carrier.contains(q))
                && sides(space, axiom, pts, *s, *p, grid).is_some_and(|(l, r)| Relation::Exceeds.violated(l, r))
        });
        match next {
            Some(n) => inst = n,
            None => break,
        }
    }
    inst
}

fn run_triangle(space: &GThetaSpace, axiom: Axiom, trials: usize, seed: u64) -> AxiomReport {
    let grid = default_t_grid();
    let mut report = AxiomReport::new(axiom, trials, seed);
    if axiom == Axiom::PTheta2 {
        report.t_grid = Some(grid.clone());
    }
    let record = |report: &mut AxiomReport, inst: Instance, minimize: bool| {
        let (pts, s, p) = &inst;
        match sides(space, axiom, pts, *s, *p, &grid) {
            None => report.vacuous += 1,
            Some((lhs, rhs)) => {
                report.checked += 1;
                if !report.failed() && Relation::Exceeds.violated(lhs, rhs) {
                    let (pts, s, p) = if minimize { shrink(space, axiom, inst.clone(), &grid) } else { inst.clone() };
                    let (lhs, rhs) = sides(space, axiom, &pts, s, p, &grid).expect("shrink keeps the premise");
                    report.fail(witness_for(axiom, pts, s, p, lhs, rhs));
                }
            }
        }
    };

    for inst in structured_triples(space) {
        if report.failed() {
            break;
        }
        record(&mut report, inst, false);
    }
    let mut done = 0;
    let mut batch = 0;
    while done < trials {
        let mut rng = batch_rng(seed, batch);
        for _ in 0..BATCH_SIZE.min(trials - done) {
            let inst = random_triple(space, &mut rng);
            if !report.failed() {
                record(&mut report, inst, true);
            }
            done += 1;
        }
        batch += 1;
    }
    if axiom == Axiom::PTheta2 && report.checked == 0 {
        report.note = Some("premise never held on the t-grid; verdict is vacuous".into());
    }
    report
}

fn ptheta1(space: &GThetaSpace, trials: usize, seed: u64) -> AxiomReport {
    let grid = default_t_grid();
    let sep = separation_grid();
    let mut report = AxiomReport::new(Axiom::PTheta1, trials, seed);
    report.t_grid = Some(grid.clone());
    let one = |report: &mut AxiomReport, x: &Point, y: &Point| {
        report.checked += 1;
        if report.failed() {
            return;
        }
        if x == y {
            for &t in &grid {
                let v = space.p(x, x, t);
                if v != 0.0 {
                    report.fail(Witness {
                        points: vec![x.clone()],
                        s: None,
                        p: Some(t),
                        args: vec![],
                        lhs: v,
                        rhs: 0.0,
                        relation: Relation::Nonzero,
                    });
                    return;
                }
            }
        } else {
            let best = sep.iter().map(|&t| space.p(x, y, t)).fold(0.0, f64::max);
            if best == 0.0 {
                report.fail(Witness {
                    points: vec![x.clone(), y.clone()],
                    s: None,
                    p: None,
                    args: vec![],
                    lhs: best,
                    rhs: 0.0,
                    relation: Relation::Zero,
                });
            }
        }
    };
    let mut pool = space.anchors.clone();
    if let Ok(mut head) = space.carrier.enumerate() {
        head.truncate(HEAD_POINTS);
        pool.extend(head);
    }
    for x in &pool {
        for y in &pool {
            one(&mut report, x, y);
        }
    }
    let mut done = 0;
    let mut batch = 0;
    while done < trials {
        let mut rng = batch_rng(seed ^ 0x5151, batch);
        for _ in 0..BATCH_SIZE.min(trials - done) {
            let x = space.carrier.sample(&mut rng);
            let y = space.carrier.sample(&mut rng);
            one(&mut report, &x, &x);
            one(&mut report, &x, &y);
            done += 1;
        }
        batch += 1;
    }
    report
}

/// `P(x, y, t) = P(y, x, t)` on samples; informative only when the space's
/// `symmetric` flag is set.
pub fn verify_symmetry(space: &GThetaSpace, trials: usize, seed: u64) -> AxiomReport {
    let mut report = AxiomReport::new(Axiom::Symmetry, trials, seed);
    let mut done = 0;
    let mut batch = 0;
    while done < trials {
        let mut rng = batch_rng(seed ^ 0x5959, batch);
        for _ in 0..BATCH_SIZE.min(trials - done) {
            let (x, y, t) = (space.carrier.sample(&mut rng), space.carrier.sample(&mut rng), parameter(&mut rng));
            report.checked += 1;
            let (l, r) = (space.p(&x, &y, t), space.p(&y, &x, t));
            if Relation::Differs.violated(l, r) {
                report.fail(Witness { points: vec![x, y], s: None, p: Some(t), args: vec![], lhs: l, rhs: r, relation: Relation::Differs });
            }
            done += 1;
        }
        batch += 1;
    }
    if !space.flags.symmetric {
        report.note = Some("space is not flagged symmetric".into());
    }
    report
}

/// `Ptheta1`, `Ptheta2` and symmetry. Deterministic in `seed`.
pub fn verify_gtheta(space: &GThetaSpace, trials: usize, seed: u64) -> Vec<AxiomReport> {
    vec![
        ptheta1(space, trials, seed),
        run_triangle(space, Axiom::PTheta2, trials, seed),
        verify_symmetry(space, trials, seed),
    ]
}

/// The un-relaxed parametric triangle with the space's action as `o`.
pub fn verify_parametric_triangle(space: &GThetaSpace, trials: usize, seed: u64) -> AxiomReport {
    run_triangle(space, Axiom::ParametricTriangle, trials, seed)
}

/// The same-parameter θ-triangle.
pub fn verify_theta_parametric(space: &GThetaSpace, trials: usize, seed: u64) -> AxiomReport {
    run_triangle(space, Axiom::ThetaTriangle, trials, seed)
}

/// Re-evaluates a failing report's witness against `space` and checks that the
/// recorded values are reproduced bit-for-bit and still form a violation.
pub fn replay_witness(space: &GThetaSpace, report: &AxiomReport) -> bool {
    let Some(w) = &report.witness else { return false };
    let recomputed = match report.axiom {
        Axiom::PTheta2 | Axiom::ParametricTriangle | Axiom::ThetaTriangle => {
            if w.points.len() != 3 {
                return false;
            }
            let s = w.s.unwrap_or(f64::NAN);
            let Some(p) = w.p else { return false };
            sides(space, report.axiom, &w.points, s, p, report.t_grid.as_deref().unwrap_or(&default_t_grid()))
        }
        Axiom::PTheta1 => match (w.points.as_slice(), w.relation) {
            ([x], Relation::Nonzero) => w.p.map(|t| (space.p(x, x, t), 0.0)),
            ([x, y], Relation::Zero) => {
                Some((separation_grid().iter().map(|&t| space.p(x, y, t)).fold(0.0, f64::max), 0.0))
            }
            _ => None,
        },
        Axiom::Symmetry => match (w.points.as_slice(), w.p) {
            ([x, y], Some(t)) => Some((space.p(x, y, t), space.p(y, x, t))),
            _ => None,
        },
        _ => None,
    };
    match recomputed {
        Some((l, r)) => l.to_bits() == w.lhs.to_bits() && r.to_bits() == w.rhs.to_bits() && w.relation.violated(l, r),
        None => false,
    }
}
