//! Balls, open and closed set predicates, Hausdorff separation witnesses and
//! the open-ball sufficiency check.
//!
//! Everything that enumerates works on finite carriers or on the truncation
//! head of a countable carrier. Open-set checks additionally probe the
//! countable tail at indices `depth * 2^k`, so escapes deeper than the
//! truncation are still found.

use std::collections::HashSet;
use std::fmt;

use serde::Serialize;

use crate::actions::solve_action;
use crate::error::{Error, Result};
use crate::metric::{Carrier, GThetaSpace};
use crate::num::ser_f64;
use crate::point::Point;
use crate::report::Verdict;
use crate::sequences::{check_convergence, ConvergenceReport, SequenceSpec};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum BallKind {
    Open,
    Closed,
}

/// `B(center, radius, t)` (open, strict) or `B[center, radius, t]` (closed).
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Ball {
    pub center: Point,
    #[serde(serialize_with = "ser_f64")]
    pub radius: f64,
    #[serde(serialize_with = "ser_f64")]
    pub t: f64,
    pub kind: BallKind,
}

impl Ball {
    pub fn new(center: Point, radius: f64, t: f64, kind: BallKind) -> Result<Self> {
        if !(radius > 0.0) || !(t > 0.0) || !t.is_finite() {
            return Err(Error::Domain(format!("ball needs radius > 0 and finite t > 0, got radius {radius}, t {t}")));
        }
        Ok(Self { center, radius, t, kind })
    }

    pub fn open(center: Point, radius: f64, t: f64) -> Result<Self> {
        Self::new(center, radius, t, BallKind::Open)
    }

    pub fn closed(center: Point, radius: f64, t: f64) -> Result<Self> {
        Self::new(center, radius, t, BallKind::Closed)
    }

    /// Membership by the distance inequality; `y` must lie in the carrier.
    pub fn contains(&self, space: &GThetaSpace, y: &Point) -> bool {
        let d = space.p(&self.center, y, self.t);
        match self.kind {
            BallKind::Open => d < self.radius,
            BallKind::Closed => d <= self.radius,
        }
    }
}

impl fmt::Display for Ball {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let (l, r) = match self.kind {
            BallKind::Open => ('(', ')'),
            BallKind::Closed => ('[', ']'),
        };
        write!(f, "B{l}{}, {}, {}{r}", self.center, self.radius, self.t)
    }
}

fn head(space: &GThetaSpace) -> Result<Vec<Point>> {
    space.carrier.enumerate()
}

/// Members of `ball` in the carrier (or its truncation head), in enumeration
/// order. The center is always included.
pub fn ball_members(space: &GThetaSpace, ball: &Ball) -> Result<Vec<Point>> {
    let mut out: Vec<Point> = head(space)?.into_iter().filter(|y| ball.contains(space, y)).collect();
    if !out.contains(&ball.center) {
        out.insert(0, ball.center.clone());
    }
    Ok(out)
}

/// A subset of the carrier: an explicit list, or a ball decided analytically.
#[derive(Clone, Debug)]
pub enum PointSet {
    Listed(Vec<Point>),
    Ball(Ball),
}

impl PointSet {
    fn index(&self) -> Option<HashSet<Point>> {
        match self {
            PointSet::Listed(v) => Some(v.iter().cloned().collect()),
            PointSet::Ball(_) => None,
        }
    }

    /// Explicit members (a ball is enumerated over the truncation head).
    pub fn members(&self, space: &GThetaSpace) -> Result<Vec<Point>> {
        match self {
            PointSet::Listed(v) => Ok(v.clone()),
            PointSet::Ball(b) => ball_members(space, b),
        }
    }
}

struct Membership<'a> {
    set: &'a PointSet,
    index: Option<HashSet<Point>>,
}

impl<'a> Membership<'a> {
    fn new(set: &'a PointSet) -> Self {
        Self { set, index: set.index() }
    }

    fn contains(&self, space: &GThetaSpace, p: &Point) -> bool {
        match (&self.index, self.set) {
            (Some(ix), _) => ix.contains(p),
            (None, PointSet::Ball(b)) => space.carrier.contains(p) && b.contains(space, p),
            (None, PointSet::Listed(_)) => unreachable!(),
        }
    }
}

/// `{base * 2^j : -20 <= j <= 0}`.
pub fn default_radius_grid(base: f64) -> Vec<f64> {
    (-20..=0).map(|j| base * 2f64.powi(j)).collect()
}

/// Points of a countable carrier beyond the truncation head that the open-set
/// check also tries: `element(depth * 2^k)` and its successor, `k = 1..=40`.
fn tail_probes(carrier: &Carrier) -> Vec<Point> {
    match carrier {
        Carrier::Countable { depth, element, .. } => (1..=40u32)
            .filter_map(|k| depth.checked_mul(1u64 << k))
            .flat_map(|i| [element(i), element(i + 1)])
            .collect(),
        _ => Vec::new(),
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Escape {
    #[serde(serialize_with = "ser_f64")]
    pub radius: f64,
    /// A member of the ball that is not in the set.
    pub point: Point,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct OpenWitness {
    pub center: Point,
    #[serde(serialize_with = "ser_f64")]
    pub t: f64,
    /// One escaping element per radius on the grid.
    pub escapes: Vec<Escape>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct OpenCheck {
    pub verdict: Verdict,
    /// Passing only says every center found a fitting radius on this grid.
    pub grid_relative: bool,
    pub radius_grid: Vec<f64>,
    pub t_grid: Vec<f64>,
    pub centers_checked: usize,
    pub witness: Option<OpenWitness>,
}

/// Grid-relative openness: every member `a` and grid `q` needs some grid
/// radius `r` with `B(a, r, q)` inside the set.
pub fn is_open_set(space: &GThetaSpace, set: &PointSet, radius_grid: &[f64], t_grid: &[f64]) -> Result<OpenCheck> {
    let members = set.members(space)?;
    let mut universe = head(space)?;
    universe.extend(tail_probes(&space.carrier));
    let inside = Membership::new(set);
    let mut report = OpenCheck {
        verdict: Verdict::Pass,
        grid_relative: true,
        radius_grid: radius_grid.to_vec(),
        t_grid: t_grid.to_vec(),
        centers_checked: 0,
        witness: None,
    };
    for a in &members {
        report.centers_checked += 1;
        for &q in t_grid {
            let mut escapes = Vec::with_capacity(radius_grid.len());
            for &r in radius_grid {
                let ball = Ball::open(a.clone(), r, q)?;
                match universe.iter().find(|y| ball.contains(space, y) && !inside.contains(space, y)) {
                    Some(y) => escapes.push(Escape { radius: r, point: y.clone() }),
                    None => break,
                }
            }
            if escapes.len() == radius_grid.len() {
                report.verdict = Verdict::Fail;
                report.witness = Some(OpenWitness { center: a.clone(), t: q, escapes });
                return Ok(report);
            }
        }
    }
    Ok(report)
}

/// A sequence inside the set together with its candidate limit.
#[derive(Clone, Debug)]
pub struct Probe {
    pub sequence: SequenceSpec,
    pub limit: Point,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ClosedWitness {
    pub sequence: String,
    pub limit: Point,
    pub convergence: ConvergenceReport,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ClosedCheck {
    pub verdict: Verdict,
    pub probes_checked: usize,
    pub witness: Option<ClosedWitness>,
}

/// Fails when a probe sequence converges to a limit outside the set. Probes
/// whose limit lies in the set cannot refute and are skipped.
pub fn is_closed_set(space: &GThetaSpace, set: &PointSet, probes: &[Probe], t_grid: &[f64], eps: f64) -> Result<ClosedCheck> {
    let inside = Membership::new(set);
    let mut out = ClosedCheck { verdict: Verdict::Pass, probes_checked: 0, witness: None };
    for probe in probes {
        let seq = &probe.sequence;
        if let Some(i) = (0..=seq.horizon).find(|&i| !inside.contains(space, &seq.at(i))) {
            return Err(Error::Precondition(format!("probe {} leaves the set at index {i}", seq.name)));
        }
        out.probes_checked += 1;
        if inside.contains(space, &probe.limit) {
            continue;
        }
        let conv = check_convergence(space, seq, &probe.limit, t_grid, eps)?;
        if conv.verdict == Verdict::Pass {
            out.verdict = Verdict::Fail;
            out.witness = Some(ClosedWitness { sequence: seq.name.clone(), limit: probe.limit.clone(), convergence: conv });
            return Ok(out);
        }
    }
    Ok(out)
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct HausdorffWitness {
    #[serde(serialize_with = "ser_f64")]
    pub t0: f64,
    pub k: u32,
    pub ball_x: Ball,
    pub ball_y: Ball,
    pub members_x: Vec<Point>,
    pub members_y: Vec<Point>,
}

/// Default cap on the `a_k = P(x, y, t0) / k` search.
pub const HAUSDORFF_K_MAX: u32 = 64;

/// Separates `x` and `y` by disjoint open balls: with `a_k = P(x, y, t0)/k`
/// split as `a_k = action(b_k, c_k)`, returns `B(x, b_k, t0/2)` and
/// `B(y, c_k, t0/2)` for the first `k` that makes them disjoint.
pub fn hausdorff_witness(space: &GThetaSpace, x: &Point, y: &Point, k_max: u32) -> Result<HausdorffWitness> {
    if x == y {
        return Err(Error::Precondition("Hausdorff separation needs two distinct points".into()));
    }
    let pts = head(space)?;
    // t0 = 1 first, then outward by powers of two
    let t0 = std::iter::once(1.0)
        .chain((1..=60).flat_map(|j| [2f64.powi(j), 2f64.powi(-j)]))
        .find(|&t| space.p(x, y, t) > 0.0)
        .ok_or_else(|| Error::SearchExhausted(format!("no t with P({x}, {y}, t) > 0")))?;
    let d = space.p(x, y, t0);
    for k in 1..=k_max {
        let a = d / k as f64;
        let b = a / 2.0;
        let c = match solve_action(&space.action, a, b) {
            Ok(c) if c > 0.0 => c,
            _ => continue,
        };
        let ball_x = Ball::open(x.clone(), b, t0 / 2.0)?;
        let ball_y = Ball::open(y.clone(), c, t0 / 2.0)?;
        let in_x: HashSet<&Point> = pts.iter().filter(|p| ball_x.contains(space, p)).collect();
        if pts.iter().any(|p| ball_y.contains(space, p) && in_x.contains(p)) {
            continue;
        }
        let mut members_x = ball_members(space, &ball_x)?;
        let mut members_y = ball_members(space, &ball_y)?;
        members_x.sort_by_key(|p| p.to_string());
        members_y.sort_by_key(|p| p.to_string());
        return Ok(HausdorffWitness { t0, k, ball_x, ball_y, members_x, members_y });
    }
    Err(Error::SearchExhausted(format!("no disjoint balls around {x} and {y} for k <= {k_max}")))
}

/// Whether some `a` in `f` has `P(x, a, t) < r`.
pub fn closure_meets_ball(space: &GThetaSpace, f: &[Point], x: &Point, r: f64, t: f64) -> Result<bool> {
    if !matches!(space.carrier, Carrier::Finite(_)) {
        return Err(Error::Unsupported("closure_meets_ball needs a finite carrier".into()));
    }
    let ball = Ball::open(x.clone(), r, t)?;
    Ok(f.iter().any(|a| ball.contains(space, a)))
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Sufficiency {
    pub condition_holds: bool,
    /// Largest `delta` with `f(s) < f(radius) - alpha` for all `0 < s < delta`.
    #[serde(serialize_with = "ser_f64")]
    pub h_value: f64,
}

/// Bisection for `h(radius, alpha)` on the control function, assumed
/// nondecreasing.
pub fn open_ball_sufficiency(space: &GThetaSpace, ball: &Ball) -> Result<Sufficiency> {
    if ball.kind != BallKind::Open {
        return Err(Error::Precondition("sufficiency check applies to open balls".into()));
    }
    let r = ball.radius;
    let target = space.f(r) - space.control.alpha();
    let below = |s: f64| space.f(s) < target;
    let mut lo = r;
    while !below(lo) {
        lo /= 2.0;
        if lo == 0.0 {
            return Err(Error::Indeterminate(format!("control never drops below {target} on (0, {r}]")));
        }
    }
    let mut hi = lo * 2.0;
    while below(hi) {
        hi *= 2.0;
        if !hi.is_finite() {
            return Ok(Sufficiency { condition_holds: true, h_value: f64::INFINITY });
        }
    }
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if below(mid) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    // hi is the supremum up to one ulp
    Ok(Sufficiency { condition_holds: r < hi, h_value: hi })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::metric::{make_catalog_space, SpaceParams};

    fn space(name: &str, params: SpaceParams) -> GThetaSpace {
        make_catalog_space(name, &params).unwrap()
    }

    fn seq(variant: &str) -> GThetaSpace {
        space("seq_b_space", SpaceParams { variant: Some(variant.into()), ..Default::default() })
    }

    #[test]
    fn k83_open_ball_is_zero_one() {
        let b = Ball::open(Point::Recip(1), 2.0, 1.0).unwrap();
        assert_eq!(ball_members(&seq("K83"), &b).unwrap(), vec![Point::Recip(0), Point::Recip(1)]);
    }

    #[test]
    fn k4quarter_closed_ball_drops_zero() {
        let s = seq("K4quarter");
        let b = Ball::closed(Point::Recip(1), 0.5, 1.0).unwrap();
        let m = ball_members(&s, &b).unwrap();
        let expected: Vec<Point> = (1..=10_000).map(Point::Recip).collect();
        let mut got = m.clone();
        got.sort_by_key(|p| match p {
            Point::Recip(n) => *n,
            _ => u64::MAX,
        });
        assert_eq!(got, expected);
    }

    #[test]
    fn k83_ball_is_not_open() {
        let s = seq("K83");
        let b = Ball::open(Point::Recip(1), 2.0, 1.0).unwrap();
        let set = PointSet::Listed(ball_members(&s, &b).unwrap());
        let r = is_open_set(&s, &set, &default_radius_grid(2.0), &crate::num::default_t_grid()).unwrap();
        assert_eq!(r.verdict, Verdict::Fail);
        let w = r.witness.unwrap();
        assert_eq!(w.center, Point::Recip(0));
        for e in &w.escapes {
            let Point::Recip(n) = e.point else { panic!() };
            assert_eq!(n % 2, 0);
            assert!(1.0 / (n as f64 * w.t) < e.radius);
            assert_eq!(s.p(&Point::Recip(1), &e.point, 1.0), 4.0);
        }
    }

    #[test]
    fn full_carrier_is_open() {
        let s = space("finite_plane_space", SpaceParams::default());
        let set = PointSet::Listed(s.carrier.enumerate().unwrap());
        let r = is_open_set(&s, &set, &default_radius_grid(1.0), &[0.5, 1.0]).unwrap();
        assert_eq!(r.verdict, Verdict::Pass);
    }

    #[test]
    fn plane_singleton_open_on_grid() {
        // B((3,3), r, q) = {(3,3)} exactly when r <= 16 / q
        let s = space("finite_plane_space", SpaceParams::default());
        let set = PointSet::Listed(vec![Point::Pair(3.0, 3.0)]);
        let ok = is_open_set(&s, &set, &default_radius_grid(1.0), &[1.0, 8.0]).unwrap();
        assert_eq!(ok.verdict, Verdict::Pass);
        let bad = is_open_set(&s, &set, &[100.0], &[1.0]).unwrap();
        assert_eq!(bad.verdict, Verdict::Fail);
    }

    #[test]
    fn k4quarter_closed_ball_not_closed() {
        let s = seq("K4quarter");
        let set = PointSet::Ball(Ball::closed(Point::Recip(1), 0.5, 1.0).unwrap());
        let probe = Probe { sequence: crate::sequences::reciprocal_even(100_000), limit: Point::Recip(0) };
        let r = is_closed_set(&s, &set, &[probe], &crate::num::power_grid(-5, 5), 1e-3).unwrap();
        assert_eq!(r.verdict, Verdict::Fail);
        assert_eq!(r.witness.unwrap().limit, Point::Recip(0));
    }

    #[test]
    fn whole_carrier_closed() {
        let s = seq("K4quarter");
        let set = PointSet::Listed(s.carrier.enumerate().unwrap());
        let probe = Probe { sequence: crate::sequences::reciprocal_even(1000), limit: Point::Recip(0) };
        assert_eq!(is_closed_set(&s, &set, &[probe], &[1.0], 1e-3).unwrap().verdict, Verdict::Pass);
    }

    #[test]
    fn hausdorff_plane_and_int() {
        let s = space("finite_plane_space", SpaceParams::default());
        let w = hausdorff_witness(&s, &Point::Pair(3.0, 3.0), &Point::Pair(7.0, 9.0), HAUSDORFF_K_MAX).unwrap();
        assert!(w.members_x.iter().all(|p| !w.members_y.contains(p)));
        let z = space("int_b_space", SpaceParams { range: Some(10), ..Default::default() });
        let w = hausdorff_witness(&z, &Point::Int(0), &Point::Int(1), HAUSDORFF_K_MAX).unwrap();
        assert!(w.members_x.iter().all(|p| !w.members_y.contains(p)));
        assert!(matches!(hausdorff_witness(&z, &Point::Int(2), &Point::Int(2), 4), Err(Error::Precondition(_))));
    }

    #[test]
    fn closure_meets_ball_is_strict() {
        let s = space("finite_plane_space", SpaceParams::default());
        let f = [Point::Pair(7.0, 3.0)];
        let x = Point::Pair(3.0, 3.0);
        assert!(closure_meets_ball(&s, &f, &x, 17.0, 1.0).unwrap());
        assert!(!closure_meets_ball(&s, &f, &x, 16.0, 1.0).unwrap());
        assert!(closure_meets_ball(&s, &[x.clone()], &x, 1e-9, 1.0).unwrap());
    }

    #[test]
    fn sufficiency_closed_forms() {
        let s = seq("K4quarter");
        let b = Ball::open(Point::Recip(1), 2.0, 1.0).unwrap();
        let r = open_ball_sufficiency(&s, &b).unwrap();
        assert!((r.h_value - 0.5).abs() < 1e-12);
        assert!(!r.condition_holds);

        let e = space("exp_max_space", SpaceParams { k: Some(2.0), ..Default::default() });
        let r = open_ball_sufficiency(&e, &b).unwrap();
        let expected = 1.0 / (1.0 / 2.0 + 1.0 / 2.0);
        assert!((r.h_value - expected).abs() < 1e-12, "{}", r.h_value);

        let g = space("sup_grid_space", SpaceParams::default());
        let r = open_ball_sufficiency(&g, &b).unwrap();
        assert!((r.h_value - 2.0).abs() < 1e-12);
        assert!(!r.condition_holds);
    }
}
