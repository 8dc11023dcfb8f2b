//! Generalized θ-parametric spaces and the catalog of concrete examples.

mod catalog;

use std::fmt;
use std::sync::Arc;

use rand::Rng;
use serde::Serialize;

use crate::actions::{BAction, ControlPair};
use crate::error::{Error, Result};
use crate::fractional::GridFunction;
use crate::point::Point;
use crate::rng::{log_uniform, real_in_box};

pub use catalog::{make_catalog_space, SpaceParams, SPACE_NAMES};

type DistanceFn = Arc<dyn Fn(&Point, &Point, f64) -> f64 + Send + Sync>;
type ElementFn = Arc<dyn Fn(u64) -> Point + Send + Sync>;
type MemberFn = Arc<dyn Fn(&Point) -> bool + Send + Sync>;

/// Draws points from a continuous carrier.
#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Sampler {
    /// Reals in `[-bound, bound]`.
    Real { bound: f64 },
    /// Points of the plane in `[-bound, bound]^2`.
    Pair { bound: f64 },
    /// Grid functions on `n` cells with values in `[-bound, bound]`.
    Grid { n: usize, bound: f64 },
}

impl Sampler {
    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> Point {
        match *self {
            Sampler::Real { bound } => Point::Real(real_in_box(rng, bound)),
            Sampler::Pair { bound } => Point::Pair(real_in_box(rng, bound), real_in_box(rng, bound)),
            Sampler::Grid { n, bound } => {
                // smooth wave plus per-node noise
                let amp = real_in_box(rng, bound);
                let phase = rng.random_range(0.0..std::f64::consts::TAU);
                let noise = rng.random_range(0.0..=0.1) * bound;
                let values = (0..=n)
                    .map(|i| amp * (phase + 3.0 * i as f64 / n as f64).sin() + noise * rng.random_range(-1.0..=1.0))
                    .collect();
                Point::Grid(GridFunction::new(values))
            }
        }
    }

    fn contains(&self, p: &Point) -> bool {
        match (self, p) {
            (Sampler::Real { .. }, Point::Real(v)) => v.is_finite(),
            (Sampler::Pair { .. }, Point::Pair(a, b)) => a.is_finite() && b.is_finite(),
            (Sampler::Grid { n, .. }, Point::Grid(g)) => g.n() == *n && g.is_finite(),
            _ => false,
        }
    }
}

/// The carrier of a space.
#[derive(Clone)]
pub enum Carrier {
    Finite(Vec<Point>),
    /// An infinite carrier enumerated by `element(0), element(1), ...`; the first
    /// `depth + 1` elements form the working truncation, and `contains` decides
    /// membership analytically for any element.
    Countable { depth: u64, element: ElementFn, contains: MemberFn },
    Continuous(Sampler),
}

impl Carrier {
    pub fn contains(&self, p: &Point) -> bool {
        match self {
            Carrier::Finite(pts) => pts.contains(p),
            Carrier::Countable { contains, .. } => contains(p),
            Carrier::Continuous(s) => s.contains(p),
        }
    }

    /// The finite list or the truncation head.
    pub fn enumerate(&self) -> Result<Vec<Point>> {
        match self {
            Carrier::Finite(pts) => Ok(pts.clone()),
            Carrier::Countable { depth, element, .. } => Ok((0..=*depth).map(|i| element(i)).collect()),
            Carrier::Continuous(_) => Err(Error::Unsupported("carrier is continuous and cannot be enumerated".into())),
        }
    }

    /// Draws a random member: uniform index for finite carriers, log-uniform
    /// index over the truncation for countable ones.
    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> Point {
        match self {
            Carrier::Finite(pts) => pts[rng.random_range(0..pts.len())].clone(),
            Carrier::Countable { depth, element, .. } => {
                let i = log_uniform(rng, 1.0, *depth as f64 + 1.0).floor() as u64 - 1;
                element(i.min(*depth))
            }
            Carrier::Continuous(s) => s.sample(rng),
        }
    }

    pub fn is_enumerable(&self) -> bool {
        !matches!(self, Carrier::Continuous(_))
    }

    /// One representative element, used to parse textual points.
    pub fn example(&self) -> Point {
        match self {
            Carrier::Finite(pts) => pts[0].clone(),
            Carrier::Countable { element, .. } => element(0),
            Carrier::Continuous(Sampler::Real { .. }) => Point::Real(0.0),
            Carrier::Continuous(Sampler::Pair { .. }) => Point::Pair(0.0, 0.0),
            Carrier::Continuous(Sampler::Grid { n, .. }) => Point::Grid(GridFunction::zeros(*n)),
        }
    }

    fn describe(&self) -> String {
        match self {
            Carrier::Finite(pts) => format!("finite({})", pts.len()),
            Carrier::Countable { depth, .. } => format!("countable(depth={depth})"),
            Carrier::Continuous(Sampler::Real { bound }) => format!("R sampled in [-{bound}, {bound}]"),
            Carrier::Continuous(Sampler::Pair { bound }) => format!("R^2 sampled in [-{bound}, {bound}]^2"),
            Carrier::Continuous(Sampler::Grid { n, .. }) => format!("grid functions on {n} cells"),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum TMonotone {
    Nonincreasing,
    None,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct Flags {
    pub symmetric: bool,
    pub t_monotone: TMonotone,
}

/// Carrier, parametric distance, action and control pair.
#[derive(Clone)]
pub struct GThetaSpace {
    pub name: String,
    pub carrier: Carrier,
    distance: DistanceFn,
    pub action: BAction,
    pub control: ControlPair,
    pub flags: Flags,
    /// Points tried first by the structured verifier phase.
    pub anchors: Vec<Point>,
    /// Parameter values tried first alongside the anchors.
    pub anchor_params: Vec<f64>,
}

impl GThetaSpace {
    pub fn new(
        name: impl Into<String>,
        carrier: Carrier,
        distance: impl Fn(&Point, &Point, f64) -> f64 + Send + Sync + 'static,
        action: BAction,
        control: ControlPair,
        flags: Flags,
    ) -> Self {
        Self {
            name: name.into(),
            carrier,
            distance: Arc::new(distance),
            action,
            control,
            flags,
            anchors: Vec::new(),
            anchor_params: Vec::new(),
        }
    }

    pub fn with_anchors(mut self, anchors: Vec<Point>, params: Vec<f64>) -> Self {
        self.anchors = anchors;
        self.anchor_params = params;
        self
    }

    pub fn with_control(mut self, control: ControlPair) -> Self {
        self.control = control;
        self
    }

    pub fn with_action(mut self, action: BAction) -> Self {
        self.action = action;
        self
    }

    /// Unchecked distance. Callers must pass members and `t > 0`.
    #[inline]
    pub fn p(&self, x: &Point, y: &Point, t: f64) -> f64 {
        (self.distance)(x, y, t)
    }

    /// `f(P)` for the attached control.
    #[inline]
    pub fn f(&self, v: f64) -> f64 {
        self.control.f(v)
    }

    pub fn describe(&self) -> String {
        format!(
            "{} carrier={} action={} control=({}, alpha={})",
            self.name,
            self.carrier.describe(),
            self.action.name(),
            self.control.name(),
            self.control.alpha()
        )
    }
}

impl fmt::Debug for GThetaSpace {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("GThetaSpace")
            .field("name", &self.name)
            .field("carrier", &self.carrier.describe())
            .field("action", &self.action)
            .field("control", &self.control)
            .field("flags", &self.flags)
            .finish_non_exhaustive()
    }
}

/// Checked distance evaluation.
pub fn eval_metric(space: &GThetaSpace, x: &Point, y: &Point, t: f64) -> Result<f64> {
    if !(t > 0.0 && t.is_finite()) {
        return Err(Error::Domain(format!("parameter t must be positive, got {t}")));
    }
    for p in [x, y] {
        if !space.carrier.contains(p) {
            return Err(Error::Domain(format!("{p} is not in the carrier of {}", space.name)));
        }
    }
    Ok(space.p(x, y, t))
}

/// The induced parametric distance on a finite carrier: the least action value
/// over one-intermediate chains `x -> z -> y` with the parameter split
/// `t = t1 + t2`, `t1 = t * i / (split_count + 1)`. The chain that stays at an
/// endpoint contributes `action(0, P(x, y, t))`.
pub fn induce_parametric(space: &GThetaSpace, x: &Point, y: &Point, t: f64, split_count: usize) -> Result<f64> {
    let Carrier::Finite(points) = &space.carrier else {
        return Err(Error::Unsupported("induced distance needs a finite carrier".into()));
    };
    if split_count == 0 {
        return Err(Error::Domain("split_count must be at least 1".into()));
    }
    let direct = eval_metric(space, x, y, t)?;
    let mut best = space.action.apply(0.0, direct);
    for z in points {
        for i in 1..=split_count {
            let t1 = t * i as f64 / (split_count + 1) as f64;
            let v = space.action.apply(space.p(x, z, t1), space.p(z, y, t - t1));
            best = best.min(v);
        }
    }
    Ok(best)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn step_space_anchor_distance() {
        let s = make_catalog_space("step_space", &SpaceParams::default()).unwrap();
        let v = eval_metric(&s, &Point::pair(1.0, 0.0), &Point::pair(0.0, 0.5), 1.0).unwrap();
        assert_eq!(v, 100.0);
    }

    #[test]
    fn int_b_same_parity() {
        let s = make_catalog_space("int_b_space", &SpaceParams::default()).unwrap();
        assert_eq!(eval_metric(&s, &Point::Int(2), &Point::Int(4), 2.0).unwrap(), 1.0);
        assert_eq!(eval_metric(&s, &Point::Int(0), &Point::Int(1), 1.0).unwrap(), 14.0);
    }

    #[test]
    fn domain_errors() {
        let s = make_catalog_space("finite_plane_space", &SpaceParams::default()).unwrap();
        let a = Point::pair(3.0, 3.0);
        assert!(matches!(eval_metric(&s, &a, &a, 0.0), Err(Error::Domain(_))));
        assert!(matches!(eval_metric(&s, &a, &Point::pair(9.0, 7.0), 1.0), Err(Error::Domain(_))));
        assert!(matches!(eval_metric(&s, &a, &Point::Int(3), 1.0), Err(Error::Domain(_))));
    }

    #[test]
    fn induced_is_zero_on_diagonal_and_needs_finite_carrier() {
        let s = make_catalog_space("finite_plane_space", &SpaceParams::default()).unwrap();
        let a = Point::pair(7.0, 9.0);
        assert_eq!(induce_parametric(&s, &a, &a, 1.0, 3).unwrap(), 0.0);
        let r = make_catalog_space("step_space", &SpaceParams::default()).unwrap();
        assert!(matches!(induce_parametric(&r, &a, &a, 1.0, 3), Err(Error::Unsupported(_))));
    }
}
