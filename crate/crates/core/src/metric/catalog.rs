use std::sync::Arc;

use serde::{Deserialize, Serialize};

use super::{Carrier, Flags, GThetaSpace, Sampler, TMonotone};
use crate::actions::{control_by_name, half_sum, max, plus};
use crate::error::{Error, Result};
use crate::point::Point;

/// Names accepted by [`make_catalog_space`].
pub const SPACE_NAMES: [&str; 8] = [
    "int_b_space",
    "exp_max_space",
    "step_space",
    "piecewise_space",
    "seq_b_space",
    "finite_plane_space",
    "sup_grid_space",
    "exp_parametric_space",
];

/// Construction parameters. Each space accepts only the keys it uses.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SpaceParams {
    /// Scale factor of `exp_max_space` (`k >= 1`).
    #[serde(skip_serializing_if = "Option::is_none")]
    pub k: Option<f64>,
    /// `K83` or `K4quarter` for `seq_b_space`.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub variant: Option<String>,
    /// Truncation depth of `seq_b_space`.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub depth: Option<u64>,
    /// Cell count of `sup_grid_space` (`n >= 2`).
    #[serde(skip_serializing_if = "Option::is_none")]
    pub n: Option<usize>,
    /// Half-width of the enumerated integer window of `int_b_space`.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub range: Option<u64>,
    /// Sampling box for continuous carriers.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub bound: Option<f64>,
    /// Finite restriction of `piecewise_space`.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub points: Option<Vec<f64>>,
    /// Adds `(9, 7)` to `finite_plane_space`.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub extended: Option<bool>,
}

impl SpaceParams {
    fn only(&self, space: &str, allowed: &[&str]) -> Result<()> {
        let given = [
            ("k", self.k.is_some()),
            ("variant", self.variant.is_some()),
            ("depth", self.depth.is_some()),
            ("n", self.n.is_some()),
            ("range", self.range.is_some()),
            ("bound", self.bound.is_some()),
            ("points", self.points.is_some()),
            ("extended", self.extended.is_some()),
        ];
        match given.iter().find(|(key, set)| *set && !allowed.contains(key)) {
            Some((key, _)) => Err(Error::Config(format!("{space} does not take parameter {key:?}"))),
            None => Ok(()),
        }
    }

    fn bound(&self, default: f64) -> Result<f64> {
        let b = self.bound.unwrap_or(default);
        if b > 0.0 && b.is_finite() {
            Ok(b)
        } else {
            Err(Error::Config(format!("bound must be positive, got {b}")))
        }
    }
}

const NONINC: Flags = Flags { symmetric: true, t_monotone: TMonotone::Nonincreasing };
const FREE: Flags = Flags { symmetric: true, t_monotone: TMonotone::None };

/// Builds a catalog space with its action and control pair attached.
pub fn make_catalog_space(name: &str, params: &SpaceParams) -> Result<GThetaSpace> {
    match name {
        "int_b_space" => int_b_space(params),
        "exp_max_space" => exp_max_space(params),
        "step_space" => step_space(params),
        "piecewise_space" => piecewise_space(params),
        "seq_b_space" => seq_b_space(params),
        "finite_plane_space" => finite_plane_space(params),
        "sup_grid_space" => sup_grid_space(params),
        "exp_parametric_space" => exp_parametric_space(params),
        other => Err(Error::Config(format!("unknown space {other:?}; known: {}", SPACE_NAMES.join(", ")))),
    }
}

fn scalars(x: &Point, y: &Point) -> Option<(f64, f64)> {
    Some((x.as_scalar()?, y.as_scalar()?))
}

/// The integer b-metric: `|x - y|` on equal parity, `5|x - y| + 9` otherwise.
pub fn int_b(x: i64, y: i64) -> f64 {
    let gap = (x - y).unsigned_abs() as f64;
    if (x - y).rem_euclid(2) == 0 {
        gap
    } else {
        5.0 * gap + 9.0
    }
}

fn int_b_space(params: &SpaceParams) -> Result<GThetaSpace> {
    params.only("int_b_space", &["range"])?;
    let range = params.range.unwrap_or(20);
    if range == 0 {
        return Err(Error::Config("int_b_space range must be at least 1".into()));
    }
    // 0, 1, -1, 2, -2, ...
    let element = Arc::new(|i: u64| {
        let m = i.div_ceil(2) as i64;
        Point::Int(if i % 2 == 1 { m } else { -m })
    });
    let carrier = Carrier::Countable { depth: 2 * range, element, contains: Arc::new(|p| matches!(p, Point::Int(_))) };
    let distance = |x: &Point, y: &Point, t: f64| match (x, y) {
        (Point::Int(a), Point::Int(b)) => int_b(*a, *b) / t,
        _ => f64::NAN,
    };
    let control = control_by_name("ln", 5f64.ln())?;
    Ok(GThetaSpace::new("int_b_space", carrier, distance, plus(), control, NONINC).with_anchors(
        [0, 1, 2, 4, -1, 3].map(Point::Int).to_vec(),
        vec![1.0, 2.0, 0.5],
    ))
}

fn exp_max_space(params: &SpaceParams) -> Result<GThetaSpace> {
    params.only("exp_max_space", &["k", "bound"])?;
    let k = params.k.unwrap_or(1.0);
    if !(k >= 1.0 && k.is_finite()) {
        return Err(Error::Config(format!("exp_max_space needs k >= 1, got {k}")));
    }
    let bound = params.bound(4.0)?;
    let distance = move |x: &Point, y: &Point, t: f64| match scalars(x, y) {
        Some((a, b)) if a == b => 0.0,
        Some((a, b)) => k * ((a - b).abs() / t).exp(),
        None => f64::NAN,
    };
    let control = control_by_name("neg_recip", 1.0 / k)?;
    let name = if k == 1.0 { "exp_max_space".to_string() } else { format!("exp_max_space(k={k})") };
    Ok(GThetaSpace::new(name, Carrier::Continuous(Sampler::Real { bound }), distance, max(), control, NONINC)
        .with_anchors([0.0, 2.0, 1.0, 0.5].map(Point::Real).to_vec(), vec![1.0]))
}

/// The four-level step distance on the plane built from the max and taxicab
/// norms.
pub fn step_distance(a: (f64, f64), b: (f64, f64), t: f64) -> f64 {
    let (dx, dy) = ((a.0 - b.0).abs(), (a.1 - b.1).abs());
    let (s1, s2) = (dx.max(dy), dx + dy);
    if t <= s1 {
        100.0
    } else if t <= s2 {
        50.0
    } else if t <= 2.0 * s2 {
        25.0
    } else {
        0.0
    }
}

fn step_space(params: &SpaceParams) -> Result<GThetaSpace> {
    params.only("step_space", &["bound"])?;
    let bound = params.bound(1000.0)?;
    let distance = |x: &Point, y: &Point, t: f64| match (x.as_pair(), y.as_pair()) {
        (Some(a), Some(b)) => step_distance(a, b, t),
        _ => f64::NAN,
    };
    let control = control_by_name("ln", 0.0)?;
    Ok(GThetaSpace::new("step_space", Carrier::Continuous(Sampler::Pair { bound }), distance, plus(), control, NONINC)
        .with_anchors(vec![Point::pair(1.0, 0.0), Point::pair(0.0, 0.5), Point::pair(0.25, 0.125)], vec![1.0]))
}

/// 25 up to `t = d`, 50 up to `2d`, then `100 d / t`.
pub fn piecewise_distance(d: f64, t: f64) -> f64 {
    if d == 0.0 {
        0.0
    } else if t <= d {
        25.0
    } else if t <= 2.0 * d {
        50.0
    } else {
        100.0 * d / t
    }
}

fn piecewise_space(params: &SpaceParams) -> Result<GThetaSpace> {
    params.only("piecewise_space", &["bound", "points"])?;
    let carrier = match &params.points {
        Some(pts) if pts.is_empty() => return Err(Error::Config("piecewise_space points must not be empty".into())),
        Some(pts) => Carrier::Finite(pts.iter().map(|&v| Point::Real(v)).collect()),
        None => Carrier::Continuous(Sampler::Real { bound: params.bound(10.0)? }),
    };
    let distance = |x: &Point, y: &Point, t: f64| match scalars(x, y) {
        Some((a, b)) => piecewise_distance((a - b).abs(), t),
        None => f64::NAN,
    };
    let control = control_by_name("ln", 4f64.ln())?;
    let anchors = match &carrier {
        Carrier::Finite(_) => vec![],
        _ => [0.0, 1.0, 2.0, 0.5].map(Point::Real).to_vec(),
    };
    Ok(GThetaSpace::new("piecewise_space", carrier, distance, half_sum(), control, FREE)
        .with_anchors(anchors, vec![1.0, 2.0, 0.5]))
}

/// Which b-metric on `{0, 1, 1/2, 1/3, ...}` to use.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SeqVariant {
    /// Off-pattern pairs at distance 4, `K = 8/3`.
    K83,
    /// Off-pattern pairs at distance 1/4, `K = 4`.
    K4Quarter,
}

impl SeqVariant {
    fn parse(s: &str) -> Result<Self> {
        match s {
            "K83" => Ok(SeqVariant::K83),
            "K4quarter" => Ok(SeqVariant::K4Quarter),
            other => Err(Error::Config(format!("unknown seq_b_space variant {other:?} (K83 or K4quarter)"))),
        }
    }

    fn other_value(self) -> f64 {
        match self {
            SeqVariant::K83 => 4.0,
            SeqVariant::K4Quarter => 0.25,
        }
    }

    fn k(self) -> f64 {
        match self {
            SeqVariant::K83 => 8.0 / 3.0,
            SeqVariant::K4Quarter => 4.0,
        }
    }
}

/// The b-metric on `{0} ∪ {1/n}` (encoded as [`Point::Recip`]).
pub fn seq_b(variant: SeqVariant, a: u64, b: u64) -> f64 {
    if a == b {
        return 0.0;
    }
    let in_01 = |n: u64| n <= 1;
    let even_side = |n: u64| n == 0 || n % 2 == 0;
    if in_01(a) && in_01(b) {
        1.0
    } else if even_side(a) && even_side(b) {
        let v = |n: u64| if n == 0 { 0.0 } else { 1.0 / n as f64 };
        (v(a) - v(b)).abs()
    } else {
        variant.other_value()
    }
}

fn seq_b_space(params: &SpaceParams) -> Result<GThetaSpace> {
    params.only("seq_b_space", &["variant", "depth"])?;
    let variant = SeqVariant::parse(params.variant.as_deref().unwrap_or("K83"))?;
    let depth = params.depth.unwrap_or(10_000);
    if depth < 2 {
        return Err(Error::Config(format!("seq_b_space depth must be at least 2, got {depth}")));
    }
    let carrier = Carrier::Countable {
        depth,
        element: Arc::new(Point::Recip),
        contains: Arc::new(|p| matches!(p, Point::Recip(_))),
    };
    let distance = move |x: &Point, y: &Point, t: f64| match (x, y) {
        (Point::Recip(a), Point::Recip(b)) => seq_b(variant, *a, *b) / t,
        _ => f64::NAN,
    };
    let control = control_by_name("ln", variant.k().ln())?;
    let name = match variant {
        SeqVariant::K83 => "seq_b_space(K83)",
        SeqVariant::K4Quarter => "seq_b_space(K4quarter)",
    };
    Ok(GThetaSpace::new(name, carrier, distance, plus(), control, NONINC))
}

/// Carrier of the finite plane example.
pub fn finite_plane_points(extended: bool) -> Vec<Point> {
    let mut pts = vec![Point::pair(3.0, 3.0), Point::pair(7.0, 3.0), Point::pair(3.0, 7.0), Point::pair(7.0, 9.0)];
    if extended {
        pts.push(Point::pair(9.0, 7.0));
    }
    pts
}

fn finite_plane_space(params: &SpaceParams) -> Result<GThetaSpace> {
    params.only("finite_plane_space", &["extended"])?;
    let extended = params.extended.unwrap_or(false);
    let distance = |x: &Point, y: &Point, t: f64| match (x.as_pair(), y.as_pair()) {
        (Some(a), Some(b)) => ((a.0 - b.0).powi(2) + (a.1 - b.1).powi(2)) / t,
        _ => f64::NAN,
    };
    let control = control_by_name("ln", 2f64.ln())?;
    let name = if extended { "finite_plane_space(extended)" } else { "finite_plane_space" };
    Ok(GThetaSpace::new(name, Carrier::Finite(finite_plane_points(extended)), distance, plus(), control, NONINC))
}

fn sup_grid_space(params: &SpaceParams) -> Result<GThetaSpace> {
    params.only("sup_grid_space", &["n", "bound"])?;
    let n = params.n.unwrap_or(64);
    if n < 2 {
        return Err(Error::Config(format!("sup_grid_space needs n >= 2, got {n}")));
    }
    let bound = params.bound(1.0)?;
    let distance = |x: &Point, y: &Point, t: f64| match (x.as_grid(), y.as_grid()) {
        (Some(a), Some(b)) if a.n() == b.n() => a.sup_distance(b) / t,
        _ => f64::NAN,
    };
    let control = control_by_name("ln", 0.0)?;
    Ok(GThetaSpace::new(
        format!("sup_grid_space(n={n})"),
        Carrier::Continuous(Sampler::Grid { n, bound }),
        distance,
        plus(),
        control,
        NONINC,
    ))
}

fn exp_parametric_space(params: &SpaceParams) -> Result<GThetaSpace> {
    params.only("exp_parametric_space", &["bound"])?;
    let bound = params.bound(10.0)?;
    let distance = |x: &Point, y: &Point, t: f64| match scalars(x, y) {
        Some((a, b)) if a == b => 0.0,
        Some((a, b)) => t.exp() * (a - b).abs(),
        None => f64::NAN,
    };
    let control = control_by_name("ln", 0.0)?;
    Ok(GThetaSpace::new("exp_parametric_space", Carrier::Continuous(Sampler::Real { bound }), distance, plus(), control, FREE)
        .with_anchors([0.0, 1.0, 0.5].map(Point::Real).to_vec(), vec![1.0]))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn unknown_and_invalid() {
        let p = SpaceParams::default();
        assert!(matches!(make_catalog_space("nope", &p), Err(Error::Config(_))));
        let bad_k = SpaceParams { k: Some(0.5), ..Default::default() };
        assert!(matches!(make_catalog_space("exp_max_space", &bad_k), Err(Error::Config(_))));
        let bad_n = SpaceParams { n: Some(1), ..Default::default() };
        assert!(matches!(make_catalog_space("sup_grid_space", &bad_n), Err(Error::Config(_))));
        let stray = SpaceParams { k: Some(2.0), ..Default::default() };
        assert!(matches!(make_catalog_space("step_space", &stray), Err(Error::Config(_))));
    }

    #[test]
    fn exp_max_formula() {
        let s = make_catalog_space("exp_max_space", &SpaceParams::default()).unwrap();
        let v = s.p(&Point::Real(1.0), &Point::Real(3.0), 2.0);
        assert!((v - 1f64.exp()).abs() < 1e-15);
        assert_eq!(s.p(&Point::Real(1.0), &Point::Real(1.0), 2.0), 0.0);
    }

    #[test]
    fn piecewise_levels() {
        assert_eq!(piecewise_distance(1.0, 0.5), 25.0);
        assert_eq!(piecewise_distance(1.0, 1.5), 50.0);
        assert_eq!(piecewise_distance(1.0, 4.0), 25.0);
        // the two upper branches agree at t = 2d
        assert_eq!(piecewise_distance(1.0, 2.0), 50.0);
    }

    #[test]
    fn seq_b_cases() {
        use SeqVariant::*;
        assert_eq!(seq_b(K83, 0, 1), 1.0);
        assert_eq!(seq_b(K83, 0, 4), 0.25);
        assert_eq!(seq_b(K83, 2, 4), 0.25);
        assert_eq!(seq_b(K83, 1, 2), 4.0);
        assert_eq!(seq_b(K83, 3, 0), 4.0);
        assert_eq!(seq_b(K4Quarter, 1, 6), 0.25);
    }

    #[test]
    fn int_enumeration_covers_window() {
        let s = make_catalog_space("int_b_space", &SpaceParams { range: Some(3), ..Default::default() }).unwrap();
        let mut v: Vec<i64> = s.carrier.enumerate().unwrap().iter().map(|p| match p {
            Point::Int(i) => *i,
            _ => unreachable!(),
        }).collect();
        v.sort();
        assert_eq!(v, (-3..=3).collect::<Vec<_>>());
    }
}
