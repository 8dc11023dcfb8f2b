//! Suzuki-type contractions: the weight `psi`, the `M` value, premise and
//! consequent checks for the general, Banach and Kannan forms, and Picard
//! iteration towards the fixed point.

use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use rand::Rng;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::metric::{Carrier, GThetaSpace};
use crate::num::{default_t_grid, ser_f64, ser_opt_f64};
use crate::point::Point;
use crate::report::Verdict;
use crate::rng::batch_rng;

/// `(sqrt(5) - 1) / 2`, the first breakpoint of `psi`.
pub const PSI_GOLDEN: f64 = 0.618_033_988_749_894_9;
/// `1 / sqrt(2)`, the second breakpoint of `psi`.
pub const PSI_SQRT_HALF: f64 = std::f64::consts::FRAC_1_SQRT_2;

/// `1` up to the golden-ratio conjugate, `(1-u)/u^2` up to `1/sqrt(2)`, then
/// `1/(1+u)`.
pub fn psi(u: f64) -> Result<f64> {
    if !(0.0..1.0).contains(&u) {
        return Err(Error::Domain(format!("psi is defined on [0, 1), got {u}")));
    }
    Ok(if u <= PSI_GOLDEN {
        1.0
    } else if u <= PSI_SQRT_HALF {
        (1.0 - u) / (u * u)
    } else {
        1.0 / (1.0 + u)
    })
}

type MapFn = Arc<dyn Fn(&Point) -> Result<Point> + Send + Sync>;

/// A self-map of a carrier.
#[derive(Clone)]
pub struct SelfMap {
    pub name: String,
    apply: MapFn,
}

impl SelfMap {
    pub fn new(name: impl Into<String>, apply: impl Fn(&Point) -> Result<Point> + Send + Sync + 'static) -> Self {
        Self { name: name.into(), apply: Arc::new(apply) }
    }

    pub fn apply(&self, x: &Point) -> Result<Point> {
        (self.apply)(x)
    }
}

impl fmt::Debug for SelfMap {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "SelfMap({})", self.name)
    }
}

pub fn identity_map() -> SelfMap {
    SelfMap::new("identity", |x| Ok(x.clone()))
}

fn plane(x: &Point, extended: bool) -> Result<Point> {
    let p = match x.as_pair() {
        Some((3.0, 3.0) | (7.0, 3.0) | (3.0, 7.0)) => (3.0, 3.0),
        Some((7.0, 9.0)) => (7.0, 3.0),
        Some((9.0, 7.0)) if extended => (3.0, 7.0),
        _ => return Err(Error::Domain(format!("{x} is outside the map's domain"))),
    };
    Ok(Point::Pair(p.0, p.1))
}

/// The four-point plane map: everything to `(3,3)` except `(7,9) -> (7,3)`.
pub fn plane_map() -> SelfMap {
    SelfMap::new("plane_T", |x| plane(x, false))
}

/// The plane map extended by `(9,7) -> (3,7)`.
pub fn plane_map_extended() -> SelfMap {
    SelfMap::new("plane_S", |x| plane(x, true))
}

pub const MAP_NAMES: [&str; 3] = ["plane_T", "plane_S", "identity"];

/// Map catalog. The fractional operator is built by the fractional module.
pub fn map_by_name(name: &str) -> Result<SelfMap> {
    match name {
        "plane_T" => Ok(plane_map()),
        "plane_S" => Ok(plane_map_extended()),
        "identity" => Ok(identity_map()),
        other => Err(Error::Config(format!("unknown map {other:?}; known: {}", MAP_NAMES.join(", ")))),
    }
}

/// `max(P(x,y), P(x,Tx), P(y,Ty), (P(x,Ty) + P(y,Tx)) / 2)` at `t`.
pub fn m_value(space: &GThetaSpace, map: &SelfMap, x: &Point, y: &Point, t: f64) -> Result<f64> {
    if !(t > 0.0) {
        return Err(Error::Domain(format!("parameter t must be positive, got {t}")));
    }
    let (tx, ty) = (map.apply(x)?, map.apply(y)?);
    let p = |a: &Point, b: &Point| space.p(a, b, t);
    Ok(p(x, y).max(p(x, &tx)).max(p(y, &ty)).max(0.5 * (p(x, &ty) + p(y, &tx))))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Variant {
    General,
    Banach,
    Kannan,
}

impl FromStr for Variant {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "general" => Ok(Variant::General),
            "banach" => Ok(Variant::Banach),
            "kannan" => Ok(Variant::Kannan),
            other => Err(Error::Config(format!("unknown variant {other:?} (general, banach, kannan)"))),
        }
    }
}

/// Which point the premise measures against: `x_Tx` uses `P(x, Tx)`, the
/// literal `x_Ty` form uses `P(x, Ty)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum PremiseForm {
    #[serde(rename = "x_Tx")]
    XTx,
    #[serde(rename = "x_Ty")]
    XTy,
}

impl FromStr for PremiseForm {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "x_Tx" => Ok(PremiseForm::XTx),
            "x_Ty" => Ok(PremiseForm::XTy),
            other => Err(Error::Config(format!("unknown premise form {other:?} (x_Tx, x_Ty)"))),
        }
    }
}

#[derive(Clone, Debug)]
pub struct SuzukiConfig {
    pub u: f64,
    pub variant: Variant,
    pub premise_form: PremiseForm,
    pub t_grid: Vec<f64>,
    /// Pairs drawn when the carrier is not finite.
    pub pair_samples: usize,
    pub seed: u64,
}

impl SuzukiConfig {
    pub fn new(u: f64, variant: Variant) -> Result<Self> {
        if !(0.0..1.0).contains(&u) {
            return Err(Error::Domain(format!("u must lie in [0, 1), got {u}")));
        }
        Ok(Self { u, variant, premise_form: PremiseForm::XTx, t_grid: default_t_grid(), pair_samples: 10_000, seed: 0 })
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SuzukiWitness {
    pub x: Point,
    pub y: Point,
    #[serde(serialize_with = "ser_f64")]
    pub s: f64,
    /// `P(Tx, Ty, s)`.
    #[serde(serialize_with = "ser_f64")]
    pub lhs: f64,
    /// The variant's bound.
    #[serde(serialize_with = "ser_f64")]
    pub rhs: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SuzukiReport {
    pub verdict: Verdict,
    pub variant: Variant,
    pub premise_form: PremiseForm,
    #[serde(serialize_with = "ser_f64")]
    pub u: f64,
    #[serde(serialize_with = "ser_f64")]
    pub psi: f64,
    pub exhaustive: bool,
    /// Samples whose premise held.
    pub checked: usize,
    /// Samples whose premise failed.
    pub vacuous: usize,
    pub violations: usize,
    pub witness: Option<SuzukiWitness>,
}

struct Sample {
    x: Point,
    y: Point,
    s: f64,
}

fn samples(space: &GThetaSpace, config: &SuzukiConfig) -> (bool, Vec<Sample>) {
    if let Carrier::Finite(pts) = &space.carrier {
        let mut out = Vec::with_capacity(pts.len() * pts.len() * config.t_grid.len());
        for x in pts {
            for y in pts {
                for &s in &config.t_grid {
                    out.push(Sample { x: x.clone(), y: y.clone(), s });
                }
            }
        }
        return (true, out);
    }
    let mut rng = batch_rng(config.seed, 0);
    let out = (0..config.pair_samples)
        .map(|_| Sample {
            x: space.carrier.sample(&mut rng),
            y: space.carrier.sample(&mut rng),
            s: config.t_grid[rng.random_range(0..config.t_grid.len())],
        })
        .collect();
    (false, out)
}

/// Checks the contraction implication on every finite-carrier pair and grid
/// `t`, or on `pair_samples` random pairs otherwise.
pub fn verify_suzuki(space: &GThetaSpace, map: &SelfMap, config: &SuzukiConfig) -> Result<SuzukiReport> {
    if config.pair_samples == 0 {
        return Err(Error::Domain("pair_samples must be at least 1".into()));
    }
    let weight = psi(config.u)?;
    let (exhaustive, samples) = samples(space, config);
    let mut report = SuzukiReport {
        verdict: Verdict::Pass,
        variant: config.variant,
        premise_form: config.premise_form,
        u: config.u,
        psi: weight,
        exhaustive,
        checked: 0,
        vacuous: 0,
        violations: 0,
        witness: None,
    };
    for Sample { x, y, s } in samples {
        let (tx, ty) = (map.apply(&x)?, map.apply(&y)?);
        let p = |a: &Point, b: &Point| space.p(a, b, s);
        let premise = match config.premise_form {
            PremiseForm::XTx => weight * p(&x, &tx),
            PremiseForm::XTy => weight * p(&x, &ty),
        };
        if premise > p(&x, &y) {
            report.vacuous += 1;
            continue;
        }
        report.checked += 1;
        let lhs = p(&tx, &ty);
        let rhs = match config.variant {
            Variant::General => config.u * m_value(space, map, &x, &y, s)?,
            Variant::Banach => config.u * p(&x, &y),
            Variant::Kannan => 0.5 * config.u * (p(&x, &ty) + p(&y, &tx)),
        };
        if crate::num::violates(lhs, rhs) {
            report.violations += 1;
            if report.witness.is_none() {
                report.verdict = Verdict::Fail;
                report.witness = Some(SuzukiWitness { x, y, s, lhs, rhs });
            }
        }
    }
    Ok(report)
}

/// The `r` values on `r_grid` for which `psi(r) P(x, Tx, t) <= P(x, y, t)`.
pub fn premise_solutions(space: &GThetaSpace, map: &SelfMap, x: &Point, y: &Point, t: f64, r_grid: &[f64]) -> Result<Vec<f64>> {
    let lhs = space.p(x, &map.apply(x)?, t);
    let rhs = space.p(x, y, t);
    let mut out = Vec::new();
    for &r in r_grid {
        if psi(r)? * lhs <= rhs {
            out.push(r);
        }
    }
    Ok(out)
}

/// `i / n` for `0 <= i < n`.
pub fn unit_grid(n: usize) -> Vec<f64> {
    (0..n).map(|i| i as f64 / n as f64).collect()
}

/// Every point with `Tx == x` on a finite carrier.
pub fn fixed_points(space: &GThetaSpace, map: &SelfMap) -> Result<Vec<Point>> {
    let Carrier::Finite(pts) = &space.carrier else {
        return Err(Error::Unsupported("fixed-point scan needs a finite carrier".into()));
    };
    let mut out = Vec::new();
    for x in pts {
        if &map.apply(x)? == x {
            out.push(x.clone());
        }
    }
    Ok(out)
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct FixedPointResult {
    pub fixed_point: Point,
    /// Applications needed to reach `fixed_point` from the start.
    pub iterations: usize,
    pub t_grid: Vec<f64>,
    /// `step_distances[i][j] = P(w_{i+1}, w_i, t_grid[j])`.
    pub step_distances: Vec<Vec<f64>>,
    pub converged: bool,
    /// See [`estimate_contraction`].
    #[serde(serialize_with = "ser_opt_f64")]
    pub observed_ratio: Option<f64>,
}

/// Picard iteration `w_{i+1} = T w_i` until every grid step distance is below
/// `tol`. The returned point is the last `w_i` before that step, so
/// `P(T w*, w*, t) < tol` holds on the grid when `converged` is set.
pub fn iterate_fixed_point(
    space: &GThetaSpace,
    map: &SelfMap,
    w0: &Point,
    tol: f64,
    max_iter: usize,
    t_grid: &[f64],
) -> Result<FixedPointResult> {
    if !(tol > 0.0) || max_iter == 0 || t_grid.is_empty() {
        return Err(Error::Domain("need tol > 0, max_iter >= 1 and a nonempty t grid".into()));
    }
    let mut w = w0.clone();
    let mut steps = Vec::new();
    let mut converged = false;
    for _ in 0..max_iter {
        let next = map.apply(&w)?;
        let d: Vec<f64> = t_grid.iter().map(|&t| space.p(&next, &w, t)).collect();
        if d.iter().any(|v| !v.is_finite()) {
            return Err(Error::Evaluation { node: steps.len(), value: d.iter().copied().find(|v| !v.is_finite()).unwrap() });
        }
        let done = d.iter().all(|&v| v < tol);
        steps.push(d);
        if done {
            converged = true;
            break;
        }
        w = next;
    }
    let iterations = if converged { steps.len() - 1 } else { steps.len() };
    let mut out = FixedPointResult {
        fixed_point: w,
        iterations,
        t_grid: t_grid.to_vec(),
        step_distances: steps,
        converged,
        observed_ratio: None,
    };
    out.observed_ratio = estimate_contraction(&out);
    Ok(out)
}

/// Largest ratio of consecutive step distances over the trace and the grid,
/// skipping denominators below `1e-14`; `None` when no ratio exists.
pub fn estimate_contraction(result: &FixedPointResult) -> Option<f64> {
    let mut best: Option<f64> = None;
    for pair in result.step_distances.windows(2) {
        for (prev, next) in pair[0].iter().zip(&pair[1]) {
            if *prev >= 1e-14 {
                let r = next / prev;
                best = Some(best.map_or(r, |b| b.max(r)));
            }
        }
    }
    best
}
