//! Convergence, Cauchy, limit-uniqueness and sequential-continuity checks.
//!
//! "For every `p > 0`" becomes "for every `t` on a finite grid", and the
//! infinite tail becomes the window up to a finite horizon. A check passes
//! only when the good tail covers at least the last tenth of the horizon; it
//! fails when the last tenth shows no progress (a plateau or a recurring
//! maximum at or above `eps`); anything else is indeterminate.

use std::fmt;
use std::sync::Arc;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::metric::GThetaSpace;
use crate::num::{ser_f64, ser_opt_f64, settled};
use crate::point::Point;
use crate::report::Verdict;

type Generator = Arc<dyn Fn(u64) -> Point + Send + Sync>;

/// Indices `0..=horizon` of a sequence.
#[derive(Clone)]
pub struct SequenceSpec {
    pub name: String,
    generator: Generator,
    pub horizon: u64,
    pub description: String,
}

impl SequenceSpec {
    pub fn new(
        name: impl Into<String>,
        generator: impl Fn(u64) -> Point + Send + Sync + 'static,
        horizon: u64,
        description: impl Into<String>,
    ) -> Self {
        Self { name: name.into(), generator: Arc::new(generator), horizon, description: description.into() }
    }

    pub fn at(&self, i: u64) -> Point {
        (self.generator)(i)
    }

    pub fn with_horizon(mut self, horizon: u64) -> Self {
        self.horizon = horizon;
        self
    }

    /// Start of the last tenth of the horizon.
    fn window_start(&self) -> u64 {
        self.horizon - self.horizon / 10
    }
}

impl fmt::Debug for SequenceSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("SequenceSpec")
            .field("name", &self.name)
            .field("horizon", &self.horizon)
            .field("description", &self.description)
            .finish_non_exhaustive()
    }
}

/// `s_i = 1/(2(i+1))` in the reciprocal carrier.
pub fn reciprocal_even(horizon: u64) -> SequenceSpec {
    SequenceSpec::new("reciprocal_even", |i| Point::Recip(2 * (i + 1)), horizon, "s_i = 1/(2(i+1))")
}

/// `s_i = 1/(i+1)` in the reciprocal carrier.
pub fn reciprocal(horizon: u64) -> SequenceSpec {
    SequenceSpec::new("reciprocal", |i| Point::Recip(i + 1), horizon, "s_i = 1/(i+1)")
}

/// `0, 1, 0, 1, ...` in the integers.
pub fn alternating(horizon: u64) -> SequenceSpec {
    SequenceSpec::new("alternating", |i| Point::Int((i % 2) as i64), horizon, "0, 1, 0, 1, ...")
}

pub fn constant(point: Point, horizon: u64) -> SequenceSpec {
    let d = format!("constant {point}");
    SequenceSpec::new("constant", move |_| point.clone(), horizon, d)
}

/// `first` for the first `switch` indices, then `then` forever.
pub fn eventually_constant(first: Point, then: Point, switch: u64, horizon: u64) -> SequenceSpec {
    let d = format!("{first} until index {switch}, then {then}");
    SequenceSpec::new("eventually_constant", move |i| if i < switch { first.clone() } else { then.clone() }, horizon, d)
}

/// Orbit `w, T w, T^2 w, ...` of a point-valued map, cached up to the horizon.
pub fn orbit(name: &str, start: Point, map: impl Fn(&Point) -> Result<Point>, horizon: u64) -> Result<SequenceSpec> {
    let mut pts = Vec::with_capacity(horizon as usize + 1);
    let mut w = start.clone();
    for _ in 0..=horizon {
        pts.push(w.clone());
        w = map(&w)?;
    }
    let pts = Arc::new(pts);
    Ok(SequenceSpec::new(format!("orbit:{name}"), move |i| pts[i as usize].clone(), horizon, format!("orbit of {start} under {name}")))
}

/// Sequence catalog: `reciprocal_even`, `reciprocal`, `alternating`,
/// `constant:<point>` (parsed against `like`).
pub fn sequence_by_name(name: &str, like: &Point, horizon: u64) -> Result<SequenceSpec> {
    match name.split_once(':') {
        Some(("constant", pt)) => Ok(constant(Point::parse_like(pt, like)?, horizon)),
        _ => match name {
            "reciprocal_even" => Ok(reciprocal_even(horizon)),
            "reciprocal" => Ok(reciprocal(horizon)),
            "alternating" => Ok(alternating(horizon)),
            other => Err(Error::Config(format!("unknown sequence {other:?}"))),
        },
    }
}

fn check_horizon(seq: &SequenceSpec, eps: f64) -> Result<()> {
    if !(eps > 0.0) {
        return Err(Error::Domain(format!("eps must be positive, got {eps}")));
    }
    if seq.horizon < 10 {
        return Err(Error::Domain(format!("horizon must be at least 10, got {}", seq.horizon)));
    }
    Ok(())
}

/// Per-`t` convergence evidence.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct TailInfo {
    #[serde(serialize_with = "ser_f64")]
    pub t: f64,
    pub verdict: Verdict,
    /// Smallest `N` with every distance in `[N, horizon]` below `eps`.
    pub tail_index: Option<u64>,
    /// Largest distance over the last tenth of the horizon.
    #[serde(serialize_with = "ser_f64")]
    pub max_tail: f64,
    #[serde(serialize_with = "ser_f64")]
    pub last: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ConvergenceReport {
    pub verdict: Verdict,
    pub limit: Point,
    #[serde(serialize_with = "ser_f64")]
    pub eps: f64,
    pub horizon: u64,
    pub t_grid: Vec<f64>,
    pub per_t: Vec<TailInfo>,
}

fn combine(verdicts: impl IntoIterator<Item = Verdict>) -> Verdict {
    let mut out = Verdict::Pass;
    for v in verdicts {
        match v {
            Verdict::Fail => return Verdict::Fail,
            Verdict::Indeterminate => out = Verdict::Indeterminate,
            Verdict::Pass => {}
        }
    }
    out
}

/// Maximum over a slice, `-inf` when empty.
fn vmax(v: &[f64]) -> f64 {
    v.iter().copied().fold(f64::NEG_INFINITY, f64::max)
}

/// Whether `s_i -> limit` on every grid `t`.
pub fn check_convergence(space: &GThetaSpace, seq: &SequenceSpec, limit: &Point, t_grid: &[f64], eps: f64) -> Result<ConvergenceReport> {
    check_horizon(seq, eps)?;
    let pts: Vec<Point> = (0..=seq.horizon).map(|i| seq.at(i)).collect();
    let w = seq.window_start() as usize;
    let w0 = (seq.horizon - seq.horizon / 5) as usize;
    let mut per_t = Vec::with_capacity(t_grid.len());
    for &t in t_grid {
        let d: Vec<f64> = pts.iter().map(|p| space.p(p, limit, t)).collect();
        let below = d.iter().rev().take_while(|&&v| v < eps).count();
        let tail_index = (below > 0).then(|| (d.len() - below) as u64);
        let max_tail = vmax(&d[w..]);
        let verdict = if tail_index.is_some_and(|n| n as usize <= w) {
            Verdict::Pass
        } else if max_tail >= eps && max_tail >= vmax(&d[w0..w]) * (1.0 - 1e-9) {
            Verdict::Fail
        } else {
            Verdict::Indeterminate
        };
        per_t.push(TailInfo { t, verdict, tail_index, max_tail, last: d[d.len() - 1] });
    }
    Ok(ConvergenceReport {
        verdict: combine(per_t.iter().map(|i| i.verdict)),
        limit: limit.clone(),
        eps,
        horizon: seq.horizon,
        t_grid: t_grid.to_vec(),
        per_t,
    })
}

/// Indices used for pair checks: all of them for short horizons, otherwise the
/// first 256, a geometric ladder, and the last 1024.
fn pair_indices(horizon: u64) -> Vec<u64> {
    if horizon <= 2048 {
        return (0..=horizon).collect();
    }
    let mut idx: Vec<u64> = (0..256).collect();
    let mut k = 256f64;
    while (k as u64) < horizon - 1024 {
        idx.push(k as u64);
        k *= 1.02;
    }
    // keep both window edges so the plateau comparison has data on each side
    idx.push(seq_edge(horizon, 5));
    idx.push(seq_edge(horizon, 10));
    idx.extend(horizon - 1024..=horizon);
    idx.sort_unstable();
    idx.dedup();
    idx
}

fn seq_edge(horizon: u64, div: u64) -> u64 {
    horizon - horizon / div
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CauchyInfo {
    #[serde(serialize_with = "ser_f64")]
    pub t: f64,
    pub verdict: Verdict,
    pub tail_index: Option<u64>,
    /// Largest pair distance with both indices in the last tenth.
    #[serde(serialize_with = "ser_f64")]
    pub max_tail_pair: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CauchyReport {
    pub verdict: Verdict,
    #[serde(serialize_with = "ser_f64")]
    pub eps: f64,
    pub horizon: u64,
    /// Number of indices the pair scan used.
    pub indices_used: usize,
    pub t_grid: Vec<f64>,
    pub per_t: Vec<CauchyInfo>,
}

/// Whether all pair distances beyond some `N` fall below `eps` on the grid.
pub fn check_cauchy(space: &GThetaSpace, seq: &SequenceSpec, t_grid: &[f64], eps: f64) -> Result<CauchyReport> {
    check_horizon(seq, eps)?;
    let idx = pair_indices(seq.horizon);
    let pts: Vec<Point> = idx.iter().map(|&i| seq.at(i)).collect();
    let w = seq.window_start();
    let w0 = seq_edge(seq.horizon, 5);
    let mut per_t = Vec::with_capacity(t_grid.len());
    for &t in t_grid {
        // running[k] = max pair distance among idx[k..]
        let mut running = vec![0.0f64; idx.len() + 1];
        for k in (0..idx.len()).rev() {
            let row = pts[k + 1..].iter().map(|q| space.p(&pts[k], q, t)).fold(0.0, f64::max);
            running[k] = running[k + 1].max(row);
        }
        let first_ok = (0..idx.len()).find(|&k| running[k] < eps);
        let tail_index = first_ok.map(|k| idx[k]);
        let at = |edge: u64| running[idx.partition_point(|&i| i < edge)];
        let (m10, m20) = (at(w), at(w0));
        let verdict = if tail_index.is_some_and(|n| n <= w) {
            Verdict::Pass
        } else if m10 >= eps && m10 >= m20 * (1.0 - 1e-9) {
            Verdict::Fail
        } else {
            Verdict::Indeterminate
        };
        per_t.push(CauchyInfo { t, verdict, tail_index, max_tail_pair: m10 });
    }
    Ok(CauchyReport {
        verdict: combine(per_t.iter().map(|i| i.verdict)),
        eps,
        horizon: seq.horizon,
        indices_used: idx.len(),
        t_grid: t_grid.to_vec(),
        per_t,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct UniqueLimitReport {
    /// `Pass` when at most one candidate limit passes.
    pub verdict: Verdict,
    pub first: ConvergenceReport,
    pub second: ConvergenceReport,
}

/// Both candidate limits passing would contradict uniqueness of limits.
pub fn check_unique_limit(
    space: &GThetaSpace,
    seq: &SequenceSpec,
    limit1: &Point,
    limit2: &Point,
    t_grid: &[f64],
    eps: f64,
) -> Result<UniqueLimitReport> {
    if limit1 == limit2 {
        return Err(Error::Precondition("the two candidate limits must differ".into()));
    }
    let first = check_convergence(space, seq, limit1, t_grid, eps)?;
    let second = check_convergence(space, seq, limit2, t_grid, eps)?;
    let both = first.verdict == Verdict::Pass && second.verdict == Verdict::Pass;
    Ok(UniqueLimitReport { verdict: if both { Verdict::Fail } else { Verdict::Pass }, first, second })
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ContinuityPoint {
    #[serde(serialize_with = "ser_f64")]
    pub t: f64,
    /// Plateau of `P(s_i, probe, t)` over the last tenth of the horizon.
    #[serde(serialize_with = "ser_opt_f64")]
    pub tail_value: Option<f64>,
    /// `P(limit, probe, t)`.
    #[serde(serialize_with = "ser_f64")]
    pub point_value: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ContinuityReport {
    pub continuous: bool,
    pub per_t: Vec<ContinuityPoint>,
}

/// Compares the tail limit of `P(s_i, probe, t)` with `P(limit, probe, t)`.
///
/// The sequence must first pass [`check_convergence`] at `eps`; an
/// indeterminate convergence or an unsettled tail is reported as
/// [`Error::Indeterminate`].
pub fn check_sequential_continuity(
    space: &GThetaSpace,
    seq: &SequenceSpec,
    limit: &Point,
    probe: &Point,
    t_grid: &[f64],
    eps: f64,
) -> Result<ContinuityReport> {
    let conv = check_convergence(space, seq, limit, t_grid, eps)?;
    match conv.verdict {
        Verdict::Pass => {}
        Verdict::Fail => return Err(Error::Precondition(format!("sequence does not converge to {limit}"))),
        Verdict::Indeterminate => return Err(Error::Indeterminate(format!("convergence to {limit} not established"))),
    }
    let window: Vec<Point> = (seq.window_start()..=seq.horizon).map(|i| seq.at(i)).collect();
    let mut per_t = Vec::with_capacity(t_grid.len());
    let mut continuous = true;
    for &t in t_grid {
        let vals: Vec<f64> = window.iter().map(|p| space.p(p, probe, t)).collect();
        let tail = settled(&vals).ok_or_else(|| Error::Indeterminate(format!("tail at t = {t} has not settled")))?;
        let point_value = space.p(limit, probe, t);
        if (tail - point_value).abs() > 1e-9 * (1.0 + point_value.abs()) {
            continuous = false;
        }
        per_t.push(ContinuityPoint { t, tail_value: Some(tail), point_value });
    }
    Ok(ContinuityReport { continuous, per_t })
}

/// `(i, t, distance)` rows for CSV traces, every `stride`-th index.
pub fn trace(space: &GThetaSpace, seq: &SequenceSpec, limit: &Point, t_grid: &[f64], stride: u64) -> Vec<(u64, f64, f64)> {
    let stride = stride.max(1);
    let mut rows = Vec::new();
    for i in (0..=seq.horizon).step_by(stride as usize) {
        let p = seq.at(i);
        for &t in t_grid {
            rows.push((i, t, space.p(&p, limit, t)));
        }
    }
    rows
}
