//! Command-line front end.
//!
//! Every command takes its arguments either from flags or from a JSON run
//! configuration (`--config file.json`):
//!
//! ```json
//! {"command": "verify", "seed": 7, "args": {"space": "step_space", "axioms": "theta"}}
//! ```
//!
//! Spaces are named `name` or `name:key=value,...` on the command line; in a
//! configuration they may also be a block such as
//! `{"space": "seq_b_space", "variant": "K83", "depth": 10000}`.
//!
//! Exit codes: 0 success, 1 refutation or non-convergence, 2 configuration error.

use std::ffi::OsString;
use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::str::FromStr;
use std::time::{SystemTime, UNIX_EPOCH};

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::{Deserialize, Deserializer, Serialize};
use serde_json::{json, Value};

use crate::actions::{action_by_name, catalog_actions, control_by_name, verify_action, verify_control, F2_DEPTH};
use crate::error::{Error, Result};
use crate::fractional::{solve_fde, verify_lipschitz, FdeProblem, Rhs};
use crate::metric::{make_catalog_space, GThetaSpace, SpaceParams, SPACE_NAMES};
use crate::num::default_t_grid;
use crate::point::Point;
use crate::repro::{repro_all, ReproVerdict};
use crate::report::{AxiomReport, Verdict};
use crate::sequences::{check_cauchy, check_convergence, check_sequential_continuity, check_unique_limit, sequence_by_name, trace};
use crate::suzuki::{fixed_points, iterate_fixed_point, map_by_name, verify_suzuki, PremiseForm, SuzukiConfig, Variant};
use crate::topology::{ball_members, default_radius_grid, is_open_set, Ball, BallKind, PointSet};
use crate::verifier::{verify_gtheta, verify_parametric_triangle, verify_theta_parametric};

const TRIALS: usize = 10_000;

/// A catalog space with its construction parameters.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SpaceSel {
    pub name: String,
    pub params: SpaceParams,
}

impl SpaceSel {
    pub fn build(&self) -> Result<GThetaSpace> {
        make_catalog_space(&self.name, &self.params)
    }

    fn from_block(name: String, rest: serde_json::Map<String, Value>) -> Result<Self> {
        let params = serde_path_to_error::deserialize(Value::Object(rest))
            .map_err(|e| Error::Config(format!("space parameter `{}`: {}", e.path(), e.inner())))?;
        Ok(Self { name, params })
    }
}

/// Splits `a=1,points=[0,1],b=x` at top-level commas.
fn split_top(text: &str) -> Vec<&str> {
    let (mut out, mut depth, mut start) = (Vec::new(), 0i32, 0);
    for (i, ch) in text.char_indices() {
        match ch {
            '[' => depth += 1,
            ']' => depth -= 1,
            ',' if depth == 0 => {
                out.push(&text[start..i]);
                start = i + 1;
            }
            _ => {}
        }
    }
    out.push(&text[start..]);
    out.into_iter().map(str::trim).filter(|s| !s.is_empty()).collect()
}

impl FromStr for SpaceSel {
    type Err = Error;

    fn from_str(text: &str) -> Result<Self> {
        let (name, args) = text.split_once(':').unwrap_or((text, ""));
        let mut map = serde_json::Map::new();
        for kv in split_top(args) {
            let (k, v) = kv.split_once('=').ok_or_else(|| Error::Config(format!("expected key=value in space, got {kv:?}")))?;
            let value = serde_json::from_str(v.trim()).unwrap_or_else(|_| Value::String(v.trim().to_string()));
            map.insert(k.trim().to_string(), value);
        }
        Self::from_block(name.trim().to_string(), map)
    }
}

fn bare(e: Error) -> String {
    match e {
        Error::Config(m) => m,
        other => other.to_string(),
    }
}

impl<'de> Deserialize<'de> for SpaceSel {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        use serde::de::Error as _;
        match Value::deserialize(d)? {
            Value::String(s) => s.parse().map_err(|e| D::Error::custom(bare(e))),
            Value::Object(mut m) => {
                let name = match m.remove("space") {
                    Some(Value::String(s)) => s,
                    _ => return Err(D::Error::custom("space block needs a string field `space`")),
                };
                SpaceSel::from_block(name, m).map_err(|e| D::Error::custom(bare(e)))
            }
            _ => Err(D::Error::custom("space must be a name or a block")),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Deserialize, Default)]
#[serde(rename_all = "lowercase")]
pub enum AxiomSystem {
    /// Ptheta1, Ptheta2 and symmetry.
    #[default]
    Gtheta,
    /// The un-relaxed parametric triangle.
    Parametric,
    /// The same-parameter theta triangle.
    Theta,
    All,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Json,
    Csv,
}

#[derive(Clone, Debug, Args, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ActionsVerifyArgs {
    /// Actions to check (all catalog actions when omitted), e.g. `theta3:k=0.8`.
    #[arg(long = "action")]
    pub actions: Vec<String>,
    /// Control functions to check, `name` or `name:alpha=x`.
    #[arg(long = "control")]
    pub controls: Vec<String>,
    #[arg(long, default_value_t = TRIALS)]
    pub trials: usize,
}

impl Default for ActionsVerifyArgs {
    fn default() -> Self {
        Self { actions: Vec::new(), controls: Vec::new(), trials: TRIALS }
    }
}

#[derive(Clone, Debug, Args, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct VerifyArgs {
    #[arg(long)]
    pub space: Option<SpaceSel>,
    #[arg(long, value_enum, default_value_t = AxiomSystem::Gtheta)]
    pub axioms: AxiomSystem,
    #[arg(long, default_value_t = TRIALS)]
    pub trials: usize,
}

impl Default for VerifyArgs {
    fn default() -> Self {
        Self { space: None, axioms: AxiomSystem::Gtheta, trials: TRIALS }
    }
}

#[derive(Clone, Debug, Args, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct BallArgs {
    #[arg(long)]
    pub space: Option<SpaceSel>,
    #[arg(long)]
    pub center: Option<String>,
    #[arg(long)]
    pub radius: Option<f64>,
    #[arg(long, default_value_t = 1.0)]
    pub t: f64,
    #[arg(long)]
    pub closed: bool,
}

impl Default for BallArgs {
    fn default() -> Self {
        Self { space: None, center: None, radius: None, t: 1.0, closed: false }
    }
}

#[derive(Clone, Debug, Default, Args, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct OpenCheckArgs {
    /// The set is this ball's members unless `--point` is given.
    #[command(flatten)]
    #[serde(flatten)]
    pub ball: BallArgs,
    /// Explicit set members (repeatable).
    #[arg(long = "point")]
    pub points: Vec<String>,
    /// Radius grid is `base * 2^j`, `-20 <= j <= 0`; defaults to the ball radius.
    #[arg(long)]
    pub radius_base: Option<f64>,
    #[arg(long = "t-grid", value_delimiter = ',')]
    pub t_grid: Vec<f64>,
}

#[derive(Clone, Debug, Args, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SeqCheckArgs {
    #[arg(long)]
    pub space: Option<SpaceSel>,
    /// `reciprocal_even`, `reciprocal`, `alternating` or `constant:<point>`.
    #[arg(long)]
    pub sequence: Option<String>,
    #[arg(long)]
    pub limit: Option<String>,
    #[arg(long, default_value_t = 1e-6)]
    pub eps: f64,
    #[arg(long, default_value_t = 100_000)]
    pub horizon: u64,
    #[arg(long = "t-grid", value_delimiter = ',')]
    pub t_grid: Vec<f64>,
    /// Also compare the tail of `P(s_i, probe, t)` with `P(limit, probe, t)`.
    #[arg(long)]
    pub probe: Option<String>,
    /// Also check that the sequence does not converge to this point.
    #[arg(long)]
    pub other_limit: Option<String>,
}

impl Default for SeqCheckArgs {
    fn default() -> Self {
        Self {
            space: None,
            sequence: None,
            limit: None,
            eps: 1e-6,
            horizon: 100_000,
            t_grid: Vec::new(),
            probe: None,
            other_limit: None,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum VariantArg {
    General,
    Banach,
    Kannan,
}

impl From<VariantArg> for Variant {
    fn from(v: VariantArg) -> Self {
        match v {
            VariantArg::General => Variant::General,
            VariantArg::Banach => Variant::Banach,
            VariantArg::Kannan => Variant::Kannan,
        }
    }
}

#[derive(Clone, Debug, Args, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct FixedPointArgs {
    #[arg(long)]
    pub space: Option<SpaceSel>,
    /// `plane_T`, `plane_S` or `identity`.
    #[arg(long)]
    pub map: Option<String>,
    #[arg(long)]
    pub start: Option<String>,
    #[arg(long, default_value_t = 0.875)]
    pub u: f64,
    #[arg(long, value_enum, default_value_t = VariantArg::General)]
    pub variant: VariantArg,
    /// `x_Tx` (default) or the literal `x_Ty`.
    #[arg(long, default_value = "x_Tx")]
    pub premise: String,
    #[arg(long, default_value_t = 1e-10)]
    pub tol: f64,
    #[arg(long, default_value_t = 1000)]
    pub max_iter: usize,
    #[arg(long = "t-grid", value_delimiter = ',')]
    pub t_grid: Vec<f64>,
}

impl Default for FixedPointArgs {
    fn default() -> Self {
        Self {
            space: None,
            map: None,
            start: None,
            u: 0.875,
            variant: VariantArg::General,
            premise: "x_Tx".into(),
            tol: 1e-10,
            max_iter: 1000,
            t_grid: Vec::new(),
        }
    }
}

#[derive(Clone, Debug, Args, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct FdeArgs {
    #[arg(long, default_value_t = 1.5)]
    pub eta: f64,
    /// `zero`, `constant:c=<poly>` or `linear:lambda=<x>,c=<poly>`.
    #[arg(long, default_value = "linear:lambda=0.2,c=tau")]
    pub g: String,
    #[arg(long, default_value_t = 2000)]
    pub n: usize,
    #[arg(long, default_value_t = 1e-10)]
    pub tol: f64,
    #[arg(long, default_value_t = 500)]
    pub max_iter: usize,
    /// Declared Lipschitz constant (defaults to |lambda|).
    #[arg(long)]
    pub lipschitz: Option<f64>,
    #[arg(long, default_value_t = TRIALS)]
    pub samples: usize,
}

impl Default for FdeArgs {
    fn default() -> Self {
        Self {
            eta: 1.5,
            g: "linear:lambda=0.2,c=tau".into(),
            n: 2000,
            tol: 1e-10,
            max_iter: 500,
            lipschitz: None,
            samples: TRIALS,
        }
    }
}

#[derive(Clone, Debug, Args, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ReproArgs {
    #[arg(long, default_value_t = TRIALS)]
    pub trials: usize,
}

impl Default for ReproArgs {
    fn default() -> Self {
        Self { trials: TRIALS }
    }
}

#[derive(Debug, Parser)]
#[command(name = "gtheta", version, about = "Generalized theta-parametric metric space lab")]
pub struct Cli {
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    /// Output file; a CSV or JSON companion goes next to it.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    #[arg(long, global = true, value_enum)]
    pub format: Option<Format>,
    /// JSON run configuration replacing the subcommand.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    #[command(subcommand)]
    pub command: Option<Command>,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Binary actions and control functions.
    Actions {
        #[command(subcommand)]
        cmd: ActionsCmd,
    },
    /// The space catalog.
    Spaces {
        #[command(subcommand)]
        cmd: SpacesCmd,
    },
    /// Axiom verification of a space.
    Verify(VerifyArgs),
    /// Balls and open sets.
    Topology {
        #[command(subcommand)]
        cmd: TopologyCmd,
    },
    /// Sequence convergence.
    Seq {
        #[command(subcommand)]
        cmd: SeqCmd,
    },
    /// Suzuki contraction and Picard iteration.
    FixedPoint {
        #[command(subcommand)]
        cmd: FixedPointCmd,
    },
    /// The fractional boundary-value problem.
    Fde {
        #[command(subcommand)]
        cmd: FdeCmd,
    },
    /// Every worked example in one report.
    Repro {
        #[command(subcommand)]
        cmd: ReproCmd,
    },
}

#[derive(Debug, Subcommand)]
pub enum ActionsCmd {
    Verify(ActionsVerifyArgs),
}

#[derive(Debug, Subcommand)]
pub enum SpacesCmd {
    List,
}

#[derive(Debug, Subcommand)]
pub enum TopologyCmd {
    Ball(BallArgs),
    OpenCheck(OpenCheckArgs),
}

#[derive(Debug, Subcommand)]
pub enum SeqCmd {
    Check(SeqCheckArgs),
}

#[derive(Debug, Subcommand)]
pub enum FixedPointCmd {
    Run(FixedPointArgs),
}

#[derive(Debug, Subcommand)]
pub enum FdeCmd {
    Solve(FdeArgs),
}

#[derive(Debug, Subcommand)]
pub enum ReproCmd {
    All(ReproArgs),
}

/// A fully resolved command.
#[derive(Clone, Debug)]
pub enum Job {
    ActionsVerify(ActionsVerifyArgs),
    SpacesList,
    Verify(VerifyArgs),
    TopologyBall(BallArgs),
    TopologyOpenCheck(OpenCheckArgs),
    SeqCheck(SeqCheckArgs),
    FixedPointRun(FixedPointArgs),
    FdeSolve(FdeArgs),
    ReproAll(ReproArgs),
}

impl Job {
    pub fn name(&self) -> &'static str {
        match self {
            Job::ActionsVerify(_) => "actions verify",
            Job::SpacesList => "spaces list",
            Job::Verify(_) => "verify",
            Job::TopologyBall(_) => "topology ball",
            Job::TopologyOpenCheck(_) => "topology open-check",
            Job::SeqCheck(_) => "seq check",
            Job::FixedPointRun(_) => "fixed-point run",
            Job::FdeSolve(_) => "fde solve",
            Job::ReproAll(_) => "repro all",
        }
    }
}

impl From<Command> for Job {
    fn from(c: Command) -> Self {
        match c {
            Command::Actions { cmd: ActionsCmd::Verify(a) } => Job::ActionsVerify(a),
            Command::Spaces { cmd: SpacesCmd::List } => Job::SpacesList,
            Command::Verify(a) => Job::Verify(a),
            Command::Topology { cmd: TopologyCmd::Ball(a) } => Job::TopologyBall(a),
            Command::Topology { cmd: TopologyCmd::OpenCheck(a) } => Job::TopologyOpenCheck(a),
            Command::Seq { cmd: SeqCmd::Check(a) } => Job::SeqCheck(a),
            Command::FixedPoint { cmd: FixedPointCmd::Run(a) } => Job::FixedPointRun(a),
            Command::Fde { cmd: FdeCmd::Solve(a) } => Job::FdeSolve(a),
            Command::Repro { cmd: ReproCmd::All(a) } => Job::ReproAll(a),
        }
    }
}

/// The JSON run configuration.
#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    /// One of the command phrases, e.g. `"topology open-check"`.
    pub command: String,
    #[serde(default)]
    pub seed: Option<u64>,
    #[serde(default)]
    pub out: Option<PathBuf>,
    #[serde(default)]
    pub format: Option<Format>,
    #[serde(default)]
    pub args: Value,
}

fn typed<T: for<'de> Deserialize<'de> + Default>(args: Value) -> Result<T> {
    if args.is_null() {
        return Ok(T::default());
    }
    serde_path_to_error::deserialize(args).map_err(|e| Error::Config(format!("config field `args.{}`: {}", e.path(), e.inner())))
}

impl RunConfig {
    pub fn parse(text: &str) -> Result<Self> {
        let de = &mut serde_json::Deserializer::from_str(text);
        serde_path_to_error::deserialize(de).map_err(|e| {
            let path = e.path().to_string();
            let path = if path == "." { "(top level)".to_string() } else { path };
            Error::Config(format!("config field `{path}`: {}", e.inner()))
        })
    }

    pub fn job(&self) -> Result<Job> {
        let a = self.args.clone();
        Ok(match self.command.as_str() {
            "actions verify" => Job::ActionsVerify(typed(a)?),
            "spaces list" => Job::SpacesList,
            "verify" => Job::Verify(typed(a)?),
            "topology ball" => Job::TopologyBall(typed(a)?),
            "topology open-check" => Job::TopologyOpenCheck(typed(a)?),
            "seq check" => Job::SeqCheck(typed(a)?),
            "fixed-point run" => Job::FixedPointRun(typed(a)?),
            "fde solve" => Job::FdeSolve(typed(a)?),
            "repro all" => Job::ReproAll(typed(a)?),
            other => return Err(Error::Config(format!("config field `command`: unknown command {other:?}"))),
        })
    }
}

/// What a command produced.
#[derive(Clone, Debug)]
pub struct Outcome {
    /// `false` means refutation or non-convergence (exit 1).
    pub success: bool,
    pub summary: String,
    pub json: Value,
    pub csv: Option<String>,
}

impl Outcome {
    fn new(success: bool, summary: String, json: Value) -> Self {
        Self { success, summary, json, csv: None }
    }
}

fn to_json<T: Serialize>(v: &T) -> Value {
    serde_json::to_value(v).expect("reports serialize")
}

fn need<T: Clone>(v: &Option<T>, field: &str) -> Result<T> {
    v.clone().ok_or_else(|| Error::Config(format!("missing required argument `{field}`")))
}

fn point(space: &GThetaSpace, text: &str, field: &str) -> Result<Point> {
    let p = Point::parse_like(text, &space.carrier.example()).map_err(|e| Error::Config(format!("`{field}`: {e}")))?;
    if !space.carrier.contains(&p) {
        return Err(Error::Config(format!("`{field}`: {p} is not in the carrier of {}", space.name)));
    }
    Ok(p)
}

fn grid_or_default(g: &[f64]) -> Result<Vec<f64>> {
    if g.is_empty() {
        return Ok(default_t_grid());
    }
    if let Some(bad) = g.iter().find(|t| !(**t > 0.0 && t.is_finite())) {
        return Err(Error::Config(format!("`t_grid` values must be positive, got {bad}")));
    }
    Ok(g.to_vec())
}

fn report_lines(out: &mut String, reports: &[AxiomReport]) {
    for r in reports {
        let _ = writeln!(out, "  {r}");
    }
}

/// Executes a job.
pub fn run(job: &Job, seed: u64) -> Result<Outcome> {
    match job {
        Job::ActionsVerify(a) => actions_verify(a, seed),
        Job::SpacesList => spaces_list(),
        Job::Verify(a) => verify(a, seed),
        Job::TopologyBall(a) => topology_ball(a),
        Job::TopologyOpenCheck(a) => open_check(a),
        Job::SeqCheck(a) => seq_check(a),
        Job::FixedPointRun(a) => fixed_point(a, seed),
        Job::FdeSolve(a) => fde_solve(a, seed),
        Job::ReproAll(a) => repro(a, seed),
    }
}

fn actions_verify(a: &ActionsVerifyArgs, seed: u64) -> Result<Outcome> {
    let actions = if a.actions.is_empty() {
        catalog_actions()
    } else {
        a.actions.iter().map(|n| action_by_name(n)).collect::<Result<_>>()?
    };
    let mut summary = String::new();
    let mut results = Vec::new();
    let mut ok = true;
    for act in &actions {
        let reps = verify_action(act, a.trials, seed);
        ok &= reps.iter().all(|r| r.passed());
        let _ = writeln!(summary, "{}:", act.name());
        report_lines(&mut summary, &reps);
        results.push(json!({"action": act.name(), "known_violations": act.known_violations(), "reports": reps}));
    }
    let mut controls = Vec::new();
    for spec in &a.controls {
        let (name, alpha) = match spec.split_once(":alpha=") {
            Some((n, x)) => (n, x.parse::<f64>().map_err(|_| Error::Config(format!("bad alpha in {spec:?}")))?),
            None => (spec.as_str(), 0.0),
        };
        let pair = control_by_name(name, alpha)?;
        let reps = verify_control(&pair, F2_DEPTH);
        ok &= reps.iter().all(|r| r.passed());
        let _ = writeln!(summary, "control {name}:");
        report_lines(&mut summary, &reps);
        controls.push(json!({"control": pair, "reports": reps}));
    }
    Ok(Outcome::new(ok, summary, json!({"actions": results, "controls": controls})))
}

fn spaces_list() -> Result<Outcome> {
    let mut summary = String::new();
    let mut list = Vec::new();
    for name in SPACE_NAMES {
        let s = make_catalog_space(name, &SpaceParams::default())?;
        let _ = writeln!(summary, "{}", s.describe());
        list.push(json!({
            "name": name,
            "instance": s.name,
            "description": s.describe(),
            "action": s.action.name(),
            "control": s.control,
            "symmetric": s.flags.symmetric,
        }));
    }
    Ok(Outcome::new(true, summary, json!({ "spaces": list })))
}

fn verify(a: &VerifyArgs, seed: u64) -> Result<Outcome> {
    let sel = need(&a.space, "space")?;
    let space = sel.build()?;
    if a.trials == 0 {
        return Err(Error::Config("`trials` must be at least 1".into()));
    }
    let mut reports = Vec::new();
    if matches!(a.axioms, AxiomSystem::Gtheta | AxiomSystem::All) {
        reports.extend(verify_gtheta(&space, a.trials, seed));
    }
    if matches!(a.axioms, AxiomSystem::Parametric | AxiomSystem::All) {
        reports.push(verify_parametric_triangle(&space, a.trials, seed));
    }
    if matches!(a.axioms, AxiomSystem::Theta | AxiomSystem::All) {
        reports.push(verify_theta_parametric(&space, a.trials, seed));
    }
    let mut summary = format!("{}\n", space.describe());
    report_lines(&mut summary, &reports);
    let ok = reports.iter().all(|r| r.passed());
    Ok(Outcome::new(ok, summary, json!({"space": space.name, "reports": reports})))
}

fn ball_of(a: &BallArgs) -> Result<(GThetaSpace, Ball)> {
    let space = need(&a.space, "space")?.build()?;
    let center = point(&space, &need(&a.center, "center")?, "center")?;
    let kind = if a.closed { BallKind::Closed } else { BallKind::Open };
    let ball = Ball::new(center, need(&a.radius, "radius")?, a.t, kind).map_err(|e| Error::Config(e.to_string()))?;
    Ok((space, ball))
}

fn topology_ball(a: &BallArgs) -> Result<Outcome> {
    let (space, ball) = ball_of(a)?;
    let members = ball_members(&space, &ball)?;
    let shown: Vec<String> = members.iter().take(20).map(Point::to_string).collect();
    let more = if members.len() > 20 { format!(", ... ({} total)", members.len()) } else { String::new() };
    let summary = format!("{ball} in {}: {{{}{more}}}\n", space.name, shown.join(", "));
    let truncated = space.carrier.is_enumerable() && !matches!(space.carrier, crate::metric::Carrier::Finite(_));
    Ok(Outcome::new(
        true,
        summary,
        json!({"space": space.name, "ball": ball, "count": members.len(), "truncated_carrier": truncated, "members": members}),
    ))
}

fn open_check(a: &OpenCheckArgs) -> Result<Outcome> {
    let space = need(&a.ball.space, "space")?.build()?;
    let (set, base) = if a.points.is_empty() {
        let (_, ball) = ball_of(&a.ball)?;
        let r = ball.radius;
        (PointSet::Listed(ball_members(&space, &ball)?), r)
    } else {
        let pts = a.points.iter().map(|p| point(&space, p, "point")).collect::<Result<Vec<_>>>()?;
        (PointSet::Listed(pts), a.ball.radius.unwrap_or(1.0))
    };
    let base = a.radius_base.unwrap_or(base);
    let check = is_open_set(&space, &set, &default_radius_grid(base), &grid_or_default(&a.t_grid)?)?;
    let mut summary = format!("open check in {}: {} (grid-relative)\n", space.name, check.verdict);
    if let Some(w) = &check.witness {
        let _ = writeln!(summary, "  center {} at t = {}", w.center, w.t);
        for e in w.escapes.iter().take(3) {
            let _ = writeln!(summary, "  radius {}: {} escapes", e.radius, e.point);
        }
    }
    Ok(Outcome::new(check.verdict != Verdict::Fail, summary, json!({"space": space.name, "check": check})))
}

fn csv_rows(header: &str, rows: impl IntoIterator<Item = String>) -> String {
    let mut out = String::from(header);
    out.push('\n');
    for r in rows {
        out.push_str(&r);
        out.push('\n');
    }
    out
}

fn seq_check(a: &SeqCheckArgs) -> Result<Outcome> {
    let space = need(&a.space, "space")?.build()?;
    let like = space.carrier.example();
    let seq = sequence_by_name(&need(&a.sequence, "sequence")?, &like, a.horizon)?;
    let limit = point(&space, &need(&a.limit, "limit")?, "limit")?;
    let grid = grid_or_default(&a.t_grid)?;
    let conv = check_convergence(&space, &seq, &limit, &grid, a.eps)?;
    let cauchy = check_cauchy(&space, &seq, &grid, a.eps)?;
    let mut summary = format!(
        "{} -> {limit} in {}: convergence {}, Cauchy {}\n",
        seq.description, space.name, conv.verdict, cauchy.verdict
    );
    let mut success = conv.verdict == Verdict::Pass;
    let mut doc = json!({"space": space.name, "sequence": seq.name, "convergence": conv, "cauchy": cauchy});
    if let Some(p) = &a.probe {
        let probe = point(&space, p, "probe")?;
        match check_sequential_continuity(&space, &seq, &limit, &probe, &grid, a.eps) {
            Ok(c) => {
                let _ = writeln!(summary, "  sequentially continuous at probe {probe}: {}", c.continuous);
                success &= c.continuous;
                doc["continuity"] = to_json(&c);
            }
            Err(e @ (Error::Indeterminate(_) | Error::Precondition(_))) => {
                let _ = writeln!(summary, "  continuity not checked: {e}");
                doc["continuity"] = json!({"error": e.to_string()});
            }
            Err(e) => return Err(e),
        }
    }
    if let Some(o) = &a.other_limit {
        let other = point(&space, o, "other_limit")?;
        let u = check_unique_limit(&space, &seq, &limit, &other, &grid, a.eps).map_err(|e| Error::Config(e.to_string()))?;
        let _ = writeln!(summary, "  unique limit: {}", u.verdict);
        success &= u.verdict == Verdict::Pass;
        doc["unique_limit"] = to_json(&u);
    }
    let stride = (a.horizon / 1000).max(1);
    let rows = trace(&space, &seq, &limit, &grid, stride).into_iter().map(|(i, t, d)| format!("{i},{t},{d}"));
    Ok(Outcome { success, summary, json: doc, csv: Some(csv_rows("index,t,distance", rows)) })
}

fn fixed_point(a: &FixedPointArgs, seed: u64) -> Result<Outcome> {
    let space = need(&a.space, "space")?.build()?;
    let map = map_by_name(&need(&a.map, "map")?)?;
    let start = point(&space, &need(&a.start, "start")?, "start")?;
    let grid = grid_or_default(&a.t_grid)?;
    let mut cfg = SuzukiConfig::new(a.u, a.variant.into()).map_err(|e| Error::Config(e.to_string()))?;
    cfg.premise_form = a.premise.parse::<PremiseForm>()?;
    cfg.t_grid = grid.clone();
    cfg.seed = seed;
    let suzuki = verify_suzuki(&space, &map, &cfg)?;
    let result = iterate_fixed_point(&space, &map, &start, a.tol, a.max_iter, &grid)?;
    let fixed = fixed_points(&space, &map).ok();
    let mut summary = format!(
        "{} on {}: contraction {} ({} checked, {} vacuous)\n",
        map.name, space.name, suzuki.verdict, suzuki.checked, suzuki.vacuous
    );
    let _ = writeln!(
        summary,
        "  from {start}: {} after {} applications (converged: {})",
        result.fixed_point, result.iterations, result.converged
    );
    if let Some(r) = result.observed_ratio {
        let _ = writeln!(summary, "  observed ratio {r}");
    }
    let rows: Vec<String> = result
        .step_distances
        .iter()
        .enumerate()
        .flat_map(|(i, ds)| grid.iter().zip(ds).map(move |(t, d)| format!("{i},{t},{d}")))
        .collect();
    let ok = result.converged && suzuki.verdict == Verdict::Pass;
    Ok(Outcome {
        success: ok,
        summary,
        json: json!({"space": space.name, "map": map.name, "suzuki": suzuki, "result": result, "fixed_points": fixed}),
        csv: Some(csv_rows("iteration,t,distance", rows)),
    })
}

fn fde_solve(a: &FdeArgs, seed: u64) -> Result<Outcome> {
    let g = Rhs::parse(&a.g)?;
    let mut problem = FdeProblem::new(a.eta, g, a.n, a.tol, a.max_iter).map_err(|e| Error::Config(e.to_string()))?;
    if let Some(l) = a.lipschitz {
        problem.lipschitz_l = l;
    }
    let gate = verify_lipschitz(&problem, a.samples.max(1), seed)?;
    match solve_fde(&problem, None) {
        Ok(sol) => {
            let summary = format!(
                "r = {:.4}; {} iterations, residual {:.3e}, f(0) = {}, |int f - f'(0)| = {:.3e} (converged: {})\n",
                sol.r, sol.iterations, sol.residual, sol.f_at_zero, sol.boundary_gap, sol.converged
            );
            let rows = sol.solution.values().iter().enumerate().map(|(i, v)| format!("{},{v}", sol.solution.node(i)));
            let csv = csv_rows("t,f", rows);
            Ok(Outcome {
                success: sol.converged && gate.verdict == Verdict::Pass,
                summary,
                json: json!({"solution": sol, "lipschitz": gate}),
                csv: Some(csv),
            })
        }
        Err(Error::GateRejected { r }) => Ok(Outcome::new(
            false,
            format!("rejected: r = {r:.4} >= 1\n"),
            json!({"rejected": true, "r": r, "lipschitz": gate}),
        )),
        Err(e) => Err(e),
    }
}

fn repro(a: &ReproArgs, seed: u64) -> Result<Outcome> {
    let report = repro_all(a.trials, seed)?;
    let mut summary = String::new();
    for e in &report.entries {
        let tag = match e.verdict {
            ReproVerdict::Pass => "PASS",
            ReproVerdict::Fail => "FAIL",
            ReproVerdict::Discrepancy => "DISC",
        };
        let _ = writeln!(summary, "{tag} {:<28} {}", e.id, e.observed);
    }
    let _ = writeln!(summary, "{} passed, {} failed, {} discrepancies", report.passed, report.failed, report.discrepancies);
    Ok(Outcome::new(report.all_passed(), summary, to_json(&report)))
}

/// Exit code for an error: 1 when the mathematics refused, 2 otherwise.
pub fn exit_code(e: &Error) -> i32 {
    match e {
        Error::GateRejected { .. } | Error::SearchExhausted(_) | Error::Indeterminate(_) | Error::Evaluation { .. } => 1,
        _ => 2,
    }
}

fn write_file(path: &Path, text: &str) -> Result<()> {
    std::fs::write(path, text).map_err(|e| Error::Config(format!("cannot write {}: {e}", path.display())))
}

/// `{"header": {...}, "result": ...}`; only the header carries a timestamp.
pub fn document(command: &str, seed: u64, result: Value) -> Value {
    let ts = SystemTime::now().duration_since(UNIX_EPOCH).map(|d| d.as_secs()).unwrap_or(0);
    json!({
        "header": {"tool": "gtheta", "version": env!("CARGO_PKG_VERSION"), "command": command, "seed": seed, "timestamp": ts},
        "result": result,
    })
}

struct Settings {
    job: Job,
    seed: u64,
    out: Option<PathBuf>,
    format: Option<Format>,
}

fn resolve(cli: Cli) -> Result<Settings> {
    let (job, cfg_seed, cfg_out, cfg_format) = match (cli.config, cli.command) {
        (Some(_), Some(_)) => return Err(Error::Config("give either --config or a subcommand".into())),
        (None, None) => return Err(Error::Config("no command given (see --help)".into())),
        (None, Some(c)) => (Job::from(c), None, None, None),
        (Some(path), None) => {
            let text = std::fs::read_to_string(&path).map_err(|e| Error::Config(format!("cannot read {}: {e}", path.display())))?;
            let cfg = RunConfig::parse(&text)?;
            (cfg.job()?, cfg.seed, cfg.out, cfg.format)
        }
    };
    Ok(Settings {
        job,
        seed: cli.seed.or(cfg_seed).unwrap_or(0),
        out: cli.out.or(cfg_out),
        format: cli.format.or(cfg_format),
    })
}

fn emit(settings: &Settings, outcome: &Outcome) -> Result<()> {
    let ext_csv = settings.out.as_ref().and_then(|p| p.extension()).is_some_and(|e| e == "csv");
    let format = settings.format.unwrap_or(if ext_csv { Format::Csv } else { Format::Json });
    if format == Format::Csv && outcome.csv.is_none() {
        return Err(Error::Config(format!("`{}` has no CSV output", settings.job.name())));
    }
    let doc = serde_json::to_string_pretty(&document(settings.job.name(), settings.seed, outcome.json.clone()))
        .expect("json output")
        + "\n";
    match &settings.out {
        Some(path) => {
            let (primary, secondary, other_ext) = match format {
                Format::Json => (doc.clone(), outcome.csv.clone(), "csv"),
                Format::Csv => (outcome.csv.clone().unwrap_or_default(), Some(doc.clone()), "json"),
            };
            write_file(path, &primary)?;
            if let Some(text) = secondary {
                let sibling = path.with_extension(other_ext);
                if sibling != *path {
                    write_file(&sibling, &text)?;
                }
            }
            print!("{}", outcome.summary);
        }
        None => {
            eprint!("{}", outcome.summary);
            match format {
                Format::Json => print!("{doc}"),
                Format::Csv => print!("{}", outcome.csv.as_deref().unwrap_or_default()),
            }
        }
    }
    Ok(())
}

/// Parses arguments, runs, writes artifacts and returns the exit code.
pub fn main_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return code;
        }
    };
    let settings = match resolve(cli) {
        Ok(s) => s,
        Err(e) => {
            eprintln!("error: {e}");
            return 2;
        }
    };
    let outcome = match run(&settings.job, settings.seed) {
        Ok(o) => o,
        Err(e) => {
            eprintln!("error: {e}");
            return exit_code(&e);
        }
    };
    if let Err(e) = emit(&settings, &outcome) {
        eprintln!("error: {e}");
        return 2;
    }
    if outcome.success {
        0
    } else {
        1
    }
}
