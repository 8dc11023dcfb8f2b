//! Verdicts, witnesses and per-axiom reports shared by every checker.

use std::fmt;

use serde::Serialize;

use crate::num::{ser_f64, ser_opt_f64, ser_vec_f64, violates};
use crate::point::Point;

/// Axiom labels across the action, control and space checkers.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
pub enum Axiom {
    B1,
    B2,
    B3,
    B4,
    #[serde(rename = "continuity")]
    Continuity,
    F1,
    F2,
    #[serde(rename = "Ptheta1")]
    PTheta1,
    #[serde(rename = "Ptheta2")]
    PTheta2,
    #[serde(rename = "PP3")]
    ParametricTriangle,
    #[serde(rename = "dtheta3")]
    ThetaTriangle,
    #[serde(rename = "symmetry")]
    Symmetry,
}

impl Axiom {
    pub fn label(self) -> &'static str {
        match self {
            Axiom::B1 => "B1",
            Axiom::B2 => "B2",
            Axiom::B3 => "B3",
            Axiom::B4 => "B4",
            Axiom::Continuity => "continuity",
            Axiom::F1 => "F1",
            Axiom::F2 => "F2",
            Axiom::PTheta1 => "Ptheta1",
            Axiom::PTheta2 => "Ptheta2",
            Axiom::ParametricTriangle => "PP3",
            Axiom::ThetaTriangle => "dtheta3",
            Axiom::Symmetry => "symmetry",
        }
    }
}

impl fmt::Display for Axiom {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Verdict {
    Pass,
    Fail,
    Indeterminate,
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Verdict::Pass => "pass",
            Verdict::Fail => "fail",
            Verdict::Indeterminate => "indeterminate",
        })
    }
}

/// The relation between `lhs` and `rhs` that makes a witness a violation.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Relation {
    /// `lhs > rhs` beyond the relative slack.
    Exceeds,
    /// `lhs >= rhs` where strict `<` was required.
    NotBelow,
    /// `lhs` and `rhs` differ beyond the relative slack.
    Differs,
    /// `lhs != 0` where zero was required (`rhs` is 0).
    Nonzero,
    /// `lhs == 0` where positivity was required.
    Zero,
}

impl Relation {
    pub fn violated(self, lhs: f64, rhs: f64) -> bool {
        match self {
            Relation::Exceeds => violates(lhs, rhs),
            Relation::NotBelow => lhs >= rhs,
            Relation::Differs => violates(lhs, rhs) || violates(rhs, lhs),
            Relation::Nonzero => lhs != rhs,
            Relation::Zero => lhs == 0.0,
        }
    }
}

/// A concrete counterexample. `args` carries scalar arguments (action inputs,
/// radii, `t` values) in an order fixed by the axiom that produced it.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Witness {
    pub points: Vec<Point>,
    #[serde(serialize_with = "ser_opt_f64")]
    pub s: Option<f64>,
    #[serde(serialize_with = "ser_opt_f64")]
    pub p: Option<f64>,
    #[serde(serialize_with = "ser_vec_f64")]
    pub args: Vec<f64>,
    #[serde(serialize_with = "ser_f64")]
    pub lhs: f64,
    #[serde(serialize_with = "ser_f64")]
    pub rhs: f64,
    pub relation: Relation,
}

impl Witness {
    pub fn scalar(args: Vec<f64>, lhs: f64, rhs: f64, relation: Relation) -> Self {
        Self { points: Vec::new(), s: None, p: None, args, lhs, rhs, relation }
    }

    /// Whether the recorded values themselves constitute a violation.
    pub fn is_violation(&self) -> bool {
        self.relation.violated(self.lhs, self.rhs)
    }
}

impl fmt::Display for Witness {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let pts: Vec<String> = self.points.iter().map(|p| p.to_string()).collect();
        if !pts.is_empty() {
            write!(f, "points [{}] ", pts.join(", "))?;
        }
        if let Some(s) = self.s {
            write!(f, "s={s} ")?;
        }
        if let Some(p) = self.p {
            write!(f, "p={p} ")?;
        }
        if !self.args.is_empty() {
            write!(f, "args {:?} ", self.args)?;
        }
        let op = match self.relation {
            Relation::Exceeds => ">",
            Relation::NotBelow => ">=",
            Relation::Differs => "!=",
            Relation::Nonzero => "!=",
            Relation::Zero => "==",
        };
        write!(f, "lhs {} {op} rhs {}", self.lhs, self.rhs)
    }
}

/// Outcome of checking one axiom.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct AxiomReport {
    pub axiom: Axiom,
    pub verdict: Verdict,
    pub witness: Option<Witness>,
    pub trials: usize,
    pub seed: u64,
    /// Instances on which the axiom was actually evaluated.
    pub checked: usize,
    /// Instances skipped because a premise did not hold.
    pub vacuous: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub t_grid: Option<Vec<f64>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub note: Option<String>,
}

impl AxiomReport {
    pub fn new(axiom: Axiom, trials: usize, seed: u64) -> Self {
        Self {
            axiom,
            verdict: Verdict::Pass,
            witness: None,
            trials,
            seed,
            checked: 0,
            vacuous: 0,
            t_grid: None,
            note: None,
        }
    }

    pub fn passed(&self) -> bool {
        self.verdict == Verdict::Pass
    }

    pub fn failed(&self) -> bool {
        self.verdict == Verdict::Fail
    }

    /// Records the first failure; later ones are ignored.
    pub fn fail(&mut self, witness: Witness) {
        if self.witness.is_none() {
            self.verdict = Verdict::Fail;
            self.witness = Some(witness);
        }
    }

    pub fn with_note(mut self, note: impl Into<String>) -> Self {
        self.note = Some(note.into());
        self
    }
}

impl fmt::Display for AxiomReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:<10} {:<13} checked={} vacuous={}", self.axiom, self.verdict, self.checked, self.vacuous)?;
        if let Some(w) = &self.witness {
            write!(f, "  witness: {w}")?;
        }
        if let Some(n) = &self.note {
            write!(f, "  ({n})")?;
        }
        Ok(())
    }
}
