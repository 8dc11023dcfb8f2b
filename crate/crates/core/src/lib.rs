//! Verification and fixed-point laboratory for generalized θ-parametric
//! metric spaces.
//!
//! A space here is a carrier, a parametric distance `P(x, y, t)`, a B-action
//! `θ` and a control pair `(f, α)`. The relaxed triangle axiom reads
//!
//! ```text
//! f(P(x, ω, s + p)) <= f(θ(P(x, μ, s), P(μ, ω, p))) + α
//! ```
//!
//! and is checked by seeded sampling with replayable witnesses. On top of the
//! axiom checkers sit ball/open-set predicates, sequence checks, a Suzuki-type
//! contraction checker with Picard iteration, and a product-integration solver
//! for a Caputo boundary-value problem.

pub mod actions;
pub mod cli;
pub mod error;
pub mod fractional;
pub mod metric;
pub mod num;
pub mod point;
pub mod repro;
pub mod report;
pub mod rng;
pub mod sequences;
pub mod suzuki;
pub mod topology;
pub mod verifier;

pub use error::{Error, Result};
pub use point::Point;
pub use report::{Axiom, AxiomReport, Relation, Verdict, Witness};
