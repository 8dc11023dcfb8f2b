use thiserror::Error;

/// Errors raised across the crate.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    /// An argument lies outside the domain of the operation.
    #[error("domain error: {0}")]
    Domain(String),

    /// Unknown catalog name or invalid construction parameters.
    #[error("configuration error: {0}")]
    Config(String),

    /// The operation needs an enumerable carrier (or similar capability).
    #[error("unsupported: {0}")]
    Unsupported(String),

    /// No `omega` in `[0, target]` reaches `target`.
    #[error("action {action} cannot reach target {target} from x = {x}")]
    Unsolvable { action: String, target: f64, x: f64 },

    /// A bounded search ran out of candidates.
    #[error("search exhausted: {0}")]
    SearchExhausted(String),

    /// A stated precondition does not hold.
    #[error("precondition violated: {0}")]
    Precondition(String),

    /// The finite evidence is not enough to decide.
    #[error("indeterminate: {0}")]
    Indeterminate(String),

    /// A right-hand side produced a non-finite value.
    #[error("non-finite value {value} at node {node}")]
    Evaluation { node: usize, value: f64 },

    /// The Lipschitz gate refused the problem.
    #[error("contraction bound r = {r} is not below 1")]
    GateRejected { r: f64 },
}

pub type Result<T> = std::result::Result<T, Error>;
