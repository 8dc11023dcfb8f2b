use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize, Serializer};

use crate::error::{Error, Result};

type UnOp = Arc<dyn Fn(f64) -> f64 + Send + Sync>;

/// Default `K_max` for the empirical F2 check.
pub const F2_DEPTH: u32 = 64;

/// A control function `f` on `(0, inf)` paired with the slack `alpha`.
///
/// `f` is also evaluated at `0`, where the catalog functions return their
/// limit `-inf`; that is what lets a vanishing right-hand side register as a
/// violation.
#[derive(Clone)]
pub struct ControlPair {
    name: String,
    f: UnOp,
    alpha: f64,
}

impl ControlPair {
    pub fn new(name: impl Into<String>, f: impl Fn(f64) -> f64 + Send + Sync + 'static, alpha: f64) -> Result<Self> {
        if !(alpha >= 0.0 && alpha.is_finite()) {
            return Err(Error::Config(format!("alpha must be finite and non-negative, got {alpha}")));
        }
        Ok(Self { name: name.into(), f: Arc::new(f), alpha })
    }

    /// Replaces `alpha` without the sign check. Only meant for building
    /// deliberately broken spaces in tests and demos.
    pub fn with_raw_alpha(mut self, alpha: f64) -> Self {
        self.alpha = alpha;
        self
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    #[inline]
    pub fn f(&self, t: f64) -> f64 {
        (self.f)(t)
    }
}

impl fmt::Debug for ControlPair {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("ControlPair").field("name", &self.name).field("alpha", &self.alpha).finish_non_exhaustive()
    }
}

impl Serialize for ControlPair {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        ControlSpec { name: self.name.clone(), alpha: self.alpha }.serialize(s)
    }
}

/// Config form of a control pair: `{"name": "ln", "alpha": 0.0}`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ControlSpec {
    pub name: String,
    #[serde(default)]
    pub alpha: f64,
}

impl ControlSpec {
    pub fn build(&self) -> Result<ControlPair> {
        control_by_name(&self.name, self.alpha)
    }
}

/// Catalog control functions: `ln`, `neg_recip` (`-1/t`) and `identity` (`t`,
/// which is not in the family since it stays bounded near 0).
pub fn control_by_name(name: &str, alpha: f64) -> Result<ControlPair> {
    match name {
        "ln" => ControlPair::new("ln", f64::ln, alpha),
        "neg_recip" => ControlPair::new("neg_recip", |t| -1.0 / t, alpha),
        "identity" => ControlPair::new("identity", |t| t, alpha),
        other => Err(Error::Config(format!("unknown control function {other:?}"))),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn limits_at_zero() {
        assert_eq!(control_by_name("ln", 0.0).unwrap().f(0.0), f64::NEG_INFINITY);
        assert_eq!(control_by_name("neg_recip", 0.0).unwrap().f(0.0), f64::NEG_INFINITY);
    }

    #[test]
    fn rejects_negative_alpha() {
        assert!(control_by_name("ln", -1.0).is_err());
        assert!(control_by_name("cube", 0.0).is_err());
        let forced = control_by_name("ln", 0.0).unwrap().with_raw_alpha(-1.0);
        assert_eq!(forced.alpha(), -1.0);
    }
}
