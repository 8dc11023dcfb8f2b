//! Small numeric helpers shared by the verifiers.

use serde::Serializer;

/// Strict-violation test with relative slack: `lhs > rhs + 1e-9 * max(1, |rhs|)`.
///
/// Infinite right-hand sides are compared directly, so `-inf` on the right is
/// violated by any larger left-hand side.
pub fn violates(lhs: f64, rhs: f64) -> bool {
    if lhs.is_nan() || rhs.is_nan() {
        return false;
    }
    if rhs.is_infinite() || lhs.is_infinite() {
        return lhs > rhs;
    }
    lhs > rhs + 1e-9 * rhs.abs().max(1.0)
}

/// Plateau test used for tail estimates: `max - min < 1e-9 * (1 + |mean|)`.
pub fn settled(window: &[f64]) -> Option<f64> {
    if window.is_empty() {
        return None;
    }
    let mean = window.iter().sum::<f64>() / window.len() as f64;
    let (lo, hi) = window
        .iter()
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &v| (lo.min(v), hi.max(v)));
    (hi - lo < 1e-9 * (1.0 + mean.abs())).then_some(mean)
}

/// The default "for all t" grid: `2^j` for `-10 <= j <= 10`.
pub fn default_t_grid() -> Vec<f64> {
    power_grid(-10, 10)
}

/// `2^j` for `lo <= j <= hi`.
pub fn power_grid(lo: i32, hi: i32) -> Vec<f64> {
    (lo..=hi).map(|j| 2f64.powi(j)).collect()
}

pub(crate) fn ser_f64<S: Serializer>(v: &f64, s: S) -> Result<S::Ok, S::Error> {
    if v.is_finite() {
        s.serialize_f64(*v)
    } else if v.is_nan() {
        s.serialize_str("nan")
    } else if *v > 0.0 {
        s.serialize_str("inf")
    } else {
        s.serialize_str("-inf")
    }
}

pub(crate) fn ser_opt_f64<S: Serializer>(v: &Option<f64>, s: S) -> Result<S::Ok, S::Error> {
    match v {
        Some(v) => ser_f64(v, s),
        None => s.serialize_none(),
    }
}

pub(crate) fn ser_vec_f64<S: Serializer>(v: &[f64], s: S) -> Result<S::Ok, S::Error> {
    use serde::ser::SerializeSeq;
    let mut seq = s.serialize_seq(Some(v.len()))?;
    for x in v {
        seq.serialize_element(&Num(*x))?;
    }
    seq.end()
}

/// `f64` wrapper that serializes non-finite values as strings.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Num(pub f64);

impl serde::Serialize for Num {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        ser_f64(&self.0, s)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn slack_suppresses_rounding_noise() {
        assert!(!violates(1.0 + 1e-12, 1.0));
        assert!(violates(1.0 + 1e-6, 1.0));
        assert!(!violates(1e12 + 1.0, 1e12));
        assert!(violates(0.0, f64::NEG_INFINITY));
        assert!(!violates(f64::NEG_INFINITY, f64::NEG_INFINITY));
    }

    #[test]
    fn plateau_detection() {
        assert_eq!(settled(&[4.0, 4.0, 4.0]), Some(4.0));
        assert_eq!(settled(&[1.0, 0.5]), None);
        assert_eq!(settled(&[]), None);
    }
}
