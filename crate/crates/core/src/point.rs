//! Carrier elements.

use std::fmt;
use std::hash::{Hash, Hasher};

use serde::{Serialize, Serializer};

use crate::error::{Error, Result};
use crate::fractional::GridFunction;

/// An element of some space's carrier.
///
/// `Recip(n)` is the number `1/n` for `n >= 1`; `Recip(0)` is the accumulation
/// point `0` of the sequence space, so `Recip(1)` is `1`.
#[derive(Clone, Debug, PartialEq)]
pub enum Point {
    Int(i64),
    Real(f64),
    Pair(f64, f64),
    Recip(u64),
    Grid(GridFunction),
}

impl Point {
    pub fn pair(a: f64, b: f64) -> Self {
        Point::Pair(a, b)
    }

    /// Numeric value for scalar points.
    pub fn as_scalar(&self) -> Option<f64> {
        match self {
            Point::Int(v) => Some(*v as f64),
            Point::Real(v) => Some(*v),
            Point::Recip(0) => Some(0.0),
            Point::Recip(n) => Some(1.0 / *n as f64),
            _ => None,
        }
    }

    pub fn as_pair(&self) -> Option<(f64, f64)> {
        match self {
            Point::Pair(a, b) => Some((*a, *b)),
            _ => None,
        }
    }

    pub fn as_grid(&self) -> Option<&GridFunction> {
        match self {
            Point::Grid(g) => Some(g),
            _ => None,
        }
    }

    /// Parses the textual form used on the command line, guided by `like`
    /// (any point of the target carrier).
    pub fn parse_like(text: &str, like: &Point) -> Result<Point> {
        let text = text.trim();
        let bad = || Error::Config(format!("cannot parse point {text:?}"));
        match like {
            Point::Int(_) => text.parse().map(Point::Int).map_err(|_| bad()),
            Point::Real(_) => text.parse().map(Point::Real).map_err(|_| bad()),
            Point::Pair(..) => {
                let inner = text.trim_start_matches('(').trim_end_matches(')');
                let mut it = inner.split(',').map(|s| s.trim().parse::<f64>());
                match (it.next(), it.next(), it.next()) {
                    (Some(Ok(a)), Some(Ok(b)), None) => Ok(Point::Pair(a, b)),
                    _ => Err(bad()),
                }
            }
            Point::Recip(_) => match text {
                "0" => Ok(Point::Recip(0)),
                "1" | "1/1" => Ok(Point::Recip(1)),
                _ => {
                    let den = text.strip_prefix("1/").ok_or_else(bad)?;
                    den.trim().parse::<u64>().ok().filter(|&n| n >= 1).map(Point::Recip).ok_or_else(bad)
                }
            },
            Point::Grid(_) => Err(Error::Unsupported("grid functions have no textual form".into())),
        }
    }
}

// Hash by value so points can key sets; `+ 0.0` folds `-0.0` into `0.0` to stay
// consistent with `PartialEq`.
impl Hash for Point {
    fn hash<H: Hasher>(&self, h: &mut H) {
        let bits = |v: f64| (v + 0.0).to_bits();
        std::mem::discriminant(self).hash(h);
        match self {
            Point::Int(v) => v.hash(h),
            Point::Real(v) => bits(*v).hash(h),
            Point::Pair(a, b) => (bits(*a), bits(*b)).hash(h),
            Point::Recip(n) => n.hash(h),
            Point::Grid(g) => g.values().iter().for_each(|v| bits(*v).hash(h)),
        }
    }
}

impl Eq for Point {}

impl fmt::Display for Point {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Point::Int(v) => write!(f, "{v}"),
            Point::Real(v) => write!(f, "{v}"),
            Point::Pair(a, b) => write!(f, "({a}, {b})"),
            Point::Recip(0) => write!(f, "0"),
            Point::Recip(1) => write!(f, "1"),
            Point::Recip(n) => write!(f, "1/{n}"),
            Point::Grid(g) => write!(f, "grid(n={})", g.n()),
        }
    }
}

impl Serialize for Point {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn recip_encoding() {
        assert_eq!(Point::Recip(0).as_scalar(), Some(0.0));
        assert_eq!(Point::Recip(1).as_scalar(), Some(1.0));
        assert_eq!(Point::Recip(4).to_string(), "1/4");
        assert_eq!(Point::parse_like("1/20000", &Point::Recip(0)).unwrap(), Point::Recip(20000));
        assert_eq!(Point::parse_like("0", &Point::Recip(5)).unwrap(), Point::Recip(0));
        assert!(Point::parse_like("1/0", &Point::Recip(0)).is_err());
    }

    #[test]
    fn pair_parsing() {
        let like = Point::Pair(0.0, 0.0);
        assert_eq!(Point::parse_like("(7, 9)", &like).unwrap(), Point::Pair(7.0, 9.0));
        assert_eq!(Point::parse_like("3,3", &like).unwrap(), Point::Pair(3.0, 3.0));
        assert!(Point::parse_like("1,2,3", &like).is_err());
    }
}
