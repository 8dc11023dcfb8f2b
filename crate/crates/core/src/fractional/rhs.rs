//! Right-hand sides `g(tau, f) = lambda * f + p(tau)` with polynomial forcing.

use std::fmt;

use crate::error::{Error, Result};

#[derive(Clone, Debug, PartialEq)]
pub struct Rhs {
    pub lambda: f64,
    /// Forcing coefficients, lowest power first.
    pub forcing: Vec<f64>,
}

impl Rhs {
    pub fn zero() -> Self {
        Self { lambda: 0.0, forcing: Vec::new() }
    }

    pub fn linear(lambda: f64, forcing: Vec<f64>) -> Self {
        Self { lambda, forcing }
    }

    pub fn eval(&self, tau: f64, f: f64) -> f64 {
        let p = self.forcing.iter().rev().fold(0.0, |acc, c| acc * tau + c);
        self.lambda * f + p
    }

    /// Exact Lipschitz constant in `f`.
    pub fn lipschitz(&self) -> f64 {
        self.lambda.abs()
    }

    /// Parses `zero`, `constant:c=<poly>` or `linear:lambda=<x>,c=<poly>`,
    /// where `<poly>` is a sum like `1 + 0.5*tau - tau^2`.
    pub fn parse(text: &str) -> Result<Self> {
        let (kind, args) = text.split_once(':').unwrap_or((text, ""));
        let mut lambda = None;
        let mut forcing = None;
        for kv in args.split(',').map(str::trim).filter(|s| !s.is_empty()) {
            let (k, v) = kv.split_once('=').ok_or_else(|| Error::Config(format!("expected key=value in g, got {kv:?}")))?;
            match k.trim() {
                "lambda" => {
                    let x: f64 = v.trim().parse().map_err(|_| Error::Config(format!("bad lambda {v:?}")))?;
                    lambda = Some(x);
                }
                "c" => forcing = Some(parse_poly(v)?),
                other => return Err(Error::Config(format!("unknown g parameter {other:?}"))),
            }
        }
        match kind.trim() {
            "zero" if lambda.is_none() && forcing.is_none() => Ok(Self::zero()),
            "constant" if lambda.is_none() => Ok(Self::linear(0.0, forcing.unwrap_or_else(|| vec![1.0]))),
            "linear" => Ok(Self::linear(lambda.unwrap_or(0.0), forcing.unwrap_or_default())),
            "zero" | "constant" => Err(Error::Config(format!("g {kind:?} does not take these parameters"))),
            other => Err(Error::Config(format!("unknown g {other:?} (zero, constant, linear)"))),
        }
    }
}

fn parse_poly(text: &str) -> Result<Vec<f64>> {
    let bad = || Error::Config(format!("bad polynomial {text:?}"));
    let mut coeffs: Vec<f64> = Vec::new();
    let normalized = text.replace(' ', "").replace('-', "+-");
    for term in normalized.split('+').filter(|s| !s.is_empty()) {
        let (sign, body) = match term.strip_prefix('-') {
            Some(rest) => (-1.0, rest),
            None => (1.0, term),
        };
        let (coef, power) = match body.split_once("tau") {
            None => (body.parse::<f64>().map_err(|_| bad())?, 0usize),
            Some((c, p)) => {
                let c = match c.strip_suffix('*').unwrap_or(c) {
                    "" => 1.0,
                    s => s.parse::<f64>().map_err(|_| bad())?,
                };
                let p = match p {
                    "" => 1,
                    s => s.strip_prefix('^').and_then(|e| e.parse().ok()).ok_or_else(bad)?,
                };
                (c, p)
            }
        };
        if coeffs.len() <= power {
            coeffs.resize(power + 1, 0.0);
        }
        coeffs[power] += sign * coef;
    }
    if coeffs.is_empty() {
        return Err(bad());
    }
    Ok(coeffs)
}

impl fmt::Display for Rhs {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let terms: Vec<String> = self
            .forcing
            .iter()
            .enumerate()
            .filter(|(_, c)| **c != 0.0)
            .map(|(k, c)| match k {
                0 => format!("{c}"),
                1 => format!("{c}*tau"),
                _ => format!("{c}*tau^{k}"),
            })
            .collect();
        let forcing = if terms.is_empty() { "0".to_string() } else { terms.join(" + ") };
        write!(f, "{}*f + {forcing}", self.lambda)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_catalog_forms() {
        assert_eq!(Rhs::parse("linear:lambda=0.2,c=tau").unwrap(), Rhs::linear(0.2, vec![0.0, 1.0]));
        assert_eq!(Rhs::parse("zero").unwrap(), Rhs::zero());
        assert_eq!(Rhs::parse("constant:c=2").unwrap(), Rhs::linear(0.0, vec![2.0]));
        assert_eq!(Rhs::parse("linear:lambda=-1,c=1 - 3*tau^2").unwrap(), Rhs::linear(-1.0, vec![1.0, 0.0, -3.0]));
        assert!(Rhs::parse("cubic").is_err());
        assert!(Rhs::parse("linear:mu=1").is_err());
        assert!(Rhs::parse("linear:c=tau^x").is_err());
    }

    #[test]
    fn evaluates() {
        let g = Rhs::parse("linear:lambda=0.5,c=1+2*tau^2").unwrap();
        assert_eq!(g.eval(2.0, 4.0), 2.0 + 1.0 + 8.0);
        assert_eq!(g.lipschitz(), 0.5);
    }
}
