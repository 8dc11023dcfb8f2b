//! Riemann-Liouville integration by product integration: the integrand is
//! replaced by its piecewise-linear interpolant and the kernel moments are
//! integrated exactly on every cell.

use statrs::function::gamma::gamma;

use super::GridFunction;
use crate::error::{Error, Result};

fn check_eta(eta: f64) -> Result<()> {
    if !(eta > 0.0) || !eta.is_finite() {
        return Err(Error::Domain(format!("integration order must be positive, got {eta}")));
    }
    Ok(())
}

/// `I^eta f (t) = (1/Γ(eta)) ∫₀ᵗ (t-s)^(eta-1) f(s) ds` at any `t ∈ [0, 1]`.
pub fn rl_integral(f: &GridFunction, eta: f64, t: f64) -> Result<f64> {
    check_eta(eta)?;
    if !(0.0..=1.0).contains(&t) {
        return Err(Error::Domain(format!("t must lie in [0, 1], got {t}")));
    }
    let (h, v) = (f.h(), f.values());
    let mut acc = 0.0;
    for j in 0..f.n() {
        let a = f.node(j);
        if a >= t {
            break;
        }
        let b = f.node(j + 1).min(t);
        let (ua, ub) = (t - a, t - b);
        // ∫ (t-s)^(eta-1) ds and ∫ (t-s)^(eta-1) (s-a) ds over [a, b]
        let m0 = (ua.powf(eta) - ub.powf(eta)) / eta;
        let m1 = ua * m0 - (ua.powf(eta + 1.0) - ub.powf(eta + 1.0)) / (eta + 1.0);
        let slope = (v[j + 1] - v[j]) / h;
        acc += v[j] * m0 + slope * m1;
    }
    Ok(acc / gamma(eta))
}

/// `(1+x)^p - 1` without cancellation for small `x`.
fn pow1pm1(x: f64, p: f64) -> f64 {
    (p * x.ln_1p()).exp_m1()
}

/// Node weights of the product rule. `I^eta f (t_k)` equals
/// `h^eta / Γ(eta+2) * (start[k] f_0 + Σ_{0<j<k} inner[k-j] f_j + f_k)`.
#[derive(Clone, Debug)]
pub struct RlWeights {
    eta: f64,
    scale: f64,
    start: Vec<f64>,
    inner: Vec<f64>,
}

impl RlWeights {
    pub fn new(n: usize, eta: f64) -> Result<Self> {
        check_eta(eta)?;
        let p = eta + 1.0;
        let h = 1.0 / n as f64;
        let mut start = vec![0.0; n + 1];
        let mut inner = vec![0.0; n + 1];
        for m in 1..=n {
            let mf = m as f64;
            // (m-1)^p - m^p + p m^eta and (m+1)^p - 2m^p + (m-1)^p, factored by m^p
            start[m] = mf.powf(p) * (pow1pm1(-1.0 / mf, p) + p / mf);
            inner[m] = mf.powf(p) * (pow1pm1(1.0 / mf, p) + pow1pm1(-1.0 / mf, p));
        }
        Ok(Self { eta, scale: h.powf(eta) / gamma(eta + 2.0), start, inner })
    }

    pub fn eta(&self) -> f64 {
        self.eta
    }

    /// `I^eta f` at every node; node 0 is exactly zero.
    pub fn apply(&self, f: &GridFunction) -> Vec<f64> {
        let v = f.values();
        let n = f.n();
        assert_eq!(n + 1, self.start.len(), "grid size mismatch");
        let mut out = vec![0.0; n + 1];
        for k in 1..=n {
            let mut acc = self.start[k] * v[0] + v[k];
            for j in 1..k {
                acc += self.inner[k - j] * v[j];
            }
            out[k] = self.scale * acc;
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn nodes_match_pointwise_rule() {
        let f = GridFunction::from_fn(40, |s| (3.0 * s).sin() + s * s);
        let w = RlWeights::new(40, 1.5).unwrap();
        let fast = w.apply(&f);
        for (k, &v) in fast.iter().enumerate() {
            let slow = rl_integral(&f, 1.5, f.node(k)).unwrap();
            assert!((v - slow).abs() < 1e-13, "node {k}: {v} vs {slow}");
        }
        assert_eq!(fast[0], 0.0);
    }

    #[test]
    fn linear_functions_are_exact() {
        let f = GridFunction::from_fn(8, |s| 2.0 - s);
        let eta = 1.3;
        let t: f64 = 0.77;
        let exact = 2.0 * t.powf(eta) / gamma(eta + 1.0) - t.powf(eta + 1.0) / gamma(eta + 2.0);
        assert!((rl_integral(&f, eta, t).unwrap() - exact).abs() < 1e-14);
    }

    #[test]
    fn rejects_bad_order() {
        let f = GridFunction::zeros(4);
        assert!(rl_integral(&f, 0.0, 0.5).is_err());
        assert!(RlWeights::new(4, -1.0).is_err());
        assert!(rl_integral(&f, 1.5, 1.5).is_err());
    }
}
