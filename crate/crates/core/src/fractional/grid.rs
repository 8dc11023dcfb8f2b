use serde::Serialize;

/// Values of a function at the uniform nodes `t_i = i / n` of `[0, 1]`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct GridFunction {
    values: Vec<f64>,
}

impl GridFunction {
    /// Wraps node values; needs at least two nodes.
    pub fn new(values: Vec<f64>) -> Self {
        assert!(values.len() >= 2, "a grid function needs at least two nodes");
        Self { values }
    }

    pub fn zeros(n: usize) -> Self {
        Self::new(vec![0.0; n + 1])
    }

    /// Samples `f` at the nodes of an `n`-cell grid.
    pub fn from_fn(n: usize, f: impl Fn(f64) -> f64) -> Self {
        Self::new((0..=n).map(|i| f(i as f64 / n as f64)).collect())
    }

    /// Number of cells.
    pub fn n(&self) -> usize {
        self.values.len() - 1
    }

    pub fn h(&self) -> f64 {
        1.0 / self.n() as f64
    }

    pub fn node(&self, i: usize) -> f64 {
        i as f64 / self.n() as f64
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn is_finite(&self) -> bool {
        self.values.iter().all(|v| v.is_finite())
    }

    /// `max_i |self_i - other_i|`.
    pub fn sup_distance(&self, other: &GridFunction) -> f64 {
        assert_eq!(self.values.len(), other.values.len(), "grid size mismatch");
        self.values
            .iter()
            .zip(&other.values)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max)
    }

    /// Composite trapezoid rule for `∫₀¹`.
    pub fn trapezoid(&self) -> f64 {
        let v = &self.values;
        let inner: f64 = v[1..v.len() - 1].iter().sum();
        self.h() * (0.5 * (v[0] + v[v.len() - 1]) + inner)
    }

    /// One-sided three-point derivative at `t = 0`: `(-3f0 + 4f1 - f2) / 2h`.
    pub fn derivative_at_zero(&self) -> f64 {
        let v = &self.values;
        let f2 = if v.len() > 2 { v[2] } else { 2.0 * v[1] - v[0] };
        (-3.0 * v[0] + 4.0 * v[1] - f2) / (2.0 * self.h())
    }

    /// Piecewise-linear interpolant at `t ∈ [0, 1]`.
    pub fn interpolate(&self, t: f64) -> f64 {
        let n = self.n();
        let x = (t * n as f64).clamp(0.0, n as f64);
        let j = (x.floor() as usize).min(n - 1);
        let frac = x - j as f64;
        self.values[j] * (1.0 - frac) + self.values[j + 1] * frac
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn trapezoid_is_exact_for_linear() {
        let g = GridFunction::from_fn(10, |t| 3.0 * t + 1.0);
        assert!((g.trapezoid() - 2.5).abs() < 1e-14);
    }

    #[test]
    fn derivative_is_exact_for_quadratic() {
        let g = GridFunction::from_fn(8, |t| t * t + 2.0 * t);
        assert!((g.derivative_at_zero() - 2.0).abs() < 1e-12);
    }

    #[test]
    fn interpolation_hits_nodes() {
        let g = GridFunction::from_fn(4, |t| t * t);
        assert_eq!(g.interpolate(0.5), 0.25);
        assert!((g.interpolate(0.125) - 0.03125).abs() < 1e-15);
    }
}
