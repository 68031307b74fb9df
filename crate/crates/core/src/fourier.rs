//! Real trigonometric polynomials on the circle `R/Z`.

use std::f64::consts::TAU;

/// `f(x) = mean + Σ_{n≥1} cos[n-1] cos(2πnx) + sin[n-1] sin(2πnx)`.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct TrigSeries {
    pub mean: f64,
    pub cos: Vec<f64>,
    pub sin: Vec<f64>,
}

impl TrigSeries {
    pub fn new(mean: f64, cos: Vec<f64>, sin: Vec<f64>) -> Self {
        Self { mean, cos, sin }
    }

    pub fn zero() -> Self {
        Self::default()
    }

    pub fn constant(c: f64) -> Self {
        Self::new(c, Vec::new(), Vec::new())
    }

    /// `amplitude * cos(2πx)`.
    pub fn cosine(amplitude: f64) -> Self {
        Self::new(0.0, vec![amplitude], Vec::new())
    }

    /// `amplitude * sin(2πx)`.
    pub fn sine(amplitude: f64) -> Self {
        Self::new(0.0, Vec::new(), vec![amplitude])
    }

    pub fn scaled(&self, s: f64) -> Self {
        Self::new(
            s * self.mean,
            self.cos.iter().map(|c| s * c).collect(),
            self.sin.iter().map(|c| s * c).collect(),
        )
    }

    /// Highest harmonic with a non-zero coefficient.
    pub fn bandwidth(&self) -> usize {
        let top = |v: &[f64]| v.iter().rposition(|c| *c != 0.0).map_or(0, |i| i + 1);
        top(&self.cos).max(top(&self.sin))
    }

    pub fn is_zero(&self) -> bool {
        self.mean == 0.0 && self.bandwidth() == 0
    }

    /// `Σ n (|a_n| + |b_n|)`, the weight that controls the spread of `e^{i f}`.
    pub fn harmonic_weight(&self) -> f64 {
        let n = self.cos.len().max(self.sin.len());
        (0..n)
            .map(|i| {
                let a = self.cos.get(i).copied().unwrap_or(0.0).abs();
                let b = self.sin.get(i).copied().unwrap_or(0.0).abs();
                (i + 1) as f64 * (a + b)
            })
            .sum()
    }

    /// Upper bound for `sup |f'|`.
    pub fn derivative_bound(&self) -> f64 {
        TAU * self.harmonic_weight()
    }

    pub fn eval(&self, x: f64) -> f64 {
        self.eval_with_derivative(x).0
    }

    pub fn derivative(&self, x: f64) -> f64 {
        self.eval_with_derivative(x).1
    }

    /// Value and first derivative.
    pub fn eval_with_derivative(&self, x: f64) -> (f64, f64) {
        let n = self.cos.len().max(self.sin.len());
        let mut f = self.mean;
        let mut df = 0.0;
        for i in 0..n {
            let w = TAU * (i + 1) as f64;
            let (s, c) = (w * x).sin_cos();
            let a = self.cos.get(i).copied().unwrap_or(0.0);
            let b = self.sin.get(i).copied().unwrap_or(0.0);
            f += a * c + b * s;
            df += w * (b * c - a * s);
        }
        (f, df)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn cosine_values() {
        let f = TrigSeries::cosine(2.0);
        assert!((f.eval(0.0) - 2.0).abs() < 1e-15);
        assert!((f.derivative(0.25) + 2.0 * TAU).abs() < 1e-12);
        assert_eq!(f.bandwidth(), 1);
        assert!((f.derivative_bound() - 2.0 * TAU).abs() < 1e-15);
    }

    #[test]
    fn derivative_matches_difference_quotient() {
        let f = TrigSeries::new(0.3, vec![0.5, -0.2], vec![0.0, 0.7, 0.1]);
        let h = 1e-6;
        for &x in &[0.0, 0.13, 0.5, 0.91] {
            let fd = (f.eval(x + h) - f.eval(x - h)) / (2.0 * h);
            assert!((fd - f.derivative(x)).abs() < 1e-6);
        }
    }
}
