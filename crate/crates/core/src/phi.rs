//! Nonlinearities `φ(x, y)` evaluated at `x = h`, `y = |Dh|`.

use serde::{Deserialize, Serialize};

/// A `C¹` function of `(h, |Dh|)` with its partial derivatives.
pub trait Nonlinearity: Send + Sync {
    fn value(&self, x: f64, y: f64) -> f64;
    fn d1(&self, x: f64, y: f64) -> f64;
    fn d2(&self, x: f64, y: f64) -> f64;
}

/// Right-hand sides `φ` of `hσ_k = φ(h, |Dh|)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "phi", rename_all = "snake_case")]
pub enum PhiPreset {
    /// `c·x^a·y^b`.
    Power { a: f64, b: f64, c: f64 },
    /// `c·x·e^{y²/2}`.
    Gaussian { c: f64 },
}

impl Nonlinearity for PhiPreset {
    fn value(&self, x: f64, y: f64) -> f64 {
        match *self {
            Self::Power { a, b, c } => c * x.powf(a) * y.powf(b),
            Self::Gaussian { c } => c * x * (0.5 * y * y).exp(),
        }
    }

    fn d1(&self, x: f64, y: f64) -> f64 {
        match *self {
            Self::Power { a, b, c } => c * a * x.powf(a - 1.0) * y.powf(b),
            Self::Gaussian { c } => c * (0.5 * y * y).exp(),
        }
    }

    fn d2(&self, x: f64, y: f64) -> f64 {
        match *self {
            Self::Power { a, b, c } => c * b * x.powf(a) * y.powf(b - 1.0),
            Self::Gaussian { c } => c * x * y * (0.5 * y * y).exp(),
        }
    }
}

/// `ψ(x, y) = x^{n+1}·φ(x, y)`, so that `hσ_n = φ` reads `ψ(h, |Dh|)·K = h^{n+2}`.
#[derive(Debug, Clone, Copy)]
pub struct Lifted<P> {
    pub inner: P,
    pub n: usize,
}

impl<P: Nonlinearity> Nonlinearity for Lifted<P> {
    fn value(&self, x: f64, y: f64) -> f64 {
        x.powi(self.n as i32 + 1) * self.inner.value(x, y)
    }

    fn d1(&self, x: f64, y: f64) -> f64 {
        let m = self.n as i32 + 1;
        m as f64 * x.powi(m - 1) * self.inner.value(x, y) + x.powi(m) * self.inner.d1(x, y)
    }

    fn d2(&self, x: f64, y: f64) -> f64 {
        x.powi(self.n as i32 + 1) * self.inner.d2(x, y)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn check<P: Nonlinearity>(p: &P, x: f64, y: f64) {
        let e = 1e-6;
        let n1 = (p.value(x + e, y) - p.value(x - e, y)) / (2.0 * e);
        let n2 = (p.value(x, y + e) - p.value(x, y - e)) / (2.0 * e);
        assert!((n1 - p.d1(x, y)).abs() < 1e-7 * (1.0 + n1.abs()));
        assert!((n2 - p.d2(x, y)).abs() < 1e-7 * (1.0 + n2.abs()));
    }

    #[test]
    fn derivatives_match_differences() {
        for p in [PhiPreset::Power { a: 1.5, b: 0.5, c: 2.0 }, PhiPreset::Gaussian { c: 0.5 }] {
            check(&p, 0.8, 1.1);
            check(&Lifted { inner: p, n: 2 }, 0.8, 1.1);
        }
    }
}
