use serde::{Deserialize, Serialize};

/// Environment variable holding a multiplicative factor for the grid tolerances.
pub const TOL_ENV: &str = "ISOFLOW_TOL_OVERRIDE";

/// Positive factor read from `ISOFLOW_TOL_OVERRIDE`, else 1.
pub fn env_factor() -> f64 {
    match std::env::var(TOL_ENV).ok().and_then(|s| s.trim().parse::<f64>().ok()) {
        Some(f) if f > 0.0 && f.is_finite() => f,
        _ => 1.0,
    }
}

/// Pass/fail thresholds shared by every check.
///
/// `grid` bounds discretisation error at the reference resolutions
/// (S¹: 256 nodes, S²: 64×128) for bodies with convexity margin at least 0.1.
/// The ellipsoid refinement study in the acceptance tests measures the actual
/// error level against it.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Tolerances {
    /// Allowed negative slack / identity residual at reference resolution.
    pub grid: f64,
    /// Relative residual for identities that hold exactly in floating point.
    pub exact: f64,
    /// Relative slack allowed for equality witnesses of the spectral estimate.
    pub witness: f64,
    /// Residuals below this count as roundoff in refinement studies.
    pub roundoff_floor: f64,
    /// Residual below which a body is taken to solve a soliton equation.
    pub precondition: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Self { grid: 1e-6, exact: 1e-12, witness: 1e-8, roundoff_floor: 1e-11, precondition: 1e-6 }
    }
}

impl Tolerances {
    /// Defaults, with `grid`, `witness` and `precondition` scaled by
    /// `ISOFLOW_TOL_OVERRIDE` when it holds a positive number.
    pub fn from_env() -> Self {
        Self::default().with_env()
    }

    /// Applies the `ISOFLOW_TOL_OVERRIDE` factor, if set, to these tolerances.
    pub fn with_env(self) -> Self {
        self.scaled(env_factor())
    }

    pub fn scaled(self, factor: f64) -> Self {
        Self {
            grid: self.grid * factor,
            witness: self.witness * factor,
            precondition: self.precondition * factor,
            ..self
        }
    }

    /// Replaces the grid tolerance.
    pub fn with_grid(self, grid: f64) -> Self {
        Self { grid, ..self }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn scaling_leaves_exact_alone() {
        let t = Tolerances::default().scaled(10.0);
        assert!((t.grid - 1e-5).abs() < 1e-18);
        assert_eq!(t.exact, 1e-12);
    }
}
