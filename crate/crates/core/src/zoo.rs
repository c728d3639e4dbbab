//! Support functions of analytic and random test bodies.

use std::sync::Arc;

use nalgebra::DMatrix;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::calculus::{a_operator, min_eigenvalue};
use crate::error::{Error, Result};
use crate::grid::{dot3, Grid, Resolution, ScalarField};
use crate::harmonics::{indices, real_harmonic};
use crate::integral::recentre;

/// Smallest convexity margin accepted for random bodies.
pub const RANDOM_MARGIN: f64 = 0.1;

/// A body description, serialised as a flat JSON object tagged by `"kind"`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BodySpec {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub n: Option<usize>,
    #[serde(flatten)]
    pub kind: BodyKind,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum BodyKind {
    Ball {
        r: f64,
    },
    ShiftedBall {
        r: f64,
        v: Vec<f64>,
    },
    /// `h(x) = √(xᵀMx)`.
    Ellipsoid {
        #[serde(rename = "M")]
        m: Vec<Vec<f64>>,
    },
    /// `h = base + Σ c·Y_ℓm`.
    Harmonic {
        #[serde(default = "one")]
        base: f64,
        coeffs: Vec<HarmonicTerm>,
    },
    /// See [`make_random`].
    Random {
        seed: u64,
        eps: f64,
        #[serde(default = "default_lmax")]
        lmax: usize,
        /// Even degrees only, giving an origin-symmetric body.
        #[serde(default)]
        symmetric: bool,
        /// Translate so the centroid sits at the origin.
        #[serde(default)]
        centred: bool,
    },
    /// Raw samples on a grid of the given resolution.
    Samples {
        grid: Resolution,
        values: Vec<f64>,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct HarmonicTerm {
    pub l: usize,
    pub m: i64,
    pub c: f64,
}

fn one() -> f64 {
    1.0
}

fn default_lmax() -> usize {
    4
}

impl BodySpec {
    pub fn new(kind: BodyKind) -> Self {
        Self { n: None, kind }
    }

    pub fn from_json(s: &str) -> Result<Self> {
        serde_json::from_str(s).map_err(|e| Error::InvalidSpec(e.to_string()))
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("body specs always serialise")
    }
}

/// Samples the support function described by `spec` and validates it.
///
/// Rejects bodies with `h ≤ 0` or `A[h]` not positive definite somewhere on the grid.
pub fn make_body(spec: &BodySpec, grid: &Arc<Grid>) -> Result<ScalarField> {
    let n = grid.dim();
    if let Some(sn) = spec.n {
        if sn != n {
            return Err(Error::DimensionMismatch { expected: n, got: sn });
        }
    }
    let h = match &spec.kind {
        BodyKind::Ball { r } => {
            positive("r", *r)?;
            ScalarField::constant(grid, *r)
        }
        BodyKind::ShiftedBall { r, v } => {
            positive("r", *r)?;
            let v = ambient_vector(v, n)?;
            if dot3(&v, &v).sqrt() >= *r {
                return Err(Error::InvalidSpec("shift must be shorter than the radius".into()));
            }
            ScalarField::from_fn(grid, |x| r + dot3(x, &v))
        }
        BodyKind::Ellipsoid { m } => {
            let m = spd_matrix(m, n + 1)?;
            ScalarField::from_fn(grid, |x| {
                let mut q = 0.0;
                for i in 0..=n {
                    for j in 0..=n {
                        q += x[i] * m[(i, j)] * x[j];
                    }
                }
                q.sqrt()
            })
        }
        BodyKind::Harmonic { base, coeffs } => {
            for t in coeffs {
                let ok = if n == 1 { t.m >= 0 || t.l > 0 } else { t.m.unsigned_abs() as usize <= t.l };
                if !ok {
                    return Err(Error::InvalidSpec(format!("invalid harmonic index (l={}, m={})", t.l, t.m)));
                }
            }
            ScalarField::from_fn(grid, |x| {
                base + coeffs.iter().map(|t| t.c * real_harmonic(n, t.l, t.m, x)).sum::<f64>()
            })
        }
        BodyKind::Random { seed, eps, lmax, symmetric, centred } => {
            let h = if *symmetric {
                make_random_symmetric(*seed, grid, *eps, *lmax)
            } else {
                make_random(*seed, grid, *eps, *lmax)
            };
            if *centred {
                recentre(&h)?
            } else {
                h
            }
        }
        BodyKind::Samples { grid: res, values } => {
            if *res != grid.resolution() {
                return Err(Error::GridMismatch);
            }
            ScalarField::new(grid.clone(), values.clone())?
        }
    };
    validate(&h)?;
    Ok(h)
}

/// `1 + ε·p` with `p` a seeded Gaussian combination of real harmonics of
/// degree `1..=ℓ_max`, scaled to unit sup-norm on the grid. `ε` is halved
/// until the convexity margin reaches [`RANDOM_MARGIN`].
pub fn make_random(seed: u64, grid: &Arc<Grid>, eps: f64, lmax: usize) -> ScalarField {
    random_body(seed, grid, eps, lmax, false)
}

/// Like [`make_random`] with even degrees only, so `h(−x) = h(x)`.
pub fn make_random_symmetric(seed: u64, grid: &Arc<Grid>, eps: f64, lmax: usize) -> ScalarField {
    random_body(seed, grid, eps, lmax, true)
}

fn random_body(seed: u64, grid: &Arc<Grid>, eps: f64, lmax: usize, symmetric: bool) -> ScalarField {
    let n = grid.dim();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let terms: Vec<(usize, i64, f64)> = indices(n, 1, lmax)
        .into_iter()
        .map(|(l, m)| (l, m, StandardNormal.sample(&mut rng)))
        .filter(|&(l, _, _)| !symmetric || l % 2 == 0)
        .collect();
    let p = ScalarField::from_fn(grid, |x| terms.iter().map(|&(l, m, c)| c * real_harmonic(n, l, m, x)).sum());
    let sup = p.sup_norm();
    let p = if sup > 0.0 { p.map(|v| v / sup) } else { p };
    let mut eps = eps.max(0.0);
    loop {
        let h = p.map(|v| 1.0 + eps * v);
        if eps < 1e-12 || convexity_margin(&h) >= RANDOM_MARGIN {
            return if eps < 1e-12 { ScalarField::constant(grid, 1.0) } else { h };
        }
        eps *= 0.5;
    }
}

/// Smallest eigenvalue of `A[h]` over the grid.
pub fn convexity_margin(h: &ScalarField) -> f64 {
    let n = h.grid().dim();
    a_operator(h).comps.iter().map(|m| min_eigenvalue(n, m)).fold(f64::INFINITY, f64::min)
}

fn validate(h: &ScalarField) -> Result<()> {
    if let Some((node, &value)) = h.values().iter().enumerate().find(|(_, &v)| v.is_nan() || v <= 0.0) {
        return Err(Error::NonPositive { node, value });
    }
    let n = h.grid().dim();
    let (node, margin) = a_operator(h)
        .comps
        .iter()
        .map(|m| min_eigenvalue(n, m))
        .enumerate()
        .fold((0, f64::INFINITY), |a, b| if b.1 < a.1 { b } else { a });
    if margin.is_nan() || margin <= 0.0 {
        return Err(Error::NonConvex { node, margin });
    }
    Ok(())
}

fn positive(name: &str, v: f64) -> Result<()> {
    if v > 0.0 && v.is_finite() {
        Ok(())
    } else {
        Err(Error::InvalidSpec(format!("{name} must be positive, got {v}")))
    }
}

fn ambient_vector(v: &[f64], n: usize) -> Result<[f64; 3]> {
    if v.len() != n + 1 && !(n == 1 && v.len() == 3 && v[2] == 0.0) {
        return Err(Error::DimensionMismatch { expected: n + 1, got: v.len() });
    }
    let mut out = [0.0; 3];
    out[..v.len().min(3)].copy_from_slice(&v[..v.len().min(3)]);
    Ok(out)
}

fn spd_matrix(m: &[Vec<f64>], size: usize) -> Result<DMatrix<f64>> {
    if m.len() != size || m.iter().any(|r| r.len() != size) {
        return Err(Error::DimensionMismatch { expected: size, got: m.len() });
    }
    let mat = DMatrix::from_fn(size, size, |i, j| m[i][j]);
    if (0..size).any(|i| (0..size).any(|j| (mat[(i, j)] - mat[(j, i)]).abs() > 1e-12 * mat.amax())) {
        return Err(Error::NotPositiveDefinite);
    }
    if mat.clone().cholesky().is_none() {
        return Err(Error::NotPositiveDefinite);
    }
    Ok(mat)
}
