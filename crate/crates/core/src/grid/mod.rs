//! Discretisations of S¹ and S² with quadrature and covariant derivatives.
//!
//! S¹ is sampled at `N` equispaced angles. S² is a tensor grid of
//! Gauss–Legendre colatitudes (in `cos θ`) and equispaced longitudes, so no
//! node sits on a pole. Colatitude stencils reaching past a pole continue
//! through it with `(−θ, φ) ↦ (θ, φ + π)`, which needs an even longitude
//! count.
//!
//! Node `i` of an S² grid lives on ring `i / n_phi` at longitude `i % n_phi`.
//! An S¹ grid is stored as a single equatorial ring.
//!
//! Derivatives are spectral by default (see [`DiffMethod`]); 4th-order
//! finite differences are available for comparison.

mod field;
mod helmholtz;
mod spectral;
pub mod stencil;

use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

pub use field::{FrameMatrixField, FrameVectorField, ScalarField, Sym2};
pub use helmholtz::HelmholtzSolver;

use crate::error::{Error, Result};
use spectral::SpectralOps;
use stencil::{gauss_legendre, trig_weights};

/// How parametric derivatives are computed.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DiffMethod {
    /// Fourier in longitude and associated Legendre functions in colatitude.
    #[default]
    Spectral,
    /// Five-point trigonometrically fitted stencils (4th order).
    FiniteDifference,
}

impl fmt::Display for DiffMethod {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Self::Spectral => "spectral",
            Self::FiniteDifference => "fd",
        })
    }
}

impl FromStr for DiffMethod {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "spectral" => Ok(Self::Spectral),
            "fd" | "finite_difference" => Ok(Self::FiniteDifference),
            other => Err(Error::BadResolution(format!("unknown differentiation method `{other}`"))),
        }
    }
}

/// Smallest node count accepted per parameter.
pub const MIN_RESOLUTION: usize = 16;

/// Node counts: `N` on S¹, `n_theta × n_phi` on S².
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(into = "String", try_from = "String")]
pub enum Resolution {
    Circle(usize),
    Sphere { n_theta: usize, n_phi: usize },
}

impl Resolution {
    pub fn dim(&self) -> usize {
        match self {
            Resolution::Circle(_) => 1,
            Resolution::Sphere { .. } => 2,
        }
    }

    /// Reference resolutions: 256 on S¹, 64×128 on S².
    pub fn reference(n: usize) -> Result<Self> {
        match n {
            1 => Ok(Resolution::Circle(256)),
            2 => Ok(Resolution::Sphere { n_theta: 64, n_phi: 128 }),
            _ => Err(Error::UnsupportedDimension(n)),
        }
    }

    /// Same shape with every count multiplied by `factor`.
    pub fn scaled(&self, factor: f64) -> Self {
        let s = |k: usize| ((k as f64 * factor).round() as usize).max(1);
        match *self {
            Resolution::Circle(n) => Resolution::Circle(s(n)),
            Resolution::Sphere { n_theta, n_phi } => {
                Resolution::Sphere { n_theta: s(n_theta), n_phi: 2 * s(n_phi).div_ceil(2) }
            }
        }
    }

    /// Characteristic node count along one parameter, used for refinement orders.
    pub fn linear_size(&self) -> usize {
        match *self {
            Resolution::Circle(n) => n,
            Resolution::Sphere { n_theta, .. } => n_theta,
        }
    }
}

impl fmt::Display for Resolution {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Resolution::Circle(n) => write!(f, "{n}"),
            Resolution::Sphere { n_theta, n_phi } => write!(f, "{n_theta}x{n_phi}"),
        }
    }
}

impl FromStr for Resolution {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let bad = || Error::BadResolution(s.to_string());
        let s = s.trim();
        match s.split_once(['x', 'X']) {
            Some((a, b)) => Ok(Resolution::Sphere {
                n_theta: a.trim().parse().map_err(|_| bad())?,
                n_phi: b.trim().parse().map_err(|_| bad())?,
            }),
            None => Ok(Resolution::Circle(s.parse().map_err(|_| bad())?)),
        }
    }
}

impl From<Resolution> for String {
    fn from(r: Resolution) -> String {
        r.to_string()
    }
}

impl TryFrom<String> for Resolution {
    type Error = Error;

    fn try_from(s: String) -> Result<Self> {
        s.parse()
    }
}

#[derive(Debug, Clone)]
struct ThetaStencil {
    /// Ring index of each stencil point and whether it is reached through a pole.
    rings: [(usize, bool); 5],
    d1: [f64; 5],
    d2: [f64; 5],
}

/// Parametric derivatives of a scalar field. On S¹ only the `phi` entries are filled.
#[derive(Debug, Clone)]
pub struct ParamDerivs {
    pub t: Vec<f64>,
    pub tt: Vec<f64>,
    pub p: Vec<f64>,
    pub pp: Vec<f64>,
    pub tp: Vec<f64>,
}

/// Quadrature nodes, weights and differentiation stencils on S¹ or S².
#[derive(Debug, Clone)]
pub struct Grid {
    dim: usize,
    res: Resolution,
    n_theta: usize,
    n_phi: usize,
    theta: Vec<f64>,
    sin_theta: Vec<f64>,
    cos_theta: Vec<f64>,
    phi: Vec<f64>,
    nodes: Vec<[f64; 3]>,
    weights: Vec<f64>,
    phi_d1: [f64; 5],
    phi_d2: [f64; 5],
    theta_stencils: Vec<ThetaStencil>,
    method: DiffMethod,
    spectral: Option<Arc<SpectralOps>>,
}

impl PartialEq for Grid {
    fn eq(&self, other: &Self) -> bool {
        self.res == other.res && self.method == other.method
    }
}

/// Builds the grid for dimension `n` at the given resolution with spectral derivatives.
pub fn build_grid(n: usize, res: Resolution) -> Result<Arc<Grid>> {
    build_grid_with(n, res, DiffMethod::Spectral)
}

/// Builds the grid with an explicit differentiation method.
pub fn build_grid_with(n: usize, res: Resolution, method: DiffMethod) -> Result<Arc<Grid>> {
    if n != 1 && n != 2 {
        return Err(Error::UnsupportedDimension(n));
    }
    if res.dim() != n {
        return Err(Error::DimensionMismatch { expected: n, got: res.dim() });
    }
    let mut g = Grid::new_fd(res)?;
    g.set_method(method);
    Ok(Arc::new(g))
}

impl Grid {
    fn set_method(&mut self, method: DiffMethod) {
        self.method = method;
        self.spectral = match (method, self.dim) {
            (DiffMethod::FiniteDifference, _) => None,
            (DiffMethod::Spectral, 1) => Some(Arc::new(SpectralOps::circle(self.n_phi))),
            (DiffMethod::Spectral, _) => {
                let w: Vec<f64> = (0..self.n_theta).map(|i| self.weights[i * self.n_phi] * self.n_phi as f64 / (2.0 * PI)).collect();
                Some(Arc::new(SpectralOps::sphere(&self.cos_theta, &self.sin_theta, &w, self.n_phi)))
            }
        };
    }

    /// Grid with spectral derivatives.
    pub fn new(res: Resolution) -> Result<Self> {
        let mut g = Self::new_fd(res)?;
        g.set_method(DiffMethod::Spectral);
        Ok(g)
    }

    fn new_fd(res: Resolution) -> Result<Self> {
        match res {
            Resolution::Circle(n) => {
                check_min(n)?;
                Ok(Self::circle(n))
            }
            Resolution::Sphere { n_theta, n_phi } => {
                check_min(n_theta)?;
                check_min(n_phi)?;
                if n_phi % 2 != 0 {
                    return Err(Error::OddLongitudeCount(n_phi));
                }
                Ok(Self::sphere(n_theta, n_phi))
            }
        }
    }

    fn circle(n: usize) -> Self {
        let dphi = 2.0 * PI / n as f64;
        let phi: Vec<f64> = (0..n).map(|j| j as f64 * dphi).collect();
        let nodes = phi.iter().map(|p| [p.cos(), p.sin(), 0.0]).collect();
        let (phi_d1, phi_d2) = uniform_weights(dphi);
        Self {
            dim: 1,
            res: Resolution::Circle(n),
            n_theta: 1,
            n_phi: n,
            theta: vec![PI / 2.0],
            sin_theta: vec![1.0],
            cos_theta: vec![0.0],
            phi,
            nodes,
            weights: vec![dphi; n],
            phi_d1,
            phi_d2,
            theta_stencils: Vec::new(),
            method: DiffMethod::FiniteDifference,
            spectral: None,
        }
    }

    fn sphere(n_theta: usize, n_phi: usize) -> Self {
        let (x, w) = gauss_legendre(n_theta);
        let cos_theta = x;
        let sin_theta: Vec<f64> = cos_theta.iter().map(|c| (1.0 - c * c).sqrt()).collect();
        let theta: Vec<f64> = cos_theta.iter().zip(&sin_theta).map(|(c, s)| s.atan2(*c)).collect();
        let dphi = 2.0 * PI / n_phi as f64;
        let phi: Vec<f64> = (0..n_phi).map(|j| j as f64 * dphi).collect();
        let mut nodes = Vec::with_capacity(n_theta * n_phi);
        let mut weights = Vec::with_capacity(n_theta * n_phi);
        for i in 0..n_theta {
            for p in &phi {
                let (sp, cp) = p.sin_cos();
                nodes.push([sin_theta[i] * cp, sin_theta[i] * sp, cos_theta[i]]);
                weights.push(w[i] * dphi);
            }
        }
        let (phi_d1, phi_d2) = uniform_weights(dphi);

        let theta_stencils = (0..n_theta as isize)
            .map(|i| {
                let mut rings = [(0usize, false); 5];
                let mut offs = [0.0; 5];
                for (s, o) in (-2..=2isize).enumerate() {
                    let k = i + o;
                    let (ring, flip, t) = if k < 0 {
                        let r = (-k - 1) as usize;
                        (r, true, -theta[r])
                    } else if k >= n_theta as isize {
                        let r = (2 * n_theta as isize - k - 1) as usize;
                        (r, true, 2.0 * PI - theta[r])
                    } else {
                        (k as usize, false, theta[k as usize])
                    };
                    rings[s] = (ring, flip);
                    offs[s] = t - theta[i as usize];
                }
                let (d1, d2) = trig_weights(&offs);
                ThetaStencil { rings, d1, d2 }
            })
            .collect();

        Self {
            dim: 2,
            res: Resolution::Sphere { n_theta, n_phi },
            n_theta,
            n_phi,
            theta,
            sin_theta,
            cos_theta,
            phi,
            nodes,
            weights,
            phi_d1,
            phi_d2,
            theta_stencils,
            method: DiffMethod::FiniteDifference,
            spectral: None,
        }
    }

    pub fn method(&self) -> DiffMethod {
        self.method
    }

    /// Hypersurface dimension `n` (1 for S¹, 2 for S²).
    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Ambient dimension `n + 1`.
    pub fn ambient_dim(&self) -> usize {
        self.dim + 1
    }

    pub fn resolution(&self) -> Resolution {
        self.res
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn n_theta(&self) -> usize {
        self.n_theta
    }

    pub fn n_phi(&self) -> usize {
        self.n_phi
    }

    /// Node positions; on S¹ the third coordinate is zero.
    pub fn nodes(&self) -> &[[f64; 3]] {
        &self.nodes
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    /// Parametric coordinates `(θ, φ)` of node `i`; on S¹, θ is π/2.
    pub fn params(&self, i: usize) -> (f64, f64) {
        (self.theta[i / self.n_phi], self.phi[i % self.n_phi])
    }

    /// `|Sⁿ|`: 2π or 4π.
    pub fn total_measure(&self) -> f64 {
        if self.dim == 1 {
            2.0 * PI
        } else {
            4.0 * PI
        }
    }

    /// The local orthonormal frame at node `i` in ambient coordinates.
    ///
    /// S¹: `e_1 = ∂_φ`. S²: `e_1 = ∂_θ`, `e_2 = (1/sin θ) ∂_φ`.
    pub fn frame(&self, i: usize) -> [[f64; 3]; 2] {
        let ring = i / self.n_phi;
        let (sp, cp) = self.phi[i % self.n_phi].sin_cos();
        if self.dim == 1 {
            [[-sp, cp, 0.0], [0.0; 3]]
        } else {
            let (st, ct) = (self.sin_theta[ring], self.cos_theta[ring]);
            [[ct * cp, ct * sp, -st], [-sp, cp, 0.0]]
        }
    }

    pub fn frame_to_ambient(&self, i: usize, v: &[f64; 2]) -> [f64; 3] {
        let [e1, e2] = self.frame(i);
        [0, 1, 2].map(|c| v[0] * e1[c] + v[1] * e2[c])
    }

    /// Tangential part of an ambient vector, in frame components.
    pub fn ambient_to_frame(&self, i: usize, w: &[f64; 3]) -> [f64; 2] {
        let [e1, e2] = self.frame(i);
        [dot3(&e1, w), dot3(&e2, w)]
    }

    /// `Σ f_i w_i` with compensated summation in node order.
    pub fn integrate_values(&self, f: &[f64]) -> f64 {
        let mut acc = Neumaier::default();
        for (v, w) in f.iter().zip(&self.weights) {
            acc.add(v * w);
        }
        acc.sum()
    }

    /// Componentwise quadrature of an ambient vector field.
    pub fn integrate_vectors(&self, f: &[[f64; 3]]) -> [f64; 3] {
        let mut acc = [Neumaier::default(), Neumaier::default(), Neumaier::default()];
        for (v, w) in f.iter().zip(&self.weights) {
            for c in 0..3 {
                acc[c].add(v[c] * w);
            }
        }
        [acc[0].sum(), acc[1].sum(), acc[2].sum()]
    }

    fn apply_phi(&self, f: &[f64], w: &[f64; 5]) -> Vec<f64> {
        let np = self.n_phi;
        let mut out = vec![0.0; f.len()];
        for ring in 0..self.n_theta {
            let row = &f[ring * np..(ring + 1) * np];
            for j in 0..np {
                let c = row[j];
                let mut s = 0.0;
                for (k, wk) in w.iter().enumerate() {
                    let jj = (j + np + k - 2) % np;
                    s += wk * (row[jj] - c);
                }
                out[ring * np + j] = s;
            }
        }
        out
    }

    fn apply_theta(&self, f: &[f64], second: bool) -> Vec<f64> {
        let np = self.n_phi;
        let half = np / 2;
        let mut out = vec![0.0; f.len()];
        for (ring, st) in self.theta_stencils.iter().enumerate() {
            let w = if second { &st.d2 } else { &st.d1 };
            for j in 0..np {
                let c = f[ring * np + j];
                let mut s = 0.0;
                for (&(r, flip), wk) in st.rings.iter().zip(w.iter()) {
                    let jj = if flip { (j + half) % np } else { j };
                    s += wk * (f[r * np + jj] - c);
                }
                out[ring * np + j] = s;
            }
        }
        out
    }

    /// Parametric first and second derivatives of nodal values.
    ///
    /// Finite-difference stencils act on differences from the centre value,
    /// so constants differentiate to exactly zero with either method.
    pub fn param_derivs(&self, f: &[f64]) -> ParamDerivs {
        assert_eq!(f.len(), self.len(), "field length does not match grid");
        if let Some(sp) = &self.spectral {
            let o = sp.derivs(f);
            return ParamDerivs { t: o.t, tt: o.tt, p: o.p, pp: o.pp, tp: o.tp };
        }
        let p = self.apply_phi(f, &self.phi_d1);
        let pp = self.apply_phi(f, &self.phi_d2);
        if self.dim == 1 {
            return ParamDerivs { t: Vec::new(), tt: Vec::new(), p, pp, tp: Vec::new() };
        }
        let t = self.apply_theta(f, false);
        let tt = self.apply_theta(f, true);
        let tp = self.apply_theta(&p, false);
        ParamDerivs { t, tt, p, pp, tp }
    }

    /// Frame components of the gradient from precomputed parametric derivatives.
    pub fn grad_from(&self, d: &ParamDerivs) -> Vec<[f64; 2]> {
        if self.dim == 1 {
            return d.p.iter().map(|&v| [v, 0.0]).collect();
        }
        (0..self.len())
            .map(|i| {
                let s = self.sin_theta[i / self.n_phi];
                [d.t[i], d.p[i] / s]
            })
            .collect()
    }

    /// Covariant Hessian in the frame from precomputed parametric derivatives.
    pub fn hess_from(&self, d: &ParamDerivs) -> Vec<Sym2> {
        if self.dim == 1 {
            return d.pp.iter().map(|&v| Sym2::scalar(v)).collect();
        }
        (0..self.len())
            .map(|i| {
                let ring = i / self.n_phi;
                let s = self.sin_theta[ring];
                let cot = self.cos_theta[ring] / s;
                Sym2::new(
                    d.tt[i],
                    (d.tp[i] - cot * d.p[i]) / s,
                    d.pp[i] / (s * s) + cot * d.t[i],
                )
            })
            .collect()
    }

    /// Orthogonal projection onto the harmonics the derivative operators
    /// resolve; the identity for finite-difference grids.
    pub fn dealias(&self, f: &[f64]) -> Vec<f64> {
        match &self.spectral {
            Some(sp) => {
                let hi = sp.filter(f, |_| 0.0);
                f.iter().zip(hi).map(|(a, b)| a - b).collect()
            }
            None => f.to_vec(),
        }
    }

    pub fn grad_values(&self, f: &[f64]) -> Vec<[f64; 2]> {
        let d = self.param_derivs(f);
        self.grad_from(&d)
    }

    /// Ambient gradient vectors of nodal values.
    pub fn grad_ambient(&self, f: &[f64]) -> Vec<[f64; 3]> {
        self.grad_values(f)
            .iter()
            .enumerate()
            .map(|(i, v)| self.frame_to_ambient(i, v))
            .collect()
    }

    pub(crate) fn spectral_ops(&self) -> Option<&SpectralOps> {
        self.spectral.as_deref()
    }

    pub(crate) fn sin_theta_ring(&self, ring: usize) -> f64 {
        self.sin_theta[ring]
    }

    pub(crate) fn cot_theta_ring(&self, ring: usize) -> f64 {
        self.cos_theta[ring] / self.sin_theta[ring]
    }

    pub(crate) fn phi_weights(&self) -> (&[f64; 5], &[f64; 5]) {
        (&self.phi_d1, &self.phi_d2)
    }

    pub(crate) fn theta_stencil(&self, ring: usize) -> ([(usize, bool); 5], &[f64; 5], &[f64; 5]) {
        let st = &self.theta_stencils[ring];
        (st.rings, &st.d1, &st.d2)
    }
}

fn check_min(n: usize) -> Result<()> {
    if n < MIN_RESOLUTION {
        Err(Error::ResolutionTooLow { got: n, min: MIN_RESOLUTION })
    } else {
        Ok(())
    }
}

fn uniform_weights(dphi: f64) -> ([f64; 5], [f64; 5]) {
    let offs = [-2.0 * dphi, -dphi, 0.0, dphi, 2.0 * dphi];
    let (mut d1, mut d2) = trig_weights(&offs);
    // exact antisymmetry / symmetry of the uniform stencil
    for k in 0..2 {
        let a = 0.5 * (d1[4 - k] - d1[k]);
        d1[4 - k] = a;
        d1[k] = -a;
        let b = 0.5 * (d2[4 - k] + d2[k]);
        d2[4 - k] = b;
        d2[k] = b;
    }
    d1[2] = 0.0;
    d2[2] = -2.0 * (d2[0] + d2[1]);
    (d1, d2)
}

pub(crate) fn dot3(a: &[f64; 3], b: &[f64; 3]) -> f64 {
    a[0] * b[0] + a[1] * b[1] + a[2] * b[2]
}

/// Neumaier compensated summation.
#[derive(Debug, Default, Clone, Copy)]
pub(crate) struct Neumaier {
    sum: f64,
    comp: f64,
}

impl Neumaier {
    pub(crate) fn add(&mut self, x: f64) {
        let t = self.sum + x;
        if self.sum.abs() >= x.abs() {
            self.comp += (self.sum - t) + x;
        } else {
            self.comp += (x - t) + self.sum;
        }
        self.sum = t;
    }

    pub(crate) fn sum(&self) -> f64 {
        self.sum + self.comp
    }
}

/// `∫ f dμ` by the grid quadrature.
pub fn integrate(f: &ScalarField) -> f64 {
    f.grid().integrate_values(f.values())
}

/// `∇̄f` in the local frame.
pub fn grad(f: &ScalarField) -> FrameVectorField {
    FrameVectorField { grid: f.grid().clone(), comps: f.grid().grad_values(f.values()) }
}

/// `∇̄²f` in the local frame.
pub fn hess(f: &ScalarField) -> FrameMatrixField {
    let g = f.grid();
    let d = g.param_derivs(f.values());
    FrameMatrixField { grid: g.clone(), comps: g.hess_from(&d) }
}

/// `Δ̄f`, the trace of the covariant Hessian.
pub fn laplacian(f: &ScalarField) -> ScalarField {
    let h = hess(f);
    let n = f.grid().dim();
    let vals = h.comps.iter().map(|m| if n == 1 { m.xx } else { m.trace() }).collect();
    ScalarField::raw(f.grid().clone(), vals)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn s2(nt: usize, np: usize) -> Arc<Grid> {
        build_grid(2, Resolution::Sphere { n_theta: nt, n_phi: np }).unwrap()
    }

    #[test]
    fn circle_grid_basics() {
        let g = build_grid(1, Resolution::Circle(128)).unwrap();
        assert_eq!(g.len(), 128);
        let s: f64 = g.weights().iter().sum();
        assert!((s - 2.0 * PI).abs() < 1e-12 * 2.0 * PI);
    }

    #[test]
    fn sphere_grid_basics() {
        let g = s2(64, 128);
        assert_eq!(g.len(), 8192);
        let s: f64 = g.weights().iter().sum();
        assert!((s - 4.0 * PI).abs() < 1e-12 * 4.0 * PI);
        for x in g.nodes() {
            assert!((dot3(x, x).sqrt() - 1.0).abs() < 1e-14);
            assert!(x[2].abs() < 1.0);
        }
        let (t0, _) = g.params(0);
        assert!(t0 > 0.0);
        let (tl, _) = g.params(g.len() - 1);
        assert!(tl < PI);
    }

    #[test]
    fn rejects_bad_inputs() {
        assert_eq!(build_grid(3, Resolution::Circle(64)).unwrap_err(), Error::UnsupportedDimension(3));
        assert!(matches!(build_grid(1, Resolution::Circle(8)), Err(Error::ResolutionTooLow { .. })));
        assert!(matches!(
            build_grid(2, Resolution::Sphere { n_theta: 16, n_phi: 33 }),
            Err(Error::OddLongitudeCount(33))
        ));
    }

    #[test]
    fn resolution_parsing() {
        assert_eq!("64x128".parse::<Resolution>().unwrap(), Resolution::Sphere { n_theta: 64, n_phi: 128 });
        assert_eq!("256".parse::<Resolution>().unwrap(), Resolution::Circle(256));
        assert!("64y".parse::<Resolution>().is_err());
        assert_eq!(Resolution::Sphere { n_theta: 32, n_phi: 64 }.scaled(2.0).to_string(), "64x128");
    }

    #[test]
    fn integration_examples() {
        let g = s2(64, 128);
        let one = ScalarField::constant(&g, 1.0);
        assert!((integrate(&one) - 4.0 * PI).abs() < 1e-12);
        for c in 0..3 {
            let f = ScalarField::from_fn(&g, |x| x[c] * x[c]);
            assert!((integrate(&f) - 4.0 * PI / 3.0).abs() < 1e-12);
        }
        let c = build_grid(1, Resolution::Circle(64)).unwrap();
        let f = ScalarField::from_fn(&c, |x| x[0]);
        assert!(integrate(&f).abs() < 1e-14);
    }

    #[test]
    fn derivatives_of_constants_vanish() {
        for g in [s2(32, 64), build_grid(1, Resolution::Circle(64)).unwrap()] {
            let f = ScalarField::constant(&g, 3.7);
            let gr = grad(&f);
            let hs = hess(&f);
            for i in 0..g.len() {
                assert!(gr.comps[i][0].abs() < 1e-12 && gr.comps[i][1].abs() < 1e-12);
                assert!(hs.comps[i].xx.abs() < 1e-12 && hs.comps[i].xy.abs() < 1e-12 && hs.comps[i].yy.abs() < 1e-12);
            }
        }
    }

    #[test]
    fn linear_functions_are_exact() {
        let g = s2(32, 64);
        let v = [0.3, -0.5, 0.8];
        let f = ScalarField::from_fn(&g, |x| dot3(x, &v));
        let gr = grad(&f).to_ambient();
        let hs = hess(&f);
        for (i, x) in g.nodes().iter().enumerate() {
            let xv = dot3(x, &v);
            for c in 0..3 {
                assert!((gr[i][c] - (v[c] - xv * x[c])).abs() < 1e-12);
            }
            let a = hs.comps[i];
            assert!((a.xx + xv).abs() < 1e-11 && a.xy.abs() < 1e-11 && (a.yy + xv).abs() < 1e-11);
        }
    }

    #[test]
    fn symbolic_oracles_on_s2() {
        let g = s2(64, 128);
        // |∇x_3²|² = 4 x_3² (1 − x_3²)
        let f = ScalarField::from_fn(&g, |x| x[2] * x[2]);
        let gr = grad(&f);
        for (i, x) in g.nodes().iter().enumerate().step_by(97) {
            let want = 4.0 * x[2] * x[2] * (1.0 - x[2] * x[2]);
            let got = gr.comps[i][0].powi(2) + gr.comps[i][1].powi(2);
            assert!((got - want).abs() < 1e-11, "node {i}: {got} vs {want}");
        }
        // Hessian of x_1 x_2: D²(x1x2) restricted to the tangent plane minus the normal part
        let f = ScalarField::from_fn(&g, |x| x[0] * x[1]);
        let hs = hess(&f);
        for (i, x) in g.nodes().iter().enumerate().step_by(89) {
            let [e1, e2] = g.frame(i);
            let d2 = |a: &[f64; 3], b: &[f64; 3]| a[0] * b[1] + a[1] * b[0];
            // ∇̄²f(e_a, e_b) = D²f(e_a, e_b) − ⟨Df, x⟩ δ_ab, with ⟨Df, x⟩ = 2 x1 x2
            let radial = 2.0 * x[0] * x[1];
            let want = Sym2::new(d2(&e1, &e1) - radial, d2(&e1, &e2), d2(&e2, &e2) - radial);
            let got = hs.comps[i];
            assert!((got.xx - want.xx).abs() < 1e-10);
            assert!((got.xy - want.xy).abs() < 1e-10);
            assert!((got.yy - want.yy).abs() < 1e-10);
        }
    }

    #[test]
    fn laplacian_of_linear_functions() {
        let g = s2(32, 64);
        let f = ScalarField::from_fn(&g, |x| 0.2 * x[0] - x[2]);
        let l = laplacian(&f);
        for i in 0..g.len() {
            assert!((l.values()[i] + 2.0 * f.values()[i]).abs() < 1e-10);
        }
        let c = build_grid(1, Resolution::Circle(64)).unwrap();
        let f = ScalarField::from_fn(&c, |x| x[0] + 0.5 * x[1]);
        let l = laplacian(&f);
        for i in 0..c.len() {
            assert!((l.values()[i] + f.values()[i]).abs() < 1e-11);
        }
    }
}
