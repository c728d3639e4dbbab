use std::sync::Arc;

use sha2::{Digest, Sha256};

use super::Grid;
use crate::error::{Error, Result};

/// Symmetric 2×2 matrix in a local orthonormal frame.
///
/// On S¹ only `xx` is meaningful and the other entries stay zero.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct Sym2 {
    pub xx: f64,
    pub xy: f64,
    pub yy: f64,
}

impl Sym2 {
    pub const fn new(xx: f64, xy: f64, yy: f64) -> Self {
        Self { xx, xy, yy }
    }

    pub const fn scalar(a: f64) -> Self {
        Self { xx: a, xy: 0.0, yy: 0.0 }
    }

    pub fn identity(n: usize) -> Self {
        if n == 1 {
            Self::scalar(1.0)
        } else {
            Self::new(1.0, 0.0, 1.0)
        }
    }

    pub fn trace(&self) -> f64 {
        self.xx + self.yy
    }

    pub fn det(&self) -> f64 {
        self.xx * self.yy - self.xy * self.xy
    }

    pub fn scale(&self, s: f64) -> Self {
        Self::new(s * self.xx, s * self.xy, s * self.yy)
    }

    pub fn add(&self, o: &Self) -> Self {
        Self::new(self.xx + o.xx, self.xy + o.xy, self.yy + o.yy)
    }

    pub fn sub(&self, o: &Self) -> Self {
        Self::new(self.xx - o.xx, self.xy - o.xy, self.yy - o.yy)
    }

    /// Frobenius pairing `A_ij B_ij`.
    pub fn contract(&self, o: &Self) -> f64 {
        self.xx * o.xx + 2.0 * self.xy * o.xy + self.yy * o.yy
    }

    /// Matrix product; symmetric whenever the factors commute.
    pub fn mul(&self, o: &Self) -> Self {
        Self::new(
            self.xx * o.xx + self.xy * o.xy,
            0.5 * (self.xx * o.xy + self.xy * o.yy + self.xy * o.xx + self.yy * o.xy),
            self.xy * o.xy + self.yy * o.yy,
        )
    }

    /// Quadratic form `v^T A v`.
    pub fn quad(&self, v: &[f64; 2]) -> f64 {
        self.xx * v[0] * v[0] + 2.0 * self.xy * v[0] * v[1] + self.yy * v[1] * v[1]
    }

    pub fn apply(&self, v: &[f64; 2]) -> [f64; 2] {
        [self.xx * v[0] + self.xy * v[1], self.xy * v[0] + self.yy * v[1]]
    }

    /// Eigenvalues in ascending order (closed form).
    pub fn eigenvalues(&self) -> [f64; 2] {
        let m = 0.5 * (self.xx + self.yy);
        let d = 0.5 * (self.xx - self.yy);
        let r = d.hypot(self.xy);
        [m - r, m + r]
    }

    /// Unit eigenvectors matching [`Sym2::eigenvalues`].
    pub fn eigenvectors(&self) -> [[f64; 2]; 2] {
        let d = 0.5 * (self.xx - self.yy);
        // angle of the eigenvector for the larger eigenvalue
        let ang = 0.5 * self.xy.atan2(d);
        let (s, c) = ang.sin_cos();
        let big = [c, s];
        let small = [-s, c];
        [small, big]
    }
}

/// One real value per grid node.
#[derive(Debug, Clone)]
pub struct ScalarField {
    grid: Arc<Grid>,
    values: Vec<f64>,
}

impl ScalarField {
    pub fn new(grid: Arc<Grid>, values: Vec<f64>) -> Result<Self> {
        if values.len() != grid.len() {
            return Err(Error::DimensionMismatch { expected: grid.len(), got: values.len() });
        }
        if let Some(node) = values.iter().position(|v| !v.is_finite()) {
            return Err(Error::InvalidSpec(format!("non-finite value at node {node}")));
        }
        Ok(Self { grid, values })
    }

    /// Builds a field without the finiteness check; used for intermediate results.
    pub(crate) fn raw(grid: Arc<Grid>, values: Vec<f64>) -> Self {
        debug_assert_eq!(values.len(), grid.len());
        Self { grid, values }
    }

    pub fn constant(grid: &Arc<Grid>, c: f64) -> Self {
        Self { grid: grid.clone(), values: vec![c; grid.len()] }
    }

    /// Samples `f` at the node positions.
    pub fn from_fn(grid: &Arc<Grid>, f: impl Fn(&[f64; 3]) -> f64) -> Self {
        let values = grid.nodes().iter().map(f).collect();
        Self { grid: grid.clone(), values }
    }

    pub fn grid(&self) -> &Arc<Grid> {
        &self.grid
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn into_values(self) -> Vec<f64> {
        self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn map(&self, f: impl Fn(f64) -> f64) -> Self {
        Self::raw(self.grid.clone(), self.values.iter().map(|&v| f(v)).collect())
    }

    pub fn zip_with(&self, other: &Self, f: impl Fn(f64, f64) -> f64) -> Result<Self> {
        self.same_grid(other)?;
        Ok(Self::raw(
            self.grid.clone(),
            self.values.iter().zip(&other.values).map(|(&a, &b)| f(a, b)).collect(),
        ))
    }

    pub fn mul(&self, other: &Self) -> Result<Self> {
        self.zip_with(other, |a, b| a * b)
    }

    pub fn same_grid(&self, other: &Self) -> Result<()> {
        if Arc::ptr_eq(&self.grid, &other.grid) || *self.grid == *other.grid {
            Ok(())
        } else {
            Err(Error::GridMismatch)
        }
    }

    pub fn min(&self) -> f64 {
        self.values.iter().copied().fold(f64::INFINITY, f64::min)
    }

    pub fn max(&self) -> f64 {
        self.values.iter().copied().fold(f64::NEG_INFINITY, f64::max)
    }

    pub fn sup_norm(&self) -> f64 {
        self.values.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    /// Short content hash of the samples (first 16 hex digits of SHA-256).
    pub fn content_hash(&self) -> String {
        let mut hasher = Sha256::new();
        hasher.update(self.grid.resolution().to_string().as_bytes());
        for v in &self.values {
            hasher.update(v.to_le_bytes());
        }
        let digest = hasher.finalize();
        digest[..8].iter().map(|b| format!("{b:02x}")).collect()
    }
}

/// Tangent vectors in the local frame `{e_1, e_2}` (S¹ uses the first slot).
#[derive(Debug, Clone)]
pub struct FrameVectorField {
    pub grid: Arc<Grid>,
    pub comps: Vec<[f64; 2]>,
}

impl FrameVectorField {
    pub fn norm_sq(&self) -> Vec<f64> {
        self.comps.iter().map(|v| v[0] * v[0] + v[1] * v[1]).collect()
    }

    pub fn dot(&self, other: &Self) -> Vec<f64> {
        self.comps.iter().zip(&other.comps).map(|(a, b)| a[0] * b[0] + a[1] * b[1]).collect()
    }

    /// The vectors expressed in ambient coordinates.
    pub fn to_ambient(&self) -> Vec<[f64; 3]> {
        (0..self.comps.len()).map(|i| self.grid.frame_to_ambient(i, &self.comps[i])).collect()
    }
}

/// Symmetric 2-tensors in the local frame.
#[derive(Debug, Clone)]
pub struct FrameMatrixField {
    pub grid: Arc<Grid>,
    pub comps: Vec<Sym2>,
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn eigen_pairs_are_consistent() {
        let a = Sym2::new(3.0, 0.7, 1.2);
        let l = a.eigenvalues();
        let v = a.eigenvectors();
        for i in 0..2 {
            let av = a.apply(&v[i]);
            assert!((av[0] - l[i] * v[i][0]).abs() < 1e-14);
            assert!((av[1] - l[i] * v[i][1]).abs() < 1e-14);
        }
        assert!((l[0] + l[1] - a.trace()).abs() < 1e-14);
        assert!((l[0] * l[1] - a.det()).abs() < 1e-13);
    }

    #[test]
    fn product_of_commuting_matrices() {
        let a = Sym2::new(2.0, 0.5, 1.0);
        let b = a.scale(2.0).sub(&Sym2::identity(2));
        let p = a.mul(&b);
        let q = b.mul(&a);
        assert!((p.xy - q.xy).abs() < 1e-15);
        assert!((p.xx - (2.0 * 3.0 + 0.5 * 1.0)).abs() < 1e-15);
    }
}
