//! Pointwise curvature package of a support function.
//!
//! For a support function `h` on Sⁿ the matrix `τ = A[h] = ∇̄²h + ḡh` has the
//! principal radii of curvature as eigenvalues. Everything else here
//! (`σ_k`, `σ_k^{ij}`, `K = 1/σ_n`, the boundary point `X = hx + ∇̄h`) is
//! algebra on `τ`, `h` and `∇̄h` at each node.

use std::collections::BTreeMap;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::grid::{dot3, FrameMatrixField, FrameVectorField, Grid, ScalarField, Sym2};

/// Eigenvalue gap below which a node counts as umbilic.
pub const UMBILIC_GAP: f64 = 1e-10;

/// `A[f] = ∇̄²f + ḡf` at every node.
pub fn a_operator(f: &ScalarField) -> FrameMatrixField {
    let g = f.grid();
    let d = g.param_derivs(f.values());
    let id = Sym2::identity(g.dim());
    let comps = g
        .hess_from(&d)
        .into_iter()
        .zip(f.values())
        .map(|(hs, &v)| hs.add(&id.scale(v)))
        .collect();
    FrameMatrixField { grid: g.clone(), comps }
}

/// Smallest eigenvalue of a frame matrix (S¹: the single entry).
pub fn min_eigenvalue(n: usize, m: &Sym2) -> f64 {
    if n == 1 {
        m.xx
    } else {
        m.eigenvalues()[0]
    }
}

/// `σ_k` of a frame matrix, with `σ_0 = 1` and `σ_k = 0` for `k > n`.
pub fn sigma_of(n: usize, k: usize, m: &Sym2) -> f64 {
    match (n, k) {
        (_, 0) => 1.0,
        (1, 1) => m.xx,
        (2, 1) => m.trace(),
        (2, 2) => m.det(),
        _ => 0.0,
    }
}

/// `σ_k^{ij} = ∂σ_k/∂τ_ij` in the working frame.
pub fn sigma_grad_of(n: usize, k: usize, m: &Sym2) -> Sym2 {
    match (n, k) {
        (1, 1) => Sym2::scalar(1.0),
        (2, 1) => Sym2::identity(2),
        (2, 2) => Sym2::identity(2).scale(m.trace()).sub(m),
        _ => Sym2::default(),
    }
}

/// `∂σ_k/∂λ_i` from the eigenvalues.
pub fn dsigma_dlambda(n: usize, k: usize, lambdas: &[f64; 2]) -> [f64; 2] {
    match (n, k) {
        (1, 1) => [1.0, 0.0],
        (2, 1) => [1.0, 1.0],
        (2, 2) => [lambdas[1], lambdas[0]],
        _ => [0.0, 0.0],
    }
}

/// `|a − b| / max(|a|, |b|, 1)`.
pub fn rel_residual(a: f64, b: f64) -> f64 {
    (a - b).abs() / a.abs().max(b.abs()).max(1.0)
}

/// Curvature data of a strictly convex body, sampled on a grid.
#[derive(Debug, Clone)]
pub struct BodyGeometry {
    pub h: ScalarField,
    /// `∇̄h` in the frame.
    pub grad_h: FrameVectorField,
    /// `τ = A[h]`.
    pub tau: FrameMatrixField,
    /// Principal radii per node, ascending; only the first `n` entries are used.
    pub lambdas: Vec<[f64; 2]>,
    sigma: Vec<ScalarField>,
    sigma_grad: Vec<FrameMatrixField>,
    /// Gauss curvature `K = 1/σ_n`.
    pub gauss_k: ScalarField,
    /// Boundary point `X = hx + ∇̄h` with outer normal `x`.
    pub x: Vec<[f64; 3]>,
    pub abs_x: ScalarField,
    label: String,
}

impl BodyGeometry {
    pub fn grid(&self) -> &Arc<Grid> {
        self.h.grid()
    }

    pub fn dim(&self) -> usize {
        self.h.grid().dim()
    }

    /// `σ_k` for `0 ≤ k ≤ n + 1`.
    pub fn sigma(&self, k: usize) -> &ScalarField {
        &self.sigma[k]
    }

    /// `σ_k^{ij}` for `0 ≤ k ≤ n + 1`.
    pub fn sigma_grad(&self, k: usize) -> &FrameMatrixField {
        &self.sigma_grad[k]
    }

    /// Principal radii at node `i`.
    pub fn lambdas_at(&self, i: usize) -> &[f64] {
        &self.lambdas[i][..self.dim()]
    }

    /// Smallest principal radius over the grid.
    pub fn convexity_margin(&self) -> f64 {
        self.lambdas.iter().map(|l| l[0]).fold(f64::INFINITY, f64::min)
    }

    /// Content hash of the support-function samples.
    pub fn label(&self) -> &str {
        &self.label
    }

    /// Density of `dV_k = hσ_k dμ` at the nodes.
    pub fn dv_k(&self, k: usize) -> Vec<f64> {
        self.h.values().iter().zip(self.sigma[k].values()).map(|(h, s)| h * s).collect()
    }

    /// Eigenvectors of `τ` in ambient coordinates, matching `lambdas`.
    pub fn eigenframe(&self, i: usize) -> [[f64; 3]; 2] {
        let g = self.grid();
        if self.dim() == 1 {
            return [g.frame(i)[0], [0.0; 3]];
        }
        let v = self.tau.comps[i].eigenvectors();
        [g.frame_to_ambient(i, &v[0]), g.frame_to_ambient(i, &v[1])]
    }
}

/// Assembles the curvature package of `h`.
///
/// Fails with [`Error::NonPositive`] if `h ≤ 0` somewhere and with
/// [`Error::NonConvex`] if `A[h]` is not positive definite at every node.
pub fn assemble(h: &ScalarField) -> Result<BodyGeometry> {
    let g = h.grid().clone();
    let n = g.dim();
    if let Some((node, &value)) = h.values().iter().enumerate().find(|(_, &v)| v.is_nan() || v <= 0.0) {
        return Err(Error::NonPositive { node, value });
    }
    let d = g.param_derivs(h.values());
    let grad = g.grad_from(&d);
    let id = Sym2::identity(n);
    let tau: Vec<Sym2> =
        g.hess_from(&d).into_iter().zip(h.values()).map(|(hs, &v)| hs.add(&id.scale(v))).collect();

    let lambdas: Vec<[f64; 2]> = tau
        .iter()
        .map(|t| if n == 1 { [t.xx, t.xx] } else { t.eigenvalues() })
        .collect();
    let (node, margin) = lambdas
        .iter()
        .enumerate()
        .map(|(i, l)| (i, l[0]))
        .fold((0, f64::INFINITY), |a, b| if b.1 < a.1 { b } else { a });
    if margin.is_nan() || margin <= 0.0 {
        return Err(Error::NonConvex { node, margin });
    }

    let sigma: Vec<ScalarField> = (0..=n + 1)
        .map(|k| ScalarField::raw(g.clone(), tau.iter().map(|t| sigma_of(n, k, t)).collect()))
        .collect();
    let sigma_grad: Vec<FrameMatrixField> = (0..=n + 1)
        .map(|k| FrameMatrixField { grid: g.clone(), comps: tau.iter().map(|t| sigma_grad_of(n, k, t)).collect() })
        .collect();
    let gauss_k = sigma[n].map(|s| 1.0 / s);

    let x: Vec<[f64; 3]> = g
        .nodes()
        .iter()
        .enumerate()
        .map(|(i, p)| {
            let t = g.frame_to_ambient(i, &grad[i]);
            let hv = h.values()[i];
            [hv * p[0] + t[0], hv * p[1] + t[1], hv * p[2] + t[2]]
        })
        .collect();
    let abs_x = ScalarField::raw(g.clone(), x.iter().map(|p| dot3(p, p).sqrt()).collect());

    Ok(BodyGeometry {
        label: h.content_hash(),
        h: h.clone(),
        grad_h: FrameVectorField { grid: g.clone(), comps: grad },
        tau: FrameMatrixField { grid: g.clone(), comps: tau },
        lambdas,
        sigma,
        sigma_grad,
        gauss_k,
        x,
        abs_x,
    })
}

/// Maximum residuals of the pointwise identities satisfied by the curvature package.
#[derive(Debug, Clone, Default)]
pub struct IdentityResiduals {
    /// `σ_k^{ij}τ_ij = kσ_k`, per `k = 1..=n`.
    pub euler: Vec<f64>,
    /// `Σ_i ∂σ_k/∂λ_i λ_i² = σ_1σ_k − (k+1)σ_{k+1}`, per `k = 1..=n`.
    pub lambda_square: Vec<f64>,
    /// `σ_{k+1}^{ii} = σ_k − λ_iσ_k^{ii}` in the eigenframe, per `k = 0..=n`.
    pub diagonal_recursion: Vec<f64>,
    /// `σ_{k+1}^{ij}ḡ_ij = (n−k)σ_k`, per `k = 0..=n`.
    pub trace: Vec<f64>,
    /// `|X|² = h² + |∇̄h|²`.
    pub position_norm: f64,
    /// `|X|⟨∇̄|X|, ∇̄h⟩ = τ(∇̄h, ∇̄h)` with a discrete gradient of `|X|`.
    pub radial_derivative: f64,
    /// Nodes skipped by eigenvector-dependent checks.
    pub umbilic_nodes: usize,
}

impl IdentityResiduals {
    /// Worst residual among the exact algebraic identities.
    pub fn algebraic_max(&self) -> f64 {
        self.euler
            .iter()
            .chain(&self.lambda_square)
            .chain(&self.diagonal_recursion)
            .chain(&self.trace)
            .copied()
            .fold(self.position_norm, f64::max)
    }

    pub fn to_map(&self) -> BTreeMap<String, f64> {
        let mut m = BTreeMap::new();
        let mut put = |name: &str, v: &[f64], k0: usize| {
            for (j, r) in v.iter().enumerate() {
                m.insert(format!("{name}.k{}", j + k0), *r);
            }
        };
        put("euler", &self.euler, 1);
        put("lambda_square", &self.lambda_square, 1);
        put("diagonal_recursion", &self.diagonal_recursion, 0);
        put("trace", &self.trace, 0);
        m.insert("position_norm".into(), self.position_norm);
        m.insert("radial_derivative".into(), self.radial_derivative);
        m.insert("umbilic_nodes".into(), self.umbilic_nodes as f64);
        m
    }
}

/// Evaluates every pointwise identity of the curvature package.
pub fn pointwise_identity_report(g: &BodyGeometry) -> IdentityResiduals {
    let n = g.dim();
    let grid = g.grid();
    let len = grid.len();
    let max_over = |f: &dyn Fn(usize) -> f64| (0..len).map(f).fold(0.0, f64::max);

    let euler = (1..=n)
        .map(|k| {
            max_over(&|i| {
                rel_residual(g.sigma_grad(k).comps[i].contract(&g.tau.comps[i]), k as f64 * g.sigma(k).values()[i])
            })
        })
        .collect();

    let lambda_square = (1..=n)
        .map(|k| {
            max_over(&|i| {
                let l = g.lambdas[i];
                let ds = dsigma_dlambda(n, k, &l);
                let lhs: f64 = (0..n).map(|j| ds[j] * l[j] * l[j]).sum();
                let s = |q: usize| g.sigma(q).values()[i];
                rel_residual(lhs, s(1) * s(k) - (k + 1) as f64 * s(k + 1))
            })
        })
        .collect();

    let mut umbilic = 0;
    let umbilic_mask: Vec<bool> = g
        .lambdas
        .iter()
        .map(|l| n == 2 && (l[1] - l[0]).abs() < UMBILIC_GAP)
        .collect();
    for &u in &umbilic_mask {
        if u {
            umbilic += 1;
        }
    }
    let diagonal_recursion = (0..=n)
        .map(|k| {
            max_over(&|i| {
                if umbilic_mask[i] {
                    return 0.0;
                }
                let vecs: [[f64; 2]; 2] =
                    if n == 1 { [[1.0, 0.0], [0.0, 0.0]] } else { g.tau.comps[i].eigenvectors() };
                (0..n)
                    .map(|j| {
                        let upper = g.sigma_grad(k + 1).comps[i].quad(&vecs[j]);
                        let lower = g.sigma_grad(k).comps[i].quad(&vecs[j]);
                        rel_residual(upper, g.sigma(k).values()[i] - g.lambdas[i][j] * lower)
                    })
                    .fold(0.0, f64::max)
            })
        })
        .collect();

    let trace = (0..=n)
        .map(|k| {
            max_over(&|i| {
                let m = g.sigma_grad(k + 1).comps[i];
                let tr = if n == 1 { m.xx } else { m.trace() };
                rel_residual(tr, (n - k) as f64 * g.sigma(k).values()[i])
            })
        })
        .collect();

    let gh2 = g.grad_h.norm_sq();
    let position_norm = max_over(&|i| {
        let h = g.h.values()[i];
        rel_residual(dot3(&g.x[i], &g.x[i]), h * h + gh2[i])
    });

    let grad_abs_x = grid.grad_values(g.abs_x.values());
    let radial_derivative = max_over(&|i| {
        let gh = g.grad_h.comps[i];
        let lhs = g.abs_x.values()[i] * (grad_abs_x[i][0] * gh[0] + grad_abs_x[i][1] * gh[1]);
        rel_residual(lhs, g.tau.comps[i].quad(&gh))
    });

    IdentityResiduals {
        euler,
        lambda_square,
        diagonal_recursion,
        trace,
        position_norm,
        radial_derivative,
        umbilic_nodes: umbilic,
    }
}

/// Residual of `σ_k^{ij}∂_if∂_jf = Σ_i ∂σ_k/∂λ_i λ_i² ⟨e_i, v⟩²` for `f = ⟨X, v⟩`, per `k = 1..=n`.
///
/// The left side differentiates `f` on the grid; the right side uses the
/// eigenframe of `τ`, where `∂_i f = λ_i⟨e_i, v⟩`.
pub fn embedding_check(g: &BodyGeometry, v: &[f64; 3]) -> Vec<f64> {
    let n = g.dim();
    let grid = g.grid();
    let f: Vec<f64> = g.x.iter().map(|p| dot3(p, v)).collect();
    let df = grid.grad_values(&f);
    (1..=n)
        .map(|k| {
            (0..grid.len())
                .map(|i| {
                    let lhs = g.sigma_grad(k).comps[i].quad(&df[i]);
                    let frame = g.eigenframe(i);
                    let l = g.lambdas[i];
                    let ds = dsigma_dlambda(n, k, &l);
                    let rhs: f64 = (0..n).map(|j| ds[j] * l[j] * l[j] * dot3(&frame[j], v).powi(2)).sum();
                    rel_residual(lhs, rhs)
                })
                .fold(0.0, f64::max)
        })
        .collect()
}
