//! Inequalities and integral identities of support-function calculus, with
//! slack reporting.

use std::sync::Arc;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::calculus::{a_operator, assemble, pointwise_identity_report, rel_residual, BodyGeometry};
use crate::config::Tolerances;
use crate::error::{Error, Result};
use crate::grid::{dot3, laplacian, Grid, ScalarField};
use crate::harmonics::{indices, real_harmonic};
use crate::integral::{minkowski_vanishing, v_k1_ordered};
use crate::phi::Nonlinearity;
use crate::report::{CheckKind, SlackReport};

fn check_k(g: &BodyGeometry, k: usize) -> Result<()> {
    if k == 0 || k > g.dim() {
        return Err(Error::InvalidSpec(format!("order k = {k} outside 1..={}", g.dim())));
    }
    Ok(())
}

fn stamp(r: SlackReport, g: &BodyGeometry, tol: f64) -> SlackReport {
    r.with_body(g.label(), g.grid().resolution()).with_tol(tol)
}

fn norm3(v: &[f64; 3]) -> f64 {
    dot3(v, v).sqrt()
}

fn weighted(a: &[f64], b: &[f64]) -> Vec<f64> {
    a.iter().zip(b).map(|(x, y)| x * y).collect()
}

/// `⟨x/h, v⟩ + c`, the equality case of the local Alexandrov–Fenchel inequality.
pub fn witness_function(h: &ScalarField, v: &[f64; 3], c: f64) -> ScalarField {
    let vals = h.grid().nodes().iter().zip(h.values()).map(|(x, hv)| dot3(x, v) / hv + c).collect();
    ScalarField::new(h.grid().clone(), vals).expect("h is positive")
}

/// Seeded combination of real harmonics of degree `0..=lmax`, unit sup-norm.
pub fn random_test_function(seed: u64, grid: &Arc<Grid>, lmax: usize) -> ScalarField {
    let n = grid.dim();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let terms: Vec<(usize, i64, f64)> =
        indices(n, 0, lmax).into_iter().map(|(l, m)| (l, m, StandardNormal.sample(&mut rng))).collect();
    let f = ScalarField::from_fn(grid, |x| terms.iter().map(|&(l, m, c)| c * real_harmonic(n, l, m, x)).sum());
    let s = f.sup_norm();
    if s > 0.0 {
        f.map(|v| v / s)
    } else {
        f
    }
}

/// `V_{k+1}(fh,h,…,h)² ≥ V_{k+1}(fh,fh,h,…,h)·V_{k+1}(h,…,h)`; slack is `lhs − rhs`.
pub fn af_local(g: &BodyGeometry, f: &ScalarField, k: usize, tol: &Tolerances) -> Result<SlackReport> {
    check_k(g, k)?;
    let h = &g.h;
    let fh = f.mul(h)?;
    let mut a1 = vec![&fh];
    a1.extend(std::iter::repeat_n(h, k));
    let mut a2 = vec![&fh, &fh];
    a2.extend(std::iter::repeat_n(h, k - 1));
    let a0: Vec<&ScalarField> = std::iter::repeat_n(h, k + 1).collect();
    let (v1, v2, v0) = (v_k1_ordered(&a1)?, v_k1_ordered(&a2)?, v_k1_ordered(&a0)?);
    let lhs = v1 * v1;
    let rhs = v2 * v0;
    Ok(stamp(
        SlackReport::new("af_local", CheckKind::Inequality, lhs, rhs)
            .with_k(k)
            .with_slack(lhs - rhs)
            .extra("v_fh", v1)
            .extra("v_fh_fh", v2)
            .extra("v_h", v0),
        g,
        tol.grid,
    ))
}

/// `k∫f²hσ_k dμ ≤ ∫h²σ_k^{ij}∂_if∂_jf dμ` after projecting `f` onto `∫fhσ_k dμ = 0`.
///
/// The residual compares `∫fhσ_k^{ij}(A[fh])_{ij} dμ` with `lhs − rhs`.
pub fn spectral_gap(g: &BodyGeometry, f: &ScalarField, k: usize, tol: &Tolerances) -> Result<SlackReport> {
    check_k(g, k)?;
    g.h.same_grid(f)?;
    let grid = g.grid();
    let w = g.dv_k(k);
    let shift = grid.integrate_values(&weighted(f.values(), &w)) / grid.integrate_values(&w);
    let fp = f.map(|v| v - shift);
    let lhs = k as f64 * grid.integrate_values(&weighted(&weighted(fp.values(), fp.values()), &w));
    let df = grid.grad_values(fp.values());
    let dens: Vec<f64> = (0..grid.len())
        .map(|i| {
            let h = g.h.values()[i];
            h * h * g.sigma_grad(k).comps[i].quad(&df[i])
        })
        .collect();
    let rhs = grid.integrate_values(&dens);
    let fh = fp.mul(&g.h)?;
    let afh = a_operator(&fh);
    let mixed: Vec<f64> =
        (0..grid.len()).map(|i| fh.values()[i] * g.sigma_grad(k).comps[i].contract(&afh.comps[i])).collect();
    let mixed = grid.integrate_values(&mixed);
    Ok(stamp(
        SlackReport::new("spectral_gap", CheckKind::Inequality, lhs, rhs)
            .with_k(k)
            .with_slack(rhs - lhs)
            .with_residual(rel_residual(mixed, lhs - rhs))
            .extra("projection_shift", shift),
        g,
        tol.grid,
    ))
}

/// [`spectral_gap`] for the witness `f = ⟨x/h, v⟩`, judged as an equality.
pub fn spectral_gap_witness(g: &BodyGeometry, v: &[f64; 3], k: usize, tol: &Tolerances) -> Result<SlackReport> {
    let f = witness_function(&g.h, v, 0.0);
    let mut r = spectral_gap(g, &f, k, tol)?;
    r.name = "spectral_gap_witness".into();
    r.kind = CheckKind::Equality;
    r.tol = tol.witness;
    Ok(r)
}

/// [`af_local`] for the witness `f = ⟨x/h, v⟩ + c`, judged as an equality.
pub fn af_local_witness(g: &BodyGeometry, v: &[f64; 3], c: f64, k: usize, tol: &Tolerances) -> Result<SlackReport> {
    let f = witness_function(&g.h, v, c);
    let mut r = af_local(g, &f, k, tol)?;
    r.name = "af_local_witness".into();
    r.kind = CheckKind::Equality;
    Ok(r)
}

/// `k∫|X|²dV_k ≤ ∫h(σ_1 − (k+1)σ_{k+1}/σ_k)dV_k + k|∫XdV_k|²/∫dV_k`; slack is `rhs − lhs`.
///
/// For `k = n` the residual compares the right side with its form
/// `∫h(Δ̄h + nh)dV + n|∫XdV|²/∫dV`, using the grid Laplacian.
pub fn main_lemma(g: &BodyGeometry, k: usize, tol: &Tolerances) -> Result<SlackReport> {
    check_k(g, k)?;
    let n = g.dim();
    let grid = g.grid();
    let w = g.dv_k(k);
    let mass = grid.integrate_values(&w);
    let xw: Vec<[f64; 3]> = g.x.iter().zip(&w).map(|(x, d)| [x[0] * d, x[1] * d, x[2] * d]).collect();
    let xint = grid.integrate_vectors(&xw);
    let kf = k as f64;
    let x2: Vec<f64> = g.x.iter().map(|x| dot3(x, x)).collect();
    let lhs = kf * grid.integrate_values(&weighted(&x2, &w));
    let dens: Vec<f64> = (0..grid.len())
        .map(|i| {
            let s = |q: usize| g.sigma(q).values()[i];
            g.h.values()[i] * (s(1) - (kf + 1.0) * s(k + 1) / s(k)) * w[i]
        })
        .collect();
    let centroid_term = kf * dot3(&xint, &xint) / mass;
    let rhs = grid.integrate_values(&dens) + centroid_term;
    let mut r = SlackReport::new("main_lemma", CheckKind::Inequality, lhs, rhs)
        .with_k(k)
        .with_slack(rhs - lhs)
        .extra("centroid_term", centroid_term);
    if k == n {
        let lap = laplacian(&g.h);
        let dens: Vec<f64> = (0..grid.len())
            .map(|i| {
                let h = g.h.values()[i];
                h * (lap.values()[i] + n as f64 * h) * w[i]
            })
            .collect();
        let rhs_lap = grid.integrate_values(&dens) + centroid_term;
        r = r.with_residual(rel_residual(rhs, rhs_lap));
    }
    Ok(stamp(r, g, tol.grid))
}

/// [`main_lemma`] judged as an equality (centred ellipsoids).
pub fn main_lemma_equality(g: &BodyGeometry, k: usize, tol: &Tolerances) -> Result<SlackReport> {
    let mut r = main_lemma(g, k, tol)?;
    r.name = "main_lemma_equality".into();
    r.kind = CheckKind::Equality;
    Ok(r)
}

/// `∇̄ log(h^{n+2}/K) = (n+2)∇̄h/h + ∇̄ log σ_n` in frame components.
pub fn log_soliton_gradient(g: &BodyGeometry) -> Vec<[f64; 2]> {
    let n = g.dim();
    let grid = g.grid();
    let log_s: Vec<f64> = g.sigma(n).values().iter().map(|s| s.ln()).collect();
    let ds = grid.grad_values(&log_s);
    (0..grid.len())
        .map(|i| {
            let c = (n + 2) as f64 / g.h.values()[i];
            let gh = g.grad_h.comps[i];
            [c * gh[0] + ds[i][0], c * gh[1] + ds[i][1]]
        })
        .collect()
}

/// `∫⟨hX, ∇̄log(h^{n+2}/K)⟩dV = ∫(n|∇̄h|² − hΔ̄h)dV ≤ n|∫XdV|²/∫dV`.
///
/// `lhs` is the middle expression, the residual compares it with the first.
pub fn affine_identity(g: &BodyGeometry, tol: &Tolerances) -> Result<SlackReport> {
    let n = g.dim();
    let grid = g.grid();
    let w = g.dv_k(n);
    let dl = log_soliton_gradient(g);
    let lap = laplacian(&g.h);
    let gh2 = g.grad_h.norm_sq();
    let first: Vec<f64> = (0..grid.len())
        .map(|i| {
            let gh = g.grad_h.comps[i];
            g.h.values()[i] * (gh[0] * dl[i][0] + gh[1] * dl[i][1]) * w[i]
        })
        .collect();
    let middle: Vec<f64> =
        (0..grid.len()).map(|i| (n as f64 * gh2[i] - g.h.values()[i] * lap.values()[i]) * w[i]).collect();
    let e1 = grid.integrate_values(&first);
    let e2 = grid.integrate_values(&middle);
    let xw: Vec<[f64; 3]> = g.x.iter().zip(&w).map(|(x, d)| [x[0] * d, x[1] * d, x[2] * d]).collect();
    let xint = grid.integrate_vectors(&xw);
    let rhs = n as f64 * dot3(&xint, &xint) / grid.integrate_values(&w);
    Ok(stamp(
        SlackReport::new("affine_identity", CheckKind::Inequality, e2, rhs)
            .with_slack(rhs - e2)
            .with_residual(rel_residual(e1, e2))
            .extra("gradient_form", e1),
        g,
        tol.grid,
    ))
}

/// `n∫(f − f̄)²dμ ≤ ∫|∇̄f|²dμ`; slack is `rhs − lhs`.
pub fn poincare(f: &ScalarField, tol: &Tolerances) -> SlackReport {
    let grid = f.grid();
    let n = grid.dim() as f64;
    let mean = grid.integrate_values(f.values()) / grid.total_measure();
    let dev: Vec<f64> = f.values().iter().map(|v| (v - mean) * (v - mean)).collect();
    let lhs = n * grid.integrate_values(&dev);
    let g2: Vec<f64> = grid.grad_values(f.values()).iter().map(|v| v[0] * v[0] + v[1] * v[1]).collect();
    let rhs = grid.integrate_values(&g2);
    SlackReport::new("poincare", CheckKind::Inequality, lhs, rhs)
        .with_slack(rhs - lhs)
        .with_body(&f.content_hash(), grid.resolution())
        .with_tol(tol.grid)
}

/// [`poincare`] judged as an equality (first eigenspace).
pub fn poincare_equality(f: &ScalarField, tol: &Tolerances) -> SlackReport {
    let mut r = poincare(f, tol);
    r.name = "poincare_equality".into();
    r.kind = CheckKind::Equality;
    r
}

/// `∫⟨∇̄log(h^{n+2}/K), ξ_M⟩dV = 0` with `ξ_M(x) = Mx − (xᵀMx)x`.
///
/// The residual is normalised by `∫|∇̄log(h^{n+2}/K)||ξ_M|dV`.
pub fn xi_identity(g: &BodyGeometry, m: &[[f64; 3]; 3], tol: &Tolerances) -> Result<SlackReport> {
    let n = g.dim();
    let grid = g.grid();
    let w = g.dv_k(n);
    let dl = log_soliton_gradient(g);
    let mut val = Vec::with_capacity(grid.len());
    let mut mag = Vec::with_capacity(grid.len());
    for (i, x) in grid.nodes().iter().enumerate() {
        let mut mx = [0.0; 3];
        for a in 0..=n {
            for b in 0..=n {
                mx[a] += m[a][b] * x[b];
            }
        }
        let q = dot3(x, &mx);
        let xi = [mx[0] - q * x[0], mx[1] - q * x[1], mx[2] - q * x[2]];
        let xf = grid.ambient_to_frame(i, &xi);
        val.push((dl[i][0] * xf[0] + dl[i][1] * xf[1]) * w[i]);
        mag.push((dl[i][0].hypot(dl[i][1])) * norm3(&xi) * w[i]);
    }
    let lhs = grid.integrate_values(&val);
    let scale = grid.integrate_values(&mag);
    let residual = lhs.abs() / scale.max(1.0);
    Ok(stamp(
        SlackReport::new("xi_identity", CheckKind::Identity, lhs, 0.0).with_residual(residual).extra("scale", scale),
        g,
        tol.grid,
    ))
}

/// `∫X h^p dμ = ((n+1+p)/n)∫h^p∇̄h dμ` for every body, and, when `K = h^{1−p}`,
/// `((n+1+p)/n)∫|∇̄h|²dV ≤ |∫XdV|²/∫dV` with `dV = h^p dμ`.
pub fn p_chain(g: &BodyGeometry, p: f64, tol: &Tolerances) -> Result<SlackReport> {
    let n = g.dim();
    let grid = g.grid();
    let nf = n as f64;
    let hp: Vec<f64> = g.h.values().iter().map(|h| h.powf(p)).collect();
    let xw: Vec<[f64; 3]> = g.x.iter().zip(&hp).map(|(x, d)| [x[0] * d, x[1] * d, x[2] * d]).collect();
    let lhs_v = grid.integrate_vectors(&xw);
    let coef = (nf + 1.0 + p) / nf;
    let gw: Vec<[f64; 3]> = (0..grid.len())
        .map(|i| {
            let t = grid.frame_to_ambient(i, &g.grad_h.comps[i]);
            [t[0] * hp[i], t[1] * hp[i], t[2] * hp[i]]
        })
        .collect();
    let gi = grid.integrate_vectors(&gw);
    let rhs_v = [coef * gi[0], coef * gi[1], coef * gi[2]];
    let diff = [lhs_v[0] - rhs_v[0], lhs_v[1] - rhs_v[1], lhs_v[2] - rhs_v[2]];
    let residual = norm3(&diff) / norm3(&lhs_v).max(norm3(&rhs_v)).max(1.0);

    let pre = (0..grid.len())
        .map(|i| (g.sigma(n).values()[i].ln() + (1.0 - p) * g.h.values()[i].ln()).abs())
        .fold(0.0, f64::max);
    let gh2 = g.grad_h.norm_sq();
    let lhs = coef * grid.integrate_values(&weighted(&gh2, &hp));
    let rhs = dot3(&lhs_v, &lhs_v) / grid.integrate_values(&hp);
    let mut r = SlackReport::new("p_chain", CheckKind::Inequality, lhs, rhs)
        .with_residual(residual)
        .extra("p", p)
        .extra("precondition_residual", pre)
        .extra("integral_x_norm", norm3(&lhs_v));
    if pre <= tol.precondition {
        r = r.with_slack(rhs - lhs);
    }
    Ok(stamp(r, g, tol.grid))
}

/// Sign identity for `ψ(h, |X|)K = h^{n+2}`:
/// `⟨X, ∇̄(h^{n+2}/K)⟩ = |∇̄h|²∂₁ψ + ⟨∇̄|X|, ∇̄h⟩∂₂ψ ≥ c′|∇̄h|²`.
///
/// When the body does not solve the equation within the precondition
/// tolerance only the unconstrained identity `|X|⟨∇̄|X|, ∇̄h⟩ = τ(∇̄h, ∇̄h)`
/// is reported. `c′ = min(∂₁ψ + λ_min∂₂ψ/|X|)` over the nodes.
pub fn saroglou_sign(g: &BodyGeometry, psi: &dyn Nonlinearity, tol: &Tolerances) -> Result<SlackReport> {
    let n = g.dim();
    let grid = g.grid();
    let len = grid.len();
    let mut vals = Vec::with_capacity(len);
    for i in 0..len {
        let (h, y) = (g.h.values()[i], g.abs_x.values()[i]);
        let v = [psi.value(h, y), psi.d1(h, y), psi.d2(h, y)];
        if v.iter().any(|x| !x.is_finite()) {
            return Err(Error::NonFiniteNonlinearity { node: i });
        }
        vals.push(v);
    }
    let target: Vec<f64> = (0..len).map(|i| g.h.values()[i].powi(n as i32 + 2) * g.sigma(n).values()[i]).collect();
    let pre = (0..len).map(|i| (vals[i][0] / target[i]).ln().abs()).fold(0.0, f64::max);

    let dabs = grid.grad_values(g.abs_x.values());
    let radial: Vec<f64> = (0..len)
        .map(|i| {
            let gh = g.grad_h.comps[i];
            g.abs_x.values()[i] * (dabs[i][0] * gh[0] + dabs[i][1] * gh[1])
        })
        .collect();
    let tau_q: Vec<f64> = (0..len).map(|i| g.tau.comps[i].quad(&g.grad_h.comps[i])).collect();
    let radial_scale = tau_q.iter().chain(&radial).fold(1.0f64, |m, v| m.max(v.abs()));
    let radial_res = (0..len).map(|i| (radial[i] - tau_q[i]).abs()).fold(0.0, f64::max) / radial_scale;

    let gh2 = g.grad_h.norm_sq();
    let mut r = SlackReport::new("saroglou_sign", CheckKind::Inequality, 0.0, 0.0)
        .extra("precondition_residual", pre)
        .extra("radial_identity_residual", radial_res);
    if pre > tol.precondition {
        r = r.with_residual(radial_res);
        return Ok(stamp(r, g, tol.grid));
    }

    let dt = grid.grad_values(&target);
    let lhs_pt: Vec<f64> = (0..len)
        .map(|i| {
            let gh = g.grad_h.comps[i];
            gh[0] * dt[i][0] + gh[1] * dt[i][1]
        })
        .collect();
    let rhs_pt: Vec<f64> = (0..len).map(|i| gh2[i] * vals[i][1] + radial[i] / g.abs_x.values()[i] * vals[i][2]).collect();
    let scale = lhs_pt.iter().chain(&rhs_pt).fold(1.0f64, |m, v| m.max(v.abs()));
    let id_res = (0..len).map(|i| (lhs_pt[i] - rhs_pt[i]).abs()).fold(0.0, f64::max) / scale;
    let c_prime = (0..len)
        .map(|i| vals[i][1] + g.lambdas[i][0] * vals[i][2] / g.abs_x.values()[i])
        .fold(f64::INFINITY, f64::min);
    let slack = (0..len).map(|i| lhs_pt[i] - c_prime * gh2[i]).fold(f64::INFINITY, f64::min);
    let lhs = lhs_pt.iter().copied().fold(f64::INFINITY, f64::min);
    r.lhs = lhs;
    r.rhs = c_prime;
    r = r.with_slack(slack).with_residual(id_res.max(radial_res)).extra("c_prime", c_prime);
    Ok(stamp(r, g, tol.grid))
}

/// The two inequalities closing the uniqueness argument for `K = h`.
///
/// `theorem11_chain.key` is `(n+1)∫|∇̄h|²dμ ≤ n|∫Xdμ|²/∫dμ` (slack only when
/// `K = h` holds within tolerance); `theorem11_chain.cauchy_schwarz` is
/// `|∫Xdμ|² ≤ ∫dμ·∫((h − h̄)² + |∇̄h|²)dμ`, valid for every body.
pub fn theorem11_chain(g: &BodyGeometry, tol: &Tolerances) -> Vec<SlackReport> {
    let n = g.dim();
    let grid = g.grid();
    let nf = n as f64;
    let total = grid.total_measure();
    let xint = grid.integrate_vectors(&g.x);
    let x2 = dot3(&xint, &xint);
    let gh2 = g.grad_h.norm_sq();
    let grad_int = grid.integrate_values(&gh2);
    let mean = grid.integrate_values(g.h.values()) / total;
    let dev: Vec<f64> = g.h.values().iter().zip(&gh2).map(|(h, q)| (h - mean) * (h - mean) + q).collect();
    let pre = (0..grid.len())
        .map(|i| (g.sigma(n).values()[i].ln() + g.h.values()[i].ln()).abs())
        .fold(0.0, f64::max);
    let sup_dev = g.h.values().iter().fold(0.0f64, |m, h| m.max((h - 1.0).abs()));

    let lhs = (nf + 1.0) * grad_int;
    let rhs = nf * x2 / total;
    let mut key = SlackReport::new("theorem11_chain.key", CheckKind::Inequality, lhs, rhs)
        .extra("precondition_residual", pre)
        .extra("sup_h_minus_1", sup_dev);
    if pre <= tol.precondition {
        key = key.with_slack(rhs - lhs);
    }
    let cs_rhs = total * grid.integrate_values(&dev);
    let cs = SlackReport::new("theorem11_chain.cauchy_schwarz", CheckKind::Inequality, x2, cs_rhs).with_slack(cs_rhs - x2);
    vec![stamp(key, g, tol.grid), stamp(cs, g, tol.grid)]
}

/// Exact algebraic identities of the curvature package, as one report per family.
pub fn algebraic_identities(g: &BodyGeometry, tol: &Tolerances) -> Vec<SlackReport> {
    let r = pointwise_identity_report(g);
    let worst = |v: &[f64]| v.iter().copied().fold(0.0, f64::max);
    let mut out: Vec<SlackReport> = [
        ("identities.euler", worst(&r.euler)),
        ("identities.lambda_square", worst(&r.lambda_square)),
        ("identities.diagonal_recursion", worst(&r.diagonal_recursion)),
        ("identities.trace", worst(&r.trace)),
        ("identities.position_norm", r.position_norm),
    ]
    .into_iter()
    .map(|(name, res)| stamp(SlackReport::new(name, CheckKind::Identity, 0.0, 0.0).with_residual(res), g, tol.exact))
    .collect();
    out.push(stamp(
        SlackReport::new("identities.radial_derivative", CheckKind::Identity, 0.0, 0.0)
            .with_residual(r.radial_derivative)
            .extra("umbilic_nodes", r.umbilic_nodes as f64),
        g,
        tol.grid,
    ));
    out
}

/// `∫xσ_k dμ = 0` for each `k`, normalised by `∫σ_k dμ`.
pub fn minkowski_reports(g: &BodyGeometry, tol: &Tolerances) -> Result<Vec<SlackReport>> {
    (1..=g.dim())
        .map(|k| {
            let v = minkowski_vanishing(g, k)?;
            let mass = g.grid().integrate_values(g.sigma(k).values());
            Ok(stamp(
                SlackReport::new("minkowski", CheckKind::Identity, norm3(&v), 0.0).with_k(k).with_residual(norm3(&v) / mass),
                g,
                tol.grid,
            ))
        })
        .collect()
}

/// Check families known to [`run_suite`].
pub const SUITE_FAMILIES: &[&str] = &[
    "identities",
    "minkowski",
    "af_local",
    "spectral_gap",
    "main_lemma",
    "affine_identity",
    "poincare",
    "xi_identity",
    "p_chain",
    "theorem11_chain",
    "battery",
];

/// Parses `"all"` or a comma-separated list of families.
pub fn parse_suite(s: &str) -> Result<Vec<String>> {
    if s.trim() == "all" {
        return Ok(SUITE_FAMILIES.iter().map(|s| s.to_string()).collect());
    }
    s.split(',')
        .map(|p| {
            let p = p.trim();
            if SUITE_FAMILIES.contains(&p) {
                Ok(p.to_string())
            } else {
                Err(Error::InvalidSpec(format!("unknown check family `{p}`")))
            }
        })
        .collect()
}

/// Options for [`run_suite`].
#[derive(Debug, Clone)]
pub struct SuiteOptions {
    pub families: Vec<String>,
    pub seed: u64,
    /// Random `(f, k)` cases in the battery.
    pub battery: usize,
    pub tol: Tolerances,
}

/// Deterministic test functions used by the named families.
fn standard_test_functions(grid: &Arc<Grid>) -> Vec<(&'static str, ScalarField)> {
    vec![
        ("x1", ScalarField::from_fn(grid, |x| x[0])),
        ("x1x2", ScalarField::from_fn(grid, |x| x[0] * x[1])),
        ("quadratic", ScalarField::from_fn(grid, |x| x[0] * x[0] - x[1] * x[1] + 0.5 * x[0] * x[2])),
    ]
}

fn tag(mut r: SlackReport, label: &str) -> SlackReport {
    r.name = format!("{}.{label}", r.name);
    r
}

/// Runs the selected check families on one body.
pub fn run_suite(h: &ScalarField, opts: &SuiteOptions) -> Result<Vec<SlackReport>> {
    let g = assemble(h)?;
    let n = g.dim();
    let tol = &opts.tol;
    let grid = h.grid();
    let fns = standard_test_functions(grid);
    let mut out = Vec::new();
    for fam in &opts.families {
        match fam.as_str() {
            "identities" => out.extend(algebraic_identities(&g, tol)),
            "minkowski" => out.extend(minkowski_reports(&g, tol)?),
            "af_local" => {
                for k in 1..=n {
                    for (name, f) in &fns {
                        out.push(tag(af_local(&g, f, k, tol)?, name));
                    }
                    out.push(af_local_witness(&g, &[0.3, -0.2, 0.5], 0.7, k, tol)?);
                }
            }
            "spectral_gap" => {
                for k in 1..=n {
                    for (name, f) in &fns {
                        out.push(tag(spectral_gap(&g, f, k, tol)?, name));
                    }
                    out.push(spectral_gap_witness(&g, &[0.3, -0.2, 0.5], k, tol)?);
                }
            }
            "main_lemma" => {
                for k in 1..=n {
                    out.push(main_lemma(&g, k, tol)?);
                }
            }
            "affine_identity" => out.push(affine_identity(&g, tol)?),
            "poincare" => {
                out.push(tag(poincare(h, tol), "h"));
                for (name, f) in &fns {
                    out.push(tag(poincare(f, tol), name));
                }
            }
            "xi_identity" => {
                let m = [[0.7, 0.2, -0.1], [0.4, -0.3, 0.5], [0.1, 0.6, 0.2]];
                out.push(xi_identity(&g, &m, tol)?);
            }
            "p_chain" => {
                for p in [-(n as f64) - 1.0, -1.0, 0.0, 2.0] {
                    out.push(tag(p_chain(&g, p, tol)?, &format!("p{p}")));
                }
            }
            "theorem11_chain" => out.extend(theorem11_chain(&g, tol)),
            "battery" => out.extend(battery(&g, opts.seed, opts.battery, tol)?),
            other => return Err(Error::InvalidSpec(format!("unknown check family `{other}`"))),
        }
    }
    Ok(out)
}

/// Random `(f, k)` cases of the inequalities that hold for every `f`.
pub fn battery(g: &BodyGeometry, seed: u64, count: usize, tol: &Tolerances) -> Result<Vec<SlackReport>> {
    let n = g.dim();
    let grid = g.grid();
    let mut out = Vec::with_capacity(3 * count);
    for case in 0..count {
        let s = seed.wrapping_mul(1_000_003).wrapping_add(case as u64);
        let f = random_test_function(s, grid, 4);
        let k = 1 + case % n;
        let label = format!("case{case}");
        out.push(tag(af_local(g, &f, k, tol)?, &label));
        out.push(tag(spectral_gap(g, &f, k, tol)?, &label));
        out.push(tag(poincare(&f, tol), &label));
    }
    for r in &mut out {
        r.name = format!("battery.{}", r.name);
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::{build_grid, Resolution};
    use crate::zoo::make_random;
    use std::f64::consts::PI;

    fn s2() -> Arc<Grid> {
        build_grid(2, Resolution::Sphere { n_theta: 32, n_phi: 64 }).unwrap()
    }

    fn tol() -> Tolerances {
        Tolerances::default()
    }

    #[test]
    fn ball_equalities() {
        let g = s2();
        let geo = assemble(&ScalarField::constant(&g, 1.0)).unwrap();
        let f = ScalarField::from_fn(&g, |x| x[0]);
        let r = af_local(&geo, &f, 2, &tol()).unwrap();
        assert!(r.slack.unwrap().abs() < 1e-10);
        let r = spectral_gap(&geo, &f, 2, &tol()).unwrap();
        assert!(r.slack.unwrap().abs() < 1e-10, "{r:?}");
        for k in 1..=2 {
            let r = main_lemma(&geo, k, &tol()).unwrap();
            assert!(r.slack.unwrap().abs() < 1e-10);
        }
        let r = affine_identity(&geo, &tol()).unwrap();
        assert!(r.lhs.abs() < 1e-12 && r.rhs.abs() < 1e-12);
    }

    #[test]
    fn degree_two_ratio() {
        let g = s2();
        let geo = assemble(&ScalarField::constant(&g, 1.0)).unwrap();
        let f = ScalarField::from_fn(&g, |x| 3.0 * x[2] * x[2] - 1.0);
        let r = spectral_gap(&geo, &f, 2, &tol()).unwrap();
        assert!((r.rhs / r.lhs - 3.0).abs() < 1e-10);
        let r = af_local(&geo, &f, 2, &tol()).unwrap();
        assert!(r.slack.unwrap() > 1e-3);
    }

    #[test]
    fn poincare_cases() {
        let g = s2();
        let lin = ScalarField::from_fn(&g, |x| 1.0 + 0.3 * x[0] - 0.2 * x[2]);
        assert!(poincare_equality(&lin, &tol()).slack.unwrap().abs() < 1e-10);
        let q = poincare(&ScalarField::from_fn(&g, |x| x[2] * x[2]), &tol());
        assert!((q.lhs - 32.0 * PI / 45.0).abs() < 1e-10);
        assert!((q.rhs - 32.0 * PI / 15.0).abs() < 1e-10);
        let c = poincare(&ScalarField::constant(&g, 2.0), &tol());
        assert!(c.lhs.abs() < 1e-20 && c.rhs.abs() < 1e-20);
    }

    #[test]
    fn shifted_ball_affine_values() {
        let g = s2();
        let geo = assemble(&ScalarField::from_fn(&g, |x| 1.0 + 0.2 * x[0])).unwrap();
        let r = affine_identity(&geo, &tol()).unwrap();
        assert!((r.lhs - 1.28 * PI / 3.0).abs() < 1e-10);
        assert!((r.rhs - 5.12 * PI / 9.0).abs() < 1e-10);
        assert!(r.residual.unwrap() < 1e-10);
    }

    #[test]
    fn random_body_checks_pass() {
        let g = s2();
        let h = make_random(7, &g, 0.3, 4);
        let opts = SuiteOptions { families: parse_suite("all").unwrap(), seed: 1, battery: 6, tol: tol() };
        for r in run_suite(&h, &opts).unwrap() {
            assert!(r.passed(), "{r:?}");
        }
    }

    #[test]
    fn p_chain_calabi_vanishes() {
        let g = s2();
        let geo = assemble(&make_random(5, &g, 0.3, 4)).unwrap();
        let r = p_chain(&geo, -3.0, &tol()).unwrap();
        assert!(r.extras["integral_x_norm"] < 1e-10);
        assert!(r.slack.is_none());
    }

    #[test]
    fn saroglou_on_ball() {
        use crate::phi::{Lifted, PhiPreset};
        let g = s2();
        // hσ_2 = c·h·e^{|X|²/2} on a ball of radius r needs r² = c·e^{r²/2}
        let r2: f64 = 0.5;
        let c = r2 * (-0.5 * r2).exp();
        let geo = assemble(&ScalarField::constant(&g, r2.sqrt())).unwrap();
        let psi = Lifted { inner: PhiPreset::Gaussian { c }, n: 2 };
        let rep = saroglou_sign(&geo, &psi, &tol()).unwrap();
        assert!(rep.slack.is_some());
        assert!(rep.passed(), "{rep:?}");
    }
}
