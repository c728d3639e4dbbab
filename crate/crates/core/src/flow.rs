//! Normalised flows `h ← h(1 + δ)` whose fixed points are the solutions of
//! isotropic curvature equations, plus certification of the limits.

use std::fmt;
use std::str::FromStr;

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::calculus::{assemble, BodyGeometry};
use crate::config::Tolerances;
use crate::error::Error;
use crate::grid::{dot3, HelmholtzSolver, ScalarField};
use crate::inequality::{main_lemma_equality, p_chain, saroglou_sign, theorem11_chain};
use crate::integral::{body_volume, centre_of_mass, recentre};
use crate::phi::{Lifted, Nonlinearity, PhiPreset};
use crate::report::{CheckKind, SlackReport};

/// Which isotropic equation is solved.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "snake_case")]
pub enum Family {
    /// `K^α = h`.
    GaussPower { alpha: f64 },
    /// `K = h^{1−p}`.
    Lp { p: f64 },
    /// `hσ_k = φ(h, |Dh|)`.
    SigmaK { k: usize, phi: PhiPreset },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Centering {
    None,
    Recenter,
}

/// An equation together with the centring policy of its flow.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ProblemSpec {
    pub family: Family,
    pub centering: Centering,
}

/// Shape the solutions of a problem are known to have.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Limit {
    Sphere,
    Ellipsoid,
}

impl ProblemSpec {
    /// Uses the default centring: none for `K^α = h`, recentring otherwise.
    pub fn new(family: Family) -> Self {
        let centering = match family {
            Family::GaussPower { .. } => Centering::None,
            _ => Centering::Recenter,
        };
        Self { family, centering }
    }

    pub fn with_centering(self, centering: Centering) -> Self {
        Self { centering, ..self }
    }

    /// Order of the curvature function the equation prescribes.
    pub fn order(&self, n: usize) -> usize {
        match self.family {
            Family::SigmaK { k, .. } => k,
            _ => n,
        }
    }

    /// `K = h^{1−p}` exponent equivalent to the family, if any.
    pub fn lp_exponent(&self) -> Option<f64> {
        match self.family {
            Family::GaussPower { alpha } => Some(1.0 - 1.0 / alpha),
            Family::Lp { p } => Some(p),
            Family::SigmaK { .. } => None,
        }
    }

    pub fn expected_limit(&self, n: usize) -> Limit {
        match self.lp_exponent() {
            Some(p) if (p + (n + 1) as f64).abs() < 1e-12 => Limit::Ellipsoid,
            _ => Limit::Sphere,
        }
    }

    /// Hypotheses of the uniqueness results that the parameters violate.
    pub fn hypothesis_violations(&self, n: usize) -> Vec<String> {
        let nf = n as f64;
        let mut out = Vec::new();
        match self.family {
            Family::GaussPower { alpha } => {
                let in_range = (1.0 / (nf + 2.0) - 1e-12..=0.5 + 1e-12).contains(&alpha);
                if !in_range && (alpha - 1.0).abs() > 1e-12 {
                    out.push(format!("alpha = {alpha} is neither 1 nor in [1/(n+2), 1/2]"));
                }
            }
            Family::Lp { p } => {
                if p < -(nf + 1.0) - 1e-12 {
                    out.push(format!("p = {p} < -(n+1)"));
                }
                if p > -1.0 && self.centering == Centering::None {
                    out.push(format!("p = {p} > -1 without centring"));
                }
            }
            Family::SigmaK { k, phi } => {
                if k == 0 || k > n {
                    out.push(format!("k = {k} outside 1..={n}"));
                }
                match phi {
                    PhiPreset::Power { a, b, c } => {
                        if k as f64 - 1.0 + a < 0.0 {
                            out.push(format!("k - 1 + a = {} < 0", k as f64 - 1.0 + a));
                        }
                        if b < 0.0 || c <= 0.0 {
                            out.push("phi is decreasing in |Dh|".into());
                        }
                    }
                    PhiPreset::Gaussian { c } => {
                        if c <= 0.0 {
                            out.push("c must be positive".into());
                        }
                    }
                }
            }
        }
        out
    }
}

impl fmt::Display for ProblemSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.family {
            Family::GaussPower { alpha } => write!(f, "gauss_power:alpha={alpha}")?,
            Family::Lp { p } => write!(f, "lp:p={p}")?,
            Family::SigmaK { k, phi: PhiPreset::Power { a, b, c } } => {
                write!(f, "sigma_k:k={k},phi=power,a={a},b={b},c={c}")?
            }
            Family::SigmaK { k, phi: PhiPreset::Gaussian { c } } => write!(f, "sigma_k:k={k},phi=gaussian,c={c}")?,
        }
        if *self != Self::new(self.family) {
            let c = match self.centering {
                Centering::None => "none",
                Centering::Recenter => "recenter",
            };
            write!(f, ",centering={c}")?;
        }
        Ok(())
    }
}

impl FromStr for ProblemSpec {
    type Err = Error;

    /// Parses `family:key=value,...`, e.g. `lp:p=-2` or
    /// `sigma_k:k=1,phi=power,a=1,b=0`. `centering=none|recenter` is accepted
    /// for every family.
    fn from_str(s: &str) -> Result<Self, Error> {
        let bad = |m: String| Error::InvalidProblem(format!("{s}: {m}"));
        let (name, rest) = s.trim().split_once(':').unwrap_or((s.trim(), ""));
        let mut kv = std::collections::BTreeMap::new();
        for part in rest.split(',').map(str::trim).filter(|p| !p.is_empty()) {
            let (k, v) = part.split_once('=').ok_or_else(|| bad(format!("`{part}` is not key=value")))?;
            if kv.insert(k.trim().to_string(), v.trim().to_string()).is_some() {
                return Err(bad(format!("duplicate key `{}`", k.trim())));
            }
        }
        let mut take = |key: &str| kv.remove(key);
        let num = |key: &str, v: Option<String>| -> Result<Option<f64>, Error> {
            v.map(|v| {
                v.parse::<f64>()
                    .ok()
                    .filter(|x| x.is_finite())
                    .ok_or_else(|| bad(format!("`{key}` must be a finite number")))
            })
            .transpose()
        };
        let centering = match take("centering").as_deref() {
            None => None,
            Some("none") => Some(Centering::None),
            Some("recenter") => Some(Centering::Recenter),
            Some(o) => return Err(bad(format!("unknown centering `{o}`"))),
        };
        let family = match name {
            "gauss_power" => {
                let alpha = num("alpha", take("alpha"))?.ok_or_else(|| bad("missing `alpha`".into()))?;
                if alpha <= 0.0 {
                    return Err(bad("`alpha` must be positive".into()));
                }
                Family::GaussPower { alpha }
            }
            "lp" => Family::Lp { p: num("p", take("p"))?.ok_or_else(|| bad("missing `p`".into()))? },
            "sigma_k" => {
                let k = take("k")
                    .ok_or_else(|| bad("missing `k`".into()))?
                    .parse::<usize>()
                    .ok()
                    .filter(|&k| k >= 1)
                    .ok_or_else(|| bad("`k` must be a positive integer".into()))?;
                let c = num("c", take("c"))?.unwrap_or(1.0);
                if c <= 0.0 {
                    return Err(bad("`c` must be positive".into()));
                }
                let phi = match take("phi").as_deref() {
                    Some("power") => PhiPreset::Power {
                        a: num("a", take("a"))?.unwrap_or(0.0),
                        b: num("b", take("b"))?.unwrap_or(0.0),
                        c,
                    },
                    Some("gaussian") => PhiPreset::Gaussian { c },
                    Some(o) => return Err(bad(format!("unknown phi `{o}`"))),
                    None => return Err(bad("missing `phi`".into())),
                };
                Family::SigmaK { k, phi }
            }
            o => return Err(bad(format!("unknown family `{o}`"))),
        };
        if let Some(k) = kv.keys().next() {
            return Err(bad(format!("unexpected key `{k}`")));
        }
        let spec = Self::new(family);
        Ok(centering.map_or(spec, |c| spec.with_centering(c)))
    }
}

/// `R = log G − log h`, vanishing exactly at solutions.
///
/// * `K^α = h`: `R = −α log σ_n − log h`
/// * `K = h^{1−p}`: `R = log σ_n − (p − 1) log h`
/// * `hσ_k = φ`: `R = log(φ/σ_k) − log h`
pub fn residual_field(g: &BodyGeometry, prob: &ProblemSpec) -> Result<ScalarField, Error> {
    let n = g.dim();
    let k = prob.order(n);
    if k == 0 || k > n {
        return Err(Error::InvalidProblem(format!("order k = {k} outside 1..={n}")));
    }
    let s = g.sigma(k).values();
    let h = g.h.values();
    let mut out = Vec::with_capacity(h.len());
    for i in 0..h.len() {
        let r = match prob.family {
            Family::GaussPower { alpha } => -alpha * s[i].ln() - h[i].ln(),
            Family::Lp { p } => s[i].ln() - (p - 1.0) * h[i].ln(),
            Family::SigmaK { phi, .. } => {
                let v = phi.value(h[i], g.abs_x.values()[i]);
                if !(v.is_finite() && v > 0.0) {
                    return Err(Error::NonFiniteNonlinearity { node: i });
                }
                (v / s[i]).ln() - h[i].ln()
            }
        };
        if !r.is_finite() {
            return Err(Error::NonFiniteNonlinearity { node: i });
        }
        out.push(r);
    }
    ScalarField::new(g.grid().clone(), out)
}

/// Orientation and linearised rates of a problem at the current state.
#[derive(Debug, Clone, Copy)]
struct Rates {
    /// Sign making `s·R` elliptic of positive order.
    s: f64,
    /// `dR/d log r` along dilations of a ball.
    dilation: f64,
    /// Growth rate of degree-one modes of `s·R` at a ball.
    degree_one: f64,
}

fn rates(g: &BodyGeometry, prob: &ProblemSpec) -> Rates {
    let n = g.dim() as f64;
    match prob.family {
        Family::GaussPower { alpha } => {
            Rates { s: -1.0 / alpha, dilation: -(alpha * n + 1.0), degree_one: 1.0 / alpha }
        }
        Family::Lp { p } => Rates { s: 1.0, dilation: n - p + 1.0, degree_one: 1.0 - p },
        Family::SigmaK { k, phi: PhiPreset::Power { a, b, .. } } => {
            Rates { s: -1.0, dilation: a + b - k as f64 - 1.0, degree_one: 1.0 - a - b }
        }
        Family::SigmaK { k, phi: PhiPreset::Gaussian { .. } } => {
            let grid = g.grid();
            let x2: Vec<f64> = g.x.iter().map(|x| dot3(x, x)).collect();
            let mean = grid.integrate_values(&x2) / grid.total_measure();
            Rates { s: -1.0, dilation: mean - k as f64, degree_one: -mean }
        }
    }
}

/// Largest time step the dilation and degree-one modes tolerate.
fn dt_cap(r: &Rates) -> f64 {
    0.5 / r.dilation.abs().max(r.degree_one.abs()).max(1.0)
}

/// `max h·λ_max(σ_k^{ij})/σ_k`, the principal symbol bound of `s·R`.
fn ellipticity(g: &BodyGeometry, k: usize) -> f64 {
    let sg = &g.sigma_grad(k).comps;
    let s = g.sigma(k).values();
    (0..s.len()).map(|i| g.h.values()[i] * sg[i].eigenvalues()[1] / s[i]).fold(0.0, f64::max)
}

/// One unconditioned update of `h` by `dt`, before acceptance tests and centring.
///
/// `δ = dt·[P⁻¹(s(R − R̄) ∓ 2Π₁) − sign(D)·R̄]` with `P = I − dt·γ·Δ̄`, where
/// `R̄` is the mean of `R`, `D` the dilation rate, `Π₁` the degree-one part of
/// `s(R − R̄)` (flipped when those modes grow and no recentring removes them) and `γ` bounds the ellipticity.
/// The direction and the increment `hδ` are both projected onto the resolved harmonics.
pub fn raw_update(g: &BodyGeometry, r: &ScalarField, prob: &ProblemSpec, dt: f64) -> Result<ScalarField, Error> {
    let grid = g.grid();
    let n = g.dim();
    let rt = rates(g, prob);
    let total = grid.total_measure();
    let mean = grid.integrate_values(r.values()) / total;
    let mut u: Vec<f64> = r.values().iter().map(|v| rt.s * (v - mean)).collect();
    if rt.degree_one > 0.0 && prob.centering == Centering::None {
        let xu: Vec<[f64; 3]> = grid.nodes().iter().zip(&u).map(|(x, v)| [x[0] * v, x[1] * v, x[2] * v]).collect();
        let c = grid.integrate_vectors(&xu);
        let scale = (n + 1) as f64 / total;
        let c = [c[0] * scale, c[1] * scale, c[2] * scale];
        for (v, x) in u.iter_mut().zip(grid.nodes()) {
            *v -= 2.0 * dot3(&c, x);
        }
    }
    let gamma = ellipticity(g, prob.order(n));
    let u = HelmholtzSolver::new(grid, dt * gamma).solve(&grid.dealias(&u));
    let kappa = if rt.dilation > 0.0 { -1.0 } else { 1.0 };
    let dh: Vec<f64> = g.h.values().iter().zip(&u).map(|(h, v)| h * dt * (v + kappa * mean)).collect();
    let dh = grid.dealias(&dh);
    ScalarField::new(grid.clone(), g.h.values().iter().zip(&dh).map(|(h, d)| h + d).collect())
}

/// `min_r ‖h − r‖∞ / r`.
pub fn sphere_distance(h: &ScalarField) -> f64 {
    let (lo, hi) = (h.min(), h.max());
    (hi - lo) / (hi + lo)
}

/// Least-squares quadratic form `M` fitted to `h²`, with the relative
/// sup-norm misfit `‖h² − xᵀMx‖∞ / ‖h²‖∞`.
pub fn ellipsoid_fit(h: &ScalarField) -> (DMatrix<f64>, f64) {
    let grid = h.grid();
    let d = grid.dim() + 1;
    let pairs: Vec<(usize, usize)> = (0..d).flat_map(|i| (i..d).map(move |j| (i, j))).collect();
    let m = pairs.len();
    let mut ata = DMatrix::<f64>::zeros(m, m);
    let mut atb = DVector::<f64>::zeros(m);
    let h2: Vec<f64> = h.values().iter().map(|v| v * v).collect();
    for ((x, w), y) in grid.nodes().iter().zip(grid.weights()).zip(&h2) {
        let row: Vec<f64> = pairs.iter().map(|&(i, j)| x[i] * x[j]).collect();
        for a in 0..m {
            atb[a] += w * row[a] * y;
            for b in 0..m {
                ata[(a, b)] += w * row[a] * row[b];
            }
        }
    }
    let coef = ata.clone().cholesky().map(|c| c.solve(&atb)).unwrap_or_else(|| {
        ata.svd(true, true).solve(&atb, 1e-14).expect("SVD was computed with both factors")
    });
    let mut mat = DMatrix::<f64>::zeros(d, d);
    for (c, &(i, j)) in coef.iter().zip(&pairs) {
        if i == j {
            mat[(i, i)] = *c;
        } else {
            mat[(i, j)] = c / 2.0;
            mat[(j, i)] = c / 2.0;
        }
    }
    let sup = h2.iter().fold(0.0f64, |a, v| a.max(v.abs()));
    let err = grid
        .nodes()
        .iter()
        .zip(&h2)
        .map(|(x, y)| {
            let q: f64 = (0..d).flat_map(|i| (0..d).map(move |j| (i, j))).map(|(i, j)| x[i] * mat[(i, j)] * x[j]).sum();
            (y - q).abs()
        })
        .fold(0.0, f64::max);
    (mat, err / sup)
}

/// `min_M ‖h² − xᵀMx‖∞ / ‖h²‖∞` over the least-squares fit; infinite when the
/// fitted form is not positive definite.
pub fn ellipsoid_distance(h: &ScalarField) -> f64 {
    let (m, err) = ellipsoid_fit(h);
    if m.cholesky().is_some() {
        err
    } else {
        f64::INFINITY
    }
}

/// Adaptive time-stepping parameters.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FlowConfig {
    /// Initial step; `0.1/(1 + ‖R‖∞)` when absent.
    pub dt0: Option<f64>,
    /// Stop once `‖R‖∞ < tol`.
    pub tol: f64,
    pub max_steps: usize,
}

impl Default for FlowConfig {
    fn default() -> Self {
        Self { dt0: None, tol: 1e-8, max_steps: 2000 }
    }
}

const MAX_HALVINGS: usize = 30;
const GROWTH_AFTER: usize = 10;
const GROWTH: f64 = 1.2;

/// Current iterate of a flow.
#[derive(Debug, Clone)]
pub struct FlowState {
    pub h: ScalarField,
    pub t: f64,
    pub steps: usize,
    /// Step size to try next.
    pub dt: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TraceRow {
    pub step: usize,
    pub t: f64,
    pub residual_inf: f64,
    pub margin: f64,
    pub volume: f64,
    pub centroid_norm: f64,
    pub sphere_dist: f64,
    pub ellipsoid_dist: f64,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct FlowTrace {
    pub rows: Vec<TraceRow>,
}

impl FlowTrace {
    pub const HEADER: &'static str = "step,t,residual_inf,margin,volume,centroid_norm,sphere_dist,ellipsoid_dist";

    pub fn to_csv(&self) -> String {
        let mut s = String::from(Self::HEADER);
        s.push('\n');
        for r in &self.rows {
            s.push_str(&format!(
                "{},{},{},{},{},{},{},{}\n",
                r.step, r.t, r.residual_inf, r.margin, r.volume, r.centroid_norm, r.sphere_dist, r.ellipsoid_dist
            ));
        }
        s
    }

    pub fn last(&self) -> Option<&TraceRow> {
        self.rows.last()
    }
}

fn trace_row(step: usize, t: f64, g: &BodyGeometry, r: &ScalarField) -> TraceRow {
    let c = centre_of_mass(g);
    TraceRow {
        step,
        t,
        residual_inf: r.sup_norm(),
        margin: g.convexity_margin(),
        volume: body_volume(g),
        centroid_norm: dot3(&c, &c).sqrt(),
        sphere_dist: sphere_distance(&g.h),
        ellipsoid_dist: ellipsoid_distance(&g.h),
    }
}

#[derive(Debug, Error)]
pub enum FlowError {
    #[error(transparent)]
    Geometry(#[from] Error),
    #[error("no convergence after {steps} steps, residual {residual:e}")]
    NoConvergence { steps: usize, residual: f64, trace: Box<FlowTrace>, state: Box<FlowState> },
    #[error("time step collapsed at step {step} (t = {t}, dt = {dt:e})")]
    StepCollapse { step: usize, t: f64, dt: f64, trace: Box<FlowTrace>, state: Box<FlowState> },
}

impl FlowError {
    pub fn trace(&self) -> Option<&FlowTrace> {
        match self {
            Self::NoConvergence { trace, .. } | Self::StepCollapse { trace, .. } => Some(trace),
            Self::Geometry(_) => None,
        }
    }

    pub fn state(&self) -> Option<&FlowState> {
        match self {
            Self::NoConvergence { state, .. } | Self::StepCollapse { state, .. } => Some(state),
            Self::Geometry(_) => None,
        }
    }
}

struct Iterate {
    g: BodyGeometry,
    r: ScalarField,
}

impl Iterate {
    fn new(h: &ScalarField, prob: &ProblemSpec) -> Result<Self, Error> {
        let g = assemble(h)?;
        let r = residual_field(&g, prob)?;
        Ok(Self { g, r })
    }
}

fn centred(h: ScalarField, prob: &ProblemSpec) -> Result<ScalarField, Error> {
    match prob.centering {
        Centering::None => Ok(h),
        Centering::Recenter => recentre(&h),
    }
}

/// Tries `dt`, halving on loss of convexity or growth of `‖R‖∞`.
/// Returns the accepted iterate and the step actually taken.
fn advance(cur: &Iterate, prob: &ProblemSpec, mut dt: f64) -> Option<(Iterate, f64)> {
    let bound = cur.r.sup_norm() + 1e-12;
    for _ in 0..=MAX_HALVINGS {
        let next = raw_update(&cur.g, &cur.r, prob, dt)
            .and_then(|h| centred(h, prob))
            .and_then(|h| Iterate::new(&h, prob));
        if let Ok(it) = next {
            if it.r.sup_norm() <= bound {
                return Some((it, dt));
            }
        }
        dt *= 0.5;
    }
    None
}

/// One accepted step from `state`, starting at step size `dt`.
///
/// A zero residual leaves `h` unchanged.
pub fn step(state: &FlowState, prob: &ProblemSpec, dt: f64) -> Result<FlowState, FlowError> {
    let cur = Iterate::new(&state.h, prob)?;
    match advance(&cur, prob, dt) {
        Some((it, used)) => Ok(FlowState { h: it.g.h, t: state.t + used, steps: state.steps + 1, dt: used }),
        None => Err(FlowError::StepCollapse {
            step: state.steps,
            t: state.t,
            dt: dt * 0.5f64.powi(MAX_HALVINGS as i32),
            trace: Box::default(),
            state: Box::new(state.clone()),
        }),
    }
}

/// Result of a converged flow.
#[derive(Debug, Clone)]
pub struct FlowOutcome {
    pub state: FlowState,
    pub geometry: BodyGeometry,
    pub residual: ScalarField,
    pub trace: FlowTrace,
}

/// Iterates [`step`] until `‖R‖∞ < tol`, recording one trace row per accepted step.
pub fn run(body: &ScalarField, prob: &ProblemSpec, cfg: &FlowConfig) -> Result<FlowOutcome, FlowError> {
    let h0 = centred(body.clone(), prob)?;
    let mut cur = Iterate::new(&h0, prob)?;
    let mut trace = FlowTrace::default();
    let mut t = 0.0;
    let mut dt = cfg.dt0.unwrap_or(0.1 / (1.0 + cur.r.sup_norm()));
    let mut streak = 0;
    trace.rows.push(trace_row(0, t, &cur.g, &cur.r));
    for steps in 0..=cfg.max_steps {
        if cur.r.sup_norm() < cfg.tol {
            return Ok(FlowOutcome {
                state: FlowState { h: cur.g.h.clone(), t, steps, dt },
                residual: cur.r,
                geometry: cur.g,
                trace,
            });
        }
        if steps == cfg.max_steps {
            break;
        }
        dt = dt.min(dt_cap(&rates(&cur.g, prob)));
        match advance(&cur, prob, dt) {
            Some((next, used)) => {
                streak = if used < dt { 0 } else { streak + 1 };
                dt = used;
                t += used;
                cur = next;
                trace.rows.push(trace_row(steps + 1, t, &cur.g, &cur.r));
                if streak >= GROWTH_AFTER {
                    dt *= GROWTH;
                    streak = 0;
                }
            }
            None => {
                return Err(FlowError::StepCollapse {
                    step: steps,
                    t,
                    dt: dt * 0.5f64.powi(MAX_HALVINGS as i32),
                    trace: Box::new(trace),
                    state: Box::new(FlowState { h: cur.g.h, t, steps, dt }),
                })
            }
        }
    }
    Err(FlowError::NoConvergence {
        steps: cfg.max_steps,
        residual: cur.r.sup_norm(),
        trace: Box::new(trace),
        state: Box::new(FlowState { h: cur.g.h, t, steps: cfg.max_steps, dt }),
    })
}

/// Checks a converged body against the uniqueness statements of its problem.
pub fn certify(g: &BodyGeometry, prob: &ProblemSpec, tol: &Tolerances) -> Result<Vec<SlackReport>, Error> {
    let n = g.dim();
    let mut out = Vec::new();
    let stamp = |r: SlackReport, t: f64| r.with_body(g.label(), g.grid().resolution()).with_tol(t);
    let residual = residual_field(g, prob)?.sup_norm();
    out.push(stamp(
        SlackReport::new("certify.residual", CheckKind::Identity, residual, 0.0).with_residual(residual),
        tol.precondition,
    ));
    match prob.expected_limit(n) {
        Limit::Sphere => {
            let d = sphere_distance(&g.h);
            out.push(stamp(SlackReport::new("certify.sphere_distance", CheckKind::Equality, d, 0.0).with_slack(d), tol.grid));
        }
        Limit::Ellipsoid => {
            let d = ellipsoid_distance(&g.h);
            out.push(stamp(
                SlackReport::new("certify.ellipsoid_distance", CheckKind::Equality, d, 0.0).with_slack(d),
                10.0 * tol.grid,
            ));
            out.push(main_lemma_equality(g, n, tol)?);
        }
    }
    if let Family::GaussPower { alpha } = prob.family {
        if (alpha - 1.0).abs() < 1e-12 {
            out.extend(theorem11_chain(g, tol));
            let dev = g.h.values().iter().fold(0.0f64, |m, h| m.max((h - 1.0).abs()));
            out.push(stamp(SlackReport::new("certify.unit_sphere", CheckKind::Equality, dev, 0.0).with_slack(dev), tol.grid));
        }
    }
    if let Some(p) = prob.lp_exponent() {
        out.push(p_chain(g, p, tol)?);
    }
    if let Family::SigmaK { phi, .. } = prob.family {
        out.push(saroglou_sign(g, &Lifted { inner: phi, n }, tol)?);
    }
    Ok(out)
}
