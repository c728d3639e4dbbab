//! Spectral differentiation: Fourier in longitude, associated Legendre
//! functions in colatitude.
//!
//! On S² a ring-wise FFT gives longitude modes `m`; each mode is projected
//! onto orthonormal `P̄_ℓ^m(cos θ)` for `m ≤ ℓ ≤ n_theta − 1` with
//! Gauss–Legendre quadrature, which is exact on that band. Derivatives of
//! the projected field follow from closed-form derivatives of `P̄_ℓ^m`.
//! The Nyquist longitude mode is discarded.

use std::fmt;
use std::sync::Arc;

use rustfft::num_complex::Complex;
use rustfft::{Fft, FftPlanner};

type C64 = Complex<f64>;

/// Tables of `P̄_ℓ^m`, `dP̄/dθ` and `d²P̄/dθ²` at the rings for one order `m`.
struct Block {
    /// Number of degrees `ℓ = m..m + nl`.
    nl: usize,
    /// Row-major `n_theta × nl`.
    p: Vec<f64>,
    dp: Vec<f64>,
    d2p: Vec<f64>,
}

pub(crate) struct SpectralOps {
    n_theta: usize,
    n_phi: usize,
    /// Largest retained longitude order.
    m_max: usize,
    gl_weights: Vec<f64>,
    forward: Arc<dyn Fft<f64>>,
    inverse: Arc<dyn Fft<f64>>,
    blocks: Vec<Block>,
}

impl fmt::Debug for SpectralOps {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("SpectralOps")
            .field("n_theta", &self.n_theta)
            .field("n_phi", &self.n_phi)
            .field("m_max", &self.m_max)
            .finish()
    }
}

/// Parametric derivatives; the `θ` entries stay empty on S¹.
pub(crate) struct SpectralOutput {
    pub t: Vec<f64>,
    pub tt: Vec<f64>,
    pub p: Vec<f64>,
    pub pp: Vec<f64>,
    pub tp: Vec<f64>,
}

impl SpectralOps {
    /// Operators for a circle of `n_phi` points (`n_theta = 1`, no Legendre part).
    pub fn circle(n_phi: usize) -> Self {
        let mut planner = FftPlanner::new();
        Self {
            n_theta: 1,
            n_phi,
            m_max: (n_phi - 1) / 2,
            gl_weights: vec![1.0],
            forward: planner.plan_fft_forward(n_phi),
            inverse: planner.plan_fft_inverse(n_phi),
            blocks: Vec::new(),
        }
    }

    /// Operators for a Gauss–Legendre × uniform sphere grid.
    pub fn sphere(cos_theta: &[f64], sin_theta: &[f64], gl_weights: &[f64], n_phi: usize) -> Self {
        let nt = cos_theta.len();
        let l_max = nt - 1;
        let m_max = l_max.min((n_phi - 1) / 2);
        let mut planner = FftPlanner::new();
        let blocks = (0..=m_max).map(|m| legendre_block(m, l_max, cos_theta, sin_theta)).collect();
        Self {
            n_theta: nt,
            n_phi,
            m_max,
            gl_weights: gl_weights.to_vec(),
            forward: planner.plan_fft_forward(n_phi),
            inverse: planner.plan_fft_inverse(n_phi),
            blocks,
        }
    }

    fn rings_to_modes(&self, f: &[f64]) -> Vec<Vec<C64>> {
        let np = self.n_phi;
        (0..self.n_theta)
            .map(|i| {
                let mut row: Vec<C64> = f[i * np..(i + 1) * np].iter().map(|&v| C64::new(v, 0.0)).collect();
                self.forward.process(&mut row);
                row
            })
            .collect()
    }

    fn modes_to_rings(&self, mut spec: Vec<Vec<C64>>) -> Vec<f64> {
        let np = self.n_phi;
        let mut out = Vec::with_capacity(self.n_theta * np);
        for row in spec.iter_mut() {
            self.inverse.process(row);
            out.extend(row.iter().map(|c| c.re / np as f64));
        }
        out
    }

    /// Signed frequency of FFT bin `k`, or `None` if the bin is discarded.
    fn order(&self, k: usize) -> Option<(usize, f64)> {
        let np = self.n_phi;
        let (m, signed) = if k <= np / 2 { (k, k as f64) } else { (np - k, -((np - k) as f64)) };
        (m <= self.m_max && !(np.is_multiple_of(2) && k == np / 2 && k > 0)).then_some((m, signed))
    }

    /// Parametric derivatives `(f_θ, f_θθ, f_φ, f_φφ, f_θφ)`.
    ///
    /// The transform acts on `f − f[0]` so constants give exact zeros.
    pub fn derivs(&self, f: &[f64]) -> SpectralOutput {
        let np = self.n_phi;
        let nt = self.n_theta;
        let shifted: Vec<f64> = f.iter().map(|v| v - f[0]).collect();
        let spec = self.rings_to_modes(&shifted);
        let zero = || vec![vec![C64::new(0.0, 0.0); np]; nt];

        if self.blocks.is_empty() {
            let (mut p, mut pp) = (zero(), zero());
            for k in 0..np {
                if let Some((_, s)) = self.order(k) {
                    p[0][k] = spec[0][k] * C64::new(0.0, s);
                    pp[0][k] = spec[0][k] * (-s * s);
                }
            }
            return SpectralOutput {
                t: Vec::new(),
                tt: Vec::new(),
                p: self.modes_to_rings(p),
                pp: self.modes_to_rings(pp),
                tp: Vec::new(),
            };
        }

        let (mut v, mut t, mut tt) = (zero(), zero(), zero());
        for k in 0..np {
            let Some((m, _)) = self.order(k) else { continue };
            let b = &self.blocks[m];
            let coeffs = self.analyse(b, &spec, k);
            for i in 0..nt {
                let (mut a0, mut a1, mut a2) = (C64::default(), C64::default(), C64::default());
                for (l, c) in coeffs.iter().enumerate() {
                    a0 += c * b.p[i * b.nl + l];
                    a1 += c * b.dp[i * b.nl + l];
                    a2 += c * b.d2p[i * b.nl + l];
                }
                v[i][k] = a0;
                t[i][k] = a1;
                tt[i][k] = a2;
            }
        }
        let (mut p, mut pp, mut tp) = (zero(), zero(), zero());
        for k in 0..np {
            let Some((_, s)) = self.order(k) else { continue };
            for i in 0..nt {
                p[i][k] = v[i][k] * C64::new(0.0, s);
                pp[i][k] = v[i][k] * (-s * s);
                tp[i][k] = t[i][k] * C64::new(0.0, s);
            }
        }
        SpectralOutput {
            t: self.modes_to_rings(t),
            tt: self.modes_to_rings(tt),
            p: self.modes_to_rings(p),
            pp: self.modes_to_rings(pp),
            tp: self.modes_to_rings(tp),
        }
    }

    fn analyse(&self, b: &Block, spec: &[Vec<C64>], k: usize) -> Vec<C64> {
        (0..b.nl)
            .map(|l| {
                (0..self.n_theta).fold(C64::default(), |acc, i| {
                    acc + spec[i][k] * (self.gl_weights[i] * b.p[i * b.nl + l])
                })
            })
            .collect()
    }

    /// Applies `u = f + Σ (g(ℓ) − 1) f̂_ℓm Y_ℓm`: multiplies each retained
    /// harmonic component by `g(ℓ)` and leaves discarded modes unchanged.
    /// On S¹ the degree of bin `m` is `|m|`.
    pub fn filter(&self, f: &[f64], g: impl Fn(usize) -> f64) -> Vec<f64> {
        let np = self.n_phi;
        let nt = self.n_theta;
        let spec = self.rings_to_modes(f);
        let mut corr = vec![vec![C64::new(0.0, 0.0); np]; nt];
        for k in 0..np {
            let Some((m, _)) = self.order(k) else { continue };
            if self.blocks.is_empty() {
                corr[0][k] = spec[0][k] * (g(m) - 1.0);
                continue;
            }
            let b = &self.blocks[m];
            let coeffs = self.analyse(b, &spec, k);
            for (i, row) in corr.iter_mut().enumerate() {
                let mut a = C64::default();
                for (l, c) in coeffs.iter().enumerate() {
                    a += c * ((g(m + l) - 1.0) * b.p[i * b.nl + l]);
                }
                row[k] = a;
            }
        }
        let corr = self.modes_to_rings(corr);
        f.iter().zip(corr).map(|(a, b)| a + b).collect()
    }
}

/// `P̄_ℓ^m` normalised to unit `L²[−1, 1]` norm, with derivatives in `θ`.
fn legendre_block(m: usize, l_max: usize, x: &[f64], s: &[f64]) -> Block {
    let nt = x.len();
    let nl = l_max + 1 - m;
    let mut p = vec![0.0; nt * nl];
    let mut dp = vec![0.0; nt * nl];
    let mut d2p = vec![0.0; nt * nl];
    let mf = m as f64;
    for i in 0..nt {
        let (xi, si) = (x[i], s[i]);
        let mut pmm = std::f64::consts::FRAC_1_SQRT_2;
        for k in 1..=m {
            let kf = k as f64;
            pmm *= ((2.0 * kf + 1.0) / (2.0 * kf)).sqrt() * si;
        }
        let row = &mut p[i * nl..(i + 1) * nl];
        row[0] = pmm;
        if nl > 1 {
            row[1] = (2.0 * mf + 3.0).sqrt() * xi * pmm;
        }
        for j in 2..nl {
            let l = (m + j) as f64;
            let a = ((4.0 * l * l - 1.0) / (l * l - mf * mf)).sqrt();
            let b = (((l - 1.0) * (l - 1.0) - mf * mf) / (4.0 * (l - 1.0) * (l - 1.0) - 1.0)).sqrt();
            row[j] = a * (xi * row[j - 1] - b * row[j - 2]);
        }
        let cot = xi / si;
        for j in 0..nl {
            let l = (m + j) as f64;
            let prev = if j == 0 { 0.0 } else { row[j - 1] };
            let c = if j == 0 { 0.0 } else { ((2.0 * l + 1.0) / (2.0 * l - 1.0) * (l * l - mf * mf)).sqrt() };
            let d1 = (l * xi * row[j] - c * prev) / si;
            dp[i * nl + j] = d1;
            d2p[i * nl + j] = -cot * d1 - (l * (l + 1.0) - mf * mf / (si * si)) * row[j];
        }
    }
    Block { nl, p, dp, d2p }
}
