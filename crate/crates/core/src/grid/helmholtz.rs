use std::sync::Arc;

use nalgebra::{DMatrix, DVector, Dyn, LU};
use rustfft::num_complex::Complex;
use rustfft::{Fft, FftPlanner};

use super::Grid;

/// Solver for `(I − c Δ̄_h) u = f`, with `Δ̄_h` the grid's discrete Laplacian.
///
/// The discrete Laplacian commutes with rotations in longitude, so each
/// Fourier mode in φ decouples: on S¹ the system is diagonal, on S² it is one
/// `n_theta × n_theta` system per mode (pole continuation contributes a sign
/// `(−1)^m`). With spectral derivatives the operator is diagonal in the
/// harmonic basis.
pub struct HelmholtzSolver {
    grid: Arc<Grid>,
    coeff: f64,
    forward: Arc<dyn Fft<f64>>,
    inverse: Arc<dyn Fft<f64>>,
    modes: Modes,
}

enum Modes {
    Spectral,
    Circle(Vec<f64>),
    Sphere(Vec<LU<f64, Dyn, Dyn>>),
}

impl HelmholtzSolver {
    pub fn new(grid: &Arc<Grid>, coeff: f64) -> Self {
        let np = grid.n_phi();
        let mut planner = FftPlanner::new();
        let forward = planner.plan_fft_forward(np);
        let inverse = planner.plan_fft_inverse(np);
        let (_, w2) = grid.phi_weights();
        let symbol = |m: usize| -> f64 {
            let d = 2.0 * std::f64::consts::PI * m as f64 / np as f64;
            (0..5).map(|k| w2[k] * ((k as f64 - 2.0) * d).cos()).sum()
        };
        let modes = if grid.spectral_ops().is_some() {
            Modes::Spectral
        } else if grid.dim() == 1 {
            Modes::Circle((0..=np / 2).map(|m| 1.0 - coeff * symbol(m)).collect())
        } else {
            let nt = grid.n_theta();
            let lus = (0..=np / 2)
                .map(|m| {
                    let sign = if m % 2 == 0 { 1.0 } else { -1.0 };
                    let s2 = symbol(m);
                    let mut a = DMatrix::<f64>::identity(nt, nt);
                    for i in 0..nt {
                        let (rings, d1, d2) = grid.theta_stencil(i);
                        let cot = grid.cot_theta_ring(i);
                        for k in 0..5 {
                            let (r, flip) = rings[k];
                            let w = d2[k] + cot * d1[k];
                            a[(i, r)] -= coeff * w * if flip { sign } else { 1.0 };
                        }
                        let s = grid.sin_theta_ring(i);
                        a[(i, i)] -= coeff * s2 / (s * s);
                    }
                    a.lu()
                })
                .collect();
            Modes::Sphere(lus)
        };
        Self { grid: grid.clone(), coeff, forward, inverse, modes }
    }

    pub fn coeff(&self) -> f64 {
        self.coeff
    }

    pub fn solve(&self, rhs: &[f64]) -> Vec<f64> {
        let np = self.grid.n_phi();
        let nt = self.grid.n_theta();
        assert_eq!(rhs.len(), np * nt);
        if let (Modes::Spectral, Some(sp)) = (&self.modes, self.grid.spectral_ops()) {
            let n = self.grid.dim() as f64;
            let c = self.coeff;
            return if self.grid.dim() == 1 {
                sp.filter(rhs, |m| 1.0 / (1.0 + c * (m * m) as f64))
            } else {
                sp.filter(rhs, |l| 1.0 / (1.0 + c * l as f64 * (l as f64 + n - 1.0)))
            };
        }
        let mut spec: Vec<Vec<Complex<f64>>> = (0..nt)
            .map(|i| {
                let mut row: Vec<Complex<f64>> =
                    rhs[i * np..(i + 1) * np].iter().map(|&v| Complex::new(v, 0.0)).collect();
                self.forward.process(&mut row);
                row
            })
            .collect();

        match &self.modes {
            Modes::Circle(den) => {
                for m in 0..np {
                    spec[0][m] /= den[m.min(np - m)];
                }
            }
            Modes::Spectral => unreachable!(),
            Modes::Sphere(lus) => {
                for m in 0..np {
                    let lu = &lus[m.min(np - m)];
                    let re = DVector::from_iterator(nt, (0..nt).map(|i| spec[i][m].re));
                    let im = DVector::from_iterator(nt, (0..nt).map(|i| spec[i][m].im));
                    let re = lu.solve(&re).expect("Helmholtz block is singular");
                    let im = lu.solve(&im).expect("Helmholtz block is singular");
                    for i in 0..nt {
                        spec[i][m] = Complex::new(re[i], im[i]);
                    }
                }
            }
        }

        let mut out = Vec::with_capacity(rhs.len());
        for row in spec.iter_mut() {
            self.inverse.process(row);
            out.extend(row.iter().map(|c| c.re / np as f64));
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::{build_grid_with, laplacian, DiffMethod, Resolution, ScalarField};

    fn check(grid: Arc<Grid>) {
        let c = 0.37;
        let f = ScalarField::from_fn(&grid, |x| (1.3 * x[0] + 0.4 * x[1] * x[1]).exp() + x[2]);
        let solver = HelmholtzSolver::new(&grid, c);
        let u = ScalarField::new(grid.clone(), solver.solve(f.values())).unwrap();
        let lu = laplacian(&u);
        for i in 0..grid.len() {
            let back = u.values()[i] - c * lu.values()[i];
            assert!((back - f.values()[i]).abs() < 1e-9, "node {i}: {back} vs {}", f.values()[i]);
        }
    }

    #[test]
    fn inverts_discrete_operator_on_s2() {
        for m in [DiffMethod::Spectral, DiffMethod::FiniteDifference] {
            check(build_grid_with(2, Resolution::Sphere { n_theta: 24, n_phi: 32 }, m).unwrap());
        }
    }

    #[test]
    fn inverts_discrete_operator_on_s1() {
        for m in [DiffMethod::Spectral, DiffMethod::FiniteDifference] {
            check(build_grid_with(1, Resolution::Circle(64), m).unwrap());
        }
    }
}
