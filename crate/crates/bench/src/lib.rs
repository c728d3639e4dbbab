//! Fixtures shared by the benchmarks.

use std::sync::Arc;

use isoflow::grid::Grid;
use isoflow::zoo::make_random;
use isoflow::{build_grid, Resolution, ScalarField};

/// Sphere grid with `n_theta × 2n_theta` nodes.
pub fn sphere(n_theta: usize) -> Arc<Grid> {
    build_grid(2, Resolution::Sphere { n_theta, n_phi: 2 * n_theta }).expect("valid resolution")
}

/// Seeded asymmetric body used by every benchmark.
pub fn body(grid: &Arc<Grid>, seed: u64) -> ScalarField {
    make_random(seed, grid, 0.2, 4)
}

#[cfg(test)]
mod tests {
    #[test]
    fn fixtures_are_convex() {
        let g = super::sphere(16);
        assert!(isoflow::assemble(&super::body(&g, 1)).is_ok());
    }
}
