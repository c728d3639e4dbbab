//! Closed-form reference values computed without the library.

pub type Mat2 = [[f64; 2]; 2];

pub fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / a.abs().max(b.abs()).max(1.0)
}

/// Determinant by cofactor expansion along the first row.
pub fn det(m: &[Vec<f64>]) -> f64 {
    let d = m.len();
    match d {
        0 => 1.0,
        1 => m[0][0],
        _ => (0..d)
            .map(|j| {
                let minor: Vec<Vec<f64>> =
                    m[1..].iter().map(|row| row.iter().enumerate().filter(|&(c, _)| c != j).map(|(_, v)| *v).collect()).collect();
                let sign = if j % 2 == 0 { 1.0 } else { -1.0 };
                sign * m[0][j] * det(&minor)
            })
            .sum(),
    }
}

pub fn identity(n: usize) -> Mat2 {
    let mut m = [[0.0; 2]; 2];
    for (i, row) in m.iter_mut().enumerate().take(n) {
        row[i] = 1.0;
    }
    m
}

/// Elementary symmetric function of the eigenvalues of the leading `n×n` block.
pub fn sigma(n: usize, k: usize, t: &Mat2) -> f64 {
    match (n, k) {
        (_, 0) => 1.0,
        (1, 1) => t[0][0],
        (2, 1) => t[0][0] + t[1][1],
        (2, 2) => t[0][0] * t[1][1] - t[0][1] * t[1][0],
        _ => 0.0,
    }
}

/// `∂σ_k/∂τ_ij` by central differences, exact for the quadratic `σ_k` at any step.
pub fn sigma_grad_fd(n: usize, k: usize, t: &Mat2) -> Mat2 {
    let step = 1.0;
    let mut g = [[0.0; 2]; 2];
    for i in 0..n {
        for j in 0..n {
            let (mut up, mut down) = (*t, *t);
            up[i][j] += step;
            down[i][j] -= step;
            g[i][j] = (sigma(n, k, &up) - sigma(n, k, &down)) / (2.0 * step);
        }
    }
    g
}

/// `σ_k` of a list of eigenvalues.
pub fn sigma_of_eigenvalues(k: usize, l: &[f64]) -> f64 {
    match k {
        0 => 1.0,
        _ if k > l.len() => 0.0,
        _ => (0..l.len()).map(|i| l[i] * sigma_of_eigenvalues(k - 1, &l[i + 1..])).sum(),
    }
}

pub fn matmul(n: usize, a: &Mat2, b: &Mat2) -> Mat2 {
    let mut c = [[0.0; 2]; 2];
    for i in 0..n {
        for j in 0..n {
            c[i][j] = (0..n).map(|l| a[i][l] * b[l][j]).sum();
        }
    }
    c
}

pub fn contract(n: usize, a: &Mat2, b: &Mat2) -> f64 {
    (0..n).flat_map(|i| (0..n).map(move |j| (i, j))).map(|(i, j)| a[i][j] * b[i][j]).sum()
}

pub fn trace(n: usize, a: &Mat2) -> f64 {
    (0..n).map(|i| a[i][i]).sum()
}

/// Largest entrywise relative residual between two `n×n` blocks.
pub fn mat_rel(n: usize, a: &Mat2, b: &Mat2) -> f64 {
    let mut worst = 0.0f64;
    for i in 0..n {
        for j in 0..n {
            worst = worst.max(rel(a[i][j], b[i][j]));
        }
    }
    worst
}

/// `∫_{S²}(x + v)(1 + ⟨x, v⟩)dμ = (4π + 4π/3)v` for the ball of radius 1 centred at `v`.
pub fn shifted_ball_centroid_integral(v: f64) -> f64 {
    16.0 * std::f64::consts::PI / 3.0 * v
}

pub fn det_frame(n: usize, t: &Mat2) -> f64 {
    if n == 1 {
        t[0][0]
    } else {
        t[0][0] * t[1][1] - t[0][1] * t[1][0]
    }
}
