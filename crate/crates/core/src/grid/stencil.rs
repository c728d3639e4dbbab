//! Quadrature nodes and finite-difference weights.
//!
//! Derivative stencils are five-point and trigonometrically fitted: they
//! differentiate every trigonometric polynomial of degree at most two in the
//! stencil variable exactly, and are fourth-order accurate otherwise. Along a
//! longitude (with cross-pole continuation) or along a latitude circle, the
//! restriction of a polynomial of degree at most two in the ambient
//! coordinates is such a trigonometric polynomial, so linear and quadratic
//! functions on the sphere have exact discrete derivatives.

/// Finite-difference weights for derivatives `0..=max_order` at `x0` on `xs`.
///
/// Fornberg's recursion; returns `w[order][node]`.
pub fn fornberg(x0: f64, xs: &[f64], max_order: usize) -> Vec<Vec<f64>> {
    let n = xs.len();
    let mut c = vec![vec![0.0; n]; max_order + 1];
    c[0][0] = 1.0;
    let mut c1 = 1.0;
    let mut c4 = xs[0] - x0;
    for i in 1..n {
        let mn = i.min(max_order);
        let mut c2 = 1.0;
        let c5 = c4;
        c4 = xs[i] - x0;
        for j in 0..i {
            let c3 = xs[i] - xs[j];
            c2 *= c3;
            if j == i - 1 {
                for k in (1..=mn).rev() {
                    c[k][i] = c1 * (k as f64 * c[k - 1][i - 1] - c5 * c[k][i - 1]) / c2;
                }
                c[0][i] = -c1 * c5 * c[0][i - 1] / c2;
            }
            for k in (1..=mn).rev() {
                c[k][j] = (c4 * c[k][j] - k as f64 * c[k - 1][j]) / c3;
            }
            c[0][j] = c4 * c[0][j] / c3;
        }
        c1 = c2;
    }
    c
}

/// First- and second-derivative weights at offset 0 for a five-point window.
///
/// `offsets` are the node positions relative to the evaluation point, which
/// must itself be one of the nodes. The weights are exact on
/// `span{1, cos t, sin t, cos 2t, sin 2t}`.
pub fn trig_weights(offsets: &[f64; 5]) -> ([f64; 5], [f64; 5]) {
    // Degree-2 trigonometric polynomials are P(z) / (1 + z^2)^2 with
    // z = tan(t / 2) and deg P <= 4, so interpolate polynomially in z.
    let z: Vec<f64> = offsets.iter().map(|t| (0.5 * t).tan()).collect();
    let c = fornberg(0.0, &z, 2);
    let mut d1 = [0.0; 5];
    let mut d2 = [0.0; 5];
    for j in 0..5 {
        let s = (1.0 + z[j] * z[j]).powi(2);
        d1[j] = s * c[1][j] / 2.0;
        d2[j] = s * (c[2][j] - 4.0 * c[0][j]) / 4.0;
    }
    (d1, d2)
}

/// Gauss–Legendre nodes (descending, in `(-1, 1)`) and weights on `[-1, 1]`.
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    let mut x = vec![0.0; n];
    let mut w = vec![0.0; n];
    let half = n.div_ceil(2);
    for i in 0..half {
        let mut z = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (p, d) = legendre_with_derivative(n, z);
            dp = d;
            let dz = p / d;
            z -= dz;
            if dz.abs() < 1e-16 {
                break;
            }
        }
        let (_, d) = legendre_with_derivative(n, z);
        if d.is_finite() {
            dp = d;
        }
        let wi = 2.0 / ((1.0 - z * z) * dp * dp);
        x[i] = z;
        w[i] = wi;
        x[n - 1 - i] = -z;
        w[n - 1 - i] = wi;
    }
    if n % 2 == 1 {
        x[n / 2] = 0.0;
    }
    (x, w)
}

fn legendre_with_derivative(n: usize, z: f64) -> (f64, f64) {
    let mut p0 = 1.0;
    let mut p1 = z;
    for k in 2..=n {
        let p2 = ((2 * k - 1) as f64 * z * p1 - (k - 1) as f64 * p0) / k as f64;
        p0 = p1;
        p1 = p2;
    }
    let dp = n as f64 * (z * p1 - p0) / (z * z - 1.0);
    (p1, dp)
}
