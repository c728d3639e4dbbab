//! Real orthonormal harmonics: Fourier modes on S¹, spherical harmonics on S².
//!
//! Evaluated from ambient coordinates through `Re/Im (x₁ + i x₂)^m` times a
//! polynomial in `x₃`, so nothing special happens at the poles.

use std::f64::consts::PI;

/// Real harmonic of degree `l` and order `m` at the unit vector `x`.
///
/// On S²: `m ∈ [−l, l]`, positive orders carry `cos mφ`, negative ones
/// `sin |m|φ`. On S¹: `m ≥ 0` gives `cos lφ`, `m < 0` gives `sin lφ`.
/// Both families are orthonormal in `L²(dμ)`.
pub fn real_harmonic(n: usize, l: usize, m: i64, x: &[f64; 3]) -> f64 {
    if n == 1 {
        let (re, im) = complex_power(x[0], x[1], l);
        return if l == 0 {
            1.0 / (2.0 * PI).sqrt()
        } else if m >= 0 {
            re / PI.sqrt()
        } else {
            im / PI.sqrt()
        };
    }
    let am = m.unsigned_abs() as usize;
    assert!(am <= l, "order {m} exceeds degree {l}");
    let norm = ((2 * l + 1) as f64 / (4.0 * PI) * factorial_ratio(l - am, l + am)).sqrt();
    let q = assoc_poly(l, am, x[2]);
    let (re, im) = complex_power(x[0], x[1], am);
    let azim = match m.cmp(&0) {
        std::cmp::Ordering::Greater => std::f64::consts::SQRT_2 * re,
        std::cmp::Ordering::Equal => 1.0,
        std::cmp::Ordering::Less => std::f64::consts::SQRT_2 * im,
    };
    norm * q * azim
}

/// All `(l, m)` index pairs with `l_min ≤ l ≤ l_max` for the given dimension.
pub fn indices(n: usize, l_min: usize, l_max: usize) -> Vec<(usize, i64)> {
    let mut out = Vec::new();
    for l in l_min..=l_max {
        if n == 1 {
            out.push((l, 0));
            if l > 0 {
                out.push((l, -1));
            }
        } else {
            for m in -(l as i64)..=(l as i64) {
                out.push((l, m));
            }
        }
    }
    out
}

fn complex_power(a: f64, b: f64, m: usize) -> (f64, f64) {
    let (mut re, mut im) = (1.0, 0.0);
    for _ in 0..m {
        let t = re * a - im * b;
        im = re * b + im * a;
        re = t;
    }
    (re, im)
}

/// `P_l^m(z) / (1 − z²)^{m/2}`, a polynomial in `z`.
fn assoc_poly(l: usize, m: usize, z: f64) -> f64 {
    let mut pmm = 1.0;
    for k in 1..=m {
        pmm *= (2 * k - 1) as f64;
    }
    if l == m {
        return pmm;
    }
    let mut p_prev = pmm;
    let mut p = z * (2 * m + 1) as f64 * pmm;
    for ll in (m + 2)..=l {
        let next = ((2 * ll - 1) as f64 * z * p - (ll + m - 1) as f64 * p_prev) / (ll - m) as f64;
        p_prev = p;
        p = next;
    }
    p
}

/// `a! / b!` for `a ≤ b`.
fn factorial_ratio(a: usize, b: usize) -> f64 {
    ((a + 1)..=b).fold(1.0, |acc, k| acc / k as f64)
}
