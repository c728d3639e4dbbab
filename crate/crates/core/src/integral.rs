//! Mixed discriminants and mixed volumes, the measures `dV_k = hσ_k dμ`,
//! volume and centroid of a body.

use std::sync::Arc;

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::calculus::{a_operator, assemble, BodyGeometry};
use crate::error::{Error, Result};
use crate::grid::{dot3, Grid, ScalarField, Sym2};

/// Mixed discriminant by the permutation formula
/// `Q(M_1..M_n) = (1/n!) Σ_{a,b} ε(a)ε(b) Π_k (M_k)_{a(k)b(k)}`.
pub fn mixed_discriminant(ms: &[DMatrix<f64>]) -> Result<f64> {
    let n = ms.len();
    if let Some(bad) = ms.iter().find(|m| m.nrows() != n || m.ncols() != n) {
        return Err(Error::DimensionMismatch { expected: n, got: bad.nrows().max(bad.ncols()) });
    }
    if n == 0 {
        return Ok(1.0);
    }
    let perms = permutations(n);
    let mut total = 0.0;
    for (a, sa) in &perms {
        for (b, sb) in &perms {
            let prod: f64 = (0..n).map(|k| ms[k][(a[k], b[k])]).product();
            total += sa * sb * prod;
        }
    }
    let fact: f64 = (1..=n).map(|k| k as f64).product();
    Ok(total / fact)
}

/// All permutations of `0..n` with their signs.
fn permutations(n: usize) -> Vec<(Vec<usize>, f64)> {
    fn rec(prefix: &mut Vec<usize>, rest: &mut Vec<usize>, sign: f64, out: &mut Vec<(Vec<usize>, f64)>) {
        if rest.is_empty() {
            out.push((prefix.clone(), sign));
            return;
        }
        for i in 0..rest.len() {
            let x = rest.remove(i);
            prefix.push(x);
            // moving element i of the remainder to the front costs i transpositions
            rec(prefix, rest, if i % 2 == 0 { sign } else { -sign }, out);
            prefix.pop();
            rest.insert(i, x);
        }
    }
    let mut out = Vec::new();
    rec(&mut Vec::new(), &mut (0..n).collect(), 1.0, &mut out);
    out
}

/// Mixed discriminant of frame matrices (`n ≤ 2`, closed form).
pub fn mixed_discriminant_frame(n: usize, ms: &[Sym2]) -> f64 {
    match (n, ms) {
        (1, [a]) => a.xx,
        (2, [a, b]) => 0.5 * (a.xx * b.yy + a.yy * b.xx - 2.0 * a.xy * b.xy),
        _ => panic!("mixed_discriminant_frame needs exactly n = {n} matrices"),
    }
}

/// A mixed volume together with content hashes of its arguments.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MixedVolumeResult {
    pub value: f64,
    pub arguments: Vec<String>,
}

fn check_args(fields: &[&ScalarField]) -> Result<Arc<Grid>> {
    let first = fields.first().ok_or(Error::DimensionMismatch { expected: 1, got: 0 })?;
    let n = first.grid().dim();
    if fields.len() != n + 1 {
        return Err(Error::DimensionMismatch { expected: n + 1, got: fields.len() });
    }
    for f in &fields[1..] {
        first.same_grid(f)?;
    }
    Ok(first.grid().clone())
}

fn ordered_from(grid: &Grid, first: &ScalarField, mats: &[&[Sym2]]) -> f64 {
    let n = grid.dim();
    let dens: Vec<f64> = (0..grid.len())
        .map(|i| {
            let args: Vec<Sym2> = mats.iter().map(|m| m[i]).collect();
            first.values()[i] * mixed_discriminant_frame(n, &args)
        })
        .collect();
    grid.integrate_values(&dens) / (n + 1) as f64
}

/// `(1/(n+1)) ∫ f_1 Q(A[f_2], …, A[f_{n+1}]) dμ` with the first argument singled out.
pub fn mixed_volume_ordered(fields: &[&ScalarField]) -> Result<f64> {
    let grid = check_args(fields)?;
    let a: Vec<Vec<Sym2>> = fields[1..].iter().map(|f| a_operator(f).comps).collect();
    let refs: Vec<&[Sym2]> = a.iter().map(|v| v.as_slice()).collect();
    Ok(ordered_from(&grid, fields[0], &refs))
}

/// Mixed volume `V(f_1, …, f_{n+1})`.
///
/// The quadrature is averaged over which argument multiplies the mixed
/// discriminant, so the discrete value is symmetric in its arguments to
/// roundoff.
pub fn mixed_volume(fields: &[&ScalarField]) -> Result<MixedVolumeResult> {
    let grid = check_args(fields)?;
    let a: Vec<Vec<Sym2>> = fields.iter().map(|f| a_operator(f).comps).collect();
    let m = fields.len();
    let mut total = 0.0;
    for (j, f) in fields.iter().enumerate() {
        let refs: Vec<&[Sym2]> = (0..m).filter(|&i| i != j).map(|i| a[i].as_slice()).collect();
        total += ordered_from(&grid, f, &refs);
    }
    Ok(MixedVolumeResult {
        value: total / m as f64,
        arguments: fields.iter().map(|f| f.content_hash()).collect(),
    })
}

fn padded<'a>(args: &[&'a ScalarField], one: &'a ScalarField) -> Result<Vec<&'a ScalarField>> {
    let n = one.grid().dim();
    if args.is_empty() || args.len() > n + 1 {
        return Err(Error::DimensionMismatch { expected: n + 1, got: args.len() });
    }
    let mut v = args.to_vec();
    v.resize(n + 1, one);
    Ok(v)
}

/// `V_{k+1}(f_1, …, f_{k+1})`: the mixed volume with `n − k` unit arguments appended.
pub fn v_k1(args: &[&ScalarField]) -> Result<f64> {
    let one = ScalarField::constant(args.first().ok_or(Error::DimensionMismatch { expected: 1, got: 0 })?.grid(), 1.0);
    Ok(mixed_volume(&padded(args, &one)?)?.value)
}

/// [`v_k1`] with the first argument singled out, as in [`mixed_volume_ordered`].
pub fn v_k1_ordered(args: &[&ScalarField]) -> Result<f64> {
    let one = ScalarField::constant(args.first().ok_or(Error::DimensionMismatch { expected: 1, got: 0 })?.grid(), 1.0);
    mixed_volume_ordered(&padded(args, &one)?)
}

/// Volume of the body, `(1/(n+1)) ∫ hσ_n dμ`.
pub fn body_volume(g: &BodyGeometry) -> f64 {
    let n = g.dim();
    g.grid().integrate_values(&g.dv_k(n)) / (n + 1) as f64
}

/// Mass `∫ dV_k = ∫ hσ_k dμ`.
pub fn dv_mass(g: &BodyGeometry, k: usize) -> f64 {
    g.grid().integrate_values(&g.dv_k(k))
}

fn check_order(g: &BodyGeometry, k: usize) -> Result<()> {
    if k == 0 || k > g.dim() {
        Err(Error::InvalidSpec(format!("order k = {k} outside 1..={}", g.dim())))
    } else {
        Ok(())
    }
}

/// `∫ X dV_k`. For `k = n` this is `(n + 2)·vol·(centroid)`.
pub fn centroid_vector(g: &BodyGeometry, k: usize) -> Result<[f64; 3]> {
    check_order(g, k)?;
    let dv = g.dv_k(k);
    let w: Vec<[f64; 3]> = g.x.iter().zip(&dv).map(|(x, d)| [x[0] * d, x[1] * d, x[2] * d]).collect();
    Ok(g.grid().integrate_vectors(&w))
}

/// Centroid of the body.
pub fn centre_of_mass(g: &BodyGeometry) -> [f64; 3] {
    let n = g.dim();
    let c = centroid_vector(g, n).expect("k = n is always valid");
    let s = 1.0 / ((n + 2) as f64 * body_volume(g));
    [c[0] * s, c[1] * s, c[2] * s]
}

/// `∫ x σ_k dμ`, which vanishes for every closed convex body.
pub fn minkowski_vanishing(g: &BodyGeometry, k: usize) -> Result<[f64; 3]> {
    check_order(g, k)?;
    let s = g.sigma(k).values();
    let w: Vec<[f64; 3]> = g.grid().nodes().iter().zip(s).map(|(x, v)| [x[0] * v, x[1] * v, x[2] * v]).collect();
    Ok(g.grid().integrate_vectors(&w))
}

/// Translates the body so that its centroid sits at the origin.
///
/// A translation by `t` changes `h` by `⟨x, t⟩`; the correction is repeated
/// (at most five times) until the discrete centroid is at roundoff level.
pub fn recentre(h: &ScalarField) -> Result<ScalarField> {
    let mut h = h.clone();
    for _ in 0..5 {
        let g = assemble(&h)?;
        let c = centre_of_mass(&g);
        if dot3(&c, &c).sqrt() <= 1e-15 * h.sup_norm() {
            break;
        }
        h = ScalarField::new(
            h.grid().clone(),
            h.values().iter().zip(h.grid().nodes()).map(|(v, x)| v - dot3(x, &c)).collect(),
        )?;
    }
    Ok(h)
}

/// Normalisation constants `c_k`, `c'_k` for `k = 1..=n`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConstantsTable {
    pub n: usize,
    /// `c_k`, index `k − 1`.
    pub c: Vec<f64>,
    /// `c'_k`, index `k − 1`.
    pub c_prime: Vec<f64>,
}

impl ConstantsTable {
    pub fn c(&self, k: usize) -> f64 {
        self.c[k - 1]
    }

    pub fn c_prime(&self, k: usize) -> f64 {
        self.c_prime[k - 1]
    }

    /// Closed forms `c'_k = (n+1)·C(n,k)` and `c_k = k·c'_k`.
    pub fn closed_form(n: usize) -> Self {
        let c_prime: Vec<f64> = (1..=n).map(|k| ((n + 1) * binomial(n, k)) as f64).collect();
        let c = c_prime.iter().enumerate().map(|(i, v)| (i + 1) as f64 * v).collect();
        Self { n, c, c_prime }
    }
}

pub fn binomial(n: usize, k: usize) -> usize {
    if k > n {
        return 0;
    }
    (0..k).fold(1, |acc, i| acc * (n - i) / (i + 1))
}

/// Ratios `c'_k = ∫ fhσ_k dμ / V_{k+1}(fh, h, …, h)` and
/// `c_k = ∫ fhσ_k^{ij}(A[fh])_{ij} dμ / V_{k+1}(fh, fh, h, …, h)` on one probe body.
fn probe_ratios(h: &ScalarField, f: &ScalarField) -> Result<(Vec<f64>, Vec<f64>)> {
    let g = assemble(h)?;
    let grid = h.grid();
    let n = grid.dim();
    let fh = f.mul(h)?;
    let a_fh = a_operator(&fh);
    let mut cp = Vec::new();
    let mut c = Vec::new();
    for k in 1..=n {
        let num: Vec<f64> = (0..grid.len()).map(|i| fh.values()[i] * g.sigma(k).values()[i]).collect();
        let mut args = vec![&fh];
        args.extend(std::iter::repeat_n(h, k));
        cp.push(grid.integrate_values(&num) / v_k1_ordered(&args)?);

        let num: Vec<f64> = (0..grid.len())
            .map(|i| fh.values()[i] * g.sigma_grad(k).comps[i].contract(&a_fh.comps[i]))
            .collect();
        let mut args = vec![&fh, &fh];
        args.extend(std::iter::repeat_n(h, k - 1));
        c.push(grid.integrate_values(&num) / v_k1_ordered(&args)?);
    }
    Ok((c, cp))
}

/// Calibrates `c_k`, `c'_k` on the unit ball and validates them on an ellipsoid.
pub fn calibrate_constants(grid: &Arc<Grid>) -> Result<ConstantsTable> {
    let n = grid.dim();
    let ball = ScalarField::constant(grid, 1.0);
    let tilt = ScalarField::from_fn(grid, |x| 1.0 + 0.5 * x[0]);
    let (_, c_prime) = probe_ratios(&ball, &ScalarField::constant(grid, 1.0))?;
    let (c, _) = probe_ratios(&ball, &tilt)?;

    let diag = [1.2, 1.0, 1.0 / 1.2];
    let ell = ScalarField::from_fn(grid, |x| (0..=n).map(|i| diag[i] * x[i] * x[i]).sum::<f64>().sqrt());
    let (c2, cp2) = probe_ratios(&ell, &tilt)?;
    for (name, a, b) in [("c", &c, &c2), ("c'", &c_prime, &cp2)] {
        for k in 0..n {
            let spread = (a[k] - b[k]).abs() / a[k].abs();
            if spread.is_nan() || spread > 1e-9 {
                return Err(Error::InconsistentCalibration { name: format!("{name}_{}", k + 1), spread });
            }
        }
    }
    Ok(ConstantsTable { n, c, c_prime })
}
