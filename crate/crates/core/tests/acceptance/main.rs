//! Acceptance criteria, one PASS/FAIL line each.
//!
//! `cargo test -p isoflow --test acceptance [-- 3 6]` runs all criteria or the
//! listed ones. Bounds scale with `ISOFLOW_TOL_OVERRIDE`.

mod oracle;

use std::any::Any;
use std::collections::BTreeMap;
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::process::ExitCode;
use std::sync::{Arc, LazyLock};
use std::time::Instant;

use nalgebra::{DMatrix, Matrix3, Rotation3, Vector3};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use isoflow::calculus::pointwise_identity_report;
use isoflow::config::env_factor;
use isoflow::flow::{certify, ellipsoid_distance, residual_field, run, sphere_distance, Family};
use isoflow::grid::{Grid, Sym2};
use isoflow::inequality::{
    af_local, af_local_witness, affine_identity, main_lemma, main_lemma_equality, p_chain, parse_suite, poincare,
    poincare_equality, random_test_function, run_suite, saroglou_sign, spectral_gap, spectral_gap_witness,
    theorem11_chain, xi_identity, SuiteOptions,
};
use isoflow::integral::{body_volume, centroid_vector, minkowski_vanishing, mixed_discriminant, mixed_discriminant_frame};
use isoflow::phi::Lifted;
use isoflow::refine::{parse_ladder, refinement_study};
use isoflow::zoo::{make_random, make_random_symmetric};
use isoflow::{
    assemble, build_grid, make_body, BodyGeometry, BodyKind, BodySpec, DiffMethod, FlowConfig, FlowOutcome,
    ProblemSpec, Resolution, ScalarField, SlackReport, SuiteSummary, Tolerances,
};

use oracle::{rel, Mat2};

const MIN_ORDER: f64 = 3.0;
static TOL_FACTOR: LazyLock<f64> = LazyLock::new(env_factor);

/// Worst value per metric and the failures seen by one criterion.
#[derive(Default)]
struct Tally {
    worst: BTreeMap<String, f64>,
    failures: Vec<String>,
}

impl Tally {
    fn note(&mut self, key: &str, v: f64) {
        let e = self.worst.entry(key.to_string()).or_insert(0.0);
        if v.is_nan() || v > *e {
            *e = v;
        }
    }

    fn at_most(&mut self, key: &str, v: f64, bound: f64, ctx: impl FnOnce() -> String) {
        self.note(key, v);
        let bound = bound * *TOL_FACTOR;
        if v.is_nan() || v > bound {
            self.failures.push(format!("{key} = {v:.3e} > {bound:.0e} ({})", ctx()));
        }
    }

    fn require(&mut self, ok: bool, what: impl FnOnce() -> String) {
        if !ok {
            self.failures.push(what());
        }
    }

    fn passed(&self) -> bool {
        self.failures.is_empty()
    }

    fn summary(&self) -> String {
        let mut parts: Vec<String> = self.worst.iter().map(|(k, v)| format!("{k} {v:.2e}")).collect();
        if let Some(first) = self.failures.first() {
            parts.push(format!("{} failure(s), first: {first}", self.failures.len()));
        }
        parts.join("; ")
    }
}

fn reference(n: usize) -> Arc<Grid> {
    build_grid(n, Resolution::reference(n).unwrap()).unwrap()
}

fn ladder(n: usize) -> Vec<Resolution> {
    parse_ladder(if n == 1 { "32,48,64" } else { "16x32,24x48,32x64" }).unwrap()
}

fn tolerances() -> Tolerances {
    Tolerances::from_env()
}

fn frame(n: usize, m: &Sym2) -> Mat2 {
    if n == 1 {
        [[m.xx, 0.0], [0.0, 0.0]]
    } else {
        [[m.xx, m.xy], [m.xy, m.yy]]
    }
}

fn rel_slack(r: &SlackReport) -> f64 {
    r.relative_slack().unwrap_or(f64::NAN)
}

fn random_body(seed: u64, grid: &Arc<Grid>) -> ScalarField {
    let eps = [0.05, 0.1, 0.2, 0.3][seed as usize % 4];
    let lmax = 2 + seed as usize % 5;
    if seed.is_multiple_of(3) {
        make_random_symmetric(seed, grid, eps, lmax)
    } else {
        make_random(seed, grid, eps, lmax)
    }
}

fn ellipsoid(grid: &Arc<Grid>, m: &[Vec<f64>]) -> ScalarField {
    make_body(&BodySpec::new(BodyKind::Ellipsoid { m: m.to_vec() }), grid).unwrap()
}

fn to_rows(m: &Matrix3<f64>, n: usize) -> Vec<Vec<f64>> {
    (0..=n).map(|i| (0..=n).map(|j| m[(i, j)]).collect()).collect()
}

/// Rotated diagonal matrices, restricted to the leading `(n+1)×(n+1)` block.
fn spd(n: usize, diag: [f64; 3], angles: (f64, f64, f64)) -> Vec<Vec<f64>> {
    let r = Rotation3::from_euler_angles(angles.0, angles.1, angles.2);
    let r = if n == 1 { Rotation3::from_euler_angles(0.0, 0.0, angles.2) } else { r };
    let d = Matrix3::from_diagonal(&Vector3::from(diag));
    to_rows(&(r.matrix() * d * r.matrix().transpose()), n)
}

/// `h·(1 + εq)`, halving `ε` until the body is strictly convex.
fn perturbed(h: &ScalarField, q: &ScalarField, mut eps: f64) -> ScalarField {
    loop {
        let vals = h.values().iter().zip(q.values()).map(|(a, b)| a * (1.0 + eps * b)).collect();
        let p = ScalarField::new(h.grid().clone(), vals).unwrap();
        if assemble(&p).is_ok() {
            return p;
        }
        eps *= 0.5;
    }
}

fn flow(h: &ScalarField, problem: &str) -> Result<FlowOutcome, String> {
    let prob: ProblemSpec = problem.parse().map_err(|e| format!("{e}"))?;
    run(h, &prob, &FlowConfig::default()).map_err(|e| format!("{problem}: {e}"))
}

fn criterion_1() -> Tally {
    let mut t = Tally::default();
    let bound = 1e-12;
    for n in [1, 2] {
        let grid = reference(n);
        for seed in 0..100u64 {
            let g = assemble(&random_body(seed, &grid)).expect("random bodies are convex");
            let ctx = || format!("n={n} seed={seed}");
            for i in 0..grid.len() {
                let tau = frame(n, &g.tau.comps[i]);
                let lam = &g.lambdas_at(i)[..n];
                for k in 1..=n {
                    let s = g.sigma(k).values()[i];
                    let sg = frame(n, &g.sigma_grad(k).comps[i]);
                    t.at_most("sigma_vs_oracle", rel(s, oracle::sigma(n, k, &tau)), bound, ctx);
                    t.at_most("sigma_vs_eigenvalues", rel(s, oracle::sigma_of_eigenvalues(k, lam)), bound, ctx);
                    t.at_most("sigma_grad_vs_definition", oracle::mat_rel(n, &sg, &oracle::sigma_grad_fd(n, k, &tau)), bound, ctx);
                    t.at_most("euler", rel(oracle::contract(n, &sg, &tau), k as f64 * s), bound, ctx);
                }
                // σ_{k+1}^{ij} = σ_k δ_ij − σ_k^{il}τ_lj and tr σ_{k+1}^{ij} = (n−k)σ_k
                for k in 0..n {
                    let (s_k, g_k) = if k == 0 {
                        (1.0, [[0.0; 2]; 2])
                    } else {
                        (g.sigma(k).values()[i], frame(n, &g.sigma_grad(k).comps[i]))
                    };
                    let g_next = frame(n, &g.sigma_grad(k + 1).comps[i]);
                    let prod = oracle::matmul(n, &g_k, &tau);
                    let mut expect = oracle::identity(n);
                    for (r, row) in expect.iter_mut().enumerate().take(n) {
                        for (c, v) in row.iter_mut().enumerate().take(n) {
                            *v = *v * s_k - prod[r][c];
                        }
                    }
                    t.at_most("recursion", oracle::mat_rel(n, &g_next, &expect), bound, ctx);
                    t.at_most("trace", rel(oracle::trace(n, &g_next), (n - k) as f64 * s_k), bound, ctx);
                }
                let x = g.x[i];
                let h = g.h.values()[i];
                let gh = g.grad_h.comps[i];
                let lhs = x[0] * x[0] + x[1] * x[1] + x[2] * x[2];
                t.at_most("position_norm", rel(lhs, h * h + gh[0] * gh[0] + gh[1] * gh[1]), bound, ctx);
                let taus = vec![g.tau.comps[i]; n];
                t.at_most("q_frame_vs_det", rel(mixed_discriminant_frame(n, &taus), oracle::det_frame(n, &tau)), bound, ctx);
            }
            t.at_most("library_report", pointwise_identity_report(&g).algebraic_max(), bound, ctx);
        }
    }
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    for case in 0..100 {
        let d = 1 + case % 4;
        let rows: Vec<Vec<f64>> = (0..d).map(|_| (0..d).map(|_| rng.random_range(-1.0..1.0)).collect()).collect();
        let m = DMatrix::from_fn(d, d, |i, j| rows[i][j]);
        let q = mixed_discriminant(&vec![m; d]).unwrap();
        t.at_most("q_vs_det", rel(q, oracle::det(&rows)), bound, || format!("d={d} case={case}"));
    }
    t
}

fn criterion_2() -> Tally {
    let mut t = Tally::default();
    let tol = tolerances();
    let bound = 1e-6;
    let start = Instant::now();
    let m = [[0.7, 0.2, -0.1], [0.4, -0.3, 0.5], [0.1, 0.6, 0.2]];
    for n in [1, 2] {
        let grid = reference(n);
        for seed in [101u64, 102, 105] {
            let g = assemble(&random_body(seed, &grid)).unwrap();
            let ctx = || format!("n={n} seed={seed}");
            for k in 1..=n {
                let v = minkowski_vanishing(&g, k).unwrap();
                let mass = grid.integrate_values(g.sigma(k).values());
                t.at_most("minkowski", (v[0] * v[0] + v[1] * v[1] + v[2] * v[2]).sqrt() / mass, bound, ctx);
                let f = random_test_function(seed + 7, &grid, 3);
                t.at_most("integration_by_parts", spectral_gap(&g, &f, k, &tol).unwrap().residual.unwrap(), bound, ctx);
            }
            t.at_most("xi_identity", xi_identity(&g, &m, &tol).unwrap().residual.unwrap(), bound, ctx);
            for p in [-(n as f64) - 1.0, -1.0, 0.0, 1.5] {
                t.at_most("p_chain_vector", p_chain(&g, p, &tol).unwrap().residual.unwrap(), bound, ctx);
            }
            t.at_most("affine_identity", affine_identity(&g, &tol).unwrap().residual.unwrap(), bound, ctx);
        }
        let body = BodySpec::new(BodyKind::Random { seed: 101, eps: 0.2, lmax: 4, symmetric: false, centred: false });
        for check in ["minkowski", "xi_identity", "p_chain", "integration_by_parts", "affine_identity"] {
            let s = refinement_study(check, &body, &ladder(n), DiffMethod::Spectral, &tol).unwrap();
            t.note("worst_final_value", s.rows.last().unwrap().value);
            t.require(s.passed(MIN_ORDER), || format!("{check} n={n}: order {:?} below {MIN_ORDER}", s.final_order));
        }
    }
    t.at_most("seconds", start.elapsed().as_secs_f64(), 60.0, String::new);
    t
}

fn criterion_3() -> Tally {
    let mut t = Tally::default();
    let tol = tolerances();
    let bound = 1e-6;
    let start = Instant::now();
    for n in [1, 2] {
        let grid = reference(n);
        for case in 0..200u64 {
            let g = assemble(&random_body(1000 + case, &grid)).unwrap();
            let f = random_test_function(5000 + case, &grid, 1 + case as usize % 4);
            let k = 1 + case as usize % n;
            let ctx = || format!("n={n} case={case} k={k}");
            t.at_most("af_local", -rel_slack(&af_local(&g, &f, k, &tol).unwrap()), bound, ctx);
            t.at_most("spectral_gap", -rel_slack(&spectral_gap(&g, &f, k, &tol).unwrap()), bound, ctx);
            for kk in 1..=n {
                t.at_most("main_lemma", -rel_slack(&main_lemma(&g, kk, &tol).unwrap()), bound, ctx);
            }
            t.at_most("poincare", -rel_slack(&poincare(&f, &tol)), bound, ctx);
            let cs = &theorem11_chain(&g, &tol)[1];
            t.at_most("cauchy_schwarz", -rel_slack(cs), bound, ctx);
        }
    }
    t.at_most("seconds", start.elapsed().as_secs_f64(), 300.0, String::new);
    t
}

fn witness_checks(t: &mut Tally, g: &BodyGeometry, ctx: &str, tol: &Tolerances) {
    let n = g.dim();
    let vs = [[0.3, -0.2, 0.5], [1.0, 0.0, 0.0], [0.0, 0.4, -0.7]];
    for k in 1..=n {
        for v in &vs {
            for c in [0.0, 0.7] {
                let r = af_local_witness(g, v, c, k, tol).unwrap();
                t.at_most("af_local_witness", rel_slack(&r).abs(), 1e-6, || format!("{ctx} k={k}"));
            }
            let r = spectral_gap_witness(g, v, k, tol).unwrap();
            t.at_most("spectral_gap_witness", rel_slack(&r).abs(), 1e-6, || format!("{ctx} k={k}"));
        }
        let r = main_lemma_equality(g, k, tol).unwrap();
        t.at_most("main_lemma_equality", rel_slack(&r).abs(), 1e-6, || format!("{ctx} k={k}"));
    }
    for (a, b) in [(0.0, [1.0, 0.0, 0.0]), (1.3, [0.2, -0.5, 0.4])] {
        let f = ScalarField::from_fn(g.grid(), |x| a + b[0] * x[0] + b[1] * x[1] + b[2] * x[2]);
        t.at_most("poincare_equality", rel_slack(&poincare_equality(&f, tol)).abs(), 1e-6, || ctx.to_string());
    }
}

fn criterion_4() -> Tally {
    let mut t = Tally::default();
    let tol = tolerances();
    for n in [1, 2] {
        let grid = reference(n);
        let ms = [spd(n, [1.0, 0.49, 1.44], (0.0, 0.0, 0.0)), spd(n, [1.3, 0.6, 0.8], (0.4, -0.3, 0.9))];
        for (j, m) in ms.iter().enumerate() {
            let g = assemble(&ellipsoid(&grid, m)).unwrap();
            witness_checks(&mut t, &g, &format!("n={n} ellipsoid={j}"), &tol);
        }
        let body = BodySpec::new(BodyKind::Ellipsoid { m: ms[1].clone() });
        for check in ["af_local_witness", "spectral_gap_witness", "main_lemma_equality", "poincare_equality"] {
            let s = refinement_study(check, &body, &ladder(n), DiffMethod::Spectral, &tol).unwrap();
            let (first, last) = (s.rows[0].value, s.rows.last().unwrap().value);
            t.require(s.passed(MIN_ORDER) && (s.final_pair_exact || last < first), || {
                format!("{check} n={n}: values {first:.2e} -> {last:.2e}, order {:?}", s.final_order)
            });
        }
    }
    t
}

fn criterion_5() -> Tally {
    let mut t = Tally::default();
    let v = 0.2;
    let grid = reference(2);
    let h = make_body(&BodySpec::new(BodyKind::ShiftedBall { r: 1.0, v: vec![v, 0.0, 0.0] }), &grid).unwrap();
    let g = assemble(&h).unwrap();
    let expected = oracle::shifted_ball_centroid_integral(v);
    let lhs = centroid_vector(&g, 2).unwrap();
    let rhs = 4.0 * body_volume(&g) * v;
    t.at_most("integral_vs_analytic", (lhs[0] - expected).abs() / expected, 1e-5, || format!("{:.8}", lhs[0]));
    t.at_most("volume_side_vs_analytic", (rhs - expected).abs() / expected, 1e-5, || format!("{rhs:.8}"));
    t.at_most("transverse", lhs[1].abs().max(lhs[2].abs()), 1e-10, String::new);
    t
}

fn criterion_6() -> Tally {
    let mut t = Tally::default();
    let grid = reference(2);
    for seed in 1..=10u64 {
        let start = Instant::now();
        let ctx = || format!("seed={seed}");
        match flow(&make_random(seed, &grid, 0.2, 4), "gauss_power:alpha=1") {
            Ok(out) => {
                t.at_most("residual_inf", out.residual.sup_norm(), 1e-8, ctx);
                let dev = out.geometry.h.values().iter().fold(0.0f64, |m, h| m.max((h - 1.0).abs()));
                t.at_most("sup_h_minus_1", dev, 1e-6, ctx);
            }
            Err(e) => t.require(false, || e),
        }
        t.at_most("seconds_per_run", start.elapsed().as_secs_f64(), 120.0, ctx);
    }
    t
}

fn criterion_7() -> Tally {
    let mut t = Tally::default();
    let grid = reference(2);
    for p in [-1.0, -2.0, -3.0] {
        for seed in [7u64, 11] {
            let key = format!("p{p}.sphere_dist");
            match flow(&make_random(seed, &grid, 0.2, 4), &format!("lp:p={p}")) {
                Ok(out) => t.at_most(&key, sphere_distance(&out.geometry.h), 1e-6, || {
                    format!("p={p} seed={seed}, ellipsoid_dist {:.2e}", ellipsoid_distance(&out.geometry.h))
                }),
                Err(e) => t.require(false, || e),
            }
        }
    }
    t
}

fn criterion_8() -> Tally {
    let mut t = Tally::default();
    let tol = tolerances();
    for n in [1, 2] {
        let grid = reference(n);
        let problem = format!("lp:p={}", -(n as f64) - 1.0);
        let prob: ProblemSpec = problem.parse().unwrap();
        let fixed = [
            spd(n, [1.5, 1.0 / 1.5, 1.0], (0.0, 0.0, 0.0)),
            spd(n, [2.0, 0.5, 1.0], (0.3, 0.5, -0.8)),
            spd(n, [0.8, 1.25, 1.0], (-0.6, 0.2, 0.4)),
            spd(n, [2.0, 0.8, 0.625], (0.1, -0.7, 1.2)),
        ];
        let mut checked = 0;
        for (j, m) in fixed.iter().enumerate() {
            if (oracle::det(m) - 1.0).abs() > 1e-12 {
                continue;
            }
            let g = assemble(&ellipsoid(&grid, m)).unwrap();
            let r = residual_field(&g, &prob).unwrap().sup_norm();
            t.at_most("fixed_point_residual", r, 1e-6, || format!("n={n} ellipsoid={j}"));
            checked += 1;
        }
        t.require(checked >= 3, || format!("n={n}: only {checked} unit-determinant ellipsoids"));
        for (j, seed) in [(0usize, 3u64), (1, 4)] {
            let hq = random_test_function(seed, &grid, 4);
            let he = ellipsoid(&grid, &fixed[j]);
            let h = perturbed(&he, &hq, 0.05);
            let ctx = || format!("n={n} start={j}");
            match flow(&h, &problem) {
                Ok(out) => {
                    t.at_most("ellipsoid_dist", ellipsoid_distance(&out.geometry.h), 1e-5, ctx);
                    let r = main_lemma_equality(&out.geometry, n, &tol).unwrap();
                    t.at_most("main_lemma_equality_slack", rel_slack(&r).abs(), 1e-6, ctx);
                }
                Err(e) => t.require(false, || e),
            }
        }
    }
    t
}

fn criterion_9() -> Tally {
    let mut t = Tally::default();
    let tol = tolerances();
    let grid = reference(2);
    let problems = [
        "sigma_k:k=1,phi=gaussian,c=1",
        "sigma_k:k=2,phi=gaussian,c=0.5",
        "sigma_k:k=1,phi=power,a=1,b=0",
        "sigma_k:k=2,phi=power,a=0,b=1",
    ];
    for problem in problems {
        for seed in [5u64, 11] {
            let ctx = || format!("{problem} seed={seed}");
            let out = match flow(&make_random_symmetric(seed, &grid, 0.2, 4), problem) {
                Ok(out) => out,
                Err(e) => {
                    t.require(false, || e);
                    continue;
                }
            };
            t.at_most("sphere_dist", sphere_distance(&out.geometry.h), 1e-6, ctx);
            let prob: ProblemSpec = problem.parse().unwrap();
            let Family::SigmaK { phi, .. } = prob.family else { unreachable!() };
            let r = saroglou_sign(&out.geometry, &Lifted { inner: phi, n: 2 }, &tol).unwrap();
            t.at_most("saroglou_identity_residual", r.residual.unwrap_or(f64::NAN), 1e-6, ctx);
            t.require(r.passed(), || format!("saroglou_sign failed ({})", ctx()));
        }
    }
    t
}

fn flow_fingerprint(problem: &str, seed: u64) -> String {
    let grid = build_grid(2, "32x64".parse().unwrap()).unwrap();
    let out = flow(&make_random(seed, &grid, 0.2, 4), problem).unwrap();
    let prob: ProblemSpec = problem.parse().unwrap();
    let reports = certify(&out.geometry, &prob, &tolerances()).unwrap();
    let bits: Vec<u64> = out.geometry.h.values().iter().map(|v| v.to_bits()).collect();
    format!("{}{}{bits:?}", out.trace.to_csv(), serde_json::to_string(&reports).unwrap())
}

fn suite_fingerprint(n: usize, seed: u64) -> String {
    let grid = reference(n);
    let h = random_body(seed, &grid);
    let opts = SuiteOptions { families: parse_suite("all").unwrap(), seed, battery: 4, tol: tolerances() };
    let reports = run_suite(&h, &opts).unwrap();
    SuiteSummary::from_reports(&grid.resolution().to_string(), &h.content_hash(), 1, reports).to_json()
}

fn criterion_10() -> Tally {
    let mut t = Tally::default();
    for (problem, seed) in [("gauss_power:alpha=1", 3u64), ("lp:p=-2", 4), ("sigma_k:k=2,phi=power,a=0,b=1", 5)] {
        let a = flow_fingerprint(problem, seed);
        let b = std::thread::spawn(move || flow_fingerprint(problem, seed)).join().unwrap();
        t.require(a == b, || format!("flow {problem} differs between runs"));
    }
    for n in [1, 2] {
        let runs: Vec<String> = std::thread::scope(|s| {
            let hs: Vec<_> = (0..3).map(|_| s.spawn(move || suite_fingerprint(n, 42))).collect();
            hs.into_iter().map(|h| h.join().unwrap()).collect()
        });
        t.require(runs.windows(2).all(|w| w[0] == w[1]), || format!("suite n={n} differs between runs"));
    }
    let body = BodySpec::new(BodyKind::Random { seed: 9, eps: 0.2, lmax: 4, symmetric: false, centred: false });
    let study = || refinement_study("xi_identity", &body, &ladder(2), DiffMethod::Spectral, &tolerances()).unwrap().to_csv();
    t.require(study() == study(), || "refinement study differs between runs".into());
    t
}

fn panic_message(p: &(dyn Any + Send)) -> String {
    p.downcast_ref::<&str>().map(|s| s.to_string()).or_else(|| p.downcast_ref::<String>().cloned()).unwrap_or_default()
}

type Criterion = (usize, &'static str, fn() -> Tally);

fn main() -> ExitCode {
    let selected: Vec<usize> = std::env::args().skip(1).filter_map(|a| a.parse().ok()).collect();
    let criteria: [Criterion; 10] = [
        (1, "exact algebraic identities", criterion_1),
        (2, "discrete-operator validation", criterion_2),
        (3, "inequality positivity", criterion_3),
        (4, "equality-case witnesses", criterion_4),
        (5, "centroid identity", criterion_5),
        (6, "gauss_power alpha=1 flows reach the unit sphere", criterion_6),
        (7, "lp flows for p in {-1,-2,-3} reach the sphere", criterion_7),
        (8, "p=-(n+1) ellipsoid fixed points and limits", criterion_8),
        (9, "sigma_k flows with gaussian and power phi", criterion_9),
        (10, "determinism", criterion_10),
    ];
    let (mut run_count, mut failed) = (0, Vec::new());
    for (id, name, f) in criteria {
        if !selected.is_empty() && !selected.contains(&id) {
            continue;
        }
        run_count += 1;
        let start = Instant::now();
        let tally = catch_unwind(AssertUnwindSafe(f)).unwrap_or_else(|p| {
            let mut t = Tally::default();
            t.failures.push(format!("panicked: {}", panic_message(p.as_ref())));
            t
        });
        let verdict = if tally.passed() { "PASS" } else { "FAIL" };
        if !tally.passed() {
            failed.push(id);
        }
        println!("criterion {id:>2} {verdict} {name} [{:.1}s] {}", start.elapsed().as_secs_f64(), tally.summary());
    }
    println!("acceptance: {} of {run_count} criteria passed; failed: {failed:?}", run_count - failed.len());
    if failed.is_empty() {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
