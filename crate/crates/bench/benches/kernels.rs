use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};

use isoflow::flow::{step, FlowState};
use isoflow::integral::mixed_volume;
use isoflow::{assemble, ProblemSpec};
use isoflow_bench::{body, sphere};

fn bench_assemble(c: &mut Criterion) {
    let mut group = c.benchmark_group("assemble");
    for nt in [32, 64] {
        let h = body(&sphere(nt), 1);
        group.bench_with_input(BenchmarkId::from_parameter(format!("{nt}x{}", 2 * nt)), &h, |b, h| {
            b.iter(|| assemble(h).unwrap())
        });
    }
    group.finish();
}

fn bench_mixed_volume(c: &mut Criterion) {
    let grid = sphere(64);
    let hs: Vec<_> = (1..=3).map(|s| body(&grid, s)).collect();
    c.bench_function("mixed_volume/64x128", |b| b.iter(|| mixed_volume(&[&hs[0], &hs[1], &hs[2]]).unwrap()));
}

fn bench_flow_step(c: &mut Criterion) {
    let grid = sphere(64);
    let state = FlowState { h: body(&grid, 1), t: 0.0, steps: 0, dt: 0.05 };
    for problem in ["gauss_power:alpha=1", "lp:p=-2", "sigma_k:k=1,phi=power,a=1,b=0"] {
        let prob: ProblemSpec = problem.parse().unwrap();
        c.bench_function(&format!("flow_step/{problem}"), |b| b.iter(|| step(&state, &prob, 0.05).unwrap()));
    }
}

criterion_group!(benches, bench_assemble, bench_mixed_volume, bench_flow_step);
criterion_main!(benches);
