use std::hint::black_box;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use gpscav_bench::{annulus, mesh};
use gpscav_core::elasticity::{solve_forward, ElementOrder, SolveMethod, SolverOptions, TractionSpec};
use gpscav_core::mesh::{generate_mesh_with, MeshOptions};
use gpscav_core::PlateMaterial;

fn meshing(c: &mut Criterion) {
    let d = annulus();
    let mut g = c.benchmark_group("mesh");
    for h in [0.1, 0.05] {
        g.bench_with_input(BenchmarkId::from_parameter(h), &h, |b, &h| {
            b.iter(|| generate_mesh_with(black_box(&d), &MeshOptions::new(h)).unwrap())
        });
    }
    g.finish();
}

fn forward(c: &mut Criterion) {
    let d = annulus();
    let t = TractionSpec::uniform_normal(&d, 1.0);
    let mat = PlateMaterial::benchmark();
    let mut g = c.benchmark_group("forward");
    g.sample_size(10);
    for (name, h, opts) in [
        ("p1_direct", 0.05, SolverOptions::default()),
        ("p2_direct", 0.1, SolverOptions::default().with_order(ElementOrder::Quadratic)),
        ("p1_cg", 0.05, SolverOptions::default().with_method(SolveMethod::Iterative)),
    ] {
        let m = mesh(&d, h);
        g.bench_function(name, |b| b.iter(|| solve_forward(m.clone(), &d, &mat, &t, &opts).unwrap()));
    }
    g.finish();
}

criterion_group!(benches, meshing, forward);
criterion_main!(benches);
