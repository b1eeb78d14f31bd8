use criterion::{black_box, criterion_group, criterion_main, BenchmarkId, Criterion};

use rdgfv::coeff_oracle::{all_claims, verify_all};
use rdgfv::problems::find;
use rdgfv::{apply_operator, assemble, build_mesh, derivative_flux_coeffs, solve, AvgField, Bc, SchemeConfig, SolveMethod, SolveOptions};

fn assembly(c: &mut Criterion) {
    let mut g = c.benchmark_group("assemble");
    for (dim, bc, order, n, problem) in [
        (1, Bc::Dirichlet, 2, 1024, "xsinpix"),
        (1, Bc::Periodic, 4, 1024, "sin2pix"),
        (2, Bc::Dirichlet, 2, 64, "xsinpix-ysinpiy"),
        (2, Bc::Periodic, 2, 64, "sin2pix-sin4piy"),
    ] {
        let cfg = SchemeConfig::new(dim, bc, order, n);
        let f = find(problem).unwrap().f;
        g.bench_with_input(BenchmarkId::new(format!("{dim}d-{bc}-k{order}"), n), &cfg, |b, cfg| {
            b.iter(|| assemble(black_box(cfg), &f).unwrap())
        });
    }
    g.finish();
}

fn operator(c: &mut Criterion) {
    let cfg = SchemeConfig::new(2, Bc::Periodic, 2, 64);
    let mesh = build_mesh(2, 64, 1).unwrap();
    let values: Vec<f64> = (0..mesh.num_cells()).map(|k| (k as f64 * 0.37).sin()).collect();
    let field = AvgField::from_interior(&mesh, &values).unwrap();
    c.bench_function("apply_operator/2d-periodic-64", |b| b.iter(|| apply_operator(black_box(&cfg), &field).unwrap()));
}

fn solvers(c: &mut Criterion) {
    let mut g = c.benchmark_group("solve");
    g.sample_size(20);
    for n in [32, 64] {
        let cfg = SchemeConfig::new(2, Bc::Dirichlet, 2, n);
        let sys = assemble(&cfg, &find("xsinpix-ysinpiy").unwrap().f).unwrap();
        for method in [SolveMethod::Direct, SolveMethod::BiCgStab] {
            let opts = SolveOptions { method, ..Default::default() };
            g.bench_with_input(BenchmarkId::new(method.name(), n), &sys, |b, sys| b.iter(|| solve(black_box(sys), &opts).unwrap()));
        }
    }
    g.finish();
}

fn weights(c: &mut Criterion) {
    let mut g = c.benchmark_group("exact");
    for m in [1, 3, 6] {
        g.bench_with_input(BenchmarkId::new("flux_coeffs", m), &m, |b, &m| b.iter(|| derivative_flux_coeffs(black_box(m)).unwrap()));
    }
    g.sample_size(10);
    g.bench_function("verify_all/m6", |b| b.iter(|| verify_all(black_box(6), &all_claims())));
    g.finish();
}

criterion_group!(benches, assembly, operator, solvers, weights);
criterion_main!(benches);
