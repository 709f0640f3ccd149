use std::hint::black_box;

use criterion::{criterion_group, criterion_main, Criterion};
use g2flow::flows::build_ansatz;
use g2flow::reference::verify;
use g2flow::{
    integrate, reduce_to_ode, symbolic_ansatz, AnsatzKind, Diagnostics, FlowKind, Settings,
};
use g2flow_bench::heisenberg_point;

fn symbolic(c: &mut Criterion) {
    let mut g = c.benchmark_group("symbolic");
    g.sample_size(10);
    g.bench_function("ccy_ansatz", |b| {
        b.iter(|| symbolic_ansatz(black_box(AnsatzKind::Ccy)).unwrap())
    });
    g.bench_function("heisenberg_ansatz", |b| {
        b.iter(|| symbolic_ansatz(black_box(AnsatzKind::Heisenberg)).unwrap())
    });
    g.bench_function("heisenberg_rational_point", |b| {
        b.iter(|| build_ansatz(AnsatzKind::Heisenberg, black_box(&heisenberg_point())).unwrap())
    });
    g.finish();
}

fn reduction(c: &mut Criterion) {
    let mut g = c.benchmark_group("reduction");
    g.sample_size(10);
    for family in [AnsatzKind::Ccy, AnsatzKind::Heisenberg] {
        g.bench_function(format!("rl1_{family}"), |b| {
            b.iter(|| reduce_to_ode(FlowKind::Rl1, black_box(family)).unwrap())
        });
    }
    g.finish();
}

fn integration(c: &mut Criterion) {
    let rhf = reduce_to_ode(FlowKind::Rhf, AnsatzKind::Ccy).unwrap();
    let rl1 = reduce_to_ode(FlowKind::Rl1, AnsatzKind::Ccy).unwrap();
    let heis = reduce_to_ode(FlowKind::Rhf, AnsatzKind::Heisenberg).unwrap();
    let diag = Diagnostics::new(AnsatzKind::Ccy).unwrap();
    let s = Settings::default();
    let mut g = c.benchmark_group("integration");
    g.bench_function("rhf_ccy_to_blowup", |b| {
        b.iter(|| integrate(&rhf, None, black_box(&[1.0, 1.0]), 0.0, 1.0, &s).unwrap())
    });
    g.bench_function("rhf_ccy_to_blowup_with_diagnostics", |b| {
        b.iter(|| integrate(&rhf, Some(&diag), black_box(&[1.0, 1.0]), 0.0, 1.0, &s).unwrap())
    });
    g.bench_function("rl1_ccy_to_1e4", |b| {
        b.iter(|| integrate(&rl1, None, black_box(&[1.0, 1.0]), 0.0, 1e4, &s).unwrap())
    });
    g.bench_function("rhf_heisenberg_to_blowup", |b| {
        b.iter(|| integrate(&heis, None, black_box(&[1.0, 1.1, 1.0, 0.9]), 0.0, 1.0, &s).unwrap())
    });
    g.finish();
}

fn verification(c: &mut Criterion) {
    let mut g = c.benchmark_group("verify");
    g.sample_size(10);
    g.bench_function("formal_ccy", |b| {
        b.iter(|| verify(black_box(&["formal_ccy"])).unwrap())
    });
    g.finish();
}

criterion_group!(benches, symbolic, reduction, integration, verification);
criterion_main!(benches);
