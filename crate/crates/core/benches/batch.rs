//! Sequential vs rayon execution of independent exact verifications.

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use heun_tridiag::batch::Execution;
use heun_tridiag::rhalgebra::verify_algebra;
use heun_tridiag::sampling::{self, CaseKind};
use heun_tridiag::tridiag::verify_matrix_entries;

fn workload() -> Vec<heun_tridiag::tridiag::TridiagConfig> {
    let mut rng = sampling::rng(42);
    CaseKind::ALL
        .iter()
        .flat_map(|&k| (0..8).map(move |_| k))
        .collect::<Vec<_>>()
        .into_iter()
        .map(|k| sampling::random_config(&mut rng, k, 12))
        .collect()
}

fn bench(c: &mut Criterion) {
    let cfgs = workload();
    let mut group = c.benchmark_group("verify");
    group.sample_size(10);
    for (label, exec) in [("sequential", Execution::Sequential), ("parallel", Execution::Parallel)] {
        group.bench_with_input(BenchmarkId::new("matrix_entries_n12", label), &exec, |b, &exec| {
            b.iter(|| exec.map(&cfgs, |cfg| verify_matrix_entries(cfg, 12).map(|r| r.passed())))
        });
        group.bench_with_input(BenchmarkId::new("algebra_d10", label), &exec, |b, &exec| {
            b.iter(|| exec.map(&cfgs, |cfg| verify_algebra(cfg, 10).map(|r| r.passed())))
        });
    }
    group.finish();
}

criterion_group!(benches, bench);
criterion_main!(benches);
