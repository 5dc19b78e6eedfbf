use criterion::{black_box, criterion_group, criterion_main, BenchmarkId, Criterion};
use leaky_bench::circle_mesh;
use leaky_core::birman_schwinger::assemble_bs_matrix;
use leaky_core::special_functions::k0;

fn bench_k0(c: &mut Criterion) {
    let xs: Vec<f64> = (1..=1000).map(|i| i as f64 * 0.01).collect();
    c.bench_function("k0/1000 points on (0, 10]", |b| {
        b.iter(|| xs.iter().map(|&x| k0(black_box(x))).sum::<f64>())
    });
}

fn bench_assembly(c: &mut Criterion) {
    let mut group = c.benchmark_group("assemble");
    for n in [256, 512, 1024] {
        let disc = circle_mesh(n);
        group.bench_with_input(BenchmarkId::from_parameter(n), &disc, |b, d| {
            b.iter(|| assemble_bs_matrix(d, 1.0, black_box(0.5)).unwrap())
        });
    }
    group.finish();
}

criterion_group!(benches, bench_k0, bench_assembly);
criterion_main!(benches);
