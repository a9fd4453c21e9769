use criterion::{black_box, criterion_group, criterion_main, Criterion};

use hdet_bench::base_params;
use hdet_core::{brute_force_max, monte_carlo_verify};

fn bench_brute_force(c: &mut Criterion) {
    let p = base_params();
    let mut group = c.benchmark_group("brute_force_max");
    group.sample_size(20);
    group.bench_function("101x26x26 refined", |b| {
        b.iter(|| brute_force_max(black_box(&p), 101, 26, true))
    });
    group.bench_function("401x101x101 refined", |b| {
        b.iter(|| brute_force_max(black_box(&p), 401, 101, true))
    });
    group.finish();
}

fn bench_monte_carlo(c: &mut Criterion) {
    let p = base_params();
    let mut group = c.benchmark_group("monte_carlo_verify");
    group.sample_size(20);
    group.bench_function("10k samples", |b| {
        b.iter(|| monte_carlo_verify(black_box(&p), 10_000, 42).unwrap())
    });
    group.finish();
}

criterion_group!(benches, bench_brute_force, bench_monte_carlo);
criterion_main!(benches);
