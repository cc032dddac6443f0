use std::hint::black_box;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion, Throughput};
use specsketch::{
    apply_filter, approximate_eigenspace, eigencount, gaussian_signals, ideal_lowpass, kmeans,
    Damping, EigenspaceOptions, KMeansOptions, LambdaMode, OpCounter,
};
use specsketch_bench::sensor;

fn spmv(c: &mut Criterion) {
    let mut group = c.benchmark_group("spmv");
    for n in [1_000, 10_000, 100_000] {
        let lap = sensor(n, 1);
        let x = vec![1.0; n];
        let mut y = vec![0.0; n];
        group.throughput(Throughput::Elements(lap.matrix().nnz() as u64));
        group.bench_with_input(BenchmarkId::from_parameter(n), &n, |b, _| {
            b.iter(|| lap.apply(black_box(&x), &mut y))
        });
    }
    group.finish();
}

fn filter(c: &mut Criterion) {
    let mut group = c.benchmark_group("filter");
    group.sample_size(10);
    let lap = sensor(10_000, 1);
    let counter = OpCounter::new();
    for (m, d) in [(100, 25), (500, 25), (500, 50)] {
        let f = ideal_lowpass(0.05, lap.lambda_max_bound(), m, Damping::Jackson).unwrap();
        let r = gaussian_signals(lap.n(), d, 3).unwrap();
        group.bench_function(format!("m{m}-d{d}"), |b| {
            b.iter(|| apply_filter(&lap, &f, black_box(&r), &counter).unwrap())
        });
    }
    group.finish();
}

fn count(c: &mut Criterion) {
    let lap = sensor(10_000, 1);
    let mut group = c.benchmark_group("eigencount");
    group.sample_size(10);
    group.bench_function("m500-d25", |b| {
        b.iter(|| eigencount(&lap, black_box(0.05), 25, 500, 7).unwrap())
    });
    group.finish();
}

fn pipeline(c: &mut Criterion) {
    let lap = sensor(5_000, 1);
    let mut group = c.benchmark_group("eigenspace");
    group.sample_size(10);
    for k in [10, 25, 50] {
        let mut fixed = EigenspaceOptions::new(k);
        fixed.lambda = LambdaMode::Fixed { lambda: 0.05 };
        group.bench_function(format!("fixed-lambda-k{k}"), |b| {
            b.iter(|| approximate_eigenspace(&lap, black_box(&fixed), None).unwrap())
        });
        let fast = EigenspaceOptions::new(k);
        group.bench_function(format!("fast-lambda-k{k}"), |b| {
            b.iter(|| approximate_eigenspace(&lap, black_box(&fast), None).unwrap())
        });
    }
    group.finish();
}

fn clustering(c: &mut Criterion) {
    let lap = sensor(5_000, 1);
    let mut o = EigenspaceOptions::new(20);
    o.lambda = LambdaMode::Fixed { lambda: 0.05 };
    let basis = approximate_eigenspace(&lap, &o, None).unwrap().basis;
    c.bench_function("kmeans-n5000-k20", |b| {
        b.iter(|| kmeans(black_box(basis.as_ref()), 20, 1, KMeansOptions::default()).unwrap())
    });
}

criterion_group!(benches, spmv, filter, count, pipeline, clustering);
criterion_main!(benches);
