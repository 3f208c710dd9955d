//! Parallel-vs-sequential comparison for the data-parallel inner
//! loops: batch Jacobi evaluation and closed-form residual sweeps.

use criterion::{black_box, criterion_group, criterion_main, BenchmarkId, Criterion};
use rdsym_core::elliptic::{jacobi_sncndn, Modulus};
use rdsym_core::exact::{residual_cubic_system, ExactSolutionSpec};
use rdsym_core::parallel::max_map;

fn sample_args(n: usize) -> Vec<(f64, f64)> {
    (0..n)
        .map(|i| {
            let u = (i as f64 * 0.618_033_988_749).fract();
            let v = (i as f64 * 0.414_213_562_373).fract();
            (100.0 * u - 50.0, 0.999 * v)
        })
        .collect()
}

fn identity_dev(args: &(f64, f64)) -> f64 {
    let (z, k) = *args;
    let t = jacobi_sncndn(z, Modulus::new(k).unwrap()).unwrap();
    (t.sn * t.sn + t.cn * t.cn - 1.0).abs()
}

fn bench_batch_sncndn(c: &mut Criterion) {
    let mut group = c.benchmark_group("batch_sncndn_identity");
    for n in [1_000usize, 10_000] {
        let args = sample_args(n);
        group.bench_with_input(BenchmarkId::new("sequential", n), &args, |b, args| {
            b.iter(|| {
                args.iter()
                    .map(identity_dev)
                    .fold(f64::NEG_INFINITY, f64::max)
            })
        });
        group.bench_with_input(BenchmarkId::new("max_map", n), &args, |b, args| {
            b.iter(|| max_map(black_box(args), identity_dev))
        });
    }
    group.finish();
}

fn bench_residual_sweep(c: &mut Criterion) {
    let spec = ExactSolutionSpec::elliptic_pair(1.0, -1.0, 1.0).unwrap();
    let pts: Vec<(f64, f64)> = (0..5_000)
        .map(|i| {
            let u = (i as f64 * 0.618_033_988_749).fract();
            let v = (i as f64 * 0.414_213_562_373).fract();
            (u, 0.1 + 0.4 * v)
        })
        .collect();
    let worst = |p: &(f64, f64)| {
        let (ru, rv) = residual_cubic_system(p.0, p.1, &spec).unwrap();
        ru.abs().max(rv.abs())
    };
    let mut group = c.benchmark_group("residual_sweep");
    group.bench_function("sequential", |b| {
        b.iter(|| {
            pts.iter()
                .map(worst)
                .fold(f64::NEG_INFINITY, f64::max)
        })
    });
    group.bench_function("max_map", |b| b.iter(|| max_map(black_box(&pts), worst)));
    group.finish();
}

criterion_group!(benches, bench_batch_sncndn, bench_residual_sweep);
criterion_main!(benches);
