//! Parallel-vs-sequential comparison for the heavy kernels: the 2D
//! discrete conjugate, the 2D min-plus convolution, and the verification
//! sweep. Run with `cargo bench`, or `--no-default-features` to time the
//! plain-iterator build on its own.

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};

use fitzcert::grid::{discrete_infconv_2d, llt_2d, Axis, Grid2};
use fitzcert::parallel::Strategy;
use fitzcert::{surjectivity_sweep, CheckConfig, ExtReal, Operator, PlqFunction};

fn strategies() -> Vec<(&'static str, Strategy)> {
    let mut out = vec![("sequential", Strategy::Sequential)];
    if cfg!(feature = "parallel") {
        out.push(("parallel", Strategy::Parallel));
    }
    out
}

fn bench_llt_2d(c: &mut Criterion) {
    let axis = Axis::symmetric(8.0, 257).unwrap();
    let f = Grid2::sample(axis, axis, Strategy::Sequential, |x, y| {
        ExtReal::Finite(0.5 * (x * x + y * y) + (x - y).abs())
    })
    .unwrap();

    let mut group = c.benchmark_group("llt_2d_257");
    for (name, strategy) in strategies() {
        group.bench_with_input(BenchmarkId::from_parameter(name), &strategy, |b, &s| {
            b.iter(|| llt_2d(&f, Some(axis), Some(axis), s).unwrap());
        });
    }
    group.finish();
}

fn bench_infconv_2d(c: &mut Criterion) {
    let axis = Axis::symmetric(4.0, 33).unwrap();
    let f = Grid2::sample(axis, axis, Strategy::Sequential, |x, y| {
        ExtReal::Finite(x * x + y * y)
    })
    .unwrap();
    let g = Grid2::sample(axis, axis, Strategy::Sequential, |x, y| {
        if x.abs() <= 2.0 && y.abs() <= 2.0 {
            ExtReal::Finite(x.abs() + y.abs())
        } else {
            ExtReal::PosInf
        }
    })
    .unwrap();

    let mut group = c.benchmark_group("min_plus_2d_33");
    for (name, strategy) in strategies() {
        group.bench_with_input(BenchmarkId::from_parameter(name), &strategy, |b, &s| {
            b.iter(|| discrete_infconv_2d(&f, &g, [0.0, 0.0], axis, axis, s).unwrap());
        });
    }
    group.finish();
}

fn bench_sweep(c: &mut Criterion) {
    let s = Operator::from_subdifferential(&PlqFunction::abs_fn()).unwrap();
    let j = Operator::duality_map();
    let grid: Vec<f64> = (0..81).map(|i| -4.0 + 0.1 * i as f64).collect();

    let mut group = c.benchmark_group("sweep_81_points");
    for (name, strategy) in strategies() {
        let cfg = CheckConfig { strategy, ..CheckConfig::default() };
        group.bench_with_input(BenchmarkId::from_parameter(name), &cfg, |b, cfg| {
            b.iter(|| surjectivity_sweep(&s, &j, 0.0, &grid, cfg).unwrap());
        });
    }
    group.finish();
}

criterion_group!(kernels, bench_llt_2d, bench_infconv_2d, bench_sweep);
criterion_main!(kernels);
