//! Benchmarks along the main pipeline: point evaluation of an exact
//! solution, symbolic differentiation, an oracle residual sweep, and the
//! two reference solvers on small grids.

use std::hint::black_box;

use criterion::{criterion_group, criterion_main, Criterion};

use fastdiff_bench::{entry, field, sweep_spec};
use fastdiff_core::solver::{
    solve_fast1d, solve_liouville, EllipticProblem, Grid1D, ParabolicConfig,
};
use fastdiff_core::verify::fast_diffusion_residual;
use fastdiff_core::{EquationTag, Point};

fn bench_eval(c: &mut Criterion) {
    let field = field("branched_tan_tanh");
    let point = Point::of(&[("x", 0.7), ("y", 0.9), ("t", 1.1)]);
    c.bench_function("eval_branched_point", |b| {
        b.iter(|| field.eval(black_box(&point)).unwrap())
    });
}

fn bench_differentiate(c: &mut Criterion) {
    let value = field("branched_tan_tanh").value().clone();
    c.bench_function("differentiate_branched_x", |b| {
        b.iter(|| black_box(&value).differentiate("x"))
    });
}

fn bench_residual_sweep(c: &mut Criterion) {
    let field = field("branched_tan_tanh");
    let spec = sweep_spec("branched_tan_tanh", 200);
    let mut group = c.benchmark_group("oracle");
    group.sample_size(20);
    group.bench_function("fast2d_residual_200_samples", |b| {
        b.iter(|| fast_diffusion_residual(black_box(&field), &spec).unwrap())
    });
    group.finish();
}

fn bench_fast1d_march(c: &mut Criterion) {
    let reference = field("fast1d_trig_sh");
    let mut group = c.benchmark_group("solver");
    group.sample_size(20);
    group.bench_function("fast1d_march_65_nodes", |b| {
        b.iter(|| {
            let grid = Grid1D::new(-1.0, 1.0, 65).unwrap();
            let cfg = ParabolicConfig::new(0.5, 0.6, 0.5 * grid.h()).unwrap();
            solve_fast1d(black_box(&reference), grid, &cfg).unwrap()
        })
    });
    group.finish();
}

fn bench_liouville_solve(c: &mut Criterion) {
    let entry = entry("liouville_sec");
    let lambda = match entry.tag {
        EquationTag::Liouville { lambda } => lambda,
        _ => unreachable!("liouville_sec carries a liouville tag"),
    };
    let problem = EllipticProblem {
        reference: &entry.field,
        lambda,
        source: None,
        rect: [0.3, 0.8, 0.3, 0.8],
    };
    let mut group = c.benchmark_group("solver");
    group.sample_size(10);
    group.bench_function("liouville_newton_33x33", |b| {
        b.iter(|| solve_liouville(black_box(&problem), 33, 33, 1e-10, 10).unwrap())
    });
    group.finish();
}

criterion_group!(
    benches,
    bench_eval,
    bench_differentiate,
    bench_residual_sweep,
    bench_fast1d_march,
    bench_liouville_solve
);
criterion_main!(benches);
