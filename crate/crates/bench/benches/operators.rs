use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use latsamp::function::{cusp, square_wave};
use latsamp::harness::task_rng;
use latsamp::norms::{discrete_seminorm_poly, norm, NormSpec};
use latsamp::sampling::{Family, SamplingOperatorSpec};
use latsamp::solvers::{one_sided_on, ConstraintGrid};
use latsamp::steklov::steklov_prefix_value;
use latsamp::{build_cache, make_uniform_nodes, partial_sum, SteklovOps, TrigPoly, Window};
use std::f64::consts::PI;
use std::hint::black_box;

fn sampling(c: &mut Criterion) {
    let mut g = c.benchmark_group("apply");
    let f = square_wave();
    for n in [32usize, 256, 2048] {
        for (name, fam) in [
            ("lagrange", Family::Lagrange),
            ("fejer", Family::QuasiInterp(Window::Fejer)),
        ] {
            let op = SamplingOperatorSpec::periodic(fam, n).unwrap();
            g.bench_with_input(BenchmarkId::new(name, n), &n, |b, _| b.iter(|| op.apply(black_box(&f)).unwrap()));
        }
    }
    g.finish();
}

fn norms(c: &mut Criterion) {
    let mut g = c.benchmark_group("norm");
    let t = TrigPoly::random(64, &mut task_rng(1, 64, 0));
    let nodes = make_uniform_nodes(64).unwrap();
    for spec in ["l1", "lp:3", "wlp:2:0.5", "orlicz:llogl"] {
        let s = NormSpec::parse(spec).unwrap();
        g.bench_function(BenchmarkId::new("continuous", spec), |b| b.iter(|| norm(black_box(&t), &s).unwrap()));
        g.bench_function(BenchmarkId::new("discrete", spec), |b| {
            b.iter(|| discrete_seminorm_poly(black_box(&t), &nodes, &s).unwrap())
        });
    }
    g.finish();
}

fn steklov(c: &mut Criterion) {
    let mut g = c.benchmark_group("steklov");
    let f = cusp(0.5);
    let h = PI / 65.0;
    g.bench_function("cache_build_4096", |b| b.iter(|| build_cache(black_box(&f), 4096).unwrap()));
    let cache = build_cache(&f, 4096).unwrap();
    g.bench_function("prefix_value", |b| b.iter(|| steklov_prefix_value(&cache, h, true, black_box(0.3))));
    let t = TrigPoly::random(128, &mut task_rng(2, 128, 0));
    g.bench_function("multiplier_r2_n128", |b| b.iter(|| black_box(&t).i_minus_a_pow(h, 2, true).unwrap()));
    g.bench_function("partial_sum_64", |b| b.iter(|| partial_sum(black_box(&cache), 64).unwrap()));
    g.finish();
}

fn lp(c: &mut Criterion) {
    let mut g = c.benchmark_group("one_sided");
    g.sample_size(10);
    let grid = ConstraintGrid::new(&square_wave(), 1024).unwrap();
    for n in [8usize, 32] {
        g.bench_with_input(BenchmarkId::from_parameter(n), &n, |b, &n| b.iter(|| one_sided_on(&grid, n).unwrap()));
    }
    g.finish();
}

criterion_group!(benches, sampling, norms, steklov, lp);
criterion_main!(benches);
