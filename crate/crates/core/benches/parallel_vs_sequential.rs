use std::hint::black_box;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use archsw::combinatorial::NegativeTuple;
use archsw::delta::{delta_bruteforce, DiagonalPositive, RationalMatrix};
use archsw::geometry::{boundedness_probe, AmbientVector};
use archsw::numerics::QuadratureSpec;
use archsw::whittaker::{limit_sweep, DEFAULT_B_GRID};
use archsw::Execution;

fn modes() -> Vec<(&'static str, Execution)> {
    let mut modes = vec![("sequential", Execution::Sequential)];
    #[cfg(feature = "parallel")]
    modes.push(("parallel", Execution::Parallel));
    modes
}

fn probe(c: &mut Criterion) {
    let x = AmbientVector::from_real(&[0.4, -1.1, 0.7]).unwrap();
    let mut group = c.benchmark_group("boundedness_probe");
    for (name, exec) in modes() {
        group.bench_with_input(BenchmarkId::from_parameter(name), &exec, |b, &exec| {
            b.iter(|| boundedness_probe(black_box(&x), 10_000, 7, 0.999, exec).unwrap())
        });
    }
    group.finish();
}

fn delta(c: &mut Criterion) {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let u = RationalMatrix::random(&mut rng, 3);
    let z0 = DiagonalPositive::random(&mut rng, 3);
    let mut group = c.benchmark_group("delta_bruteforce_m3_s3");
    group.sample_size(10);
    for (name, exec) in modes() {
        group.bench_with_input(BenchmarkId::from_parameter(name), &exec, |b, &exec| {
            b.iter(|| delta_bruteforce(black_box(&u), &z0, 3, exec).unwrap())
        });
    }
    group.finish();
}

fn sweep(c: &mut Criterion) {
    let a = NegativeTuple::from_ints(&[-1, -2, -3]).unwrap();
    let spec = QuadratureSpec::default();
    let mut group = c.benchmark_group("limit_sweep_m3");
    for (name, exec) in modes() {
        group.bench_with_input(BenchmarkId::from_parameter(name), &exec, |b, &exec| {
            b.iter(|| limit_sweep(black_box(&a), &DEFAULT_B_GRID, &spec, exec).unwrap())
        });
    }
    group.finish();
}

criterion_group!(benches, probe, delta, sweep);
criterion_main!(benches);
