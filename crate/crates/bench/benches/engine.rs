use criterion::{criterion_group, criterion_main, BatchSize, Criterion};
use std::hint::black_box;

use hyperseed_core::bigfloat::bits_for_digits;
use hyperseed_core::catalog::{Bindings, Catalog};
use hyperseed_core::rational::{rat, Rational};
use hyperseed_core::series::sum_accelerated;
use hyperseed_core::special::constants::pi_bits;
use hyperseed_core::special::gamma_rational;
use hyperseed_core::transform::{inverse_reconstruct, TransformParams};

fn bench_pi(c: &mut Criterion) {
    // pi carries a process-wide cache keyed by precision; vary the
    // precision each iteration so the computation is actually measured
    let mut prec = bits_for_digits(150);
    c.bench_function("pi_150_digits", |b| {
        b.iter(|| {
            prec += 1;
            black_box(pi_bits(prec))
        })
    });
}

fn bench_gamma(c: &mut Criterion) {
    // fresh non-integer argument each iteration so the per-argument cache
    // never short-circuits the computation
    let mut i = 0i64;
    c.bench_function("gamma_rational_40_digits", |b| {
        b.iter(|| {
            i += 1;
            black_box(gamma_rational(&rat(3 * i + 1, 3), 40).unwrap())
        })
    });
}

fn bench_accelerated_sum(c: &mut Criterion) {
    let cat = Catalog::load_default().unwrap();
    let spec = cat
        .find("ramanujan-2-over-pi")
        .unwrap()
        .lhs
        .substitute(&Bindings::new())
        .unwrap();
    c.bench_function("accelerated_2_over_pi_20_digits", |b| {
        b.iter(|| black_box(sum_accelerated(&spec, 20).unwrap()))
    });
}

fn bench_transform_round_trip(c: &mut Criterion) {
    let params = TransformParams::new(rat(5, 7), 12).unwrap();
    let x: Vec<Rational> = (1..=13).map(|k| rat(1, k)).collect();
    c.bench_function("transform_round_trip_len_12", |b| {
        b.iter_batched(
            || x.clone(),
            |x| black_box(inverse_reconstruct(&params, &x).unwrap()),
            BatchSize::SmallInput,
        )
    });
}

criterion_group!(
    benches,
    bench_pi,
    bench_gamma,
    bench_accelerated_sum,
    bench_transform_round_trip
);
criterion_main!(benches);
