//! Hot-path throughput: bucket-index search at small and large index
//! scales, streaming steps, factorization and the window loop.

use criterion::{criterion_group, criterion_main, BatchSize, Criterion, Throughput};
use num_rational::Ratio;
use std::hint::black_box;

use probstream::sampling::{random_stream, seeded_rng};
use probstream::streaming::run_stream;
use probstream::threshold::factor_over_primes;
use probstream::{
    AppAutomaton, BucketEngine, Rational, RationalProbability, StreamParameters,
    StreamingAutomaton, SwappAutomaton, TppAutomaton, TppMode,
};

fn rat(n: u64, d: u64) -> Rational {
    Ratio::new(n.into(), d.into())
}

fn bench_bucket_index(c: &mut Criterion) {
    let mut group = c.benchmark_group("bucket_index");
    // desk scale: base 9/10, indices in the hundreds
    let desk = BucketEngine::new(rat(9, 10), 2_000).unwrap();
    let q = RationalProbability::from_u64(3, 1_000).unwrap();
    group.bench_function("desk_scale", |b| {
        b.iter(|| desk.index_of(black_box(q.numer()), black_box(q.denom())))
    });
    // stock scale: base 1 - 1e-6, indices around 1e7
    let deep = BucketEngine::new(rat(999_999, 1_000_000), 20_000_000).unwrap();
    let q = RationalProbability::from_u64(1, 65_536).unwrap();
    group.bench_function("deep_scale", |b| {
        b.iter(|| deep.index_of(black_box(q.numer()), black_box(q.denom())))
    });
    group.finish();
}

fn bench_app_stream(c: &mut Criterion) {
    let mut group = c.benchmark_group("app_stream");
    for (n, b, ed) in [(1_000u64, 12u64, 10u64), (10_000, 16, 100)] {
        let app = AppAutomaton::new(StreamParameters::new(n, b).unwrap(), rat(1, ed)).unwrap();
        let stream = random_stream(&mut seeded_rng(1), b, 512, false);
        group.throughput(Throughput::Elements(stream.len() as u64));
        group.bench_function(format!("n{n}_b{b}"), |bench| {
            bench.iter(|| run_stream(&app, &mut seeded_rng(0), black_box(&stream)))
        });
    }
    group.finish();
}

fn bench_factorization(c: &mut Criterion) {
    let tpp =
        TppAutomaton::new(StreamParameters::new(64, 16).unwrap(), TppMode::PrimeVector).unwrap();
    let mut stream = vec![RationalProbability::from_u64(1, 2).unwrap()];
    stream.extend(random_stream(&mut seeded_rng(2), 16, 256, false));
    let mut group = c.benchmark_group("threshold");
    group.throughput(Throughput::Elements(stream.len() as u64));
    group.bench_function("prime_vector_stream", |b| {
        b.iter(|| run_stream(&tpp, &mut seeded_rng(0), black_box(&stream)))
    });
    group.bench_function("factor_single", |b| {
        let q = RationalProbability::from_u64(9_699, 65_521).unwrap();
        b.iter(|| factor_over_primes(black_box(&q), 16))
    });
    group.finish();
}

fn bench_window(c: &mut Criterion) {
    let swapp = SwappAutomaton::new(16, 8, rat(1, 10)).unwrap();
    let stream = random_stream(&mut seeded_rng(3), 8, 256, false);
    let mut group = c.benchmark_group("window");
    group.throughput(Throughput::Elements(stream.len() as u64));
    group.bench_function("swapp_stream", |b| {
        b.iter_batched(
            || swapp.initial_state(&mut seeded_rng(0)),
            |mut state| {
                for q in &stream {
                    state = swapp.step(state, q).unwrap();
                }
                state
            },
            BatchSize::SmallInput,
        )
    });
    group.finish();
}

criterion_group!(
    benches,
    bench_bucket_index,
    bench_app_stream,
    bench_factorization,
    bench_window
);
criterion_main!(benches);
