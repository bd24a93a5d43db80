//! Criterion suite over the query engines and the one data-parallel
//! kernel (packedness estimation).
//!
//! Every benchmark id carries the active execution mode — `parallel` when
//! the default `parallel` feature is on, `sequential` otherwise — so the
//! two modes can be compared from the same criterion report directory:
//!
//! ```text
//! cargo bench -p pfre-core                         # parallel ids
//! cargo bench -p pfre-core --no-default-features   # sequential ids
//! ```

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use pfre_core::curve::{build_curve, estimate_packedness, point, Curve};
use pfre_core::frechet::{decide, value, Preprocessed, QuerySpec};
use pfre_core::hausdorff::{build_hausdorff_index, hausdorff_value};
use pfre_core::oracle::{euclidean_oracle, DistanceOracle, PNorm};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::hint::black_box;
use std::sync::Arc;
use std::time::Duration;

const MODE: &str = if cfg!(feature = "parallel") {
    "parallel"
} else {
    "sequential"
};

fn line_curve(n: usize, o: &dyn DistanceOracle) -> Curve {
    let pts = (0..n)
        .map(|k| point(&[k as f64 / (n - 1).max(1) as f64]))
        .collect();
    build_curve(pts, o).unwrap()
}

fn random_query(m: usize, o: &dyn DistanceOracle, seed: u64) -> Curve {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let pts = (0..m).map(|_| point(&[rng.gen_range(0.0..1.0)])).collect();
    build_curve(pts, o).unwrap()
}

fn bench_preprocess(c: &mut Criterion) {
    let o = euclidean_oracle(1, PNorm::L2);
    let mut g = c.benchmark_group(format!("preprocess/{MODE}"));
    for n in [1usize << 10, 1 << 12, 1 << 14] {
        let curve = line_curve(n, o.as_ref());
        g.bench_with_input(BenchmarkId::from_parameter(n), &curve, |b, curve| {
            b.iter(|| Preprocessed::build(black_box(curve.clone())).unwrap())
        });
    }
    g.finish();
}

fn bench_queries(c: &mut Criterion) {
    let o: Arc<dyn DistanceOracle> = euclidean_oracle(1, PNorm::L2);
    let n = 1usize << 14;
    let pre = Preprocessed::build(line_curve(n, o.as_ref()))
        .unwrap()
        .with_c_bound(2.0)
        .unwrap();
    let idx = build_hausdorff_index(&pre, o.as_ref()).unwrap();
    let q = random_query(32, o.as_ref(), 7);
    let spec = QuerySpec::full(0.5);

    let mut g = c.benchmark_group(format!("query/{MODE}"));
    g.bench_function(BenchmarkId::new("decide", n), |b| {
        b.iter(|| decide(&pre, o.as_ref(), black_box(&q), &spec, 0.26).unwrap())
    });
    g.bench_function(BenchmarkId::new("value", n), |b| {
        b.iter(|| value(&pre, o.as_ref(), black_box(&q), &spec).unwrap())
    });
    g.bench_function(BenchmarkId::new("hausdorff_value", n), |b| {
        b.iter(|| hausdorff_value(&pre, &idx, black_box(&q), &spec).unwrap())
    });
    g.finish();
}

fn bench_packedness(c: &mut Criterion) {
    // The estimator is the data-parallel kernel: candidate centers score
    // independently and reduce lexicographically, so this group is where
    // `parallel` and `sequential` ids genuinely diverge.
    let o = euclidean_oracle(2, PNorm::L2);
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let mut g = c.benchmark_group(format!("packedness/{MODE}"));
    g.sample_size(10);
    for n in [24usize, 48] {
        let pts = (0..n)
            .map(|_| point(&[rng.gen_range(-4.0..4.0), rng.gen_range(-4.0..4.0)]))
            .collect();
        let curve = build_curve(pts, o.as_ref()).unwrap();
        g.bench_with_input(BenchmarkId::from_parameter(n), &curve, |b, curve| {
            b.iter(|| estimate_packedness(black_box(curve), o.as_ref()).unwrap())
        });
    }
    g.finish();
}

fn config() -> Criterion {
    Criterion::default()
        .measurement_time(Duration::from_secs(2))
        .warm_up_time(Duration::from_millis(500))
}

criterion_group! {
    name = benches;
    config = config();
    targets = bench_preprocess, bench_queries, bench_packedness
}
criterion_main!(benches);
