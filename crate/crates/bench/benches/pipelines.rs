//! Throughput benchmarks for the hot paths: sampling, path simulation,
//! coupled draws, the threshold-sweep estimator, and the diagnostics.

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion, Throughput};
use std::hint::black_box;
use tailstab_core::coefficients::CoefficientSeq;
use tailstab_core::heavy_tails::{Family, TailLaw};
use tailstab_core::processes::{simulate_coupled, simulate_path, ProcessSpec};
use tailstab_core::tailstats::high_quantile_fit;
use tailstab_core::tas::{estimate_theta_curve, GridPolicy};
use tailstab_core::verify::hill_estimate;

fn bench_samplers(c: &mut Criterion) {
    let mut group = c.benchmark_group("sample_iid");
    let n = 100_000usize;
    group.throughput(Throughput::Elements(n as u64));
    for (name, law) in [
        ("pareto", TailLaw::new(Family::Pareto, 2.0, 1.0, 1.0).unwrap()),
        ("frechet", TailLaw::new(Family::Frechet, 1.0, 1.0, 1.0).unwrap()),
        ("stable", TailLaw::new(Family::SymmetricStable, 1.5, 0.5, 1.0).unwrap()),
        ("student_t", TailLaw::new(Family::StudentT, 3.0, 0.5, 1.0).unwrap()),
    ] {
        group.bench_function(name, |b| {
            b.iter(|| black_box(law.sample_iid(n, 1, 0)));
        });
    }
    group.finish();
}

fn bench_paths(c: &mut Criterion) {
    let mut group = c.benchmark_group("simulate_path");
    let law = TailLaw::new(Family::Pareto, 2.0, 1.0, 1.0).unwrap();
    for m_tol in [1e-2, 1e-4] {
        let coeffs = CoefficientSeq::power_decay(3.0, 1.0, 1.0, m_tol).unwrap();
        let spec = ProcessSpec::linear(law, coeffs.clone()).unwrap();
        let n = 100_000;
        group.throughput(Throughput::Elements(n as u64));
        group.bench_with_input(
            BenchmarkId::new("linear", format!("M={}", coeffs.truncation())),
            &spec,
            |b, spec| b.iter(|| black_box(simulate_path(spec, n, 7).unwrap())),
        );
    }
    group.finish();
}

fn bench_coupled_and_theta(c: &mut Criterion) {
    let law = TailLaw::new(Family::Frechet, 1.0, 1.0, 1.0).unwrap();
    let mut values = vec![1.0];
    values.extend((1..=8).map(|j| (j as f64).powi(-2)));
    let coeffs = CoefficientSeq::explicit(values, 0.0).unwrap();
    let spec = ProcessSpec::max_linear(law, coeffs).unwrap();
    let lags: Vec<usize> = (1..=8).collect();
    let reps = 20_000;
    c.bench_function("simulate_coupled/max_linear_20k", |b| {
        b.iter(|| black_box(simulate_coupled(&spec, &lags, reps, 3).unwrap()));
    });
    let draws = simulate_coupled(&spec, &lags, reps, 3).unwrap();
    let policy = GridPolicy {
        z_grid_size: 50,
        min_exceed: 100,
        confidence: 0.01,
    };
    c.bench_function("estimate_theta_curve/8_lags_20k", |b| {
        b.iter(|| black_box(estimate_theta_curve(&draws, 20.0, &policy).unwrap()));
    });
}

fn bench_diagnostics(c: &mut Criterion) {
    let law = TailLaw::new(Family::Pareto, 2.0, 1.0, 1.0).unwrap();
    let sample = law.sample_iid(1_000_000, 5, 0);
    c.bench_function("hill_estimate/1e6_k1e3", |b| {
        b.iter(|| black_box(hill_estimate(&sample, 1000).unwrap()));
    });
    let path = law.sample_iid(100_000, 6, 0);
    c.bench_function("high_quantile_fit/intercept_1e5", |b| {
        b.iter(|| black_box(high_quantile_fit(&path, None, 0.05).unwrap()));
    });
}

criterion_group!(
    benches,
    bench_samplers,
    bench_paths,
    bench_coupled_and_theta,
    bench_diagnostics
);
criterion_main!(benches);
