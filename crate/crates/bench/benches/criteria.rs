use std::hint::black_box;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion as Bench};
use entrosig_bench::{noise, SAMPLE_RATE};
use entrosig_core::criteria::{c_general, c_jsd, c_sq, entropy, jsd};
use entrosig_core::distributions::{dist_spectral, dist_time_histogram};
use entrosig_core::pipeline::{run_criteria, AnalysisConfig, Criterion};
use entrosig_core::{DiscreteDistribution, EntropyScale, Frame, HistogramConfig, SpectralConfig};

fn spectral(c: &mut Bench) {
    let mut g = c.benchmark_group("dist_spectral");
    for w in [1024usize, 2048, 8192] {
        let frame = Frame::from_samples(noise(w).into_samples());
        let cfg = SpectralConfig::with_n_fft(w);
        g.bench_with_input(BenchmarkId::from_parameter(w), &frame, |b, f| {
            b.iter(|| dist_spectral(black_box(f), &cfg).unwrap())
        });
    }
    g.finish();
}

fn time_histogram(c: &mut Bench) {
    let frame = Frame::from_samples(noise(2048).into_samples());
    let cfg = HistogramConfig::default();
    c.bench_function("dist_time_histogram/2048", |b| {
        b.iter(|| dist_time_histogram(black_box(&frame), &cfg).unwrap())
    });
}

fn scalar_criteria(c: &mut Bench) {
    let frame = Frame::from_samples(noise(2048).into_samples());
    let p = dist_spectral(&frame, &SpectralConfig::with_n_fft(2048)).unwrap();
    let u = DiscreteDistribution::uniform(p.size());
    let mut g = c.benchmark_group("criteria/1025");
    g.bench_function("entropy", |b| b.iter(|| entropy(black_box(&p))));
    g.bench_function("jsd", |b| b.iter(|| jsd(black_box(&p), &u).unwrap()));
    g.bench_function("c_sq", |b| {
        b.iter(|| c_sq(black_box(&p), EntropyScale::Normalized))
    });
    g.bench_function("c_jsd", |b| {
        b.iter(|| c_jsd(black_box(&p), EntropyScale::Normalized))
    });
    g.bench_function("c_general", |b| b.iter(|| c_general(black_box(&p))));
    g.finish();
}

fn pipeline(c: &mut Bench) {
    let buf = noise(2 * SAMPLE_RATE as usize);
    let cfg = AnalysisConfig::with_window(2048);
    let mut g = c.benchmark_group("run_criteria/2s");
    g.sample_size(20);
    g.bench_function("c_sq", |b| {
        b.iter(|| run_criteria(black_box(&buf), &[Criterion::CSq], &cfg).unwrap())
    });
    let all: Vec<Criterion> = Criterion::ALL
        .iter()
        .copied()
        .filter(|c| *c != Criterion::Lh)
        .collect();
    g.bench_function("all_but_lh", |b| {
        b.iter(|| run_criteria(black_box(&buf), &all, &cfg).unwrap())
    });
    g.finish();
}

criterion_group!(benches, spectral, time_histogram, scalar_criteria, pipeline);
criterion_main!(benches);
