use std::hint::black_box;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use onebit_core::mlenc::{ml_encode, DEFAULT_MAX_M};
use onebit_core::precode::{zf_precoder, AdaptedSelector};
use onebit_core::quantize::BussgangStats;
use onebit_core::rng::rng_from_seed;
use onebit_core::{
    estimate_ser, generate_channel, Encoder, ExperimentConfig, GainProfile, SnrPoint, SymbolVector,
};

fn precoders(c: &mut Criterion) {
    let mut group = c.benchmark_group("zf_precoder");
    for (k, m) in [(4, 32), (20, 200)] {
        let h = generate_channel(k, m, &GainProfile::equal(1.0), 1).unwrap();
        group.bench_with_input(
            BenchmarkId::from_parameter(format!("{k}x{m}")),
            &h,
            |b, h| b.iter(|| zf_precoder(black_box(h)).unwrap()),
        );
    }
    group.finish();

    let h = generate_channel(20, 200, &GainProfile::equal(1.0), 2).unwrap();
    let p = zf_precoder(&h).unwrap();
    c.bench_function("bussgang_stats/20x200", |b| {
        b.iter(|| BussgangStats::from_precoder(black_box(p.matrix())).unwrap())
    });

    let h = generate_channel(10, 30, &GainProfile::equal(1.0), 3).unwrap();
    let s = SymbolVector::random(10, &mut rng_from_seed(4));
    c.bench_function("adapted_select/10x30", |b| {
        b.iter(|| {
            AdaptedSelector::new(black_box(&h))
                .unwrap()
                .select(black_box(&s))
        })
    });
}

fn ml(c: &mut Criterion) {
    let mut group = c.benchmark_group("ml_encode");
    group.sample_size(10);
    for m in [6, 8, 10] {
        let h = generate_channel(2, m, &GainProfile::equal(1.0), 5).unwrap();
        let s = SymbolVector::random(2, &mut rng_from_seed(6));
        group.bench_with_input(BenchmarkId::from_parameter(m), &h, |b, h| {
            b.iter(|| ml_encode(black_box(&s), black_box(h), DEFAULT_MAX_M).unwrap())
        });
    }
    group.finish();
}

fn monte_carlo(c: &mut Criterion) {
    let mut cfg = ExperimentConfig::new(4, 16, Encoder::Zf);
    cfg.snr_points = vec![SnrPoint::Db(0.0), SnrPoint::Db(10.0), SnrPoint::Noiseless];
    cfg.channels = 100;
    cfg.symbols_per_channel = 10;
    cfg.analytic_channels = 10;
    cfg.workers = Some(1);
    let mut group = c.benchmark_group("estimate_ser");
    group.sample_size(10);
    group.bench_function("4x16_1000_trials", |b| {
        b.iter(|| estimate_ser(black_box(&cfg)).unwrap())
    });
    group.finish();
}

criterion_group!(benches, precoders, ml, monte_carlo);
criterion_main!(benches);
