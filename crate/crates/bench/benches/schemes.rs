use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use std::hint::black_box;

use hetcc_core::channel::{verify_schedule, DEFAULT_PRIME};
use hetcc_core::report::{sweep, SweepSpec};
use hetcc_core::{schedule_auto, Demands, Rational, SystemConfig};

fn config(k1: u32, g1: (i64, i64), k2: u32, g2: (i64, i64), l: u32) -> SystemConfig {
    SystemConfig::with_min_library(k1, Rational::new(g1.0, g1.1), k2, Rational::new(g2.0, g2.1), l).unwrap()
}

fn cases() -> Vec<(&'static str, SystemConfig)> {
    vec![
        ("cacheless-5-2", config(5, (1, 5), 2, (0, 1), 2)),
        ("twotype-5-4", config(5, (2, 5), 4, (1, 4), 3)),
        ("cacheless-8-6", config(8, (1, 4), 6, (0, 1), 4)),
    ]
}

fn census(c: &mut Criterion) {
    let mut g = c.benchmark_group("schedule+census");
    for (name, cfg) in cases() {
        let demands = Demands::identity(cfg.k());
        g.bench_with_input(BenchmarkId::from_parameter(name), &cfg, |b, cfg| {
            b.iter(|| {
                let s = schedule_auto(cfg, &demands).unwrap();
                black_box(s.census().unwrap().summary())
            })
        });
    }
    g.finish();
}

fn decode(c: &mut Criterion) {
    let mut g = c.benchmark_group("verify");
    g.sample_size(20);
    for (name, cfg) in cases() {
        let s = schedule_auto(&cfg, &Demands::identity(cfg.k())).unwrap();
        g.bench_with_input(BenchmarkId::from_parameter(name), &s, |b, s| {
            b.iter(|| black_box(verify_schedule(s, 1, DEFAULT_PRIME).unwrap().success))
        });
    }
    g.finish();
}

fn delay_sweep(c: &mut Criterion) {
    let spec = SweepSpec {
        k1: (2..=30).collect(),
        gamma1: (1..=9).map(|i| Rational::new(i, 10)).collect(),
        k2: (0..=30).collect(),
        gamma2: vec![Rational::zero(), Rational::new(1, 20)],
        l: (1..=8).collect(),
    };
    c.bench_function("sweep", |b| b.iter(|| black_box(sweep(&spec, u64::MAX).unwrap().len())));
}

criterion_group!(benches, census, decode, delay_sweep);
criterion_main!(benches);
