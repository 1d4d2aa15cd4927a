use std::hint::black_box;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use nrmi_core::{
    replicate_rng, run_figure1, sample_crm_ferguson_klass, sample_dp_stick_breaking, variance_integral_ia, BaseMeasure,
    ExperimentConfig, LevyFamily, TruncationSpec,
};

fn ferguson_klass(c: &mut Criterion) {
    let mut g = c.benchmark_group("ferguson_klass");
    let base = BaseMeasure::UniformOn01;
    for family in [LevyFamily::dirichlet(), LevyFamily::nig()] {
        for (a, t) in [(5.0, 200), (1000.0, 3000)] {
            let trunc = TruncationSpec::fixed(t);
            g.bench_with_input(BenchmarkId::new(family.to_string(), format!("a={a},T={t}")), &a, |b, &a| {
                let mut rng = replicate_rng(1, 0);
                b.iter(|| sample_crm_ferguson_klass(&family, a, &base, &trunc, &mut rng).unwrap())
            });
        }
    }
    g.finish();
}

fn stick_breaking(c: &mut Criterion) {
    let base = BaseMeasure::UniformOn01;
    c.bench_function("stick_breaking a=10 T=500", |b| {
        let mut rng = replicate_rng(2, 0);
        b.iter(|| sample_dp_stick_breaking(black_box(10.0), &base, 500, &mut rng).unwrap())
    });
}

fn analytics(c: &mut Criterion) {
    let nig = LevyFamily::nig();
    c.bench_function("inverse_tail_mass nig", |b| b.iter(|| nig.inverse_tail_mass(black_box(37.5)).unwrap()));
    c.bench_function("variance_integral nig a=100", |b| {
        b.iter(|| variance_integral_ia(&nig, black_box(100.0)).unwrap())
    });
}

fn suite(c: &mut Criterion) {
    let mut g = c.benchmark_group("suite");
    g.sample_size(10);
    let cfg = ExperimentConfig { replicates: 200, ..ExperimentConfig::figure1(LevyFamily::dirichlet(), 1) };
    g.bench_function("figure1 dirichlet 200 reps", |b| b.iter(|| run_figure1(&cfg).unwrap()));
    g.finish();
}

criterion_group!(benches, ferguson_klass, stick_breaking, analytics, suite);
criterion_main!(benches);
