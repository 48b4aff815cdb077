use criterion::{criterion_group, criterion_main, BatchSize, Criterion};
use bellstates_core::{
    bell_dobinski, build_table, mandel_q, moment, normalization, weight_series, CoherentFamily,
    FamilyOptions, QuadratureConfig, SeriesConfig, WeightSpec,
};

fn bench_bell_table(c: &mut Criterion) {
    let mut group = c.benchmark_group("bell_table");
    for r in [1u32, 3] {
        group.bench_function(format!("r{r}_n10"), |b| {
            b.iter(|| build_table(r, 1, 10).unwrap())
        });
    }
    group.finish();
}

fn bench_dobinski(c: &mut Criterion) {
    let cfg = SeriesConfig::default();
    c.bench_function("dobinski_r4_n8", |b| {
        b.iter(|| bell_dobinski(4, 8, &cfg).unwrap())
    });
}

fn bench_weight_series(c: &mut Criterion) {
    let cfg = SeriesConfig::default();
    c.bench_function("weight_series_r3_x10", |b| {
        b.iter(|| weight_series(3, 10.0, &cfg).unwrap())
    });
}

fn bench_moment_quadrature(c: &mut Criterion) {
    let scfg = SeriesConfig::default();
    let qcfg = QuadratureConfig::default();
    let spec = WeightSpec::new(2, 1).unwrap();
    c.bench_function("moment_r2_n4", |b| {
        b.iter(|| moment(&spec, 4, &qcfg, &scfg).unwrap())
    });
}

fn bench_normalization_sweep(c: &mut Criterion) {
    let cfg = SeriesConfig::default();
    c.bench_function("normalization_sweep_r2", |b| {
        b.iter_batched(
            || CoherentFamily::bell(2, 1, &FamilyOptions::default()).unwrap(),
            |fam| {
                let mut acc = 0.0;
                for i in 0..=70 {
                    let x = 0.5 * i as f64;
                    acc += normalization(&fam, x, 0, &cfg).unwrap();
                    acc += mandel_q(&fam, x, &cfg).unwrap();
                }
                acc
            },
            BatchSize::SmallInput,
        )
    });
}

criterion_group!(
    benches,
    bench_bell_table,
    bench_dobinski,
    bench_weight_series,
    bench_moment_quadrature,
    bench_normalization_sweep
);
criterion_main!(benches);
