//! Criterion benchmarks: aggregation kernel, cross-section diagnostics,
//! SVG rendering, and the end-to-end fixture pipeline.

use std::hint::black_box;
use std::path::PathBuf;

use criterion::{criterion_group, criterion_main, Criterion};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use shadow_core::composite::geometric_mean_log;
use shadow_core::dataset::Period;
use shadow_core::plot::{render_svg, Highlight, ScatterPoint, ScatterSpec};
use shadow_core::report::{run_pipeline, RunConfig};
use shadow_core::stats::summarize;

fn fixture() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../fixtures/synthetic_85.csv")
}

fn cross_section(n: usize) -> Vec<f64> {
    let mut rng = ChaCha8Rng::seed_from_u64(42);
    (0..n).map(|_| rng.random_range(0.05..2.0)).collect()
}

fn bench_geometric_mean(c: &mut Criterion) {
    let values = cross_section(8);
    c.bench_function("geometric_mean_log/8", |b| {
        b.iter(|| geometric_mean_log(black_box(&values)))
    });
}

fn bench_summarize(c: &mut Criterion) {
    let values = cross_section(85);
    c.bench_function("summarize/85", |b| b.iter(|| summarize(black_box(&values))));
}

fn bench_render_svg(c: &mut Criterion) {
    let values = cross_section(170);
    let points: Vec<ScatterPoint> = values
        .chunks(2)
        .enumerate()
        .map(|(i, pair)| ScatterPoint {
            label: format!("R{i:02}"),
            x: pair[0],
            y: pair[1],
            highlight: Highlight::None,
        })
        .collect();
    let spec = ScatterSpec {
        title: "benchmark scatter".to_string(),
        x_label: "x".to_string(),
        y_label: "y".to_string(),
        points,
    };
    c.bench_function("render_svg/85", |b| b.iter(|| render_svg(black_box(&spec))));
}

fn bench_pipeline(c: &mut Criterion) {
    let single = RunConfig::new(fixture(), vec![Period::Year(2019)]);
    c.bench_function("run_pipeline/fixture/1-period", |b| {
        b.iter(|| run_pipeline(black_box(&single)).unwrap())
    });

    let full = RunConfig::new(fixture(), (2015..=2019).map(Period::Year).collect());
    c.bench_function("run_pipeline/fixture/5-periods", |b| {
        b.iter(|| run_pipeline(black_box(&full)).unwrap())
    });
}

criterion_group!(
    benches,
    bench_geometric_mean,
    bench_summarize,
    bench_render_svg,
    bench_pipeline
);
criterion_main!(benches);
