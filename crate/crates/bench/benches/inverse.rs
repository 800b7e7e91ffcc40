use criterion::{black_box, criterion_group, criterion_main, BenchmarkId, Criterion};
use sjg_bench::fixture_point;
use sjg_core::inverse::{
    closed_chart_inverse, n2_extended_inverse, pqk_block, schur_inverse, Partition2x2,
};
use sjg_core::matlib::lu_inverse;
use sjg_core::metric::metric_matrix;
use sjg_core::{Chart, CrossConvention, MetricParams};

fn n2_block(c: &mut Criterion) {
    let params = MetricParams::new(1.3, 0.8, 1.7).unwrap();
    let pt = fixture_point(2, true, 3);
    let f = pqk_block(params, &pt, CrossConvention::Transposed).unwrap();
    let mut group = c.benchmark_group("n2_qpk_inverse");
    group.bench_function("lu", |b| b.iter(|| lu_inverse(black_box(&f)).unwrap()));
    group.bench_function("schur", |b| {
        b.iter(|| schur_inverse(&Partition2x2::split(black_box(&f), 4).unwrap()).unwrap())
    });
    group.bench_function("closed", |b| {
        b.iter(|| n2_extended_inverse(params, black_box(&pt)).unwrap())
    });
    group.finish();
}

fn chart_inverse(c: &mut Criterion) {
    let params = MetricParams::new(1.3, 0.8, 1.7).unwrap();
    let mut group = c.benchmark_group("chart_inverse");
    for n in 1..=4 {
        let pt = fixture_point(n, false, 5);
        let chart = Chart::for_point(&pt);
        let g = metric_matrix(params, &pt, &chart).unwrap().to_mat();
        group.bench_with_input(BenchmarkId::new("lu", n), &g, |b, g| {
            b.iter(|| lu_inverse(black_box(g)).unwrap())
        });
        group.bench_with_input(BenchmarkId::new("closed", n), &pt, |b, pt| {
            b.iter(|| {
                closed_chart_inverse(params, black_box(pt), CrossConvention::QuadraticForm).unwrap()
            })
        });
    }
    group.finish();
}

criterion_group!(benches, n2_block, chart_inverse);
criterion_main!(benches);
