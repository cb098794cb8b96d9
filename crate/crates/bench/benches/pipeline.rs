use std::hint::black_box;

use criterion::{criterion_group, criterion_main, Criterion};
use shuttlecf::calib::encode;
use shuttlecf::models::defaults;
use shuttlecf::{fitness, simulate_all, CalibrationConfig, ModelKind, SimLimits};
use shuttlecf_bench::segments;

fn simulation(c: &mut Criterion) {
    let segs = segments(1);
    let limits = SimLimits::default();
    for kind in [ModelKind::Idm, ModelKind::Blend, ModelKind::LinearAcc] {
        let model = defaults::for_kind(kind);
        c.bench_function(&format!("simulate_600s_{}", kind.as_str()), |b| {
            b.iter(|| simulate_all(black_box(&model), black_box(&segs), &limits, 1.0))
        });
    }
    let model = defaults::for_kind(ModelKind::Idm);
    c.bench_function("simulate_600s_idm_dt0.1", |b| {
        b.iter(|| simulate_all(black_box(&model), black_box(&segs), &limits, 0.1))
    });
}

fn objective(c: &mut Criterion) {
    let segs = segments(3);
    let config = CalibrationConfig::default();
    let genes = encode(&defaults::for_kind(ModelKind::Blend));
    c.bench_function("fitness_blend_3_segments", |b| {
        b.iter(|| fitness(ModelKind::Blend, black_box(&genes), black_box(&segs), &config))
    });
}

criterion_group!(benches, simulation, objective);
criterion_main!(benches);
