use std::hint::black_box;

use bergman_core::grid::Grid;
use bergman_core::kernel::{radial_norms_with, KernelEvaluator};
use bergman_core::models::{RadialModel, SpindleParams};
use bergman_core::scaling::{gap_grid, scaled_profile_with, Variant};
use bergman_core::verify::{bound_check, default_p_set, SweepConfig};
use bergman_core::Execution;
use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};

const STRATEGIES: [(&str, Execution); 2] = [("sequential", Execution::Sequential), ("parallel", Execution::Parallel)];

fn spindle_profile(c: &mut Criterion) {
    let model = RadialModel::spindle(SpindleParams::new(0.3, 0.4).unwrap());
    let radii = Grid::linear(0.0, 5.0, 2000).unwrap().points();
    let ev = KernelEvaluator::new(&model, 500, 5.0).unwrap();
    let mut group = c.benchmark_group("spindle_profile_p500");
    for (name, exec) in STRATEGIES {
        group.bench_function(name, |b| b.iter(|| ev.profile(exec, black_box(&radii)).unwrap()));
    }
    group.finish();
}

fn scaled_profile(c: &mut Criterion) {
    let sp = SpindleParams::new(0.5, 0.25).unwrap();
    let ys = gap_grid();
    let mut group = c.benchmark_group("scaled_profile_p400");
    for (name, exec) in STRATEGIES {
        group.bench_function(name, |b| {
            b.iter(|| scaled_profile_with(exec, sp, black_box(400), &ys, Variant::Flux).unwrap())
        });
    }
    group.finish();
}

fn poincare_norms(c: &mut Criterion) {
    let model = RadialModel::poincare_disc();
    let mut group = c.benchmark_group("poincare_norms");
    group.sample_size(10);
    for p in [64u32, 512] {
        for (name, exec) in STRATEGIES {
            group.bench_with_input(BenchmarkId::new(name, p), &p, |b, &p| {
                b.iter(|| radial_norms_with(exec, &model, p, model.index_range(p)).unwrap())
            });
        }
    }
    group.finish();
}

fn bound_sweep(c: &mut Criterion) {
    let model = RadialModel::spindle(SpindleParams::new(0.5, 0.0).unwrap());
    let grid = Grid::linear(0.05, 1.0, 19).unwrap();
    let ps = default_p_set();
    let mut group = c.benchmark_group("bound_check_spindle");
    group.sample_size(10);
    for (name, exec) in STRATEGIES {
        let cfg = SweepConfig { exec, ..SweepConfig::default() };
        group.bench_function(name, |b| b.iter(|| bound_check(&model, black_box(&ps), &grid, cfg).unwrap()));
    }
    group.finish();
}

criterion_group!(benches, spindle_profile, scaled_profile, poincare_norms, bound_sweep);
criterion_main!(benches);
