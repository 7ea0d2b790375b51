use std::hint::black_box;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use spme_bench::box_state;
use spme_core::exact::barenblatt;
use spme_core::noise::{multiplier_path, sample_brownian};
use spme_core::solver::{evolve, stable_dt, step};
use spme_core::{BarenblattParams, CoefficientPair, SchemeConfig, TimeGrid};

fn clocks(c: &mut Criterion) {
    let coeffs = CoefficientPair::constant(1.0, 0.0);
    let mut group = c.benchmark_group("clock");
    for steps in [1_000usize, 10_000] {
        let grid = TimeGrid::uniform(1.0, steps).unwrap();
        group.bench_with_input(BenchmarkId::new("brownian", steps), &grid, |b, grid| {
            b.iter(|| sample_brownian(black_box(grid), 7))
        });
        let noise = sample_brownian(&grid, 7);
        group.bench_with_input(BenchmarkId::new("multiplier", steps), &noise, |b, noise| {
            b.iter(|| multiplier_path(black_box(noise), &coeffs, 2.0).unwrap())
        });
    }
    group.finish();
}

fn solver(c: &mut Criterion) {
    let mut group = c.benchmark_group("solver");
    for cells in [200usize, 800] {
        let state = box_state(cells);
        let dt = stable_dt(&state, 2.0, 0.4);
        group.bench_with_input(BenchmarkId::new("step", cells), &state, |b, s| {
            b.iter(|| step(black_box(s), 2.0, dt).unwrap())
        });
    }
    let state = box_state(200);
    group.bench_function("evolve_to_1", |b| {
        b.iter(|| evolve(black_box(&state), 2.0, 1.0, &SchemeConfig::default()).unwrap())
    });
    group.finish();
}

fn closed_forms(c: &mut Criterion) {
    let p = BarenblattParams::new(2.0, 1, 1.0).unwrap();
    let xs: Vec<f64> = (0..1000).map(|i| -5.0 + 0.01 * i as f64).collect();
    c.bench_function("barenblatt_1000_points", |b| {
        b.iter(|| xs.iter().map(|&x| barenblatt(&p, 1.5, &[x]).unwrap()).sum::<f64>())
    });
}

criterion_group!(benches, clocks, solver, closed_forms);
criterion_main!(benches);
