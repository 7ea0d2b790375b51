use proptest::prelude::*;

use spme_core::analysis::loglog_slope;
use spme_core::noise::{
    derive_seed, hitting_time, inverse_clock, multiplier_moment, multiplier_path, sample_brownian,
};
use spme_core::{CoefficientPair, StepFunction, TimeGrid};

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn multiplier_invariants(seed in any::<u64>(), f in -2.0f64..2.0, g in -2.0f64..2.0, m in 1.0f64..4.0, steps in 2usize..400) {
        let grid = TimeGrid::uniform(1.5, steps).unwrap();
        let mp = multiplier_path(&sample_brownian(&grid, seed), &CoefficientPair::constant(f, g), m).unwrap();
        prop_assert_eq!(mp.h()[0], 1.0);
        prop_assert_eq!(mp.clock()[0], 0.0);
        prop_assert!(mp.h().iter().all(|&h| h > 0.0));
        prop_assert!(mp.clock().windows(2).all(|w| w[1] > w[0]));
    }

    #[test]
    fn inverse_clock_round_trip(seed in any::<u64>(), frac in 0.0f64..1.0) {
        let grid = TimeGrid::uniform(2.0, 300).unwrap();
        let mp = multiplier_path(&sample_brownian(&grid, seed), &CoefficientPair::constant(1.0, 0.2), 2.0).unwrap();
        let s = frac * mp.clock_end();
        let t = inverse_clock(&mp, s).unwrap();
        prop_assert!((mp.clock_at(t).unwrap() - s).abs() <= 1e-12 * (1.0 + s));
    }

    #[test]
    fn refinement_keeps_coarse_values(seed in any::<u64>(), steps in 2usize..100) {
        let noise = sample_brownian(&TimeGrid::uniform(1.0, steps).unwrap(), seed);
        let fine = noise.refine();
        for (i, w) in noise.values().iter().enumerate() {
            prop_assert_eq!(fine.values()[2 * i], *w);
        }
    }
}

#[test]
fn seeds_are_distinct_and_stable() {
    let seeds: Vec<u64> = (0..1000).map(|i| derive_seed(17, i)).collect();
    let mut sorted = seeds.clone();
    sorted.sort_unstable();
    sorted.dedup();
    assert_eq!(sorted.len(), seeds.len());
    assert_eq!(seeds, (0..1000).map(|i| derive_seed(17, i)).collect::<Vec<_>>());
}

#[test]
fn moment_formula_matches_monte_carlo() {
    let coeffs = CoefficientPair::constant(0.5, 0.1);
    let grid = TimeGrid::uniform(1.0, 50).unwrap();
    let n = 20_000;
    let samples: Vec<f64> = (0..n)
        .map(|i| {
            let mp = multiplier_path(&sample_brownian(&grid, derive_seed(3, i)), &coeffs, 2.0).unwrap();
            mp.h().last().unwrap().powi(2)
        })
        .collect();
    let summary = spme_core::stats::Summary::of(&samples);
    let expected = multiplier_moment(&coeffs, 2.0, 1.0).unwrap();
    assert!(summary.within(expected, 3.0), "{summary:?} vs {expected}");
}

/// The exponential multiplier solves `dh = h(f dw + g dt)`; its left-endpoint
/// Itô sum converges at strong order 1/2 over refinements of one path.
#[test]
fn ito_sum_converges_at_half_order() {
    let coeffs = CoefficientPair::constant(1.0, 0.0);
    let coarse = TimeGrid::uniform(1.0, 16).unwrap();
    let levels = 6;
    let paths = 200;
    let mut sq = vec![0.0; levels];
    for i in 0..paths {
        let mut noise = sample_brownian(&coarse, derive_seed(9, i));
        for (level, acc) in sq.iter_mut().enumerate() {
            if level > 0 {
                noise = noise.refine();
            }
            let mp = multiplier_path(&noise, &coeffs, 2.0).unwrap();
            let w = noise.values();
            let sum: f64 = (0..w.len() - 1).map(|k| mp.h()[k] * (w[k + 1] - w[k])).sum();
            let gap = mp.h().last().unwrap() - 1.0 - sum;
            *acc += gap * gap;
        }
    }
    let steps: Vec<f64> = (0..levels).map(|l| 1.0 / (16.0 * 2f64.powi(l as i32))).collect();
    let rms: Vec<f64> = sq.iter().map(|s| (s / paths as f64).sqrt()).collect();
    let slope = loglog_slope(&steps, &rms);
    assert!((0.35..=0.65).contains(&slope), "slope {slope}, rms {rms:?}");
}

#[test]
fn log_multiplier_is_exact_for_step_coefficients() {
    let f = StepFunction::new(vec![0.0, 0.5], vec![2.0, -1.0]).unwrap();
    let g = StepFunction::constant(0.3);
    let grid = TimeGrid::uniform(1.0, 64).unwrap();
    let noise = sample_brownian(&grid, 5);
    let mp = multiplier_path(&noise, &CoefficientPair::new(f, g), 2.0).unwrap();
    let w = noise.values();
    // ∫f dw = 2 w(1/2) − (w(1) − w(1/2)); ∫f² = 2 + 1/2
    let expected = 2.0 * w[32] - (w[64] - w[32]) + 0.3 - 0.5 * 2.5;
    assert!((mp.log_h().last().unwrap() - expected).abs() < 1e-12);
}

#[test]
fn hitting_time_without_crossing_is_none() {
    let grid = TimeGrid::uniform(5.0, 500).unwrap();
    let mp = multiplier_path(&sample_brownian(&grid, 1), &CoefficientPair::constant(0.0, 0.0), 2.0).unwrap();
    assert_eq!(hitting_time(&mp, 10.0).unwrap(), None);
    assert!((hitting_time(&mp, 2.5).unwrap().unwrap() - 2.5).abs() < 1e-12);
}
