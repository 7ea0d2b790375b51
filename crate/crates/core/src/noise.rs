//! Brownian paths, the stochastic exponential `h` and the random clock `H`.
//!
//! For coefficients `f`, `g` and a standard Brownian motion `w`,
//!
//! ```text
//! h(t) = exp( ∫g ds + ∫f dw − ½∫f² ds ),      H(t) = ∫₀ᵗ h^{γ−1}(s) ds
//! ```
//!
//! Coefficients are right-continuous step functions whose knots must sit on
//! grid nodes. On each grid interval the coefficients are then constant, so the
//! left-endpoint Itô sum for `∫f dw` and the drift integrals are exact at the
//! nodes given the sampled increments; only `H` carries quadrature error
//! (left-endpoint rule, first order in the step).

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::error::{invalid, Error, Result};

/// Relative tolerance used to match coefficient knots against grid nodes.
const KNOT_MATCH_TOL: f64 = 1e-12;

/// SplitMix64 finalizer, a bijection on `u64`.
pub fn mix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Seed of path `index` under `master`: `mix64(master ^ index)`.
///
/// Serial and parallel runs draw identical paths because the seed depends only
/// on the index.
pub fn derive_seed(master: u64, index: u64) -> u64 {
    mix64(master ^ index)
}

/// Strictly increasing time nodes starting at 0.
#[derive(Debug, Clone, PartialEq)]
pub struct TimeGrid {
    nodes: Vec<f64>,
}

impl TimeGrid {
    pub fn new(nodes: Vec<f64>) -> Result<Self> {
        if nodes.len() < 2 {
            return Err(invalid("time grid needs at least 2 nodes"));
        }
        if nodes[0] != 0.0 {
            return Err(invalid("time grid must start at 0"));
        }
        if nodes.iter().any(|t| !t.is_finite()) {
            return Err(invalid("time grid nodes must be finite"));
        }
        if nodes.windows(2).any(|w| w[1] <= w[0]) {
            return Err(invalid("time grid nodes must be strictly increasing"));
        }
        Ok(Self { nodes })
    }

    /// `steps` equal intervals on `[0, horizon]`.
    pub fn uniform(horizon: f64, steps: usize) -> Result<Self> {
        if !(horizon > 0.0) || !horizon.is_finite() {
            return Err(invalid(format!("horizon must be positive, got {horizon}")));
        }
        if steps == 0 {
            return Err(invalid("time grid needs at least 1 step"));
        }
        let dt = horizon / steps as f64;
        let mut nodes: Vec<f64> = (0..=steps).map(|i| i as f64 * dt).collect();
        nodes[steps] = horizon;
        Self::new(nodes)
    }

    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn horizon(&self) -> f64 {
        *self.nodes.last().expect("grid has nodes")
    }

    pub fn step(&self, i: usize) -> f64 {
        self.nodes[i + 1] - self.nodes[i]
    }

    /// Interval `i` and weight `θ ∈ [0, 1]` with `t = (1−θ)·nodes[i] + θ·nodes[i+1]`.
    pub fn locate(&self, t: f64) -> Result<(usize, f64)> {
        let horizon = self.horizon();
        if !(0.0..=horizon).contains(&t) {
            return Err(Error::OutOfRange {
                what: "time",
                value: t,
                lo: 0.0,
                hi: horizon,
            });
        }
        let upper = self.nodes.partition_point(|&node| node <= t);
        let i = upper.saturating_sub(1).min(self.nodes.len() - 2);
        let theta = ((t - self.nodes[i]) / self.step(i)).clamp(0.0, 1.0);
        Ok((i, theta))
    }

    /// Index of the node equal to `t` up to a relative tolerance, if any.
    pub fn node_index(&self, t: f64) -> Option<usize> {
        let tol = KNOT_MATCH_TOL * self.horizon().max(1.0);
        let j = self.nodes.partition_point(|&node| node < t - tol);
        (j < self.nodes.len() && (self.nodes[j] - t).abs() <= tol).then_some(j)
    }

    /// Grid with every interval split at its midpoint.
    pub fn refined(&self) -> TimeGrid {
        let mut nodes = Vec::with_capacity(2 * self.nodes.len() - 1);
        for w in self.nodes.windows(2) {
            nodes.push(w[0]);
            nodes.push(0.5 * (w[0] + w[1]));
        }
        nodes.push(self.horizon());
        TimeGrid { nodes }
    }
}

/// Right-continuous step function on `[0, ∞)`.
///
/// `values[i]` holds on `[knots[i], knots[i+1])`; the last value extends to
/// infinity, so a zero tail means compact support.
#[derive(Debug, Clone, PartialEq)]
pub struct StepFunction {
    knots: Vec<f64>,
    values: Vec<f64>,
}

impl StepFunction {
    pub fn new(knots: Vec<f64>, values: Vec<f64>) -> Result<Self> {
        if knots.is_empty() || knots.len() != values.len() {
            return Err(invalid("step function needs matching non-empty knots and values"));
        }
        if knots[0] != 0.0 {
            return Err(invalid("step function knots must start at 0"));
        }
        if knots.windows(2).any(|w| w[1] <= w[0]) || knots.iter().any(|k| !k.is_finite()) {
            return Err(invalid("step function knots must be finite and strictly increasing"));
        }
        if values.iter().any(|v| !v.is_finite()) {
            return Err(invalid("step function values must be finite"));
        }
        Ok(Self { knots, values })
    }

    pub fn constant(value: f64) -> Self {
        Self {
            knots: vec![0.0],
            values: vec![value],
        }
    }

    /// `value` on `[0, cutoff)`, zero afterwards.
    pub fn pulse(value: f64, cutoff: f64) -> Result<Self> {
        Self::new(vec![0.0, cutoff], vec![value, 0.0])
    }

    pub fn knots(&self) -> &[f64] {
        &self.knots
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn tail(&self) -> f64 {
        *self.values.last().expect("non-empty")
    }

    /// Last knot; the function is constant after it.
    pub fn cutoff(&self) -> f64 {
        *self.knots.last().expect("non-empty")
    }

    pub fn value_at(&self, t: f64) -> f64 {
        let j = self.knots.partition_point(|&k| k <= t);
        self.values[j.saturating_sub(1)]
    }

    fn integrate_with(&self, t: f64, map: impl Fn(f64) -> f64) -> f64 {
        let mut acc = 0.0;
        for (i, (&k, &v)) in self.knots.iter().zip(&self.values).enumerate() {
            if k >= t {
                break;
            }
            let end = self.knots.get(i + 1).map_or(t, |&next| next.min(t));
            acc += map(v) * (end - k);
        }
        acc
    }

    /// `∫₀ᵗ value`.
    pub fn integral(&self, t: f64) -> f64 {
        self.integrate_with(t, |v| v)
    }

    /// `∫₀ᵗ value²`.
    pub fn integral_sq(&self, t: f64) -> f64 {
        self.integrate_with(t, |v| v * v)
    }

    /// Pointwise combination on the union of both knot sets.
    pub fn combine(&self, other: &StepFunction, op: impl Fn(f64, f64) -> f64) -> StepFunction {
        let mut knots: Vec<f64> = self.knots.iter().chain(&other.knots).copied().collect();
        knots.sort_by(f64::total_cmp);
        knots.dedup();
        let values = knots
            .iter()
            .map(|&k| op(self.value_at(k), other.value_at(k)))
            .collect();
        StepFunction { knots, values }
    }
}

/// Deterministic coefficients `f` (noise intensity) and `g` (drift).
#[derive(Debug, Clone, PartialEq)]
pub struct CoefficientPair {
    pub f: StepFunction,
    pub g: StepFunction,
}

impl CoefficientPair {
    pub fn new(f: StepFunction, g: StepFunction) -> Self {
        Self { f, g }
    }

    pub fn constant(f: f64, g: f64) -> Self {
        Self::new(StepFunction::constant(f), StepFunction::constant(g))
    }

    /// Coefficients of the pressure multiplier `h̃ = h^{m−1}`: `f̃ = (m−1)f`,
    /// `g̃ = (m−1)g + ((m−1)(m−2)/2)·f²`.
    pub fn pressure(&self, m: f64) -> CoefficientPair {
        let k = m - 1.0;
        let f = self.f.combine(&self.f, |a, _| k * a);
        let g = self.g.combine(&self.f, |gv, fv| k * gv + 0.5 * k * (m - 2.0) * fv * fv);
        CoefficientPair { f, g }
    }
}

/// A sampled Brownian path on a time grid.
#[derive(Debug, Clone, PartialEq)]
pub struct NoisePath {
    grid: TimeGrid,
    w: Vec<f64>,
    seed: u64,
}

impl NoisePath {
    pub fn from_values(grid: TimeGrid, w: Vec<f64>, seed: u64) -> Result<Self> {
        if w.len() != grid.len() {
            return Err(invalid("noise values must match the grid length"));
        }
        if w[0] != 0.0 {
            return Err(invalid("Brownian path must start at 0"));
        }
        Ok(Self { grid, w, seed })
    }

    pub fn grid(&self) -> &TimeGrid {
        &self.grid
    }

    pub fn values(&self) -> &[f64] {
        &self.w
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    /// Same realization on the midpoint-refined grid, filled in by Brownian bridge.
    ///
    /// Existing node values are kept, so successive refinements share one path.
    pub fn refine(&self) -> NoisePath {
        let seed = mix64(self.seed ^ 0xB71D_6E00_0000_0000);
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let nodes = self.grid.nodes();
        let mut w = Vec::with_capacity(2 * self.w.len() - 1);
        for i in 0..self.w.len() - 1 {
            let z: f64 = StandardNormal.sample(&mut rng);
            let dt = nodes[i + 1] - nodes[i];
            w.push(self.w[i]);
            w.push(0.5 * (self.w[i] + self.w[i + 1]) + 0.5 * dt.sqrt() * z);
        }
        w.push(*self.w.last().expect("non-empty"));
        NoisePath {
            grid: self.grid.refined(),
            w,
            seed,
        }
    }
}

/// Brownian path with independent `N(0, Δt)` increments from a seeded ChaCha8 stream.
pub fn sample_brownian(grid: &TimeGrid, seed: u64) -> NoisePath {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let nodes = grid.nodes();
    let mut w = Vec::with_capacity(nodes.len());
    w.push(0.0);
    let mut current = 0.0;
    for pair in nodes.windows(2) {
        let z: f64 = StandardNormal.sample(&mut rng);
        current += (pair[1] - pair[0]).sqrt() * z;
        w.push(current);
    }
    NoisePath {
        grid: grid.clone(),
        w,
        seed,
    }
}

/// Per-path stochastic exponential `h` and random clock `H = ∫h^{γ−1}`.
#[derive(Debug, Clone, PartialEq)]
pub struct MultiplierPath {
    grid: TimeGrid,
    gamma: f64,
    seed: u64,
    w: Vec<f64>,
    f: Vec<f64>,
    g: Vec<f64>,
    logh: Vec<f64>,
    h: Vec<f64>,
    clock: Vec<f64>,
}

impl MultiplierPath {
    pub fn grid(&self) -> &TimeGrid {
        &self.grid
    }

    pub fn gamma(&self) -> f64 {
        self.gamma
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn noise(&self) -> &[f64] {
        &self.w
    }

    /// Value of `f` on each grid interval.
    pub fn f_steps(&self) -> &[f64] {
        &self.f
    }

    /// Value of `g` on each grid interval.
    pub fn g_steps(&self) -> &[f64] {
        &self.g
    }

    pub fn log_h(&self) -> &[f64] {
        &self.logh
    }

    pub fn h(&self) -> &[f64] {
        &self.h
    }

    /// The clock `H` at the grid nodes.
    pub fn clock(&self) -> &[f64] {
        &self.clock
    }

    pub fn horizon(&self) -> f64 {
        self.grid.horizon()
    }

    /// `H` at the final node.
    pub fn clock_end(&self) -> f64 {
        *self.clock.last().expect("non-empty")
    }

    fn interp(&self, values: &[f64], t: f64) -> Result<f64> {
        let (i, theta) = self.grid.locate(t)?;
        Ok(if theta == 0.0 {
            values[i]
        } else if theta == 1.0 {
            values[i + 1]
        } else {
            values[i] + theta * (values[i + 1] - values[i])
        })
    }

    /// `h(t)`, linear between nodes.
    pub fn h_at(&self, t: f64) -> Result<f64> {
        self.interp(&self.h, t)
    }

    /// `log h(t)`, linear between nodes.
    pub fn log_h_at(&self, t: f64) -> Result<f64> {
        self.interp(&self.logh, t)
    }

    /// `H(t)`, linear between nodes.
    pub fn clock_at(&self, t: f64) -> Result<f64> {
        self.interp(&self.clock, t)
    }
}

/// Builds `h` and `H` for one path.
///
/// Fails when a coefficient knot inside the horizon is not a grid node, or when
/// `gamma < 1`.
pub fn multiplier_path(
    path: &NoisePath,
    coeffs: &CoefficientPair,
    gamma: f64,
) -> Result<MultiplierPath> {
    if !(gamma >= 1.0) || !gamma.is_finite() {
        return Err(invalid(format!("homogeneity degree must be >= 1, got {gamma}")));
    }
    let grid = path.grid();
    let horizon = grid.horizon();
    for knot in coeffs.f.knots().iter().chain(coeffs.g.knots()) {
        if *knot < horizon && grid.node_index(*knot).is_none() {
            return Err(invalid(format!(
                "coefficient knot {knot} is not a node of the time grid"
            )));
        }
    }

    let nodes = grid.nodes();
    let n = nodes.len();
    let mut f = Vec::with_capacity(n - 1);
    let mut g = Vec::with_capacity(n - 1);
    let mut logh = Vec::with_capacity(n);
    let mut clock = Vec::with_capacity(n);
    logh.push(0.0);
    clock.push(0.0);
    let w = path.values();
    for i in 0..n - 1 {
        // constant on the interval since knots sit on nodes
        let mid = 0.5 * (nodes[i] + nodes[i + 1]);
        let fi = coeffs.f.value_at(mid);
        let gi = coeffs.g.value_at(mid);
        let dt = nodes[i + 1] - nodes[i];
        let dw = w[i + 1] - w[i];
        let l = logh[i];
        logh.push(l + gi * dt + fi * dw - 0.5 * fi * fi * dt);
        clock.push(clock[i] + ((gamma - 1.0) * l).exp() * dt);
        f.push(fi);
        g.push(gi);
    }
    let h: Vec<f64> = logh.iter().map(|l| l.exp()).collect();
    // exp underflows only for log h below about −745
    debug_assert!(h.iter().zip(&logh).all(|(&v, &l)| v > 0.0 || l < -700.0));

    Ok(MultiplierPath {
        grid: grid.clone(),
        gamma,
        seed: path.seed(),
        w: w.to_vec(),
        f,
        g,
        logh,
        h,
        clock,
    })
}

/// The time `t` with `H(t) = s`, by inverting the piecewise-linear clock.
pub fn inverse_clock(mp: &MultiplierPath, s: f64) -> Result<f64> {
    let clock = mp.clock();
    let end = mp.clock_end();
    if !(s >= 0.0) {
        return Err(invalid(format!("clock value must be non-negative, got {s}")));
    }
    if s > end {
        return Err(Error::OutOfRange {
            what: "clock value (clock never reaches it on this horizon)",
            value: s,
            lo: 0.0,
            hi: end,
        });
    }
    let nodes = mp.grid().nodes();
    let j = clock.partition_point(|&c| c < s);
    if j == 0 {
        return Ok(0.0);
    }
    let (c0, c1) = (clock[j - 1], clock[j]);
    let theta = if c1 > c0 { (s - c0) / (c1 - c0) } else { 1.0 };
    Ok(nodes[j - 1] + theta * (nodes[j] - nodes[j - 1]))
}

/// First time the clock reaches `level`, or `None` if it stays below on this horizon.
pub fn hitting_time(mp: &MultiplierPath, level: f64) -> Result<Option<f64>> {
    if !(level >= 0.0) {
        return Err(invalid(format!("hitting level must be non-negative, got {level}")));
    }
    if level > mp.clock_end() {
        return Ok(None);
    }
    inverse_clock(mp, level).map(Some)
}

/// `E h^p(t) = exp(p∫g + p(p−1)/2 ∫f²)`.
pub fn multiplier_moment(coeffs: &CoefficientPair, p: f64, t: f64) -> Result<f64> {
    if !(t >= 0.0) || !t.is_finite() {
        return Err(Error::OutOfRange {
            what: "time",
            value: t,
            lo: 0.0,
            hi: f64::INFINITY,
        });
    }
    let drift = coeffs.g.integral(t);
    let quad = coeffs.f.integral_sq(t);
    Ok((p * drift + 0.5 * p * (p - 1.0) * quad).exp())
}

/// Mean and variance of `ξ = lim log h(t)`: `(μ − σ², σ²)` with `2σ² = ∫f²`, `μ = ∫g`.
pub fn limit_distribution(coeffs: &CoefficientPair) -> Result<(f64, f64)> {
    if coeffs.f.tail() != 0.0 || coeffs.g.tail() != 0.0 {
        return Err(Error::Unsupported(
            "limit law needs coefficients that vanish after a cutoff time".into(),
        ));
    }
    let cutoff = coeffs.f.cutoff().max(coeffs.g.cutoff());
    let sigma2 = 0.5 * coeffs.f.integral_sq(cutoff);
    let mu = coeffs.g.integral(cutoff);
    Ok((mu - sigma2, sigma2))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn grid(h: f64, n: usize) -> TimeGrid {
        TimeGrid::uniform(h, n).unwrap()
    }

    #[test]
    fn grid_validation() {
        assert!(TimeGrid::new(vec![0.0]).is_err());
        assert!(TimeGrid::new(vec![0.1, 0.2]).is_err());
        assert!(TimeGrid::new(vec![0.0, 0.2, 0.2]).is_err());
        assert!(TimeGrid::new(vec![0.0, 0.5, 1.0]).is_ok());
    }

    #[test]
    fn brownian_starts_at_zero_and_is_deterministic() {
        let g = grid(1.0, 50);
        let a = sample_brownian(&g, 7);
        let b = sample_brownian(&g, 7);
        assert_eq!(a.values()[0], 0.0);
        assert_eq!(a, b);
        assert_ne!(a, sample_brownian(&g, 8));
    }

    #[test]
    fn refine_keeps_coarse_nodes() {
        let path = sample_brownian(&grid(1.0, 8), 3);
        let fine = path.refine();
        assert_eq!(fine.grid().len(), 17);
        for (i, w) in path.values().iter().enumerate() {
            assert_eq!(fine.values()[2 * i], *w);
        }
    }

    #[test]
    fn empty_exponent_gives_identity_clock() {
        let g = TimeGrid::new(vec![0.0, 0.1, 0.35, 0.4, 1.0]).unwrap();
        let path = sample_brownian(&g, 1);
        let mp = multiplier_path(&path, &CoefficientPair::constant(0.0, 0.0), 2.0).unwrap();
        assert!(mp.h().iter().all(|&h| h == 1.0));
        for (c, t) in mp.clock().iter().zip(g.nodes()) {
            assert!((c - t).abs() < 1e-15);
        }
        assert_eq!(inverse_clock(&mp, 0.37).unwrap(), 0.37);
        assert_eq!(hitting_time(&mp, 0.0).unwrap(), Some(0.0));
    }

    #[test]
    fn constant_drift_matches_closed_form() {
        let (m, g0) = (3.0, 0.7);
        let n = 4000;
        let path = sample_brownian(&grid(2.0, n), 11);
        let mp = multiplier_path(&path, &CoefficientPair::constant(0.0, g0), m).unwrap();
        let dt = 2.0 / n as f64;
        for (i, &t) in mp.grid().nodes().iter().enumerate() {
            let h = (g0 * t).exp();
            let big_h = (((m - 1.0) * g0 * t).exp() - 1.0) / ((m - 1.0) * g0);
            assert!((mp.h()[i] - h).abs() <= 1e-12 * h);
            // left-endpoint rule: error ≤ Δt·(H'(T) − H'(0))/2 + O(Δt²)
            assert!((mp.clock()[i] - big_h).abs() <= dt * ((m - 1.0) * g0 * t).exp());
        }
        // analytic inverse of the closed-form clock
        let s = 1.5;
        let exact = (1.0 + (m - 1.0) * g0 * s).ln() / ((m - 1.0) * g0);
        assert!((inverse_clock(&mp, s).unwrap() - exact).abs() < 5.0 * dt);
    }

    #[test]
    fn inverse_clock_round_trip_and_range() {
        let path = sample_brownian(&grid(1.0, 200), 5);
        let mp = multiplier_path(&path, &CoefficientPair::constant(1.0, 0.0), 2.0).unwrap();
        for k in 0..=20 {
            let s = mp.clock_end() * k as f64 / 20.0;
            let t = inverse_clock(&mp, s).unwrap();
            assert!((mp.clock_at(t).unwrap() - s).abs() <= 1e-13);
        }
        assert!(matches!(
            inverse_clock(&mp, mp.clock_end() * 1.01),
            Err(Error::OutOfRange { .. })
        ));
        assert!(hitting_time(&mp, -1.0).is_err());
        assert_eq!(hitting_time(&mp, mp.clock_end() + 1.0).unwrap(), None);
    }

    #[test]
    fn negative_drift_caps_the_clock() {
        // H(t) = (1 − e^{−(m−1)αt})/((m−1)α) < 1/((m−1)α)
        let (m, alpha) = (2.0, 13.0);
        let level = 1.0 / 12.0;
        assert!((m - 1.0) * alpha * level > 1.0);
        for horizon in [1.0, 10.0, 50.0] {
            let path = sample_brownian(&grid(horizon, (horizon * 1000.0) as usize), 2);
            let mp = multiplier_path(&path, &CoefficientPair::constant(0.0, -alpha), m).unwrap();
            assert_eq!(hitting_time(&mp, level).unwrap(), None);
        }
    }

    #[test]
    fn knots_off_grid_rejected() {
        let path = sample_brownian(&grid(1.0, 10), 5);
        let coeffs = CoefficientPair::new(
            StepFunction::pulse(1.0, 0.55).unwrap(),
            StepFunction::constant(0.0),
        );
        assert!(multiplier_path(&path, &coeffs, 2.0).is_err());
        let coeffs = CoefficientPair::new(
            StepFunction::pulse(1.0, 0.5).unwrap(),
            StepFunction::constant(0.0),
        );
        let mp = multiplier_path(&path, &coeffs, 2.0).unwrap();
        assert_eq!(mp.f_steps()[4], 1.0);
        assert_eq!(mp.f_steps()[5], 0.0);
        assert!(multiplier_path(&path, &coeffs, 0.5).is_err());
    }

    #[test]
    fn moment_formula_values() {
        let unit = CoefficientPair::constant(1.0, 0.0);
        assert_eq!(multiplier_moment(&unit, 1.0, 3.0).unwrap(), 1.0);
        assert_eq!(multiplier_moment(&unit, 2.0, 0.0).unwrap(), 1.0);
        let e = multiplier_moment(&unit, 2.0, 1.0).unwrap();
        assert!((e - std::f64::consts::E).abs() < 1e-15);
        let rough = CoefficientPair::new(
            StepFunction::new(vec![0.0, 0.3, 2.0], vec![2.0, -1.0, 0.5]).unwrap(),
            StepFunction::constant(0.0),
        );
        assert_eq!(multiplier_moment(&rough, 1.0, 5.0).unwrap(), 1.0);
        assert!(multiplier_moment(&unit, 1.0, -1.0).is_err());
    }

    #[test]
    fn limit_law_parameters() {
        let pulse = CoefficientPair::new(StepFunction::pulse(1.0, 2.0).unwrap(), StepFunction::constant(0.0));
        assert_eq!(limit_distribution(&pulse).unwrap(), (-1.0, 1.0));
        let drift_only =
            CoefficientPair::new(StepFunction::constant(0.0), StepFunction::pulse(0.5, 4.0).unwrap());
        assert_eq!(limit_distribution(&drift_only).unwrap(), (2.0, 0.0));
        assert!(matches!(
            limit_distribution(&CoefficientPair::constant(1.0, 0.0)),
            Err(Error::Unsupported(_))
        ));
    }

    #[test]
    fn pressure_coefficients_give_power_of_h() {
        let m = 3.0;
        let coeffs = CoefficientPair::new(
            StepFunction::new(vec![0.0, 0.5], vec![1.0, 0.4]).unwrap(),
            StepFunction::constant(0.2),
        );
        let path = sample_brownian(&grid(1.0, 100), 9);
        let mp = multiplier_path(&path, &coeffs, m).unwrap();
        let tilde = multiplier_path(&path, &coeffs.pressure(m), 2.0).unwrap();
        for (a, b) in mp.log_h().iter().zip(tilde.log_h()) {
            assert!(((m - 1.0) * a - b).abs() < 1e-12);
        }
    }

    #[test]
    fn step_function_integrals() {
        let s = StepFunction::new(vec![0.0, 1.0, 3.0], vec![2.0, -1.0, 0.0]).unwrap();
        assert_eq!(s.integral(0.5), 1.0);
        assert_eq!(s.integral(2.0), 1.0);
        assert_eq!(s.integral(10.0), 0.0);
        assert_eq!(s.integral_sq(10.0), 6.0);
        assert_eq!(s.value_at(1.0), -1.0);
        assert_eq!(s.value_at(99.0), 0.0);
        assert!(StepFunction::new(vec![0.0, 1.0], vec![1.0]).is_err());
    }
}
