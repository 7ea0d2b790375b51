//! Explicit conservative finite-volume solver for `U_t = Δ(Uᵐ)`.
//!
//! Cells carry averages; interior faces carry the flux `−A·(P_R − P_L)/Δx` with
//! `P = Uᵐ` and face area `A` (1 on a line, `ω_d r^{d−1}` on a radial grid).
//! Boundary faces carry no flux, so the discrete mass `Σ U_i·|cell_i|` is
//! conserved up to rounding. The update is monotone while
//! `dt ≤ Δx²/(2d·max mU^{m−1})`, which gives non-negativity, the discrete
//! maximum principle and order preservation between ordered data.

use std::sync::Arc;

use crate::error::{invalid, Error, Result};
use crate::exact::sphere_area;
use crate::timechange::{DeterministicSolution, TimeDomain, TimeEnd};

/// Smallest admissible cell count.
pub const MIN_CELLS: usize = 8;

/// Guard against division by zero in the step bound for an all-zero state.
const STEP_BOUND_EPS: f64 = f64::MIN_POSITIVE;

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum GridKind {
    /// Interval `[lo, hi]` of the real line.
    Cartesian,
    /// Radial coordinate `r ∈ [0, r_max]` of a radially symmetric field in `d` dimensions.
    Radial { d: usize },
}

/// Uniform cells with precomputed volumes and face areas.
#[derive(Debug, Clone)]
pub struct SpatialGrid {
    kind: GridKind,
    lo: f64,
    hi: f64,
    cells: usize,
    volumes: Vec<f64>,
    areas: Vec<f64>,
}

impl PartialEq for SpatialGrid {
    fn eq(&self, other: &Self) -> bool {
        self.kind == other.kind && self.lo == other.lo && self.hi == other.hi && self.cells == other.cells
    }
}

impl SpatialGrid {
    pub fn cartesian(lo: f64, hi: f64, cells: usize) -> Result<Self> {
        Self::build(GridKind::Cartesian, lo, hi, cells)
    }

    pub fn radial(d: usize, r_max: f64, cells: usize) -> Result<Self> {
        if d == 0 {
            return Err(invalid("radial grid dimension must be >= 1"));
        }
        Self::build(GridKind::Radial { d }, 0.0, r_max, cells)
    }

    fn build(kind: GridKind, lo: f64, hi: f64, cells: usize) -> Result<Self> {
        if cells < MIN_CELLS {
            return Err(invalid(format!("spatial grid needs at least {MIN_CELLS} cells, got {cells}")));
        }
        if !(hi > lo) || !lo.is_finite() || !hi.is_finite() {
            return Err(invalid(format!("spatial grid bounds must satisfy lo < hi, got [{lo}, {hi}]")));
        }
        let dx = (hi - lo) / cells as f64;
        let face = |j: usize| lo + j as f64 * dx;
        let (volumes, areas) = match kind {
            GridKind::Cartesian => (vec![dx; cells], vec![1.0; cells + 1]),
            GridKind::Radial { d } => {
                let omega = sphere_area(d);
                let di = d as i32;
                let volumes = (0..cells)
                    .map(|i| omega * (face(i + 1).powi(di) - face(i).powi(di)) / d as f64)
                    .collect();
                let areas = (0..=cells).map(|j| omega * face(j).powi(di - 1)).collect();
                (volumes, areas)
            }
        };
        Ok(Self {
            kind,
            lo,
            hi,
            cells,
            volumes,
            areas,
        })
    }

    pub fn kind(&self) -> GridKind {
        self.kind
    }

    pub fn bounds(&self) -> (f64, f64) {
        (self.lo, self.hi)
    }

    pub fn cells(&self) -> usize {
        self.cells
    }

    pub fn width(&self) -> f64 {
        (self.hi - self.lo) / self.cells as f64
    }

    /// Spatial dimension of the field the grid represents.
    pub fn dimension(&self) -> usize {
        match self.kind {
            GridKind::Cartesian => 1,
            GridKind::Radial { d } => d,
        }
    }

    pub fn center(&self, i: usize) -> f64 {
        self.lo + (i as f64 + 0.5) * self.width()
    }

    pub fn centers(&self) -> Vec<f64> {
        (0..self.cells).map(|i| self.center(i)).collect()
    }

    pub fn volumes(&self) -> &[f64] {
        &self.volumes
    }

    /// Coordinate used for interpolation: `x` on a line, `|x|` on a radial grid.
    fn coordinate(&self, x: &[f64]) -> Result<f64> {
        match self.kind {
            GridKind::Cartesian => {
                if x.len() != 1 {
                    return Err(invalid(format!("point has {} coordinates, expected 1", x.len())));
                }
                Ok(x[0])
            }
            GridKind::Radial { d } => {
                if x.len() != d {
                    return Err(invalid(format!("point has {} coordinates, expected {d}", x.len())));
                }
                Ok(x.iter().map(|v| v * v).sum::<f64>().sqrt())
            }
        }
    }
}

/// Cell averages at one time.
#[derive(Debug, Clone, PartialEq)]
pub struct FieldState {
    grid: Arc<SpatialGrid>,
    time: f64,
    values: Vec<f64>,
}

impl FieldState {
    pub fn new(grid: Arc<SpatialGrid>, time: f64, values: Vec<f64>) -> Result<Self> {
        if values.len() != grid.cells() {
            return Err(invalid(format!(
                "field has {} values for {} cells",
                values.len(),
                grid.cells()
            )));
        }
        if let Some(bad) = values.iter().find(|v| !(**v >= 0.0) || !v.is_finite()) {
            return Err(invalid(format!("field values must be finite and non-negative, got {bad}")));
        }
        if !(time >= 0.0) {
            return Err(invalid(format!("field time must be non-negative, got {time}")));
        }
        Ok(Self { grid, time, values })
    }

    /// Samples `profile` at the cell centers.
    pub fn from_fn(grid: Arc<SpatialGrid>, time: f64, profile: impl Fn(f64) -> f64) -> Result<Self> {
        let values = grid.centers().into_iter().map(profile).collect();
        Self::new(grid, time, values)
    }

    pub fn zeros(grid: Arc<SpatialGrid>, time: f64) -> Self {
        let values = vec![0.0; grid.cells()];
        Self { grid, time, values }
    }

    pub fn grid(&self) -> &Arc<SpatialGrid> {
        &self.grid
    }

    pub fn time(&self) -> f64 {
        self.time
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    /// Discrete mass `Σ U_i·|cell_i|`.
    pub fn mass(&self) -> f64 {
        self.lp_sum(1.0)
    }

    /// `Σ U_iᵖ·|cell_i|`.
    pub fn lp_sum(&self, p: f64) -> f64 {
        self.values
            .iter()
            .zip(self.grid.volumes())
            .map(|(u, v)| if p == 1.0 { u * v } else { u.powf(p) * v })
            .sum()
    }

    pub fn max(&self) -> f64 {
        self.values.iter().copied().fold(0.0, f64::max)
    }

    /// Piecewise-linear interpolation between cell centers, constant in the
    /// outermost half cells, zero outside the grid.
    pub fn interpolate(&self, x: &[f64]) -> Result<f64> {
        let xi = self.grid.coordinate(x)?;
        let (lo, hi) = self.grid.bounds();
        let n = self.values.len();
        let first = self.grid.center(0);
        let last = self.grid.center(n - 1);
        let radial = matches!(self.grid.kind(), GridKind::Radial { .. });
        if xi > hi || (!radial && xi < lo) {
            return Ok(0.0);
        }
        if xi <= first {
            return Ok(self.values[0]);
        }
        if xi >= last {
            return Ok(self.values[n - 1]);
        }
        let pos = (xi - first) / self.grid.width();
        let k = (pos.floor() as usize).min(n - 2);
        let theta = pos - k as f64;
        Ok(self.values[k] + theta * (self.values[k + 1] - self.values[k]))
    }
}

/// Largest `|center|` of a cell with value above `threshold`; 0 if none.
pub fn support_radius(state: &FieldState, threshold: f64) -> f64 {
    let grid = state.grid();
    state
        .values()
        .iter()
        .enumerate()
        .filter(|(_, &v)| v > threshold)
        .map(|(i, _)| grid.center(i).abs())
        .fold(0.0, f64::max)
}

/// Largest stable step `safety·Δx²/(2d·max(mU^{m−1}) + ε)`.
pub fn stable_dt(state: &FieldState, m: f64, safety: f64) -> f64 {
    let dx = state.grid.width();
    let d = state.grid.dimension() as f64;
    let diffusivity = m * state.max().powf(m - 1.0);
    safety * dx * dx / (2.0 * d * diffusivity + STEP_BOUND_EPS)
}

/// Result of one explicit step.
#[derive(Debug, Clone, PartialEq)]
pub struct StepOutcome {
    pub state: FieldState,
    /// Mass removed by clamping negative cells to zero (0 under the step bound).
    pub clamped_mass: f64,
}

fn power(u: f64, m: f64) -> f64 {
    if m == 2.0 {
        u * u
    } else if m == 3.0 {
        u * u * u
    } else {
        u.powf(m)
    }
}

/// One forward-Euler conservative step of size `dt`.
pub fn step(state: &FieldState, m: f64, dt: f64) -> Result<StepOutcome> {
    if !(m > 1.0) {
        return Err(invalid(format!("exponent must satisfy m > 1, got {m}")));
    }
    let bound = stable_dt(state, m, 1.0);
    if !(dt > 0.0) || dt > bound {
        return Err(Error::Stability { dt, bound });
    }
    let grid = &state.grid;
    let dx = grid.width();
    let vol = grid.volumes();
    let area = &grid.areas;
    let u = &state.values;
    let mut next = u.clone();
    let mut prev_p = power(u[0], m);
    for j in 1..u.len() {
        let p = power(u[j], m);
        let transfer = dt * area[j] * (p - prev_p) / dx;
        next[j - 1] += transfer / vol[j - 1];
        next[j] -= transfer / vol[j];
        prev_p = p;
    }
    let mut clamped_mass = 0.0;
    for (v, w) in next.iter_mut().zip(vol) {
        if *v < 0.0 {
            clamped_mass -= *v * w;
            *v = 0.0;
        }
    }
    Ok(StepOutcome {
        state: FieldState {
            grid: grid.clone(),
            time: state.time + dt,
            values: next,
        },
        clamped_mass,
    })
}

/// Time-stepping controls.
#[derive(Debug, Clone, PartialEq)]
pub struct SchemeConfig {
    /// Fraction of the stability bound used per step, in `(0, 1]`.
    pub safety: f64,
    /// Extra times at which to store the state; the start and end are always stored.
    pub snapshot_times: Vec<f64>,
    /// Use this step wherever it fits instead of the adaptive one. Two runs with
    /// the same fixed step and snapshot times visit identical time levels.
    pub fixed_dt: Option<f64>,
}

impl Default for SchemeConfig {
    fn default() -> Self {
        Self {
            safety: 0.4,
            snapshot_times: Vec::new(),
            fixed_dt: None,
        }
    }
}

impl SchemeConfig {
    pub fn with_safety(safety: f64) -> Self {
        Self {
            safety,
            ..Self::default()
        }
    }

    /// Adds `count` equally spaced snapshot times on `(start, end)`.
    pub fn with_uniform_snapshots(mut self, start: f64, end: f64, count: usize) -> Self {
        let span = end - start;
        self.snapshot_times
            .extend((1..count).map(|k| start + span * k as f64 / count as f64));
        self
    }
}

/// Stored states of one deterministic run.
#[derive(Debug, Clone)]
pub struct SnapshotTable {
    m: f64,
    safety: f64,
    states: Vec<FieldState>,
    masses: Vec<f64>,
    clamped_mass: f64,
    steps: usize,
}

fn touches_boundary(state: &FieldState) -> bool {
    let v = state.values();
    match state.grid.kind() {
        GridKind::Cartesian => v[0] > 0.0 || v[v.len() - 1] > 0.0,
        GridKind::Radial { .. } => v[v.len() - 1] > 0.0,
    }
}

/// Steps from `initial.time()` to `end_time`, storing snapshots.
///
/// When the initial data vanish at the boundary cells, reaching them is an
/// error: the truncated box no longer represents the whole-space problem.
pub fn evolve(initial: &FieldState, m: f64, end_time: f64, cfg: &SchemeConfig) -> Result<SnapshotTable> {
    let start = initial.time();
    if !(end_time > start) {
        return Err(invalid(format!(
            "evolution end {end_time} must exceed the initial time {start}"
        )));
    }
    if !(cfg.safety > 0.0 && cfg.safety <= 1.0) {
        return Err(invalid(format!("safety factor must lie in (0, 1], got {}", cfg.safety)));
    }
    let mut targets: Vec<f64> = cfg
        .snapshot_times
        .iter()
        .copied()
        .filter(|&t| t > start && t < end_time)
        .collect();
    targets.push(end_time);
    targets.sort_by(f64::total_cmp);
    targets.dedup();

    let guard_boundary = !touches_boundary(initial);
    let mut state = initial.clone();
    let mut states = vec![initial.clone()];
    let mut masses = vec![initial.mass()];
    let mut clamped_mass = 0.0;
    let mut steps = 0;
    for target in targets {
        while state.time < target {
            let remaining = target - state.time;
            let dt = cfg
                .fixed_dt
                .unwrap_or_else(|| stable_dt(&state, m, cfg.safety))
                .min(remaining);
            let outcome = step(&state, m, dt)?;
            clamped_mass += outcome.clamped_mass;
            state = outcome.state;
            steps += 1;
            if remaining - dt <= 1e-12 * target.abs().max(1.0) {
                state.time = target;
            }
            if guard_boundary && touches_boundary(&state) {
                return Err(Error::Truncation { time: state.time });
            }
        }
        masses.push(state.mass());
        states.push(state.clone());
    }
    Ok(SnapshotTable {
        m,
        safety: cfg.safety,
        states,
        masses,
        clamped_mass,
        steps,
    })
}

impl SnapshotTable {
    pub fn m(&self) -> f64 {
        self.m
    }

    pub fn safety(&self) -> f64 {
        self.safety
    }

    pub fn states(&self) -> &[FieldState] {
        &self.states
    }

    pub fn times(&self) -> Vec<f64> {
        self.states.iter().map(|s| s.time).collect()
    }

    /// Discrete mass at each snapshot.
    pub fn masses(&self) -> &[f64] {
        &self.masses
    }

    pub fn clamped_mass(&self) -> f64 {
        self.clamped_mass
    }

    pub fn steps(&self) -> usize {
        self.steps
    }

    pub fn grid(&self) -> &Arc<SpatialGrid> {
        self.states[0].grid()
    }

    pub fn start(&self) -> f64 {
        self.states[0].time
    }

    pub fn end(&self) -> f64 {
        self.states[self.states.len() - 1].time
    }

    /// Largest relative deviation of the logged mass from the initial mass.
    pub fn mass_drift(&self) -> f64 {
        let m0 = self.masses[0];
        self.masses
            .iter()
            .map(|m| ((m - m0) / m0).abs())
            .fold(0.0, f64::max)
    }

    /// Bracketing snapshot index `k` and weight toward `k + 1`.
    fn bracket(&self, t: f64) -> Result<(usize, f64)> {
        let (start, end) = (self.start(), self.end());
        if !(start..=end).contains(&t) {
            return Err(Error::OutOfRange {
                what: "time outside the snapshot table",
                value: t,
                lo: start,
                hi: end,
            });
        }
        if self.states.len() == 1 {
            return Ok((0, 0.0));
        }
        let upper = self.states.partition_point(|s| s.time <= t);
        let k = upper.saturating_sub(1).min(self.states.len() - 2);
        let (t0, t1) = (self.states[k].time, self.states[k + 1].time);
        Ok((k, ((t - t0) / (t1 - t0)).clamp(0.0, 1.0)))
    }

    /// State at time `t`, linear in time between bracketing snapshots.
    pub fn state_at(&self, t: f64) -> Result<FieldState> {
        let (k, theta) = self.bracket(t)?;
        if theta == 0.0 {
            return Ok(self.states[k].clone());
        }
        if theta == 1.0 {
            return Ok(self.states[k + 1].clone());
        }
        let (a, b) = (&self.states[k].values, &self.states[k + 1].values);
        let values = a.iter().zip(b).map(|(x, y)| x + theta * (y - x)).collect();
        Ok(FieldState {
            grid: self.grid().clone(),
            time: t,
            values,
        })
    }

    /// Discrete mass at time `t`, interpolated from the mass log.
    pub fn mass_at(&self, t: f64) -> Result<f64> {
        let (k, theta) = self.bracket(t)?;
        if theta == 0.0 {
            return Ok(self.masses[k]);
        }
        Ok(self.masses[k] + theta * (self.masses[k + 1] - self.masses[k]))
    }

    /// Support radius of the interpolated state at `t`.
    pub fn support_radius_at(&self, t: f64, threshold: f64) -> Result<f64> {
        let (k, theta) = self.bracket(t)?;
        if threshold == 0.0 {
            // positivity set of a convex combination is the union of the brackets'
            let mut r = support_radius(&self.states[k], 0.0);
            if theta > 0.0 {
                r = r.max(support_radius(&self.states[k + 1], 0.0));
            }
            return Ok(r);
        }
        Ok(support_radius(&self.state_at(t)?, threshold))
    }
}

/// Table value at `(t, x)`: linear in time between snapshots, piecewise linear
/// in space between cell centers.
pub fn dense_eval(table: &SnapshotTable, t: f64, x: &[f64]) -> Result<f64> {
    let (k, theta) = table.bracket(t)?;
    let a = table.states[k].interpolate(x)?;
    if theta == 0.0 {
        return Ok(a);
    }
    let b = table.states[k + 1].interpolate(x)?;
    Ok(a + theta * (b - a))
}

impl DeterministicSolution for SnapshotTable {
    fn eval(&self, s: f64, x: &[f64]) -> Result<f64> {
        dense_eval(self, s, x)
    }

    fn domain(&self) -> TimeDomain {
        TimeDomain {
            start: self.start(),
            start_included: true,
            end: TimeEnd::Horizon(self.end()),
        }
    }

    fn descriptor(&self) -> String {
        format!(
            "snapshot_table(m={}, cells={}, t=[{}, {}])",
            self.m,
            self.grid().cells(),
            self.start(),
            self.end()
        )
    }

    fn degree(&self) -> Option<f64> {
        Some(self.m)
    }

    fn dimension(&self) -> usize {
        self.grid().dimension()
    }

    fn spatial_extent(&self) -> Option<(f64, f64)> {
        let (lo, hi) = self.grid().bounds();
        Some(match self.grid().kind() {
            GridKind::Cartesian => (lo, hi),
            GridKind::Radial { .. } => (-hi, hi),
        })
    }
}

/// Central-difference estimate of `U_t − Δ(Uᵐ)` at `(t, x)` with steps `(δt, δx)`.
pub fn residual(
    evaluator: impl Fn(f64, &[f64]) -> Result<f64>,
    m: f64,
    t: f64,
    x: &[f64],
    steps: (f64, f64),
) -> Result<f64> {
    let (dt, dx) = steps;
    if !(dt > 0.0 && dx > 0.0) {
        return Err(invalid("residual steps must be positive"));
    }
    let eval = |t: f64, x: &[f64]| {
        evaluator(t, x).map_err(|e| invalid(format!("residual stencil exits the domain at t = {t}: {e}")))
    };
    let u_t = (eval(t + dt, x)? - eval(t - dt, x)?) / (2.0 * dt);
    let center = eval(t, x)?.powf(m);
    let mut laplacian = 0.0;
    let mut probe = x.to_vec();
    for k in 0..x.len() {
        probe[k] = x[k] + dx;
        let plus = eval(t, &probe)?.powf(m);
        probe[k] = x[k] - dx;
        let minus = eval(t, &probe)?.powf(m);
        probe[k] = x[k];
        laplacian += (plus - 2.0 * center + minus) / (dx * dx);
    }
    Ok(u_t - laplacian)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::{barenblatt, BarenblattParams};

    fn line(lo: f64, hi: f64, cells: usize) -> Arc<SpatialGrid> {
        Arc::new(SpatialGrid::cartesian(lo, hi, cells).unwrap())
    }

    fn bump(grid: Arc<SpatialGrid>) -> FieldState {
        FieldState::from_fn(grid, 0.0, |x| (1.0 - x * x).max(0.0) + 0.3 * (1.0 - (x - 0.5).abs()).max(0.0))
            .unwrap()
    }

    #[test]
    fn grid_validation() {
        assert!(SpatialGrid::cartesian(0.0, 1.0, 4).is_err());
        assert!(SpatialGrid::cartesian(1.0, 1.0, 16).is_err());
        assert!(SpatialGrid::radial(0, 1.0, 16).is_err());
        let g = SpatialGrid::radial(3, 2.0, 16).unwrap();
        let total: f64 = g.volumes().iter().sum();
        let ball = 4.0 / 3.0 * std::f64::consts::PI * 8.0;
        assert!((total - ball).abs() < 1e-12 * ball);
    }

    #[test]
    fn constant_field_is_fixed() {
        let state = FieldState::from_fn(line(-1.0, 1.0, 32), 0.0, |_| 0.7).unwrap();
        let dt = stable_dt(&state, 2.0, 0.4);
        let next = step(&state, 2.0, dt).unwrap();
        assert_eq!(next.state.values(), state.values());
    }

    #[test]
    fn step_conserves_mass_and_rejects_large_steps() {
        for grid in [line(-2.0, 2.0, 64), Arc::new(SpatialGrid::radial(2, 2.0, 64).unwrap())] {
            let mut state = bump(grid);
            let m0 = state.mass();
            for _ in 0..200 {
                let dt = stable_dt(&state, 3.0, 0.9);
                let out = step(&state, 3.0, dt).unwrap();
                assert_eq!(out.clamped_mass, 0.0);
                assert!(((out.state.mass() - state.mass()) / m0).abs() < 1e-13);
                state = out.state;
            }
            let bound = stable_dt(&state, 3.0, 1.0);
            assert!(matches!(step(&state, 3.0, 1.5 * bound), Err(Error::Stability { .. })));
        }
    }

    #[test]
    fn zero_data_stay_zero() {
        let zero = FieldState::zeros(line(-1.0, 1.0, 16), 0.0);
        let table = evolve(&zero, 2.0, 5.0, &SchemeConfig::default()).unwrap();
        assert!(table.states().iter().all(|s| s.values().iter().all(|&v| v == 0.0)));
    }

    #[test]
    fn snapshots_hit_requested_times() {
        let state = bump(line(-4.0, 4.0, 80));
        let cfg = SchemeConfig {
            snapshot_times: vec![0.05, 0.2, 0.1, 9.0],
            ..SchemeConfig::default()
        };
        let table = evolve(&state, 2.0, 0.3, &cfg).unwrap();
        assert_eq!(table.times(), vec![0.0, 0.05, 0.1, 0.2, 0.3]);
        assert!(table.mass_drift() < 1e-12);
        assert_eq!(table.clamped_mass(), 0.0);
    }

    #[test]
    fn truncation_detected() {
        let state = bump(line(-2.0, 2.0, 40));
        assert!(matches!(
            evolve(&state, 2.0, 50.0, &SchemeConfig::default()),
            Err(Error::Truncation { .. })
        ));
    }

    #[test]
    fn dense_eval_at_snapshots_and_midpoints() {
        let grid = line(-1.0, 1.0, 16);
        let constant = FieldState::from_fn(grid.clone(), 0.0, |_| 0.25).unwrap();
        let cfg = SchemeConfig::default().with_uniform_snapshots(0.0, 1.0, 4);
        let table = evolve(&constant, 2.0, 1.0, &cfg).unwrap();
        assert_eq!(dense_eval(&table, 0.375, &[0.1]).unwrap(), 0.25);

        let state = bump(line(-4.0, 4.0, 64));
        let table = evolve(&state, 2.0, 0.5, &SchemeConfig::default().with_uniform_snapshots(0.0, 0.5, 5)).unwrap();
        let snap = &table.states()[2];
        for i in 0..64 {
            let x = snap.grid().center(i);
            assert_eq!(dense_eval(&table, snap.time(), &[x]).unwrap(), snap.values()[i]);
        }
        assert!(dense_eval(&table, 0.6, &[0.0]).is_err());
    }

    #[test]
    fn support_radius_basics() {
        let zero = FieldState::zeros(line(-1.0, 1.0, 16), 0.0);
        assert_eq!(support_radius(&zero, 0.0), 0.0);
        let state = bump(line(-2.0, 2.0, 40));
        let radii: Vec<f64> = [0.0, 0.1, 0.5, 0.9].iter().map(|&th| support_radius(&state, th)).collect();
        assert!(radii.windows(2).all(|w| w[1] <= w[0]));
    }

    #[test]
    fn barenblatt_support_within_one_cell() {
        let p = BarenblattParams::new(2.0, 1, 1.0).unwrap();
        let grid = line(-6.0, 6.0, 400);
        let state = FieldState::from_fn(grid.clone(), 1.0, |x| p.radial(1.0, x.abs())).unwrap();
        assert!((support_radius(&state, 0.0) - p.support_radius(1.0)).abs() <= grid.width());
    }

    #[test]
    fn residual_negative_control() {
        // Gaussian heat kernel is not a porous-medium solution
        let kernel = |t: f64, x: &[f64]| -> Result<f64> {
            Ok((-x[0] * x[0] / (4.0 * t)).exp() / (4.0 * std::f64::consts::PI * t).sqrt())
        };
        let r = residual(kernel, 2.0, 1.0, &[0.2], (1e-4, 1e-3)).unwrap();
        assert!(r.abs() > 1e-2);
    }

    #[test]
    fn residual_stencil_outside_domain() {
        let p = BarenblattParams::new(2.0, 1, 1.0).unwrap();
        let eval = |t: f64, x: &[f64]| barenblatt(&p, t, x);
        assert!(matches!(
            residual(eval, 2.0, 1e-3, &[0.0], (1e-2, 1e-2)),
            Err(Error::InvalidInput(_))
        ));
    }
}
