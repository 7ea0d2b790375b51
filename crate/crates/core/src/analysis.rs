//! Monte Carlo and pathwise checks of the stochastic porous medium equation.
//!
//! Every path `i` is driven by the seed `derive_seed(master, i)` and processed
//! as an independent rayon task. Per-path results are collected in index order
//! and reduced with compensated sums, so reports do not depend on the thread
//! count.

use std::sync::Arc;

use rayon::prelude::*;

use crate::error::{invalid, Error, Result};
use crate::exact::{barenblatt, mass_to_b, BarenblattParams};
use crate::noise::{
    derive_seed, limit_distribution, multiplier_path, sample_brownian, CoefficientPair,
    MultiplierPath, NoisePath, TimeGrid,
};
use crate::solver::{evolve, support_radius, FieldState, SchemeConfig, SnapshotTable, SpatialGrid};
use crate::stats::{CompensatedSum, Summary};
use crate::timechange::{DeterministicSolution, StochasticFieldSample};

/// Statistical acceptance width in standard errors (and sigma bands for variances).
pub const SE_MULTIPLIER: f64 = 3.0;

/// Minimum share of paths whose profile error must decrease.
pub const PROFILE_PASS_FRACTION: f64 = 0.95;

/// Relative clock increment on `[T/2, T]` below which the clock counts as settled.
pub const PLATEAU_RATIO: f64 = 0.01;

/// Required decay of the median center value relative to the initial one.
pub const CENTER_DECAY_RATIO: f64 = 0.1;

/// Catalog initial profiles (time 0) on a spatial grid.
#[derive(Debug, Clone, PartialEq)]
pub enum InitialProfile {
    /// `height` on `|x| ≤ half_width`.
    Box { half_width: f64, height: f64 },
    /// `U^{BT}(t0, x; b)` for the model's `m` and the grid dimension.
    Barenblatt { b: f64, t0: f64 },
    /// Constant value on the whole grid.
    Constant { value: f64 },
    /// Tabulated `(x, value)` pairs, linear in between, zero outside.
    Samples(Vec<(f64, f64)>),
}

impl InitialProfile {
    pub fn value(&self, m: f64, d: usize, r: f64) -> Result<f64> {
        Ok(match self {
            InitialProfile::Box { half_width, height } => {
                if r.abs() <= *half_width {
                    *height
                } else {
                    0.0
                }
            }
            InitialProfile::Barenblatt { b, t0 } => BarenblattParams::new(m, d, *b)?.radial(*t0, r.abs()),
            InitialProfile::Constant { value } => *value,
            InitialProfile::Samples(points) => {
                let j = points.partition_point(|(x, _)| *x <= r);
                if j == 0 || j == points.len() {
                    if j > 0 && points[j - 1].0 == r {
                        points[j - 1].1
                    } else {
                        0.0
                    }
                } else {
                    let ((x0, v0), (x1, v1)) = (points[j - 1], points[j]);
                    v0 + (r - x0) / (x1 - x0) * (v1 - v0)
                }
            }
        })
    }

    /// Samples the profile at the cell centers.
    pub fn state(&self, grid: Arc<SpatialGrid>, m: f64) -> Result<FieldState> {
        if let InitialProfile::Samples(points) = self {
            if points.windows(2).any(|w| w[1].0 <= w[0].0) {
                return Err(invalid("tabulated profile abscissae must be strictly increasing"));
            }
        }
        let d = grid.dimension();
        let values = grid
            .centers()
            .into_iter()
            .map(|x| self.value(m, d, x))
            .collect::<Result<Vec<_>>>()?;
        FieldState::new(grid, 0.0, values)
    }
}

/// Shared setup of every Monte Carlo experiment.
#[derive(Debug, Clone)]
pub struct McConfig {
    pub paths: usize,
    pub master_seed: u64,
    pub grid: TimeGrid,
    pub coeffs: CoefficientPair,
    pub m: f64,
    /// Deterministic initial data at time 0.
    pub initial: FieldState,
    pub scheme: SchemeConfig,
    /// Snapshots stored in each deterministic table.
    pub snapshots: usize,
}

impl McConfig {
    pub fn new(
        paths: usize,
        master_seed: u64,
        grid: TimeGrid,
        coeffs: CoefficientPair,
        m: f64,
        initial: FieldState,
    ) -> Result<Self> {
        if paths < 2 {
            return Err(invalid(format!("Monte Carlo needs at least 2 paths, got {paths}")));
        }
        if !(m > 1.0) {
            return Err(invalid(format!("exponent must satisfy m > 1, got {m}")));
        }
        if initial.time() != 0.0 {
            return Err(invalid("initial data must be given at time 0"));
        }
        Ok(Self {
            paths,
            master_seed,
            grid,
            coeffs,
            m,
            initial,
            scheme: SchemeConfig::default(),
            snapshots: 400,
        })
    }

    pub fn path_seed(&self, index: usize) -> u64 {
        derive_seed(self.master_seed, index as u64)
    }

    pub fn noise(&self, index: usize) -> NoisePath {
        sample_brownian(&self.grid, self.path_seed(index))
    }

    /// Multiplier and clock of path `index`, with `γ = m`.
    pub fn clock(&self, index: usize) -> Result<MultiplierPath> {
        multiplier_path(&self.noise(index), &self.coeffs, self.m)
    }

    pub fn initial_mass(&self) -> f64 {
        self.initial.mass()
    }

    pub fn provenance(&self) -> Provenance {
        Provenance {
            master_seed: self.master_seed,
            paths: self.paths,
            time_steps: self.grid.len() - 1,
            horizon: self.grid.horizon(),
            cells: self.initial.grid().cells(),
            safety: self.scheme.safety,
            snapshots: self.snapshots,
        }
    }

    /// Deterministic table on `[0, end]`, denser near the start.
    pub fn table(&self, end: f64) -> Result<SnapshotTable> {
        let end = end.max(1e-6);
        let n = self.snapshots.max(8);
        let early = n / 4;
        let mut times: Vec<f64> = (1..=early).map(|k| end.min(1.0) * k as f64 / early as f64).collect();
        if end > 1.0 {
            let late = n - early;
            let ratio = end.ln() / late as f64;
            times.extend((1..late).map(|k| (ratio * k as f64).exp()));
        }
        let cfg = SchemeConfig {
            snapshot_times: times,
            ..self.scheme.clone()
        };
        evolve(&self.initial, self.m, end, &cfg)
    }

    /// Runs `task` on paths `0..count` in parallel, preserving index order.
    pub fn map_paths<T, F>(&self, count: usize, task: F) -> Result<Vec<T>>
    where
        T: Send,
        F: Fn(usize, MultiplierPath) -> Result<T> + Sync,
    {
        (0..count)
            .into_par_iter()
            .map(|i| task(i, self.clock(i)?))
            .collect()
    }
}

/// Everything needed to rerun an experiment.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Provenance {
    pub master_seed: u64,
    pub paths: usize,
    pub time_steps: usize,
    pub horizon: f64,
    pub cells: usize,
    pub safety: f64,
    pub snapshots: usize,
}

/// A Monte Carlo estimate checked against a reference value.
#[derive(Debug, Clone, PartialEq)]
pub struct McReport {
    pub claim: &'static str,
    pub estimate: f64,
    pub stderr: f64,
    pub target: f64,
    pub paths: usize,
    pub pass: bool,
    pub rule: &'static str,
    pub provenance: Provenance,
}

fn check_time(cfg: &McConfig, t: f64) -> Result<()> {
    let horizon = cfg.grid.horizon();
    if (0.0..=horizon).contains(&t) {
        Ok(())
    } else {
        Err(Error::OutOfRange {
            what: "probe time beyond the path horizon",
            value: t,
            lo: 0.0,
            hi: horizon,
        })
    }
}

/// Per-path `(h(t), H(t))`.
fn clock_samples(cfg: &McConfig, count: usize, t: f64) -> Result<Vec<(f64, f64)>> {
    cfg.map_paths(count, |_, mp| Ok((mp.h_at(t)?, mp.clock_at(t)?)))
}

fn max_clock(samples: &[(f64, f64)]) -> f64 {
    samples.iter().map(|s| s.1).fold(0.0, f64::max)
}

/// Mean total mass `E∫u(t,x)dx` against `M·exp(∫₀ᵗg)`.
///
/// The estimator averages `h(t)·mass(U(H(t)))` over paths.
pub fn mc_mean_mass(cfg: &McConfig, t: f64) -> Result<McReport> {
    check_time(cfg, t)?;
    let samples = clock_samples(cfg, cfg.paths, t)?;
    let table = cfg.table(max_clock(&samples))?;
    let values = samples
        .iter()
        .map(|&(h, s)| Ok(h * table.mass_at(s)?))
        .collect::<Result<Vec<_>>>()?;
    let summary = Summary::of(&values);
    let target = cfg.initial_mass() * cfg.coeffs.g.integral(t).exp();
    Ok(McReport {
        claim: "mean_mass",
        estimate: summary.mean,
        stderr: summary.stderr,
        target,
        paths: cfg.paths,
        pass: summary.within(target, SE_MULTIPLIER),
        rule: "|estimate - target| <= 3 stderr (exact to 1e-12 when stderr = 0)",
        provenance: cfg.provenance(),
    })
}

/// `(E∫uᵖ(t,x)dx)^{1/p}` against `M_p·exp(∫g + (p−1)/2·∫f²)`.
pub fn mc_lp_bound(cfg: &McConfig, p: f64, t: f64) -> Result<McReport> {
    if !(p > 1.0) {
        return Err(invalid(format!("Lp bound needs p > 1, got {p}")));
    }
    check_time(cfg, t)?;
    let samples = clock_samples(cfg, cfg.paths, t)?;
    let table = cfg.table(max_clock(&samples))?;
    let values = samples
        .par_iter()
        .map(|&(h, s)| Ok(h.powf(p) * table.state_at(s)?.lp_sum(p)))
        .collect::<Result<Vec<_>>>()?;
    let summary = Summary::of(&values);
    let lhs = summary.mean.powf(1.0 / p);
    let stderr = summary.stderr * summary.mean.powf(1.0 / p - 1.0) / p;
    let norm = cfg.initial.lp_sum(p).powf(1.0 / p);
    let rhs = norm * (cfg.coeffs.g.integral(t) + 0.5 * (p - 1.0) * cfg.coeffs.f.integral_sq(t)).exp();
    let pass = lhs <= rhs * (1.0 + SE_MULTIPLIER * stderr / lhs.max(f64::MIN_POSITIVE));
    Ok(McReport {
        claim: "lp_bound",
        estimate: lhs,
        stderr,
        target: rhs,
        paths: cfg.paths,
        pass,
        rule: "estimate <= target * (1 + 3 relative stderr)",
        provenance: cfg.provenance(),
    })
}

/// Smooth compactly supported test function `(1 − r²)⁴`, `r = (x − center)/half_width`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TestFunction {
    pub center: f64,
    pub half_width: f64,
}

impl TestFunction {
    pub fn new(center: f64, half_width: f64) -> Result<Self> {
        if !(half_width > 0.0) || !center.is_finite() {
            return Err(invalid("test function needs a finite center and positive half width"));
        }
        Ok(Self { center, half_width })
    }

    pub fn support(&self) -> (f64, f64) {
        (self.center - self.half_width, self.center + self.half_width)
    }

    pub fn value(&self, x: f64) -> f64 {
        let r = (x - self.center) / self.half_width;
        let q = 1.0 - r * r;
        if q <= 0.0 {
            0.0
        } else {
            q.powi(4)
        }
    }

    /// `φ''(x)`, in closed form.
    pub fn laplacian(&self, x: f64) -> f64 {
        let r = (x - self.center) / self.half_width;
        let q = 1.0 - r * r;
        if q <= 0.0 {
            0.0
        } else {
            (-8.0 * q.powi(3) + 48.0 * r * r * q * q) / (self.half_width * self.half_width)
        }
    }
}

const GAUSS_NODES: [f64; 4] = [
    0.183_434_642_495_649_8,
    0.525_532_409_916_329,
    0.796_666_477_413_626_7,
    0.960_289_856_497_536_3,
];
const GAUSS_WEIGHTS: [f64; 4] = [
    0.362_683_783_378_362,
    0.313_706_645_877_887_3,
    0.222_381_034_453_374_5,
    0.101_228_536_290_376_3,
];

/// Panels of 8-point Gauss–Legendre across the test function support.
const WEAK_FORM_PANELS: usize = 32;

/// `∫ v(x)·weight(x) dx` over `[a, b]`, split at `breaks` and then into panels.
fn integrate_pieces(
    a: f64,
    b: f64,
    breaks: &[f64],
    integrand: &mut dyn FnMut(f64) -> Result<f64>,
) -> Result<f64> {
    let mut cuts = vec![a];
    cuts.extend(breaks.iter().copied().filter(|&k| k > a && k < b));
    cuts.push(b);
    cuts.sort_by(f64::total_cmp);
    let mut total = 0.0;
    for piece in cuts.windows(2) {
        let len = piece[1] - piece[0];
        if len <= 0.0 {
            continue;
        }
        let panels = ((WEAK_FORM_PANELS as f64 * len / (b - a)).ceil() as usize).max(1);
        let h = len / panels as f64;
        for k in 0..panels {
            let mid = piece[0] + (k as f64 + 0.5) * h;
            for (node, weight) in GAUSS_NODES.iter().zip(GAUSS_WEIGHTS) {
                let off = 0.5 * h * node;
                total += 0.5 * h * weight * (integrand(mid - off)? + integrand(mid + off)?);
            }
        }
    }
    Ok(total)
}

/// `|(u,φ)(t) − (u,φ)(0) − ∫(uᵐ,Δφ)ds − ∫(u,φ)(f dw + g ds)|` on one path, with
/// left-endpoint sums over the clock grid. `t` must be a grid node.
pub fn weak_form_residual(sample: &StochasticFieldSample, phi: &TestFunction, t: f64) -> Result<f64> {
    let base = sample.base();
    if base.dimension() != 1 {
        return Err(Error::Unsupported("weak-form residual is implemented in one dimension".into()));
    }
    let (a, b) = phi.support();
    if let Some((lo, hi)) = base.spatial_extent() {
        if a < lo || b > hi {
            return Err(invalid(format!(
                "test function support [{a}, {b}] leaves the domain [{lo}, {hi}]"
            )));
        }
    }
    let clock = sample.clock();
    let end = clock
        .grid()
        .node_index(t)
        .ok_or_else(|| invalid(format!("weak-form time {t} must be a node of the clock grid")))?;
    let m = clock.gamma();

    let pairing = |i: usize| -> Result<(f64, f64)> {
        let s = clock.clock()[i];
        let h = clock.h()[i];
        let kinks = base.kinks(s);
        let mut mass = |x: f64| Ok(base.eval(s, &[x])? * phi.value(x));
        let first = integrate_pieces(a, b, &kinks, &mut mass)?;
        let mut flux = |x: f64| Ok(base.eval(s, &[x])?.powf(m) * phi.laplacian(x));
        let second = integrate_pieces(a, b, &kinks, &mut flux)?;
        Ok((h * first, h.powf(m) * second))
    };

    let pairs = (0..=end).map(pairing).collect::<Result<Vec<_>>>()?;
    let nodes = clock.grid().nodes();
    let w = clock.noise();
    let mut drift = CompensatedSum::default();
    for (i, &(u_phi, um_lap)) in pairs[..end].iter().enumerate() {
        let dt = nodes[i + 1] - nodes[i];
        let dw = w[i + 1] - w[i];
        drift.add(um_lap * dt + u_phi * (clock.f_steps()[i] * dw + clock.g_steps()[i] * dt));
    }
    Ok((pairs[end].0 - pairs[0].0 - drift.value()).abs())
}

/// Least-squares slope of `log y` against `log x`.
pub fn loglog_slope(xs: &[f64], ys: &[f64]) -> f64 {
    let lx: Vec<f64> = xs.iter().map(|x| x.ln()).collect();
    let ly: Vec<f64> = ys.iter().map(|y| y.ln()).collect();
    let n = lx.len() as f64;
    let mx = lx.iter().sum::<f64>() / n;
    let my = ly.iter().sum::<f64>() / n;
    let cov: f64 = lx.iter().zip(&ly).map(|(x, y)| (x - mx) * (y - my)).sum();
    let var: f64 = lx.iter().map(|x| (x - mx) * (x - mx)).sum();
    cov / var
}

/// Root-mean-square weak-form residual over paths at successive refinements
/// of one fixed set of Brownian paths.
#[derive(Debug, Clone, PartialEq)]
pub struct RefinementStudy {
    pub steps: Vec<f64>,
    pub rms: Vec<f64>,
    pub slope: f64,
}

/// Refines each path `levels − 1` times by Brownian-bridge midpoints and
/// records the RMS residual at `t` (the coarse grid horizon) per level.
pub fn weak_form_refinement(
    base: Arc<dyn DeterministicSolution>,
    coeffs: &CoefficientPair,
    m: f64,
    phi: &TestFunction,
    coarse: &TimeGrid,
    levels: usize,
    paths: usize,
    master_seed: u64,
) -> Result<RefinementStudy> {
    if levels < 2 || paths == 0 {
        return Err(invalid("refinement study needs at least 2 levels and 1 path"));
    }
    let t = coarse.horizon();
    let per_path: Vec<Vec<f64>> = (0..paths)
        .into_par_iter()
        .map(|i| {
            let mut noise = sample_brownian(coarse, derive_seed(master_seed, i as u64));
            let mut out = Vec::with_capacity(levels);
            for level in 0..levels {
                if level > 0 {
                    noise = noise.refine();
                }
                let clock = Arc::new(multiplier_path(&noise, coeffs, m)?);
                let sample = StochasticFieldSample::new(base.clone(), clock)?;
                out.push(weak_form_residual(&sample, phi, t)?);
            }
            Ok(out)
        })
        .collect::<Result<_>>()?;
    let mut steps = Vec::with_capacity(levels);
    let mut rms = Vec::with_capacity(levels);
    let coarse_step = t / (coarse.len() - 1) as f64;
    for level in 0..levels {
        steps.push(coarse_step / 2f64.powi(level as i32));
        let mean_sq = per_path.iter().map(|r| r[level] * r[level]).sum::<f64>() / paths as f64;
        rms.push(mean_sq.sqrt());
    }
    let slope = loglog_slope(&steps, &rms);
    Ok(RefinementStudy { steps, rms, slope })
}

fn initial_values(
    lower: &StochasticFieldSample,
    upper: &StochasticFieldSample,
    x: &[f64],
) -> Result<(f64, f64)> {
    Ok((lower.base().eval(0.0, x)?, upper.base().eval(0.0, x)?))
}

/// Whether `u_lower ≤ u_upper + tol·(1 + |u_upper|)` at every probe, for two
/// fields driven by the same clock.
///
/// The initial data must be ordered at the probe points.
pub fn comparison_check(
    lower: &StochasticFieldSample,
    upper: &StochasticFieldSample,
    probes: &[(f64, Vec<f64>)],
    tol: f64,
) -> Result<bool> {
    lower.ensure_same_clock(upper)?;
    for (_, x) in probes {
        let (a, b) = initial_values(lower, upper, x)?;
        if a > b {
            return Err(invalid(format!("initial data not ordered at x = {x:?}: {a} > {b}")));
        }
    }
    for (t, x) in probes {
        let (a, b) = (lower.value(*t, x)?, upper.value(*t, x)?);
        if a > b + tol * (1.0 + b.abs()) {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Whether `0 ≤ u(t,x) ≤ bound·h(t) + tol` at every probe.
pub fn maximum_check(
    sample: &StochasticFieldSample,
    bound: f64,
    probes: &[(f64, Vec<f64>)],
    tol: f64,
) -> Result<bool> {
    for (_, x) in probes {
        let u0 = sample.base().eval(0.0, x)?;
        if !(0.0..=bound).contains(&u0) {
            return Err(invalid(format!("initial value {u0} at x = {x:?} outside [0, {bound}]")));
        }
    }
    for (t, x) in probes {
        let u = sample.value(*t, x)?;
        if u < -tol || u > bound * sample.clock().h_at(*t)? + tol {
            return Ok(false);
        }
    }
    Ok(true)
}

/// `H(t)^{βd}·|u(t,x) − U^{BT}(H(t) + offset, x; b)·h(t)|`.
///
/// `offset` aligns the reference when the initial data are themselves a
/// Barenblatt profile taken at time `offset`; use 0 for generic data.
pub fn asymptotic_error(
    sample: &StochasticFieldSample,
    reference: &BarenblattParams,
    offset: f64,
    t: f64,
    x: &[f64],
) -> Result<f64> {
    let clock = sample.clock();
    let s = clock.clock_at(t)?;
    if !(s > 0.0) {
        return Err(invalid("asymptotic error needs H(t) > 0"));
    }
    let u = sample.value(t, x)?;
    let target = barenblatt(reference, s + offset, x)? * clock.h_at(t)?;
    Ok(s.powf(reference.alpha()) * (u - target).abs())
}

/// Barenblatt level matching the mass of the configured initial data.
pub fn matching_barenblatt(cfg: &McConfig) -> Result<BarenblattParams> {
    let d = cfg.initial.grid().dimension();
    BarenblattParams::new(cfg.m, d, mass_to_b(cfg.m, d, cfg.initial_mass())?)
}

/// Per-path scaled errors at the probe times.
#[derive(Debug, Clone, PartialEq)]
pub struct AsymptoticReport {
    pub reference: BarenblattParams,
    pub probe_times: Vec<f64>,
    /// `errors[path][k]` at `probe_times[k]`.
    pub errors: Vec<Vec<f64>>,
    pub clocks: Vec<Vec<f64>>,
    pub decreasing_fraction: f64,
    pub pass: bool,
}

fn strictly_decreasing(values: &[f64]) -> bool {
    values.windows(2).all(|w| w[1] < w[0])
}

/// Scaled distance to the mass-matched stochastic Barenblatt solution at
/// increasing times, on the first `paths` paths.
pub fn asymptotic_study(
    cfg: &McConfig,
    probe_times: &[f64],
    x: &[f64],
    paths: usize,
) -> Result<AsymptoticReport> {
    for &t in probe_times {
        check_time(cfg, t)?;
    }
    let reference = matching_barenblatt(cfg)?;
    let clocks: Vec<Arc<MultiplierPath>> = cfg.map_paths(paths, |_, mp| Ok(Arc::new(mp)))?;
    let last = *probe_times.last().ok_or_else(|| invalid("no probe times"))?;
    let top = clocks
        .iter()
        .map(|c| c.clock_at(last))
        .collect::<Result<Vec<_>>>()?
        .into_iter()
        .fold(0.0, f64::max);
    let table: Arc<dyn DeterministicSolution> = Arc::new(cfg.table(top)?);
    let rows = clocks
        .par_iter()
        .map(|clock| {
            let sample = StochasticFieldSample::new(table.clone(), clock.clone())?;
            let errors = probe_times
                .iter()
                .map(|&t| asymptotic_error(&sample, &reference, 0.0, t, x))
                .collect::<Result<Vec<_>>>()?;
            let clock_values = probe_times
                .iter()
                .map(|&t| clock.clock_at(t))
                .collect::<Result<Vec<_>>>()?;
            Ok((errors, clock_values))
        })
        .collect::<Result<Vec<_>>>()?;
    let (errors, clocks): (Vec<_>, Vec<_>) = rows.into_iter().unzip();
    let decreasing = errors.iter().filter(|e| strictly_decreasing(e)).count();
    let decreasing_fraction = decreasing as f64 / paths as f64;
    Ok(AsymptoticReport {
        reference,
        probe_times: probe_times.to_vec(),
        errors,
        clocks,
        decreasing_fraction,
        pass: decreasing_fraction >= PROFILE_PASS_FRACTION,
    })
}

/// Statistics of `ξ̂ = log h(T)` and the per-path approach to the random
/// Barenblatt limit profile.
#[derive(Debug, Clone, PartialEq)]
pub struct LimitProfileReport {
    pub xi: Summary,
    pub expected_mean: f64,
    pub expected_variance: f64,
    pub mean_pass: bool,
    pub variance_pass: bool,
    pub profile_paths: usize,
    pub decreasing_fraction: f64,
    pub pass: bool,
    pub provenance: Provenance,
}

/// Checks `ξ̂ = log h(T)` against the Gaussian limit law on all paths and,
/// on the first `profile_paths`, that `|u(t,x) − e^ξ̂·U^{BT}(e^{(m−1)ξ̂}t, x; b)|`
/// decreases over `probe_times`.
pub fn limit_profile_check(
    cfg: &McConfig,
    probe_times: &[f64],
    x: &[f64],
    profile_paths: usize,
) -> Result<LimitProfileReport> {
    let (expected_mean, expected_variance) = limit_distribution(&cfg.coeffs)?;
    let cutoff = cfg.coeffs.f.cutoff().max(cfg.coeffs.g.cutoff());
    let horizon = cfg.grid.horizon();
    if horizon < cutoff {
        return Err(invalid(format!(
            "path horizon {horizon} ends before the coefficient cutoff {cutoff}"
        )));
    }
    for &t in probe_times {
        check_time(cfg, t)?;
    }
    let profile_paths = profile_paths.min(cfg.paths);
    let xi: Vec<f64> = cfg.map_paths(cfg.paths, |_, mp| Ok(*mp.log_h().last().expect("non-empty")))?;
    let summary = Summary::of(&xi);

    let reference = matching_barenblatt(cfg)?;
    let m = cfg.m;
    let samples: Vec<Vec<(f64, f64)>> = cfg.map_paths(profile_paths, |_, mp| {
        probe_times
            .iter()
            .map(|&t| Ok((mp.h_at(t)?, mp.clock_at(t)?)))
            .collect()
    })?;
    let top = samples.iter().flatten().map(|s| s.1).fold(0.0, f64::max);
    let table = cfg.table(top)?;
    let mut decreasing = 0;
    for (row, &xi_hat) in samples.iter().zip(&xi) {
        let errors = row
            .iter()
            .zip(probe_times)
            .map(|(&(h, s), &t)| {
                let u = h * table.eval(s, x)?;
                let limit = xi_hat.exp() * barenblatt(&reference, ((m - 1.0) * xi_hat).exp() * t, x)?;
                Ok((u - limit).abs())
            })
            .collect::<Result<Vec<_>>>()?;
        if strictly_decreasing(&errors) {
            decreasing += 1;
        }
    }
    let decreasing_fraction = if profile_paths == 0 {
        1.0
    } else {
        decreasing as f64 / profile_paths as f64
    };
    let mean_pass = summary.within(expected_mean, SE_MULTIPLIER);
    let variance_pass = if expected_variance == 0.0 {
        summary.variance <= 1e-24
    } else {
        summary.variance_within(expected_variance, SE_MULTIPLIER)
    };
    Ok(LimitProfileReport {
        xi: summary,
        expected_mean,
        expected_variance,
        mean_pass,
        variance_pass,
        profile_paths,
        decreasing_fraction,
        pass: mean_pass && variance_pass && decreasing_fraction >= PROFILE_PASS_FRACTION,
        provenance: cfg.provenance(),
    })
}

/// One path of the bounded-support experiment.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SupportRow {
    /// Largest support radius over the grid times up to the horizon.
    pub eta_hat: f64,
    pub clock_end: f64,
    pub clock_half: f64,
    /// `(H(T) − H(T/2))/H(T/2)`.
    pub plateau_ratio: f64,
    /// `u(T, 0)`.
    pub center_end: f64,
    pub mass_end: f64,
    /// Support radius of the dominating Barenblatt solution at clock time `H(T)`.
    pub support_bound: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SupportReport {
    pub rows: Vec<SupportRow>,
    pub median_plateau_ratio: f64,
    pub plateau: bool,
    pub bound_pass: bool,
    pub mass: Summary,
    pub mass_target: f64,
    pub mass_pass: bool,
    pub center_initial: f64,
    pub median_center_end: f64,
    pub decay_pass: bool,
    pub dominating: BarenblattParams,
    pub provenance: Provenance,
}

impl SupportReport {
    pub fn pass(&self) -> bool {
        self.plateau && self.bound_pass && self.mass_pass && self.decay_pass
    }
}

fn median(values: &mut [f64]) -> f64 {
    values.sort_by(f64::total_cmp);
    let n = values.len();
    if n % 2 == 1 {
        values[n / 2]
    } else {
        0.5 * (values[n / 2 - 1] + values[n / 2])
    }
}

/// Smallest `b` with `U^{BT}(1, x; b) ≥ initial` at every cell center.
pub fn dominating_barenblatt(initial: &FieldState, m: f64) -> Result<BarenblattParams> {
    let d = initial.grid().dimension();
    let unit = BarenblattParams::new(m, d, 1.0)?;
    let slope = (m - 1.0) / (2.0 * m) * unit.beta();
    let b = initial
        .values()
        .iter()
        .enumerate()
        .filter(|(_, &v)| v > 0.0)
        .map(|(i, &v)| {
            let x = initial.grid().center(i);
            v.powf(m - 1.0) + slope * x * x
        })
        .fold(0.0, f64::max);
    if b <= 0.0 {
        return Err(invalid("dominating profile needs non-zero initial data"));
    }
    unit.with_b(b)
}

/// Bounded-support experiment for `m = 2`: finite-horizon evidence that the
/// clock settles, the support stays within the comparison bound, the mean mass
/// is kept and the center value decays.
pub fn support_experiment(cfg: &McConfig) -> Result<SupportReport> {
    if cfg.m != 2.0 {
        return Err(Error::Unsupported(format!(
            "the bounded-support experiment is defined for m = 2, got {}",
            cfg.m
        )));
    }
    let mass0 = cfg.initial_mass();
    if !(mass0 > 0.0) {
        return Err(invalid("initial data must have positive mass"));
    }
    let horizon = cfg.grid.horizon();
    let clocks: Vec<MultiplierPath> = cfg.map_paths(cfg.paths, |_, mp| Ok(mp))?;
    let top = clocks.iter().map(|c| c.clock_end()).fold(0.0, f64::max);
    let table = cfg.table(top)?;
    let times = table.times();
    let radii: Vec<f64> = table.states().iter().map(|s| support_radius(s, 0.0)).collect();
    let dominating = dominating_barenblatt(&cfg.initial, cfg.m)?;
    let dx = cfg.initial.grid().width();
    let center = vec![0.0; cfg.initial.grid().dimension()];
    let center_initial = cfg.initial.interpolate(&center)?;

    let radius_at = |s: f64| {
        let upper = times.partition_point(|&t| t < s).min(times.len() - 1);
        if times[upper] == s || upper == 0 {
            radii[upper]
        } else {
            radii[upper].max(radii[upper - 1])
        }
    };
    let rows = clocks
        .par_iter()
        .map(|clock| {
            let eta_hat = clock.clock().iter().map(|&s| radius_at(s)).fold(0.0, f64::max);
            let clock_end = clock.clock_end();
            let clock_half = clock.clock_at(0.5 * horizon)?;
            let h_end = *clock.h().last().expect("non-empty");
            Ok(SupportRow {
                eta_hat,
                clock_end,
                clock_half,
                plateau_ratio: (clock_end - clock_half) / clock_half,
                center_end: h_end * table.eval(clock_end, &center)?,
                mass_end: h_end * table.mass_at(clock_end)?,
                support_bound: dominating.support_radius(clock_end + 1.0),
            })
        })
        .collect::<Result<Vec<_>>>()?;

    let mut ratios: Vec<f64> = rows.iter().map(|r| r.plateau_ratio).collect();
    let median_plateau_ratio = median(&mut ratios);
    let mut centers: Vec<f64> = rows.iter().map(|r| r.center_end).collect();
    let median_center_end = median(&mut centers);
    let masses: Vec<f64> = rows.iter().map(|r| r.mass_end).collect();
    let mass = Summary::of(&masses);
    // discrete interfaces may lead the continuous one by a cell
    let bound_pass = rows.iter().all(|r| r.eta_hat <= r.support_bound + 2.0 * dx);
    Ok(SupportReport {
        median_plateau_ratio,
        plateau: median_plateau_ratio <= PLATEAU_RATIO,
        bound_pass,
        mass_pass: mass.within(mass0, SE_MULTIPLIER),
        mass,
        mass_target: mass0,
        center_initial,
        median_center_end,
        decay_pass: median_center_end <= CENTER_DECAY_RATIO * center_initial,
        dominating,
        rows,
        provenance: cfg.provenance(),
    })
}
