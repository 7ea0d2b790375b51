//! Random change of variables between homogeneous deterministic equations and
//! their multiplicatively perturbed stochastic counterparts.
//!
//! If `v_t = F(v, Dv, D²v, …)` with `F` homogeneous of degree `γ`, then
//! `u(t,x) = v(H(t), x)·h(t)` solves `du = F(u, …)dt + u(f dw + g dt)` for the
//! clock `H = ∫h^{γ−1}`, and conversely `v(s,x) = u(R(s),x)/h(R(s))` with
//! `R = H⁻¹`.

use std::fmt;
use std::sync::Arc;

use crate::error::{invalid, Error, Result};
use crate::noise::{hitting_time, inverse_clock, MultiplierPath};

/// How the validity interval of a deterministic solution ends.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum TimeEnd {
    /// Defined for all later times.
    Global,
    /// Blows up at this time (excluded).
    BlowUp(f64),
    /// Data available up to this time (included), e.g. a computed table.
    Horizon(f64),
}

/// Clock times on which a deterministic solution can be evaluated.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TimeDomain {
    pub start: f64,
    pub start_included: bool,
    pub end: TimeEnd,
}

impl TimeDomain {
    pub const fn global_from(start: f64, start_included: bool) -> Self {
        Self {
            start,
            start_included,
            end: TimeEnd::Global,
        }
    }

    pub fn contains(&self, s: f64) -> bool {
        let after_start = if self.start_included {
            s >= self.start
        } else {
            s > self.start
        };
        after_start
            && match self.end {
                TimeEnd::Global => s.is_finite(),
                TimeEnd::BlowUp(end) => s < end,
                TimeEnd::Horizon(end) => s <= end,
            }
    }
}

/// A solution `v(s, x)` of a homogeneous deterministic equation.
pub trait DeterministicSolution: Send + Sync + fmt::Debug {
    fn eval(&self, s: f64, x: &[f64]) -> Result<f64>;

    fn domain(&self) -> TimeDomain;

    /// Short name for reports.
    fn descriptor(&self) -> String;

    /// Degree of homogeneity of the equation it solves, when fixed.
    fn degree(&self) -> Option<f64> {
        None
    }

    /// Spatial dimension of evaluation points.
    fn dimension(&self) -> usize {
        1
    }

    /// Points of a 1-d profile where derivatives jump (moving interfaces).
    fn kinks(&self, _s: f64) -> Vec<f64> {
        Vec::new()
    }

    /// Bounded spatial extent, for bases that are only known on a box.
    fn spatial_extent(&self) -> Option<(f64, f64)> {
        None
    }
}

fn check_domain(base: &dyn DeterministicSolution, clock: &MultiplierPath, s: f64) -> Result<()> {
    let domain = base.domain();
    if domain.contains(s) {
        return Ok(());
    }
    match domain.end {
        TimeEnd::BlowUp(end) if s >= end => Err(Error::BlowUp {
            base_time: end,
            hitting_time: hitting_time(clock, end)?,
        }),
        TimeEnd::Horizon(end) if s > end => Err(Error::OutOfRange {
            what: "clock time beyond the base solution horizon",
            value: s,
            lo: domain.start,
            hi: end,
        }),
        _ => Err(Error::OutOfRange {
            what: "clock time before the base solution starts",
            value: s,
            lo: domain.start,
            hi: f64::INFINITY,
        }),
    }
}

/// `u(t,x) = base(H(t), x)·h(t)`, with `h` and `H` linear between grid nodes.
pub fn forward_transform(
    base: &dyn DeterministicSolution,
    clock: &MultiplierPath,
    t: f64,
    x: &[f64],
) -> Result<f64> {
    let s = clock.clock_at(t)?;
    check_domain(base, clock, s)?;
    Ok(base.eval(s, x)? * clock.h_at(t)?)
}

/// A stochastic field tied to exactly one clock.
#[derive(Debug, Clone)]
pub struct StochasticFieldSample {
    base: Arc<dyn DeterministicSolution>,
    clock: Arc<MultiplierPath>,
}

impl StochasticFieldSample {
    /// Fails when the base solves an equation of a different homogeneity degree
    /// than the clock was built for.
    pub fn new(base: Arc<dyn DeterministicSolution>, clock: Arc<MultiplierPath>) -> Result<Self> {
        if let Some(degree) = base.degree() {
            if (degree - clock.gamma()).abs() > 1e-12 {
                return Err(invalid(format!(
                    "base {} is homogeneous of degree {degree}, clock built for {}",
                    base.descriptor(),
                    clock.gamma()
                )));
            }
        }
        Ok(Self { base, clock })
    }

    pub fn base(&self) -> &dyn DeterministicSolution {
        self.base.as_ref()
    }

    pub fn clock(&self) -> &MultiplierPath {
        &self.clock
    }

    pub fn shared_clock(&self) -> &Arc<MultiplierPath> {
        &self.clock
    }

    pub fn value(&self, t: f64, x: &[f64]) -> Result<f64> {
        forward_transform(self.base.as_ref(), &self.clock, t, x)
    }

    /// Same base value at grid node `i`, using the node values of `h` and `H` directly.
    pub fn value_at_node(&self, i: usize, x: &[f64]) -> Result<f64> {
        let s = self.clock.clock()[i];
        check_domain(self.base.as_ref(), &self.clock, s)?;
        Ok(self.base.eval(s, x)? * self.clock.h()[i])
    }

    pub fn ensure_same_clock(&self, other: &StochasticFieldSample) -> Result<()> {
        if Arc::ptr_eq(&self.clock, &other.clock) {
            Ok(())
        } else {
            Err(Error::ClockMismatch)
        }
    }
}

/// Recovers `v(s,x) = u(R(s),x)/h(R(s))` from the stochastic field.
pub fn inverse_transform(sample: &StochasticFieldSample, s: f64, x: &[f64]) -> Result<f64> {
    let t = inverse_clock(sample.clock(), s)?;
    let z = 1.0 / sample.clock().h_at(t)?;
    Ok(z * sample.value(t, x)?)
}

/// `v(t,x) = −x/(1+t)`, the classical solution of `v_t = v·v_x` with `v(0,x) = −x`.
#[derive(Debug, Clone, Copy, Default)]
pub struct BurgersLine;

impl DeterministicSolution for BurgersLine {
    fn eval(&self, s: f64, x: &[f64]) -> Result<f64> {
        Ok(-x[0] / (1.0 + s))
    }

    fn domain(&self) -> TimeDomain {
        TimeDomain::global_from(0.0, true)
    }

    fn descriptor(&self) -> String {
        "burgers(-x/(1+t))".into()
    }

    fn degree(&self) -> Option<f64> {
        Some(2.0)
    }
}

/// Built-in finite-difference right-hand sides for homogeneity checks.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum RhsKind {
    /// `ΔU`
    Heat,
    /// `Δ(Uᵐ)`
    Pme { m: f64 },
    /// `U·U_x`
    Burgers,
    /// `(m−1)VΔV + |∇V|²`
    Pressure { m: f64 },
}

impl RhsKind {
    pub fn from_tag(tag: &str, m: f64) -> Result<Self> {
        match tag {
            "heat" => Ok(Self::Heat),
            "pme" => Ok(Self::Pme { m }),
            "burgers" => Ok(Self::Burgers),
            "pressure" => Ok(Self::Pressure { m }),
            other => Err(invalid(format!(
                "unknown right-hand side `{other}` (expected heat, pme, burgers or pressure)"
            ))),
        }
    }

    /// Interior values of the right-hand side on a uniform 1-d grid with spacing `dx`.
    pub fn apply(&self, field: &[f64], dx: f64) -> Result<Vec<f64>> {
        if field.len() < 3 {
            return Err(invalid("homogeneity trial field needs at least 3 points"));
        }
        let second = |v: &[f64], i: usize| (v[i + 1] - 2.0 * v[i] + v[i - 1]) / (dx * dx);
        let first = |v: &[f64], i: usize| (v[i + 1] - v[i - 1]) / (2.0 * dx);
        let interior = 1..field.len() - 1;
        Ok(match *self {
            RhsKind::Heat => interior.map(|i| second(field, i)).collect(),
            RhsKind::Pme { m } => {
                if field.iter().any(|&u| u < 0.0) {
                    return Err(invalid("porous medium trial fields must be non-negative"));
                }
                let power: Vec<f64> = field.iter().map(|u| u.powf(m)).collect();
                interior.map(|i| second(&power, i)).collect()
            }
            RhsKind::Burgers => interior.map(|i| field[i] * first(field, i)).collect(),
            RhsKind::Pressure { m } => interior
                .map(|i| (m - 1.0) * field[i] * second(field, i) + first(field, i).powi(2))
                .collect(),
        })
    }
}

/// Relative tolerance of [`check_homogeneity`].
pub const HOMOGENEITY_TOL: f64 = 1e-9;

/// Whether `F(λU) = λ^γ F(U)` holds on every trial field for every `λ`, each
/// field sampled on a uniform grid of the unit interval.
pub fn check_homogeneity(
    rhs: RhsKind,
    gamma: f64,
    trials: &[Vec<f64>],
    lambdas: &[f64],
) -> Result<bool> {
    if let Some(bad) = lambdas.iter().find(|&&l| !(l > 0.0)) {
        return Err(invalid(format!("homogeneity scale must be positive, got {bad}")));
    }
    for field in trials {
        let dx = 1.0 / (field.len().max(2) - 1) as f64;
        let reference = rhs.apply(field, dx)?;
        for &lambda in lambdas {
            let scaled: Vec<f64> = field.iter().map(|u| lambda * u).collect();
            let lhs = rhs.apply(&scaled, dx)?;
            let factor = lambda.powf(gamma);
            let ok = lhs.iter().zip(&reference).all(|(a, b)| {
                let expected = factor * b;
                (a - expected).abs() <= HOMOGENEITY_TOL * (1.0 + expected.abs())
            });
            if !ok {
                return Ok(false);
            }
        }
    }
    Ok(true)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::noise::{multiplier_path, sample_brownian, CoefficientPair, TimeGrid};

    fn clock(f: f64, g: f64, gamma: f64, seed: u64) -> Arc<MultiplierPath> {
        let grid = TimeGrid::uniform(2.0, 400).unwrap();
        let path = sample_brownian(&grid, seed);
        Arc::new(multiplier_path(&path, &CoefficientPair::constant(f, g), gamma).unwrap())
    }

    fn trials() -> Vec<Vec<f64>> {
        (0..4)
            .map(|k| {
                (0..21)
                    .map(|i| {
                        let x = i as f64 / 20.0;
                        1.0 + 0.5 * (3.0 * x + k as f64).sin() + x * x
                    })
                    .collect()
            })
            .collect()
    }

    #[test]
    fn identity_clock_returns_base() {
        let c = clock(0.0, 0.0, 2.0, 1);
        for &t in &[0.0, 0.3, 1.7] {
            let u = forward_transform(&BurgersLine, &c, t, &[0.8]).unwrap();
            assert_eq!(u, BurgersLine.eval(t, &[0.8]).unwrap());
        }
        let sample = StochasticFieldSample::new(Arc::new(BurgersLine), c).unwrap();
        assert_eq!(inverse_transform(&sample, 1.1, &[0.4]).unwrap(), -0.4 / 2.1);
    }

    #[test]
    fn degree_mismatch_rejected() {
        let c = clock(1.0, 0.0, 3.0, 1);
        assert!(StochasticFieldSample::new(Arc::new(BurgersLine), c).is_err());
    }

    #[test]
    fn different_clocks_detected() {
        let a = StochasticFieldSample::new(Arc::new(BurgersLine), clock(1.0, 0.0, 2.0, 1)).unwrap();
        let b = StochasticFieldSample::new(Arc::new(BurgersLine), clock(1.0, 0.0, 2.0, 1)).unwrap();
        assert_eq!(a.ensure_same_clock(&b), Err(Error::ClockMismatch));
        let c = StochasticFieldSample::new(Arc::new(BurgersLine), a.shared_clock().clone()).unwrap();
        assert!(a.ensure_same_clock(&c).is_ok());
    }

    #[test]
    fn inverse_out_of_range() {
        let c = clock(1.0, 0.0, 2.0, 4);
        let end = c.clock_end();
        let sample = StochasticFieldSample::new(Arc::new(BurgersLine), c).unwrap();
        assert!(matches!(
            inverse_transform(&sample, end * 1.5, &[0.0]),
            Err(Error::OutOfRange { .. })
        ));
    }

    #[test]
    fn homogeneity_of_builtins() {
        let fields = trials();
        let lambdas = [0.3, 1.0, 2.5, 7.0];
        let check = |tag: &str, m: f64, gamma: f64| {
            check_homogeneity(RhsKind::from_tag(tag, m).unwrap(), gamma, &fields, &lambdas).unwrap()
        };
        assert!(check("heat", 1.0, 1.0));
        assert!(!check("heat", 1.0, 2.0));
        assert!(check("pme", 3.0, 3.0));
        assert!(!check("pme", 3.0, 2.0));
        assert!(check("burgers", 1.0, 2.0));
        assert!(check("pressure", 3.0, 2.0));
        assert!(!check("pressure", 3.0, 3.0));
    }

    #[test]
    fn homogeneity_input_errors() {
        assert!(RhsKind::from_tag("wave", 2.0).is_err());
        let fields = trials();
        assert!(check_homogeneity(RhsKind::Heat, 1.0, &fields, &[0.0]).is_err());
        assert!(check_homogeneity(RhsKind::Heat, 1.0, &fields, &[-1.0]).is_err());
    }
}
