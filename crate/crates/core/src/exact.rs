//! Closed-form solutions of `U_t = Δ(Uᵐ)` and their stochastic images.

use statrs::function::gamma::gamma;

use crate::error::{invalid, Error, Result};
use crate::noise::{multiplier_path, CoefficientPair, MultiplierPath, NoisePath};
use crate::timechange::{forward_transform, DeterministicSolution, TimeDomain, TimeEnd};

fn norm_sq(x: &[f64]) -> f64 {
    x.iter().map(|v| v * v).sum()
}

fn check_m(m: f64) -> Result<()> {
    if m > 1.0 && m.is_finite() {
        Ok(())
    } else {
        Err(invalid(format!("exponent must satisfy m > 1, got {m}")))
    }
}

fn check_dim(d: usize) -> Result<()> {
    if d >= 1 {
        Ok(())
    } else {
        Err(invalid("dimension must satisfy d >= 1"))
    }
}

fn check_point(x: &[f64], d: usize) -> Result<()> {
    if x.len() == d {
        Ok(())
    } else {
        Err(invalid(format!("point has {} coordinates, expected {d}", x.len())))
    }
}

/// Barenblatt source-type solution with exponent `m`, dimension `d` and level `b`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BarenblattParams {
    m: f64,
    d: usize,
    b: f64,
}

impl BarenblattParams {
    pub fn new(m: f64, d: usize, b: f64) -> Result<Self> {
        check_m(m)?;
        check_dim(d)?;
        if !(b > 0.0) || !b.is_finite() {
            return Err(invalid(format!("Barenblatt level must satisfy b > 0, got {b}")));
        }
        Ok(Self { m, d, b })
    }

    pub fn m(&self) -> f64 {
        self.m
    }

    pub fn d(&self) -> usize {
        self.d
    }

    pub fn b(&self) -> f64 {
        self.b
    }

    /// `β = 1/((m−1)d + 2)`.
    pub fn beta(&self) -> f64 {
        1.0 / ((self.m - 1.0) * self.d as f64 + 2.0)
    }

    /// `α = βd`.
    pub fn alpha(&self) -> f64 {
        self.beta() * self.d as f64
    }

    /// Interface radius `√(2mb/((m−1)β))·t^β`.
    pub fn support_radius(&self, t: f64) -> f64 {
        (2.0 * self.m * self.b / ((self.m - 1.0) * self.beta())).sqrt() * t.powf(self.beta())
    }

    /// Profile as a function of `|x|`; `t > 0` is not checked.
    pub fn radial(&self, t: f64, r: f64) -> f64 {
        let beta = self.beta();
        let inner = self.b - (self.m - 1.0) / (2.0 * self.m) * beta * r * r / t.powf(2.0 * beta);
        if inner <= 0.0 {
            0.0
        } else {
            inner.powf(1.0 / (self.m - 1.0)) / t.powf(self.alpha())
        }
    }

    pub fn with_b(&self, b: f64) -> Result<Self> {
        Self::new(self.m, self.d, b)
    }
}

/// `U^{BT}(t, x; b)` for `t > 0`.
pub fn barenblatt(p: &BarenblattParams, t: f64, x: &[f64]) -> Result<f64> {
    if !(t > 0.0) {
        return Err(invalid(format!("Barenblatt solution needs t > 0, got {t}")));
    }
    check_point(x, p.d)?;
    Ok(p.radial(t, norm_sq(x).sqrt()))
}

/// Surface measure of the unit sphere in `d` dimensions (2 for `d = 1`).
pub fn sphere_area(d: usize) -> f64 {
    2.0 * std::f64::consts::PI.powf(d as f64 / 2.0) / gamma(d as f64 / 2.0)
}

/// Total mass at `b = 1`; mass at general `b` is this times `b^{1/(2β(m−1))}`.
fn unit_mass(m: f64, d: usize) -> f64 {
    let beta = 1.0 / ((m - 1.0) * d as f64 + 2.0);
    let k = m / (m - 1.0);
    ((m - 1.0) * beta / (2.0 * std::f64::consts::PI * m)).powf(-(d as f64) / 2.0) * gamma(k)
        / gamma(k + d as f64 / 2.0)
}

/// Time-independent total mass of the Barenblatt solution.
pub fn barenblatt_mass(p: &BarenblattParams) -> f64 {
    p.b.powf(1.0 / (2.0 * p.beta() * (p.m - 1.0))) * unit_mass(p.m, p.d)
}

/// The level `b` whose Barenblatt solution carries mass `mass`.
pub fn mass_to_b(m: f64, d: usize, mass: f64) -> Result<f64> {
    check_m(m)?;
    check_dim(d)?;
    if !(mass > 0.0) || !mass.is_finite() {
        return Err(invalid(format!("mass must be positive, got {mass}")));
    }
    let beta = 1.0 / ((m - 1.0) * d as f64 + 2.0);
    Ok((mass / unit_mass(m, d)).powf(2.0 * beta * (m - 1.0)))
}

/// Quadratic-pressure solution parameters.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadraticPressureParams {
    m: f64,
    d: usize,
    q: f64,
}

impl QuadraticPressureParams {
    pub fn new(m: f64, d: usize, q: f64) -> Result<Self> {
        check_m(m)?;
        check_dim(d)?;
        if !(q > 0.0) || !q.is_finite() {
            return Err(invalid(format!("quadratic pressure needs q > 0, got {q}")));
        }
        Ok(Self { m, d, q })
    }

    pub fn m(&self) -> f64 {
        self.m
    }

    pub fn d(&self) -> usize {
        self.d
    }

    pub fn q(&self) -> f64 {
        self.q
    }

    /// `t_q = (m−1)/(2mq(2 + d(m−1)))`.
    pub fn blowup_time(&self) -> f64 {
        (self.m - 1.0) / (2.0 * self.m * self.q * (2.0 + self.d as f64 * (self.m - 1.0)))
    }

    /// `t₁`, the blow-up time at `q = 1`.
    pub fn t1(&self) -> f64 {
        self.blowup_time() * self.q
    }
}

/// `(t₁|x|²/(t_q − t))^{1/(m−1)}` on `0 ≤ t < t_q`.
pub fn quadratic_pressure(p: &QuadraticPressureParams, t: f64, x: &[f64]) -> Result<f64> {
    check_point(x, p.d)?;
    let tq = p.blowup_time();
    if !(t >= 0.0) {
        return Err(invalid(format!("quadratic pressure needs t >= 0, got {t}")));
    }
    if t >= tq {
        return Err(Error::BlowUp {
            base_time: tq,
            hitting_time: Some(tq),
        });
    }
    Ok((p.t1() * norm_sq(x) / (tq - t)).powf(1.0 / (p.m - 1.0)))
}

/// One-dimensional linear-pressure solution parameters.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LinearPressureParams {
    m: f64,
}

impl LinearPressureParams {
    pub fn new(m: f64) -> Result<Self> {
        check_m(m)?;
        Ok(Self { m })
    }

    pub fn m(&self) -> f64 {
        self.m
    }

    /// Deterministic profile `((m−1)/m · max(s + x, 0))^{1/(m−1)}`.
    pub fn base(&self, s: f64, x: f64) -> f64 {
        ((self.m - 1.0) / self.m * (s + x).max(0.0)).powf(1.0 / (self.m - 1.0))
    }
}

/// `((m−1)/m · max(H(t) + x, 0))^{1/(m−1)}·h(t)`.
pub fn linear_pressure(
    p: &LinearPressureParams,
    clock: &MultiplierPath,
    t: f64,
    x: f64,
) -> Result<f64> {
    Ok(p.base(clock.clock_at(t)?, x) * clock.h_at(t)?)
}

/// Scaled pressure `(m/(m−1))·u^{m−1}`.
pub fn pressure(u: f64, m: f64) -> Result<f64> {
    check_m(m)?;
    if !(u >= 0.0) {
        return Err(invalid(format!("pressure needs a non-negative density, got {u}")));
    }
    Ok(m / (m - 1.0) * u.powf(m - 1.0))
}

/// Density recovered from a scaled pressure.
pub fn inverse_pressure(v: f64, m: f64) -> Result<f64> {
    check_m(m)?;
    if !(v >= 0.0) {
        return Err(invalid(format!("inverse pressure needs a non-negative pressure, got {v}")));
    }
    Ok(((m - 1.0) / m * v).powf(1.0 / (m - 1.0)))
}

/// Rescaled and shifted Barenblatt solution
/// `(p/q²)^{1/(m−1)}·U^{BT}(p·t + t₀, q·x + x₀; b)`.
#[derive(Debug, Clone, PartialEq)]
pub struct SelfSimilar {
    pub params: BarenblattParams,
    pub scale_p: f64,
    pub scale_q: f64,
    pub t0: f64,
    pub x0: Vec<f64>,
}

impl SelfSimilar {
    pub fn new(
        params: BarenblattParams,
        scale_p: f64,
        scale_q: f64,
        t0: f64,
        x0: Vec<f64>,
    ) -> Result<Self> {
        if !(scale_p > 0.0 && scale_q > 0.0 && t0 > 0.0) {
            return Err(invalid("self-similar scaling needs p, q, t0 > 0"));
        }
        check_point(&x0, params.d)?;
        Ok(Self {
            params,
            scale_p,
            scale_q,
            t0,
            x0,
        })
    }

    /// Barenblatt solution started at its own time `t0`: `U^{BT}(t + t0, x; b)`.
    pub fn shifted(params: BarenblattParams, t0: f64) -> Result<Self> {
        Self::new(params, 1.0, 1.0, t0, vec![0.0; params.d])
    }
}

pub fn self_similar(s: &SelfSimilar, t: f64, x: &[f64]) -> Result<f64> {
    let shifted_time = s.scale_p * t + s.t0;
    if !(shifted_time > 0.0) {
        return Err(invalid(format!("self-similar solution needs p·t + t0 > 0, got {shifted_time}")));
    }
    check_point(x, s.params.d)?;
    let y: Vec<f64> = x.iter().zip(&s.x0).map(|(xi, x0)| s.scale_q * xi + x0).collect();
    let factor = (s.scale_p / (s.scale_q * s.scale_q)).powf(1.0 / (s.params.m - 1.0));
    Ok(factor * barenblatt(&s.params, shifted_time, &y)?)
}

/// `U^{BT}(H(t), x; b)·h(t)`; needs `t > 0` so the clock has advanced.
pub fn stochastic_barenblatt(
    p: &BarenblattParams,
    clock: &MultiplierPath,
    t: f64,
    x: &[f64],
) -> Result<f64> {
    if !(t > 0.0) {
        return Err(invalid("stochastic Barenblatt solution needs t > 0"));
    }
    barenblatt(p, clock.clock_at(t)?, x).map(|v| v * clock.h_at(t).expect("t checked above"))
}

impl DeterministicSolution for BarenblattParams {
    fn eval(&self, s: f64, x: &[f64]) -> Result<f64> {
        barenblatt(self, s, x)
    }

    fn domain(&self) -> TimeDomain {
        TimeDomain::global_from(0.0, false)
    }

    fn descriptor(&self) -> String {
        format!("barenblatt(m={}, d={}, b={})", self.m, self.d, self.b)
    }

    fn degree(&self) -> Option<f64> {
        Some(self.m)
    }

    fn dimension(&self) -> usize {
        self.d
    }

    fn kinks(&self, s: f64) -> Vec<f64> {
        if s > 0.0 {
            let r = self.support_radius(s);
            vec![-r, r]
        } else {
            Vec::new()
        }
    }
}

impl DeterministicSolution for QuadraticPressureParams {
    fn eval(&self, s: f64, x: &[f64]) -> Result<f64> {
        quadratic_pressure(self, s, x)
    }

    fn domain(&self) -> TimeDomain {
        TimeDomain {
            start: 0.0,
            start_included: true,
            end: TimeEnd::BlowUp(self.blowup_time()),
        }
    }

    fn descriptor(&self) -> String {
        format!("quadratic_pressure(m={}, d={}, q={})", self.m, self.d, self.q)
    }

    fn degree(&self) -> Option<f64> {
        Some(self.m)
    }

    fn dimension(&self) -> usize {
        self.d
    }
}

impl DeterministicSolution for LinearPressureParams {
    fn eval(&self, s: f64, x: &[f64]) -> Result<f64> {
        check_point(x, 1)?;
        Ok(self.base(s, x[0]))
    }

    fn domain(&self) -> TimeDomain {
        TimeDomain::global_from(0.0, true)
    }

    fn descriptor(&self) -> String {
        format!("linear_pressure(m={})", self.m)
    }

    fn degree(&self) -> Option<f64> {
        Some(self.m)
    }

    fn kinks(&self, s: f64) -> Vec<f64> {
        vec![-s]
    }
}

impl DeterministicSolution for SelfSimilar {
    fn eval(&self, s: f64, x: &[f64]) -> Result<f64> {
        self_similar(self, s, x)
    }

    fn domain(&self) -> TimeDomain {
        TimeDomain::global_from(-self.t0 / self.scale_p, false)
    }

    fn descriptor(&self) -> String {
        format!(
            "self_similar({}, p={}, q={}, t0={})",
            self.params.descriptor(),
            self.scale_p,
            self.scale_q,
            self.t0
        )
    }

    fn degree(&self) -> Option<f64> {
        Some(self.params.m)
    }

    fn dimension(&self) -> usize {
        self.params.d
    }

    fn kinks(&self, s: f64) -> Vec<f64> {
        if self.params.d != 1 {
            return Vec::new();
        }
        let r = self.params.support_radius(self.scale_p * s + self.t0);
        vec![(-r - self.x0[0]) / self.scale_q, (r - self.x0[0]) / self.scale_q]
    }
}

/// Scaled pressure `V = (m/(m−1))U^{m−1}` of a porous-medium base; solves an
/// equation homogeneous of degree 2.
#[derive(Debug)]
pub struct PressureOf<'a> {
    pub density: &'a dyn DeterministicSolution,
    pub m: f64,
}

impl DeterministicSolution for PressureOf<'_> {
    fn eval(&self, s: f64, x: &[f64]) -> Result<f64> {
        pressure(self.density.eval(s, x)?, self.m)
    }

    fn domain(&self) -> TimeDomain {
        self.density.domain()
    }

    fn descriptor(&self) -> String {
        format!("pressure({})", self.density.descriptor())
    }

    fn degree(&self) -> Option<f64> {
        Some(2.0)
    }

    fn dimension(&self) -> usize {
        self.density.dimension()
    }
}

/// Largest discrepancies between the two constructions of the stochastic pressure.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CommutationReport {
    /// `max |V(H̃,x)·h̃ − (m/(m−1))U^{m−1}(H,x)·h^{m−1}|`
    pub field_gap: f64,
    /// `max |H̃ − H|`
    pub clock_gap: f64,
}

/// Compares the pressure of the transformed density with the transform of the
/// pressure, on one noise path.
///
/// The density clock uses degree `m`; the pressure clock uses degree 2 and the
/// multiplier `h̃` whose coefficients are [`CoefficientPair::pressure`].
pub fn pressure_commutation_check(
    base: &dyn DeterministicSolution,
    m: f64,
    noise: &NoisePath,
    coeffs: &CoefficientPair,
    probes: &[(f64, Vec<f64>)],
) -> Result<CommutationReport> {
    check_m(m)?;
    let density_clock = multiplier_path(noise, coeffs, m)?;
    let pressure_clock = multiplier_path(noise, &coeffs.pressure(m), 2.0)?;
    let pressure_base = PressureOf { density: base, m };

    let mut clock_gap: f64 = 0.0;
    for (a, b) in density_clock.clock().iter().zip(pressure_clock.clock()) {
        clock_gap = clock_gap.max((a - b).abs());
    }
    let mut field_gap: f64 = 0.0;
    for (t, x) in probes {
        let transformed_pressure = forward_transform(&pressure_base, &pressure_clock, *t, x)?;
        let u = forward_transform(base, &density_clock, *t, x)?;
        field_gap = field_gap.max((transformed_pressure - pressure(u, m)?).abs());
    }
    Ok(CommutationReport {
        field_gap,
        clock_gap,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::noise::{sample_brownian, TimeGrid};

    fn params(m: f64, d: usize, b: f64) -> BarenblattParams {
        BarenblattParams::new(m, d, b).unwrap()
    }

    #[test]
    fn validation() {
        assert!(BarenblattParams::new(1.0, 1, 1.0).is_err());
        assert!(BarenblattParams::new(2.0, 0, 1.0).is_err());
        let err = BarenblattParams::new(2.0, 1, -1.0).unwrap_err();
        assert!(err.to_string().contains("b > 0"));
        assert!(QuadraticPressureParams::new(2.0, 1, 0.0).is_err());
        assert!(barenblatt(&params(2.0, 1, 1.0), 0.0, &[0.0]).is_err());
        assert!(barenblatt(&params(2.0, 2, 1.0), 1.0, &[0.0]).is_err());
    }

    #[test]
    fn barenblatt_center_and_support() {
        let p = params(2.0, 1, 1.0);
        assert_eq!(barenblatt(&p, 1.0, &[0.0]).unwrap(), 1.0);
        // m = 2, d = 1: r(t) = √12·t^{1/3}
        assert!((p.support_radius(1.0) - 12f64.sqrt()).abs() < 1e-14);
        let r = p.support_radius(2.0);
        assert_eq!(barenblatt(&p, 2.0, &[r * 1.0001]).unwrap(), 0.0);
        assert!(barenblatt(&p, 2.0, &[r * 0.9999]).unwrap() > 0.0);
    }

    #[test]
    fn support_is_exactly_the_ball() {
        for (m, d) in [(2.0, 1), (3.0, 2), (1.5, 3)] {
            let p = params(m, d, 0.7);
            for t in [0.5, 1.0, 4.0] {
                let r = p.support_radius(t);
                for k in 0..=40 {
                    let radius = r * (0.8 + 0.4 * k as f64 / 40.0);
                    if (radius - r).abs() < 1e-10 * r {
                        continue;
                    }
                    let mut x = vec![0.0; d];
                    x[0] = radius;
                    let v = barenblatt(&p, t, &x).unwrap();
                    assert_eq!(v == 0.0, radius >= r, "m={m} d={d} t={t} radius={radius}");
                }
            }
        }
    }

    #[test]
    fn mass_closed_form_m2_d1() {
        // ∫ (1 − x²/12)₊ dx = (4/3)√12
        let exact = 4.0 / 3.0 * 12f64.sqrt();
        assert!((barenblatt_mass(&params(2.0, 1, 1.0)) - exact).abs() < 1e-12 * exact);
    }

    #[test]
    fn mass_monotone_in_b_and_invertible() {
        for (m, d) in [(2.0, 1), (3.0, 1), (2.0, 2), (2.0, 3), (1.5, 2)] {
            let mut last = 0.0;
            for b in [0.1, 0.5, 1.0, 4.0, 9.0] {
                let mass = barenblatt_mass(&params(m, d, b));
                assert!(mass > last);
                last = mass;
                let back = mass_to_b(m, d, mass).unwrap();
                assert!((back - b).abs() <= 1e-12 * b);
            }
            let beta = 1.0 / ((m - 1.0) * d as f64 + 2.0);
            let b1 = mass_to_b(m, d, 1.0).unwrap();
            let b2 = mass_to_b(m, d, 2.0).unwrap();
            assert!((b2 / b1 - 2f64.powf(2.0 * beta * (m - 1.0))).abs() < 1e-12);
        }
        assert!(mass_to_b(2.0, 1, 0.0).is_err());
    }

    #[test]
    fn mass_to_b_matches_bisection() {
        let (m, d, target) = (2.0, 1, 1.0);
        let (mut lo, mut hi) = (1e-6, 10.0);
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if barenblatt_mass(&params(m, d, mid)) < target {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        let b = mass_to_b(m, d, target).unwrap();
        assert!((b - 0.5 * (lo + hi)).abs() < 1e-12);
    }

    #[test]
    fn quadratic_pressure_values() {
        let p = QuadraticPressureParams::new(2.0, 1, 1.0).unwrap();
        assert!((p.blowup_time() - 1.0 / 12.0).abs() < 1e-16);
        assert_eq!(quadratic_pressure(&p, 0.05, &[0.0]).unwrap(), 0.0);
        assert!(matches!(
            quadratic_pressure(&p, 1.0 / 12.0, &[1.0]),
            Err(Error::BlowUp { .. })
        ));
        let p2 = QuadraticPressureParams::new(3.0, 2, 2.0).unwrap();
        assert!(p2.t1() >= p2.blowup_time());
        // initial value q^{1/(m−1)}|x|^{2/(m−1)}
        let x = [0.6, -0.8];
        let expected = 2f64.powf(0.5) * 1.0f64;
        assert!((quadratic_pressure(&p2, 0.0, &x).unwrap() - expected).abs() < 1e-14);
    }

    #[test]
    fn pressure_round_trip() {
        assert_eq!(pressure(0.0, 2.0).unwrap(), 0.0);
        assert_eq!(pressure(3.0, 2.0).unwrap(), 6.0);
        for m in [1.5, 2.0, 3.0] {
            for u in [0.1, 1.0, 7.0] {
                let back = inverse_pressure(pressure(u, m).unwrap(), m).unwrap();
                assert!((back - u).abs() <= 1e-12 * u);
            }
        }
        assert!(pressure(-1.0, 2.0).is_err());
    }

    #[test]
    fn linear_pressure_values() {
        let p = LinearPressureParams::new(2.0).unwrap();
        assert_eq!(p.base(1.0, 0.0), 0.5);
        assert_eq!(p.base(1.0, -1.5), 0.0);
    }

    #[test]
    fn self_similar_identity_scaling() {
        let p = params(2.0, 1, 1.0);
        let s = SelfSimilar::new(p, 1.0, 1.0, 1e-300, vec![0.0]).unwrap();
        for x in [0.0, 1.0, 3.0] {
            let direct = barenblatt(&p, 2.0, &[x]).unwrap();
            assert!((self_similar(&s, 2.0, &[x]).unwrap() - direct).abs() < 1e-14);
        }
        assert!(SelfSimilar::new(p, 1.0, 1.0, 0.0, vec![0.0]).is_err());
        let s = SelfSimilar::shifted(p, 1.0).unwrap();
        assert!(self_similar(&s, -2.0, &[0.0]).is_err());
    }

    #[test]
    fn commutation_with_identity_clock_is_exact() {
        let grid = TimeGrid::uniform(1.0, 100).unwrap();
        let noise = sample_brownian(&grid, 3);
        let base = SelfSimilar::shifted(params(3.0, 1, 1.0), 1.0).unwrap();
        let probes: Vec<(f64, Vec<f64>)> = (1..=5).map(|k| (0.2 * k as f64, vec![0.3 * k as f64])).collect();
        let report =
            pressure_commutation_check(&base, 3.0, &noise, &CoefficientPair::constant(0.0, 0.0), &probes)
                .unwrap();
        assert_eq!(report.field_gap, 0.0);
        assert_eq!(report.clock_gap, 0.0);
    }

    #[test]
    fn quadratic_m2_pressure_multiplier_is_h() {
        // (m−1)(m−2)/2 = 0 at m = 2, so h̃ = h^{m−1} = h
        let grid = TimeGrid::uniform(1.0, 500).unwrap();
        let noise = sample_brownian(&grid, 17);
        let coeffs = CoefficientPair::constant(1.0, 0.3);
        let mp = multiplier_path(&noise, &coeffs, 2.0).unwrap();
        let tilde = multiplier_path(&noise, &coeffs.pressure(2.0), 2.0).unwrap();
        for (a, b) in mp.h().iter().zip(tilde.h()) {
            assert!((a - b).abs() <= 1e-14 * a);
        }
    }
}
