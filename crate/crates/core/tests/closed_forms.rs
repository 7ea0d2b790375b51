use spme_core::exact::{
    barenblatt, quadratic_pressure, self_similar, BarenblattParams, LinearPressureParams,
    QuadraticPressureParams, SelfSimilar,
};
use spme_core::solver::residual;

/// Residual magnitudes at steps δ and δ/2, and the observed order.
fn order(eval: impl Fn(f64, &[f64]) -> spme_core::Result<f64> + Copy, m: f64, t: f64, x: &[f64]) -> (f64, f64, f64) {
    let coarse = residual(eval, m, t, x, (1e-2, 1e-2)).unwrap().abs();
    let fine = residual(eval, m, t, x, (5e-3, 5e-3)).unwrap().abs();
    (coarse, fine, (coarse / fine).log2())
}

#[test]
fn barenblatt_residual_is_second_order_inside_the_support() {
    for (m, d) in [(2.0, 1usize), (3.0, 1), (2.0, 2), (1.5, 3)] {
        let p = BarenblattParams::new(m, d, 1.0).unwrap();
        let x: Vec<f64> = (0..d).map(|k| 0.3 + 0.1 * k as f64).collect();
        let (coarse, fine, q) = order(|t, x| barenblatt(&p, t, x), m, 1.0, &x);
        assert!(fine < 1e-3, "m={m} d={d}: residual {fine}");
        assert!(q > 1.8 || coarse < 1e-11, "m={m} d={d}: order {q}");
    }
}

#[test]
fn quadratic_pressure_solves_the_equation_before_blowup() {
    for q in [0.5, 1.0, 2.0] {
        let p = QuadraticPressureParams::new(2.0, 1, q).unwrap();
        let t = 0.3 * p.blowup_time();
        let u = quadratic_pressure(&p, t, &[0.4]).unwrap();
        let r = residual(|t, x| quadratic_pressure(&p, t, x), 2.0, t, &[0.4], (1e-4 * t, 1e-3)).unwrap();
        assert!(r.abs() < 1e-6 * u / t, "q={q}: residual {r}, u {u}");
    }
}

#[test]
fn linear_pressure_solves_the_equation_right_of_the_kink() {
    for m in [1.5, 2.0, 3.0] {
        let p = LinearPressureParams::new(m).unwrap();
        let (_, fine, _) = order(|s, x| Ok(p.base(s, x[0])), m, 1.0, &[2.0]);
        assert!(fine < 1e-6, "m={m}: {fine}");
    }
}

#[test]
fn self_similar_family_solves_the_equation() {
    let params = BarenblattParams::new(2.0, 1, 0.8).unwrap();
    let s = SelfSimilar::new(params, 2.0, 0.7, 0.5, vec![0.2]).unwrap();
    let (coarse, fine, q) = order(|t, x| self_similar(&s, t, x), 2.0, 0.6, &[0.1]);
    assert!(fine < 1e-4 && q > 1.8, "residuals {coarse} {fine}");
}

#[test]
fn residual_fails_against_a_wrong_profile() {
    // Barenblatt shape with the wrong exponent is not a solution
    let p = BarenblattParams::new(3.0, 1, 1.0).unwrap();
    let r = residual(|t, x| barenblatt(&p, t, x), 2.0, 1.0, &[0.2], (1e-3, 1e-3)).unwrap();
    assert!(r.abs() > 1e-2);
}
