//! Order-fixed, compensated reductions for Monte Carlo estimates.

/// Neumaier-compensated running sum.
#[derive(Debug, Clone, Copy, Default)]
pub struct CompensatedSum {
    sum: f64,
    carry: f64,
}

impl CompensatedSum {
    pub fn add(&mut self, x: f64) {
        let t = self.sum + x;
        if self.sum.abs() >= x.abs() {
            self.carry += (self.sum - t) + x;
        } else {
            self.carry += (x - t) + self.sum;
        }
        self.sum = t;
    }

    pub fn value(&self) -> f64 {
        self.sum + self.carry
    }
}

pub fn compensated_sum(values: impl IntoIterator<Item = f64>) -> f64 {
    let mut acc = CompensatedSum::default();
    values.into_iter().for_each(|v| acc.add(v));
    acc.value()
}

/// Sample mean, unbiased variance and standard error of the mean.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Summary {
    pub count: usize,
    pub mean: f64,
    pub variance: f64,
    pub stderr: f64,
}

impl Summary {
    pub fn of(values: &[f64]) -> Summary {
        let n = values.len();
        if n == 0 {
            return Summary {
                count: 0,
                mean: f64::NAN,
                variance: f64::NAN,
                stderr: f64::NAN,
            };
        }
        let mean = compensated_sum(values.iter().copied()) / n as f64;
        let variance = if n > 1 {
            compensated_sum(values.iter().map(|v| (v - mean) * (v - mean))) / (n - 1) as f64
        } else {
            0.0
        };
        Summary {
            count: n,
            mean,
            variance,
            stderr: (variance / n as f64).sqrt(),
        }
    }

    /// `|mean − target| ≤ k·stderr`; with zero spread, equality to relative `1e-12`.
    pub fn within(&self, target: f64, k: f64) -> bool {
        let gap = (self.mean - target).abs();
        if self.stderr == 0.0 {
            gap <= 1e-12 * target.abs().max(1.0)
        } else {
            gap <= k * self.stderr
        }
    }

    /// Sample variance inside the `k`-sigma band of its Gaussian sampling law,
    /// `Var(s²) ≈ 2σ⁴/(n−1)`.
    pub fn variance_within(&self, target: f64, k: f64) -> bool {
        let band = k * target * (2.0 / (self.count as f64 - 1.0)).sqrt();
        (self.variance - target).abs() <= band
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn compensation_recovers_small_terms() {
        let values = [1e16, 1.0, -1e16, 1.0];
        assert_eq!(compensated_sum(values), 2.0);
    }

    #[test]
    fn summary_of_constant_sample() {
        let s = Summary::of(&[2.0; 10]);
        assert_eq!(s.mean, 2.0);
        assert_eq!(s.stderr, 0.0);
        assert!(s.within(2.0, 3.0));
        assert!(!s.within(2.1, 3.0));
    }

    #[test]
    fn summary_matches_textbook_values() {
        let s = Summary::of(&[1.0, 2.0, 3.0, 4.0]);
        assert_eq!(s.mean, 2.5);
        assert!((s.variance - 5.0 / 3.0).abs() < 1e-15);
        assert!((s.stderr - (5.0f64 / 12.0).sqrt()).abs() < 1e-15);
    }
}
