//! Small numerically careful helpers used across the crate.

/// Log-sum-exp with the shift-by-max trick.
///
/// Returns `-inf` for an empty slice or when every entry is `-inf`.
pub fn log_sum_exp(values: &[f64]) -> f64 {
    let max = values.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    if max == f64::NEG_INFINITY {
        return f64::NEG_INFINITY;
    }
    if max.is_infinite() {
        return f64::INFINITY;
    }
    let sum: f64 = values
        .iter()
        .map(|&v| {
            if v == f64::NEG_INFINITY {
                0.0
            } else {
                (v - max).exp()
            }
        })
        .sum();
    max + sum.ln()
}

/// Streaming mean/variance accumulator (Welford). Order-independent
/// merging via [`MomentAccumulator::merge`] keeps parallel reductions
/// deterministic when combined in a fixed order.
#[derive(Debug, Clone, Copy, Default)]
pub struct MomentAccumulator {
    n: u64,
    mean: f64,
    m2: f64,
}

impl MomentAccumulator {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn push(&mut self, x: f64) {
        self.n += 1;
        let d = x - self.mean;
        self.mean += d / self.n as f64;
        self.m2 += d * (x - self.mean);
    }

    pub fn merge(self, other: Self) -> Self {
        if self.n == 0 {
            return other;
        }
        if other.n == 0 {
            return self;
        }
        let n = self.n + other.n;
        let d = other.mean - self.mean;
        let mean = self.mean + d * other.n as f64 / n as f64;
        let m2 = self.m2 + other.m2 + d * d * (self.n as f64 * other.n as f64) / n as f64;
        Self { n, mean, m2 }
    }

    pub fn count(&self) -> u64 {
        self.n
    }

    pub fn mean(&self) -> f64 {
        self.mean
    }

    /// Unbiased sample variance (divisor `n - 1`).
    pub fn variance(&self) -> f64 {
        if self.n < 2 {
            0.0
        } else {
            self.m2 / (self.n - 1) as f64
        }
    }

    /// Standard error of the mean.
    pub fn std_error_mean(&self) -> f64 {
        (self.variance() / self.n as f64).sqrt()
    }

    /// Approximate standard error of the sample variance,
    /// `s^2 * sqrt(2/(n-1))` (exact under normality, a serviceable
    /// scale for the Monte Carlo bands we report).
    pub fn std_error_variance(&self) -> f64 {
        self.variance() * (2.0 / (self.n.saturating_sub(1).max(1)) as f64).sqrt()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn log_sum_exp_basic() {
        let x = [0.0f64, 0.0];
        assert!((log_sum_exp(&x) - 2.0f64.ln()).abs() < 1e-15);
    }

    #[test]
    fn log_sum_exp_handles_extremes() {
        assert_eq!(log_sum_exp(&[]), f64::NEG_INFINITY);
        assert_eq!(log_sum_exp(&[f64::NEG_INFINITY; 4]), f64::NEG_INFINITY);
        // huge shifts must not overflow
        let v = log_sum_exp(&[-1e6, -1e6 + 1.0]);
        assert!((v - (-1e6 + 1.0 + (1.0 + (-1.0f64).exp()).ln())).abs() < 1e-9);
    }

    #[test]
    fn welford_matches_two_pass() {
        let xs: Vec<f64> = (0..1000).map(|i| (i as f64 * 0.7).sin() * 3.0 + 1.0).collect();
        let mut acc = MomentAccumulator::new();
        for &x in &xs {
            acc.push(x);
        }
        let mean: f64 = xs.iter().sum::<f64>() / xs.len() as f64;
        let var: f64 =
            xs.iter().map(|x| (x - mean) * (x - mean)).sum::<f64>() / (xs.len() - 1) as f64;
        assert!((acc.mean() - mean).abs() < 1e-10 * mean.abs().max(1.0));
        assert!((acc.variance() - var).abs() < 1e-10 * var);
    }

    #[test]
    fn merge_equals_sequential() {
        let xs: Vec<f64> = (0..501).map(|i| ((i * 37) % 101) as f64).collect();
        let mut whole = MomentAccumulator::new();
        for &x in &xs {
            whole.push(x);
        }
        let (a, b) = xs.split_at(137);
        let mut left = MomentAccumulator::new();
        let mut right = MomentAccumulator::new();
        for &x in a {
            left.push(x);
        }
        for &x in b {
            right.push(x);
        }
        let merged = left.merge(right);
        assert_eq!(merged.count(), whole.count());
        assert!((merged.mean() - whole.mean()).abs() < 1e-12);
        assert!((merged.variance() - whole.variance()).abs() < 1e-9);
    }
}
