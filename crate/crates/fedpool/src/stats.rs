//! Statistical primitives: standard normal CDF and quantile, one-sample
//! Kolmogorov-Smirnov against the standard normal, the Shapiro-Wilk
//! normality test (Royston's AS R94 approximation, 3 <= n <= 5000),
//! histogram densities and stable sample moments.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::numeric::MomentAccumulator;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum StatsError {
    #[error("sample contains a non-finite value")]
    NonFinite,
    #[error("sample size {n} outside supported range [{min}, {max}]")]
    SampleSizeOutOfRange { n: usize, min: usize, max: usize },
    #[error("all sample values are equal; test statistic undefined")]
    ConstantSample,
    #[error("need at least {min} samples, got {n}")]
    InsufficientSample { n: usize, min: usize },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TestKind {
    Ks,
    ShapiroWilk,
}

/// Outcome of a goodness-of-fit test.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TestResult {
    pub test: TestKind,
    pub statistic: f64,
    pub p_value: f64,
    pub n: usize,
}

const SQRT_2: f64 = std::f64::consts::SQRT_2;
const FRAC_1_SQRT_PI: f64 = 5.641_895_835_477_562_9e-1; // 1/sqrt(pi)

/// Complementary error function, Cody's rational Chebyshev approximation.
/// Relative error below 1e-15 on the whole real line.
pub fn erfc(x: f64) -> f64 {
    let y = x.abs();
    let result = if y <= 0.46875 {
        return 1.0 - erf_small(x);
    } else if y <= 4.0 {
        const C: [f64; 9] = [
            5.64188496988670089e-1,
            8.88314979438837594e0,
            6.61191906371416295e1,
            2.98635138197400131e2,
            8.81952221241769090e2,
            1.71204761263407058e3,
            2.05107837782607147e3,
            1.23033935479799725e3,
            2.15311535474403846e-8,
        ];
        const D: [f64; 8] = [
            1.57449261107098347e1,
            1.17693950891312499e2,
            5.37181101862009858e2,
            1.62138957456669019e3,
            3.29079923573345963e3,
            4.36261909014324716e3,
            3.43936767414372164e3,
            1.23033935480374942e3,
        ];
        let mut num = C[8] * y;
        let mut den = y;
        for i in 0..7 {
            num = (num + C[i]) * y;
            den = (den + D[i]) * y;
        }
        scaled_exp(y) * (num + C[7]) / (den + D[7])
    } else {
        const P: [f64; 6] = [
            3.05326634961232344e-1,
            3.60344899949804439e-1,
            1.25781726111229246e-1,
            1.60837851487422766e-2,
            6.58749161529837803e-4,
            1.63153871373020978e-2,
        ];
        const Q: [f64; 5] = [
            2.56852019228982242e0,
            1.87295284992346047e0,
            5.27905102951428412e-1,
            6.05183413124413191e-2,
            2.33520497626869185e-3,
        ];
        let ysq = 1.0 / (y * y);
        let mut num = P[5] * ysq;
        let mut den = ysq;
        for i in 0..4 {
            num = (num + P[i]) * ysq;
            den = (den + Q[i]) * ysq;
        }
        let r = ysq * (num + P[4]) / (den + Q[4]);
        scaled_exp(y) * (FRAC_1_SQRT_PI - r) / y
    };
    if x < 0.0 {
        2.0 - result
    } else {
        result
    }
}

/// `exp(-y^2)` split to preserve accuracy for large arguments.
fn scaled_exp(y: f64) -> f64 {
    let ysq = (y * 16.0).trunc() / 16.0;
    let del = (y - ysq) * (y + ysq);
    (-ysq * ysq).exp() * (-del).exp()
}

/// erf on |x| <= 0.46875.
fn erf_small(x: f64) -> f64 {
    const A: [f64; 5] = [
        3.16112374387056560e0,
        1.13864154151050156e2,
        3.77485237685302021e2,
        3.20937758913846947e3,
        1.85777706184603153e-1,
    ];
    const B: [f64; 4] = [
        2.36012909523441209e1,
        2.44024637934444173e2,
        1.28261652607737228e3,
        2.84423683343917062e3,
    ];
    let ysq = x * x;
    let mut num = A[4] * ysq;
    let mut den = ysq;
    for i in 0..3 {
        num = (num + A[i]) * ysq;
        den = (den + B[i]) * ysq;
    }
    x * (num + A[3]) / (den + B[3])
}

/// Standard normal CDF, absolute error below 1e-12.
pub fn std_normal_cdf(t: f64) -> f64 {
    0.5 * erfc(-t / SQRT_2)
}

/// Standard normal quantile: Acklam's approximation refined by one
/// Halley step against [`std_normal_cdf`].
pub fn std_normal_quantile(p: f64) -> f64 {
    assert!(p > 0.0 && p < 1.0, "quantile needs p in (0, 1), got {p}");
    const A: [f64; 6] = [
        -3.969683028665376e1,
        2.209460984245205e2,
        -2.759285104469687e2,
        1.383577518672690e2,
        -3.066479806614716e1,
        2.506628277459239e0,
    ];
    const B: [f64; 5] = [
        -5.447609879822406e1,
        1.615858368580409e2,
        -1.556989798598866e2,
        6.680131188771972e1,
        -1.328068155288572e1,
    ];
    const C: [f64; 6] = [
        -7.784894002430293e-3,
        -3.223964580411365e-1,
        -2.400758277161838e0,
        -2.549732539343734e0,
        4.374664141464968e0,
        2.938163982698783e0,
    ];
    const D: [f64; 4] = [
        7.784695709041462e-3,
        3.224671290700398e-1,
        2.445134137142996e0,
        3.754408661907416e0,
    ];
    const P_LOW: f64 = 0.02425;

    let x = if p < P_LOW {
        let q = (-2.0 * p.ln()).sqrt();
        (((((C[0] * q + C[1]) * q + C[2]) * q + C[3]) * q + C[4]) * q + C[5])
            / ((((D[0] * q + D[1]) * q + D[2]) * q + D[3]) * q + 1.0)
    } else if p <= 1.0 - P_LOW {
        let q = p - 0.5;
        let r = q * q;
        (((((A[0] * r + A[1]) * r + A[2]) * r + A[3]) * r + A[4]) * r + A[5]) * q
            / (((((B[0] * r + B[1]) * r + B[2]) * r + B[3]) * r + B[4]) * r + 1.0)
    } else {
        let q = (-2.0 * (1.0 - p).ln()).sqrt();
        -(((((C[0] * q + C[1]) * q + C[2]) * q + C[3]) * q + C[4]) * q + C[5])
            / ((((D[0] * q + D[1]) * q + D[2]) * q + D[3]) * q + 1.0)
    };

    // Halley refinement
    let e = std_normal_cdf(x) - p;
    let u = e * (2.0 * std::f64::consts::PI).sqrt() * (x * x / 2.0).exp();
    x - u / (1.0 + x * u / 2.0)
}

/// Survival function of the Kolmogorov distribution,
/// `Q(lambda) = 2 sum_{k>=1} (-1)^{k-1} exp(-2 k^2 lambda^2)`.
/// Truncated at 100 terms; the tail beyond that is under 1e-12 for any
/// lambda where the series has not already converged.
pub fn kolmogorov_sf(lambda: f64) -> f64 {
    if lambda <= 0.0 {
        return 1.0;
    }
    let mut sum = 0.0;
    let mut sign = 1.0;
    for k in 1..=100u32 {
        let term = (-2.0 * (k as f64) * (k as f64) * lambda * lambda).exp();
        sum += sign * term;
        sign = -sign;
        if term < 1e-16 {
            break;
        }
    }
    (2.0 * sum).clamp(0.0, 1.0)
}

/// One-sample Kolmogorov-Smirnov test against the standard normal.
///
/// The statistic is the exact supremum gap between the empirical CDF and
/// the normal CDF, evaluated from both sides of every jump; the p-value
/// uses the asymptotic Kolmogorov distribution with `sqrt(n)` scaling.
pub fn ks_test_normal(samples: &[f64]) -> Result<TestResult, StatsError> {
    let n = samples.len();
    if n == 0 {
        return Err(StatsError::InsufficientSample { n, min: 1 });
    }
    if samples.iter().any(|x| !x.is_finite()) {
        return Err(StatsError::NonFinite);
    }
    let mut sorted = samples.to_vec();
    sorted.sort_by(f64::total_cmp);
    let nf = n as f64;
    let mut d: f64 = 0.0;
    for (i, &x) in sorted.iter().enumerate() {
        let cdf = std_normal_cdf(x);
        let upper = (i + 1) as f64 / nf - cdf;
        let lower = cdf - i as f64 / nf;
        d = d.max(upper).max(lower);
    }
    Ok(TestResult {
        test: TestKind::Ks,
        statistic: d,
        p_value: kolmogorov_sf(nf.sqrt() * d),
        n,
    })
}

/// Shapiro-Wilk normality test via Royston's AS R94 approximation,
/// valid for 3 <= n <= 5000. Returns the W statistic and the upper-tail
/// p-value.
pub fn shapiro_wilk(samples: &[f64]) -> Result<TestResult, StatsError> {
    let n = samples.len();
    if !(3..=5000).contains(&n) {
        return Err(StatsError::SampleSizeOutOfRange {
            n,
            min: 3,
            max: 5000,
        });
    }
    if samples.iter().any(|x| !x.is_finite()) {
        return Err(StatsError::NonFinite);
    }
    let mut x = samples.to_vec();
    x.sort_by(f64::total_cmp);
    if x[n - 1] - x[0] == 0.0 {
        return Err(StatsError::ConstantSample);
    }

    let weights = royston_weights(n);

    let mean = x.iter().sum::<f64>() / n as f64;
    let ssq: f64 = x.iter().map(|v| (v - mean) * (v - mean)).sum();
    let num: f64 = weights.iter().zip(&x).map(|(a, v)| a * v).sum();
    let w = (num * num / ssq).min(1.0);

    let p_value = royston_p_value(w, n);
    Ok(TestResult {
        test: TestKind::ShapiroWilk,
        statistic: w,
        p_value,
        n,
    })
}

/// Normal-order-statistic weight vector of AS R94 (antisymmetric,
/// `weights[i] = -weights[n-1-i]`).
fn royston_weights(n: usize) -> Vec<f64> {
    if n == 3 {
        let s = 0.5f64.sqrt();
        return vec![-s, 0.0, s];
    }
    let nf = n as f64;
    // Blom scores for the expected normal order statistics
    let m: Vec<f64> = (1..=n)
        .map(|i| std_normal_quantile((i as f64 - 0.375) / (nf + 0.25)))
        .collect();
    let summ2: f64 = m.iter().map(|v| v * v).sum();
    let ssumm2 = summ2.sqrt();
    let u = 1.0 / nf.sqrt();

    // polynomial corrections for the extreme weights
    let a_n = m[n - 1] / ssumm2
        + u * (0.221157 + u * (-0.147981 + u * (-2.071190 + u * (4.434685 + u * (-2.706056)))));
    let mut weights = vec![0.0; n];
    if n > 5 {
        let a_n1 = m[n - 2] / ssumm2
            + u * (0.042981 + u * (-0.293762 + u * (-1.752461 + u * (5.682633 + u * (-3.582633)))));
        let phi = (summ2 - 2.0 * m[n - 1] * m[n - 1] - 2.0 * m[n - 2] * m[n - 2])
            / (1.0 - 2.0 * a_n * a_n - 2.0 * a_n1 * a_n1);
        let fac = phi.sqrt();
        weights[n - 1] = a_n;
        weights[n - 2] = a_n1;
        weights[0] = -a_n;
        weights[1] = -a_n1;
        for i in 2..n - 2 {
            weights[i] = m[i] / fac;
        }
    } else {
        let phi = (summ2 - 2.0 * m[n - 1] * m[n - 1]) / (1.0 - 2.0 * a_n * a_n);
        let fac = phi.sqrt();
        weights[n - 1] = a_n;
        weights[0] = -a_n;
        for i in 1..n - 1 {
            weights[i] = m[i] / fac;
        }
    }
    weights
}

/// W-to-z transformation of AS R94 and the resulting upper-tail p-value.
fn royston_p_value(w: f64, n: usize) -> f64 {
    let nf = n as f64;
    if n == 3 {
        let p = 6.0 / std::f64::consts::PI
            * ((w.sqrt()).asin() - (0.75f64).sqrt().asin());
        return p.clamp(0.0, 1.0);
    }
    let z = if n <= 11 {
        let gamma = -2.273 + 0.459 * nf;
        let wln = -(gamma - (1.0 - w).ln()).ln();
        let mu = 0.5440 - 0.39978 * nf + 0.025054 * nf * nf - 0.0006714 * nf * nf * nf;
        let sigma = (1.3822 - 0.77857 * nf + 0.062767 * nf * nf - 0.0020322 * nf * nf * nf).exp();
        (wln - mu) / sigma
    } else {
        let ln_n = nf.ln();
        let wln = (1.0 - w).ln();
        let mu = -1.5861 - 0.31082 * ln_n - 0.083751 * ln_n * ln_n + 0.0038915 * ln_n * ln_n * ln_n;
        let sigma = (-0.4803 - 0.082676 * ln_n + 0.0030302 * ln_n * ln_n).exp();
        (wln - mu) / sigma
    };
    (1.0 - std_normal_cdf(z)).clamp(0.0, 1.0)
}

/// Equal-width histogram in density form: `sum(density * width) == 1`.
/// A constant sample yields one degenerate bin of width 1.
pub fn histogram_density(samples: &[f64], bin_count: usize) -> (Vec<f64>, Vec<f64>) {
    assert!(!samples.is_empty() && bin_count >= 1);
    let min = samples.iter().cloned().fold(f64::INFINITY, f64::min);
    let max = samples.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    if max == min {
        return (vec![min - 0.5, min + 0.5], vec![1.0]);
    }
    let width = (max - min) / bin_count as f64;
    let edges: Vec<f64> = (0..=bin_count).map(|i| min + i as f64 * width).collect();
    let mut counts = vec![0usize; bin_count];
    for &x in samples {
        let idx = (((x - min) / width) as usize).min(bin_count - 1);
        counts[idx] += 1;
    }
    let norm = samples.len() as f64 * width;
    let densities = counts.iter().map(|&c| c as f64 / norm).collect();
    (edges, densities)
}

/// Default bin count: Sturges-like `ceil(log2 n) + 1`.
pub fn default_bin_count(n: usize) -> usize {
    (n.max(1) as f64).log2().ceil() as usize + 1
}

/// Numerically stable sample mean and unbiased variance.
pub fn sample_moments(samples: &[f64]) -> Result<(f64, f64), StatsError> {
    if samples.len() < 2 {
        return Err(StatsError::InsufficientSample {
            n: samples.len(),
            min: 2,
        });
    }
    let mut acc = MomentAccumulator::new();
    for &x in samples {
        acc.push(x);
    }
    Ok((acc.mean(), acc.variance()))
}
