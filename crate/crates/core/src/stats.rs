//! Ensemble reductions.
//!
//! All sums run in path order with Neumaier compensation, so results do not
//! depend on how paths were scheduled across workers.

use serde::{Deserialize, Serialize};
use statrs::distribution::{ContinuousCDF, Normal};

/// Neumaier compensated accumulator.
#[derive(Debug, Clone, Copy, Default)]
pub struct CompensatedSum {
    sum: f64,
    comp: f64,
}

impl CompensatedSum {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn add(&mut self, x: f64) {
        let t = self.sum + x;
        if self.sum.abs() >= x.abs() {
            self.comp += (self.sum - t) + x;
        } else {
            self.comp += (x - t) + self.sum;
        }
        self.sum = t;
    }

    pub fn value(&self) -> f64 {
        self.sum + self.comp
    }
}

pub fn compensated_sum<I: IntoIterator<Item = f64>>(xs: I) -> f64 {
    let mut acc = CompensatedSum::new();
    for x in xs {
        acc.add(x);
    }
    acc.value()
}

pub fn mean(xs: &[f64]) -> f64 {
    compensated_sum(xs.iter().copied()) / xs.len() as f64
}

/// Moments of a sample.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Summary {
    pub n: usize,
    pub mean: f64,
    /// Unbiased sample variance.
    pub variance: f64,
    /// Standard error of the mean.
    pub se: f64,
    pub skewness: f64,
    pub excess_kurtosis: f64,
    /// Fourth central moment (biased), used for the SE of the variance.
    pub m4: f64,
}

pub fn summary(xs: &[f64]) -> Summary {
    let n = xs.len();
    let nf = n as f64;
    let m = mean(xs);
    let m2 = compensated_sum(xs.iter().map(|x| (x - m).powi(2))) / nf;
    let m3 = compensated_sum(xs.iter().map(|x| (x - m).powi(3))) / nf;
    let m4 = compensated_sum(xs.iter().map(|x| (x - m).powi(4))) / nf;
    let variance = if n > 1 { m2 * nf / (nf - 1.0) } else { 0.0 };
    let (skewness, excess_kurtosis) = if m2 > 0.0 {
        (m3 / m2.powf(1.5), m4 / (m2 * m2) - 3.0)
    } else {
        (0.0, 0.0)
    };
    Summary {
        n,
        mean: m,
        variance,
        se: (variance / nf).sqrt(),
        skewness,
        excess_kurtosis,
        m4,
    }
}

pub fn covariance(a: &[f64], b: &[f64]) -> f64 {
    let (ma, mb) = (mean(a), mean(b));
    compensated_sum(a.iter().zip(b).map(|(x, y)| (x - ma) * (y - mb))) / (a.len() as f64 - 1.0)
}

pub fn correlation(a: &[f64], b: &[f64]) -> f64 {
    let c = covariance(a, b);
    let va = covariance(a, a);
    let vb = covariance(b, b);
    if va == 0.0 || vb == 0.0 {
        0.0
    } else {
        c / (va * vb).sqrt()
    }
}

/// Least-squares fit `y = intercept + slope * x` with the slope's standard error.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LinearFit {
    pub slope: f64,
    pub intercept: f64,
    pub slope_se: f64,
    pub n: usize,
}

pub fn linear_fit(x: &[f64], y: &[f64]) -> LinearFit {
    let n = x.len();
    let (mx, my) = (mean(x), mean(y));
    let sxx = compensated_sum(x.iter().map(|v| (v - mx).powi(2)));
    let sxy = compensated_sum(x.iter().zip(y).map(|(a, b)| (a - mx) * (b - my)));
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let rss = compensated_sum(x.iter().zip(y).map(|(a, b)| (b - intercept - slope * a).powi(2)));
    let slope_se = (rss / (n as f64 - 2.0) / sxx).sqrt();
    LinearFit {
        slope,
        intercept,
        slope_se,
        n,
    }
}

fn std_normal() -> Normal {
    Normal::new(0.0, 1.0).expect("standard normal")
}

/// Two-sided tail probability `P(|Z| > z)`.
pub fn two_sided_p(z: f64) -> f64 {
    2.0 * (1.0 - std_normal().cdf(z.abs()))
}

/// Critical `|z|` for `tests` simultaneous tests so that the family-wise
/// error equals the per-test error of a single test at `threshold`.
pub fn bonferroni_critical(threshold: f64, tests: usize) -> f64 {
    if tests <= 1 {
        return threshold;
    }
    // upper tail computed via erfc for accuracy at large thresholds
    let alpha = statrs::function::erf::erfc(threshold / std::f64::consts::SQRT_2);
    let per_test = alpha / tests as f64;
    std_normal().inverse_cdf(1.0 - per_test / 2.0).max(threshold)
}
