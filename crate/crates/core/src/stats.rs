//! Sample statistics with standard errors, and chi-square tests.
//!
//! All reductions run sequentially in input order so results are
//! reproducible to the bit.

use serde::Serialize;
use statrs::distribution::{ChiSquared, ContinuousCDF};

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct Estimate {
    pub estimate: f64,
    pub stderr: f64,
}

impl Estimate {
    pub fn exact(value: f64) -> Self {
        Estimate {
            estimate: value,
            stderr: 0.0,
        }
    }

    /// `self` exceeds `other` by more than `k` combined standard errors.
    pub fn above(&self, other: &Estimate, k: f64) -> bool {
        self.estimate - other.estimate > k * self.stderr.hypot(other.stderr)
    }

    /// `self` is not above `other` by more than `k` combined standard errors.
    pub fn not_above(&self, other: &Estimate, k: f64) -> bool {
        !self.above(other, k)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct CorrelationEstimate {
    /// Clipped to `[-1, 1]`; `NaN` when either variance vanishes.
    pub estimate: f64,
    pub raw: f64,
    pub stderr: f64,
}

impl CorrelationEstimate {
    pub fn as_estimate(&self) -> Estimate {
        Estimate {
            estimate: self.estimate,
            stderr: self.stderr,
        }
    }
}

pub fn mean(xs: &[f64]) -> f64 {
    xs.iter().sum::<f64>() / xs.len() as f64
}

/// Unbiased sample variance.
pub fn sample_variance(xs: &[f64]) -> f64 {
    let m = mean(xs);
    xs.iter().map(|x| (x - m) * (x - m)).sum::<f64>() / (xs.len() as f64 - 1.0)
}

/// Mean with standard error `sd / sqrt(n)`.
pub fn mean_estimate(xs: &[f64]) -> Estimate {
    let n = xs.len() as f64;
    let m = mean(xs);
    let se = if xs.len() > 1 { (sample_variance(xs) / n).sqrt() } else { f64::NAN };
    Estimate { estimate: m, stderr: se }
}

/// Unbiased variance with the large-sample standard error
/// `sqrt((m4 - (n-3)/(n-1) s^4) / n)`.
pub fn variance_estimate(xs: &[f64]) -> Estimate {
    let n = xs.len() as f64;
    let m = mean(xs);
    let s2 = sample_variance(xs);
    let m4 = xs.iter().map(|x| (x - m).powi(4)).sum::<f64>() / n;
    let v = (m4 - (n - 3.0) / (n - 1.0) * s2 * s2) / n;
    Estimate {
        estimate: s2,
        stderr: v.max(0.0).sqrt(),
    }
}

/// Paired covariance from centred products; standard error `sd(product) / sqrt(n)`.
pub fn covariance_estimate(xs: &[f64], ys: &[f64]) -> Estimate {
    assert_eq!(xs.len(), ys.len());
    let n = xs.len() as f64;
    let (mx, my) = (mean(xs), mean(ys));
    let products: Vec<f64> = xs.iter().zip(ys).map(|(x, y)| (x - mx) * (y - my)).collect();
    let cov = products.iter().sum::<f64>() / (n - 1.0);
    let pm = mean(&products);
    let pvar = products.iter().map(|p| (p - pm) * (p - pm)).sum::<f64>() / (n - 1.0);
    Estimate {
        estimate: cov,
        stderr: (pvar / n).sqrt(),
    }
}

/// Pearson correlation with a delta-method standard error based on the
/// influence function `xy - r (x^2 + y^2) / 2` of standardised data.
pub fn correlation_estimate(xs: &[f64], ys: &[f64]) -> CorrelationEstimate {
    assert_eq!(xs.len(), ys.len());
    let n = xs.len() as f64;
    let (mx, my) = (mean(xs), mean(ys));
    let sxx = xs.iter().map(|x| (x - mx) * (x - mx)).sum::<f64>();
    let syy = ys.iter().map(|y| (y - my) * (y - my)).sum::<f64>();
    let sxy = xs.iter().zip(ys).map(|(x, y)| (x - mx) * (y - my)).sum::<f64>();
    if sxx == 0.0 || syy == 0.0 {
        return CorrelationEstimate {
            estimate: f64::NAN,
            raw: f64::NAN,
            stderr: f64::NAN,
        };
    }
    let raw = sxy / (sxx * syy).sqrt();
    let (sx, sy) = ((sxx / (n - 1.0)).sqrt(), (syy / (n - 1.0)).sqrt());
    let influence: Vec<f64> = xs
        .iter()
        .zip(ys)
        .map(|(x, y)| {
            let (a, b) = ((x - mx) / sx, (y - my) / sy);
            a * b - raw * (a * a + b * b) / 2.0
        })
        .collect();
    let se = (sample_variance(&influence) / n).sqrt();
    CorrelationEstimate {
        estimate: raw.clamp(-1.0, 1.0),
        raw,
        stderr: se,
    }
}

/// Pearson chi-square goodness of fit. Returns `(statistic, p_value)` with
/// `cells - 1 - fitted` degrees of freedom.
pub fn chi_square_test(observed: &[u64], probabilities: &[f64], fitted: usize) -> (f64, f64) {
    assert_eq!(observed.len(), probabilities.len());
    let total: u64 = observed.iter().sum();
    let stat: f64 = observed
        .iter()
        .zip(probabilities)
        .filter(|(_, &p)| p > 0.0)
        .map(|(&o, &p)| {
            let e = p * total as f64;
            (o as f64 - e).powi(2) / e
        })
        .sum();
    let cells = probabilities.iter().filter(|&&p| p > 0.0).count();
    let dof = (cells - 1 - fitted) as f64;
    let p = ChiSquared::new(dof).map(|c| c.sf(stat)).unwrap_or(f64::NAN);
    (stat, p)
}

/// Chi-square homogeneity test for two count tables over the same cells.
pub fn chi_square_two_sample(a: &[u64], b: &[u64]) -> (f64, f64) {
    assert_eq!(a.len(), b.len());
    let (na, nb) = (a.iter().sum::<u64>() as f64, b.iter().sum::<u64>() as f64);
    let mut stat = 0.0;
    let mut cells = 0;
    for (&x, &y) in a.iter().zip(b) {
        let pooled = (x + y) as f64 / (na + nb);
        if pooled == 0.0 {
            continue;
        }
        cells += 1;
        let (ea, eb) = (pooled * na, pooled * nb);
        stat += (x as f64 - ea).powi(2) / ea + (y as f64 - eb).powi(2) / eb;
    }
    let p = ChiSquared::new((cells - 1) as f64).map(|c| c.sf(stat)).unwrap_or(f64::NAN);
    (stat, p)
}
