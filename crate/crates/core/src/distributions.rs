//! Edge-weight laws.
//!
//! A [`WeightDistribution`] carries the CDF, partial moments up to order two
//! and the generalised inverse used for sampling. Partial moments are the
//! primitive behind every edge-profile and co-influence integral, so they are
//! exact for the closed-form kinds.

use std::fmt;
use std::str::FromStr;

use serde::{Serialize, Serializer};

use crate::error::{Error, Result};

/// Tolerance on the total mass of an atomic or tabulated law.
pub const MASS_TOLERANCE: f64 = 1e-12;

/// Absolute tolerance of the adaptive quadrature used for tabulated laws.
pub const QUADRATURE_TOLERANCE: f64 = 1e-9;

/// Critical bond-percolation probability on the square lattice.
pub const PC_SQUARE_LATTICE: f64 = 0.5;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum DistributionKind {
    Atomic,
    UniformInterval,
    ShiftedExponential,
    UserTable,
}

#[derive(Clone, Debug, PartialEq)]
enum Law {
    Atomic {
        values: Vec<f64>,
        probs: Vec<f64>,
        cumulative: Vec<f64>,
    },
    Uniform {
        lo: f64,
        hi: f64,
    },
    Exponential {
        rate: f64,
        shift: f64,
    },
    /// Piecewise-linear CDF through `(xs[i], cdf[i])`.
    Table {
        xs: Vec<f64>,
        cdf: Vec<f64>,
    },
}

/// The law `F` of a single edge weight.
#[derive(Clone, Debug, PartialEq)]
pub struct WeightDistribution {
    law: Law,
    r: f64,
    mu: f64,
    m2: f64,
}

impl WeightDistribution {
    /// Atomic law from `(value, probability)` pairs. Repeated values are merged.
    pub fn atomic(pairs: &[(f64, f64)]) -> Result<Self> {
        if pairs.is_empty() {
            return Err(Error::InvalidDistribution("atomic law needs at least one atom".into()));
        }
        let mut sorted: Vec<(f64, f64)> = Vec::with_capacity(pairs.len());
        for &(value, prob) in pairs {
            if !value.is_finite() || value < 0.0 {
                return Err(Error::InvalidDistribution(format!(
                    "atom value {value} must be finite and nonnegative"
                )));
            }
            if !(prob > 0.0 && prob <= 1.0) {
                return Err(Error::InvalidDistribution(format!(
                    "atom probability {prob} must lie in (0, 1]"
                )));
            }
            sorted.push((value, prob));
        }
        sorted.sort_by(|a, b| a.0.total_cmp(&b.0));
        let mut values: Vec<f64> = Vec::new();
        let mut probs: Vec<f64> = Vec::new();
        for (value, prob) in sorted {
            match values.last() {
                Some(&last) if last == value => *probs.last_mut().unwrap() += prob,
                _ => {
                    values.push(value);
                    probs.push(prob);
                }
            }
        }
        let total: f64 = probs.iter().sum();
        if (total - 1.0).abs() > MASS_TOLERANCE {
            return Err(Error::InvalidDistribution(format!(
                "atom probabilities sum to {total}, expected 1"
            )));
        }
        let mut cumulative = Vec::with_capacity(probs.len());
        let mut acc = 0.0;
        for &p in &probs {
            acc += p;
            cumulative.push(acc);
        }
        *cumulative.last_mut().unwrap() = 1.0;
        let mu = values.iter().zip(&probs).map(|(v, p)| v * p).sum();
        let m2 = values.iter().zip(&probs).map(|(v, p)| v * v * p).sum();
        let r = values[0];
        Ok(Self {
            law: Law::Atomic {
                values,
                probs,
                cumulative,
            },
            r,
            mu,
            m2,
        })
    }

    /// Uniform law on `[lo, hi]`.
    pub fn uniform(lo: f64, hi: f64) -> Result<Self> {
        if !(lo.is_finite() && hi.is_finite() && lo >= 0.0 && lo < hi) {
            return Err(Error::InvalidDistribution(format!(
                "uniform interval [{lo}, {hi}] must satisfy 0 <= lo < hi"
            )));
        }
        Ok(Self {
            law: Law::Uniform { lo, hi },
            r: lo,
            mu: 0.5 * (lo + hi),
            m2: (lo * lo + lo * hi + hi * hi) / 3.0,
        })
    }

    /// `shift + Exp(rate)`.
    pub fn exponential(rate: f64, shift: f64) -> Result<Self> {
        if !(rate.is_finite() && rate > 0.0 && shift.is_finite() && shift >= 0.0) {
            return Err(Error::InvalidDistribution(format!(
                "exponential needs rate > 0 and shift >= 0, got rate={rate}, shift={shift}"
            )));
        }
        let mean_excess = 1.0 / rate;
        Ok(Self {
            law: Law::Exponential { rate, shift },
            r: shift,
            mu: shift + mean_excess,
            m2: shift * shift + 2.0 * shift * mean_excess + 2.0 * mean_excess * mean_excess,
        })
    }

    /// Continuous law with a piecewise-linear CDF through the given knots.
    ///
    /// The first knot must carry `F = 0`, the last `F = 1`, abscissae must be
    /// strictly increasing and nonnegative, and `F` nondecreasing.
    pub fn table(knots: &[(f64, f64)]) -> Result<Self> {
        if knots.len() < 2 {
            return Err(Error::InvalidDistribution("table needs at least two knots".into()));
        }
        let xs: Vec<f64> = knots.iter().map(|k| k.0).collect();
        let mut cdf: Vec<f64> = knots.iter().map(|k| k.1).collect();
        if xs.iter().any(|x| !x.is_finite() || *x < 0.0) {
            return Err(Error::InvalidDistribution("table abscissae must be finite and nonnegative".into()));
        }
        if xs.windows(2).any(|w| w[1] <= w[0]) {
            return Err(Error::InvalidDistribution("table abscissae must be strictly increasing".into()));
        }
        if cdf.windows(2).any(|w| w[1] < w[0]) || cdf.iter().any(|c| !(0.0..=1.0 + MASS_TOLERANCE).contains(c)) {
            return Err(Error::InvalidDistribution("table CDF values must be nondecreasing in [0, 1]".into()));
        }
        if cdf[0] != 0.0 {
            return Err(Error::InvalidDistribution("table CDF must start at 0".into()));
        }
        let last = *cdf.last().unwrap();
        if (last - 1.0).abs() > MASS_TOLERANCE {
            return Err(Error::InvalidDistribution(format!("table CDF ends at {last}, expected 1")));
        }
        *cdf.last_mut().unwrap() = 1.0;
        let leading_zeros = cdf.iter().take_while(|&&c| c == 0.0).count();
        let r = xs[leading_zeros - 1];
        let mut dist = Self {
            law: Law::Table { xs, cdf },
            r,
            mu: 0.0,
            m2: 0.0,
        };
        dist.mu = dist.partial_moment(1, f64::INFINITY);
        dist.m2 = dist.partial_moment(2, f64::INFINITY);
        Ok(dist)
    }

    /// The presets used throughout the experiments: uniform[0,1], Exp(1), and
    /// the two-point law {1, 2}.
    pub fn presets() -> Vec<(&'static str, WeightDistribution)> {
        vec![
            ("uniform", Self::uniform(0.0, 1.0).unwrap()),
            ("exp", Self::exponential(1.0, 0.0).unwrap()),
            ("atomic12", Self::atomic(&[(1.0, 0.5), (2.0, 0.5)]).unwrap()),
        ]
    }

    pub fn kind(&self) -> DistributionKind {
        match self.law {
            Law::Atomic { .. } => DistributionKind::Atomic,
            Law::Uniform { .. } => DistributionKind::UniformInterval,
            Law::Exponential { .. } => DistributionKind::ShiftedExponential,
            Law::Table { .. } => DistributionKind::UserTable,
        }
    }

    /// Infimum of the support.
    pub fn r(&self) -> f64 {
        self.r
    }

    pub fn mean(&self) -> f64 {
        self.mu
    }

    pub fn second_moment(&self) -> f64 {
        self.m2
    }

    /// Atoms as `(value, probability)` pairs, if the law is atomic.
    pub fn atoms(&self) -> Option<Vec<(f64, f64)>> {
        match &self.law {
            Law::Atomic { values, probs, .. } => Some(values.iter().copied().zip(probs.iter().copied()).collect()),
            _ => None,
        }
    }

    /// True for atomic laws whose atoms are all nonnegative integers. Sums of
    /// such weights are exact in `f64`, which the geodesy code relies on.
    pub fn is_integer_atomic(&self) -> bool {
        match &self.law {
            Law::Atomic { values, .. } => values.iter().all(|v| v.fract() == 0.0 && *v < 2f64.powi(40)),
            _ => false,
        }
    }

    /// Supremum of the support (`+inf` for unbounded laws).
    pub fn support_max(&self) -> f64 {
        match &self.law {
            Law::Atomic { values, .. } => *values.last().unwrap(),
            Law::Uniform { hi, .. } => *hi,
            Law::Exponential { .. } => f64::INFINITY,
            Law::Table { xs, .. } => *xs.last().unwrap(),
        }
    }

    /// `F(x) = P(w <= x)`.
    pub fn cdf(&self, x: f64) -> f64 {
        if x.is_nan() {
            return f64::NAN;
        }
        match &self.law {
            Law::Atomic { values, cumulative, .. } => {
                let idx = values.partition_point(|&v| v <= x);
                if idx == 0 {
                    0.0
                } else {
                    cumulative[idx - 1]
                }
            }
            Law::Uniform { lo, hi } => ((x - lo) / (hi - lo)).clamp(0.0, 1.0),
            Law::Exponential { rate, shift } => {
                if x <= *shift {
                    0.0
                } else {
                    -(-rate * (x - shift)).exp_m1()
                }
            }
            Law::Table { xs, cdf } => {
                if x < xs[0] {
                    return 0.0;
                }
                if x >= *xs.last().unwrap() {
                    return 1.0;
                }
                let i = xs.partition_point(|&k| k <= x) - 1;
                let frac = (x - xs[i]) / (xs[i + 1] - xs[i]);
                cdf[i] + frac * (cdf[i + 1] - cdf[i])
            }
        }
    }

    /// `∫_{[r, x]} y^order dF(y)` for `order` in `{0, 1, 2}`.
    ///
    /// # Panics
    ///
    /// Panics if `order > 2`.
    pub fn partial_moment(&self, order: u8, x: f64) -> f64 {
        assert!(order <= 2, "partial moments are defined up to order 2, got {order}");
        if order == 0 {
            return self.cdf(x);
        }
        if x < self.r {
            return 0.0;
        }
        let k = order as i32;
        match &self.law {
            Law::Atomic { values, probs, .. } => values
                .iter()
                .zip(probs)
                .take_while(|(v, _)| **v <= x)
                .map(|(v, p)| v.powi(k) * p)
                .sum(),
            Law::Uniform { lo, hi } => {
                let c = x.min(*hi);
                (c.powi(k + 1) - lo.powi(k + 1)) / ((k + 1) as f64 * (hi - lo))
            }
            Law::Exponential { rate, shift } => {
                let u = x - shift;
                let lam = *rate;
                // Moments of the excess W = w - shift truncated to [0, u].
                let (w0, w1, w2) = if u.is_infinite() {
                    (1.0, 1.0 / lam, 2.0 / (lam * lam))
                } else {
                    let tail = (-lam * u).exp();
                    let w0 = -(-lam * u).exp_m1();
                    let w1 = w0 / lam - u * tail;
                    let w2 = 2.0 * w1 / lam - u * u * tail;
                    (w0, w1, w2)
                };
                match order {
                    1 => shift * w0 + w1,
                    _ => shift * shift * w0 + 2.0 * shift * w1 + w2,
                }
            }
            Law::Table { xs, cdf } => {
                let mut total = 0.0;
                for i in 0..xs.len() - 1 {
                    let (a, b) = (xs[i], xs[i + 1]);
                    if a >= x {
                        break;
                    }
                    let density = (cdf[i + 1] - cdf[i]) / (b - a);
                    if density == 0.0 {
                        continue;
                    }
                    let hi = b.min(x);
                    let integrand = |y: f64| y.powi(k) * density;
                    total += adaptive_simpson(&integrand, a, hi, QUADRATURE_TOLERANCE / xs.len() as f64);
                }
                total
            }
        }
    }

    /// `∫ (z - y)_+ dF(y)`.
    pub fn expect_positive_part(&self, z: f64) -> f64 {
        if z <= self.r {
            return 0.0;
        }
        (z * self.cdf(z) - self.partial_moment(1, z)).max(0.0)
    }

    /// Generalised inverse `inf{x : F(x) >= u}` for `u` in `[0, 1)`.
    pub fn sample(&self, u: f64) -> f64 {
        debug_assert!((0.0..=1.0).contains(&u), "u = {u} outside [0, 1]");
        match &self.law {
            Law::Atomic { values, cumulative, .. } => {
                let idx = cumulative.partition_point(|&c| c < u).min(values.len() - 1);
                values[idx]
            }
            Law::Uniform { lo, hi } => lo + u * (hi - lo),
            Law::Exponential { rate, shift } => shift - (-u).ln_1p() / rate,
            Law::Table { xs, cdf } => {
                if u <= 0.0 {
                    return self.r;
                }
                let i = cdf.partition_point(|&c| c < u).clamp(1, xs.len() - 1);
                let (f0, f1) = (cdf[i - 1], cdf[i]);
                if f1 == f0 {
                    return xs[i];
                }
                xs[i - 1] + (u - f0) / (f1 - f0) * (xs[i] - xs[i - 1])
            }
        }
    }

    /// Returns a warning when `F(0) >= p_c(d)`. For `d = 2` the critical
    /// value is exact; for `d >= 3` the caller supplies it, and without one no
    /// check is made.
    pub fn percolation_warning(&self, d: usize, pc: Option<f64>) -> Option<String> {
        let pc = match (d, pc) {
            (_, Some(p)) => p,
            (2, None) => PC_SQUARE_LATTICE,
            _ => return None,
        };
        let f0 = self.cdf(0.0);
        (f0 >= pc).then(|| {
            format!("F(0) = {f0} is not below p_c({d}) = {pc}; geodesics may fail to exist in infinite volume")
        })
    }
}

fn simpson(f: &dyn Fn(f64) -> f64, a: f64, fa: f64, b: f64, fb: f64) -> (f64, f64, f64) {
    let m = 0.5 * (a + b);
    let fm = f(m);
    (m, fm, (b - a) / 6.0 * (fa + 4.0 * fm + fb))
}

#[allow(clippy::too_many_arguments)]
fn simpson_step(
    f: &dyn Fn(f64) -> f64,
    a: f64,
    fa: f64,
    b: f64,
    fb: f64,
    m: f64,
    fm: f64,
    whole: f64,
    tol: f64,
    depth: u32,
) -> f64 {
    let (lm, flm, left) = simpson(f, a, fa, m, fm);
    let (rm, frm, right) = simpson(f, m, fm, b, fb);
    let delta = left + right - whole;
    if depth == 0 || delta.abs() <= 15.0 * tol {
        return left + right + delta / 15.0;
    }
    simpson_step(f, a, fa, m, fm, lm, flm, left, 0.5 * tol, depth - 1)
        + simpson_step(f, m, fm, b, fb, rm, frm, right, 0.5 * tol, depth - 1)
}

/// Adaptive Simpson quadrature on `[a, b]` to absolute tolerance `tol`.
pub(crate) fn adaptive_simpson(f: &dyn Fn(f64) -> f64, a: f64, b: f64, tol: f64) -> f64 {
    if b <= a {
        return 0.0;
    }
    let (fa, fb) = (f(a), f(b));
    let (m, fm, whole) = simpson(f, a, fa, b, fb);
    simpson_step(f, a, fa, b, fb, m, fm, whole, tol, 48)
}

impl fmt::Display for WeightDistribution {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.law {
            Law::Atomic { values, probs, .. } => {
                let body: Vec<String> = values.iter().zip(probs).map(|(v, p)| format!("{v}={p}")).collect();
                write!(f, "atomic:{}", body.join(","))
            }
            Law::Uniform { lo, hi } => write!(f, "uniform:{lo},{hi}"),
            Law::Exponential { rate, shift } => write!(f, "exp:rate={rate},shift={shift}"),
            Law::Table { xs, cdf } => {
                let body: Vec<String> = xs.iter().zip(cdf).map(|(x, c)| format!("{x}={c}")).collect();
                write!(f, "table:{}", body.join(","))
            }
        }
    }
}

impl Serialize for WeightDistribution {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        serializer.serialize_str(&self.to_string())
    }
}

fn parse_number(spec: &str, token: &str) -> Result<f64> {
    token.trim().parse::<f64>().map_err(|_| Error::ParseDistribution {
        spec: spec.to_string(),
        reason: format!("`{token}` is not a number"),
    })
}

fn parse_pairs(spec: &str, body: &str) -> Result<Vec<(f64, f64)>> {
    body.split(',')
        .map(|item| {
            let (k, v) = item.split_once('=').ok_or_else(|| Error::ParseDistribution {
                spec: spec.to_string(),
                reason: format!("expected `value=weight`, found `{item}`"),
            })?;
            Ok((parse_number(spec, k)?, parse_number(spec, v)?))
        })
        .collect()
}

impl FromStr for WeightDistribution {
    type Err = Error;

    /// Parses `atomic:1=0.5,2=0.5`, `uniform:0,1`, `exp:rate=1,shift=0` or
    /// `table:0=0,1=0.5,3=1`.
    fn from_str(spec: &str) -> Result<Self> {
        let spec = spec.trim();
        let bad = |reason: &str| Error::ParseDistribution {
            spec: spec.to_string(),
            reason: reason.to_string(),
        };
        let (kind, body) = spec.split_once(':').ok_or_else(|| bad("missing `kind:` prefix"))?;
        match kind.trim() {
            "atomic" => Self::atomic(&parse_pairs(spec, body)?),
            "uniform" => {
                let parts: Vec<&str> = body.split(',').collect();
                if parts.len() != 2 {
                    return Err(bad("uniform expects `lo,hi`"));
                }
                Self::uniform(parse_number(spec, parts[0])?, parse_number(spec, parts[1])?)
            }
            "exp" => {
                let mut rate = None;
                let mut shift = 0.0;
                for item in body.split(',') {
                    let (k, v) = item.split_once('=').ok_or_else(|| bad("exp expects `rate=..,shift=..`"))?;
                    match k.trim() {
                        "rate" => rate = Some(parse_number(spec, v)?),
                        "shift" => shift = parse_number(spec, v)?,
                        other => return Err(bad(&format!("unknown exp parameter `{other}`"))),
                    }
                }
                Self::exponential(rate.ok_or_else(|| bad("exp requires `rate`"))?, shift)
            }
            "table" => Self::table(&parse_pairs(spec, body)?),
            other => Err(bad(&format!("unknown kind `{other}`"))),
        }
    }
}
