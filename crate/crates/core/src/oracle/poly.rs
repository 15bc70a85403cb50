//! Polynomials on `[0, 1]` stored in the Bernstein basis.
//!
//! The quantities produced by enumeration are nonnegative mixtures of
//! `s^k (1 - s)^(n - k)`, so the Bernstein form evaluates and integrates them
//! without the cancellation that monomial coefficients would suffer.

use serde::Serialize;

pub fn binomial(n: usize, k: usize) -> f64 {
    if k > n {
        return 0.0;
    }
    let k = k.min(n - k);
    (0..k).fold(1.0, |acc, j| acc * (n - j) as f64 / (j + 1) as f64).round()
}

/// `Σ_k b_k C(n, k) s^k (1 - s)^(n - k)`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct PolynomialInS {
    bernstein: Vec<f64>,
}

impl PolynomialInS {
    pub fn from_bernstein(bernstein: Vec<f64>) -> Self {
        assert!(!bernstein.is_empty(), "a polynomial needs at least one coefficient");
        PolynomialInS { bernstein }
    }

    /// From weights `w_k` of the unnormalised basis `s^k (1 - s)^(n - k)`.
    pub fn from_mixture(weights: &[f64]) -> Self {
        let n = weights.len() - 1;
        Self::from_bernstein(weights.iter().enumerate().map(|(k, w)| w / binomial(n, k)).collect())
    }

    pub fn constant(c: f64) -> Self {
        Self::from_bernstein(vec![c])
    }

    pub fn degree(&self) -> usize {
        self.bernstein.len() - 1
    }

    pub fn bernstein(&self) -> &[f64] {
        &self.bernstein
    }

    /// Monomial coefficients `c_0..c_n` of `Σ c_j s^j`.
    pub fn coefficients(&self) -> Vec<f64> {
        let n = self.degree();
        (0..=n)
            .map(|j| {
                (0..=j)
                    .map(|k| {
                        let sign = if (j - k) % 2 == 0 { 1.0 } else { -1.0 };
                        sign * self.bernstein[k] * binomial(n, k) * binomial(n - k, j - k)
                    })
                    .sum()
            })
            .collect()
    }

    /// De Casteljau evaluation.
    pub fn eval(&self, s: f64) -> f64 {
        let mut b = self.bernstein.clone();
        let n = self.degree();
        for r in 1..=n {
            for k in 0..=n - r {
                b[k] = b[k] * (1.0 - s) + b[k + 1] * s;
            }
        }
        b[0]
    }

    /// The same polynomial written with degree one higher.
    pub fn elevate(&self) -> Self {
        let n = self.degree() + 1;
        let b = &self.bernstein;
        let out = (0..=n)
            .map(|k| {
                let lower = if k > 0 { k as f64 / n as f64 * b[k - 1] } else { 0.0 };
                let upper = if k < n { (1.0 - k as f64 / n as f64) * b[k] } else { 0.0 };
                lower + upper
            })
            .collect();
        PolynomialInS { bernstein: out }
    }

    pub fn elevate_to(&self, degree: usize) -> Self {
        assert!(degree >= self.degree());
        let mut p = self.clone();
        while p.degree() < degree {
            p = p.elevate();
        }
        p
    }

    pub fn add(&self, other: &Self) -> Self {
        let n = self.degree().max(other.degree());
        let (a, b) = (self.elevate_to(n), other.elevate_to(n));
        PolynomialInS {
            bernstein: a.bernstein.iter().zip(&b.bernstein).map(|(x, y)| x + y).collect(),
        }
    }

    pub fn scale(&self, c: f64) -> Self {
        PolynomialInS {
            bernstein: self.bernstein.iter().map(|x| c * x).collect(),
        }
    }

    /// `∫_t^1 p(s) ds`, using `∫_t^1 B_{k,n} = (1/(n+1)) Σ_{j<=k} B_{j,n+1}(t)`.
    pub fn integral_to_one(&self, t: f64) -> f64 {
        let n = self.degree();
        let basis: Vec<f64> = (0..=n + 1)
            .map(|j| binomial(n + 1, j) * t.powi(j as i32) * (1.0 - t).powi((n + 1 - j) as i32))
            .collect();
        let mut prefix = 0.0;
        let mut total = 0.0;
        for (k, b) in self.bernstein.iter().enumerate() {
            prefix += basis[k];
            total += b * prefix;
        }
        total / (n + 1) as f64
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn monomial_eval(c: &[f64], s: f64) -> f64 {
        c.iter().rev().fold(0.0, |acc, x| acc * s + x)
    }

    #[test]
    fn binomials() {
        assert_eq!(binomial(5, 2), 10.0);
        assert_eq!(binomial(12, 6), 924.0);
        assert_eq!(binomial(3, 4), 0.0);
    }

    #[test]
    fn forms_agree() {
        let p = PolynomialInS::from_mixture(&[0.5, 0.25]);
        assert_eq!(p.coefficients(), vec![0.5, -0.25]);
        let q = PolynomialInS::from_bernstein(vec![1.0, -2.0, 0.5, 3.0]);
        let c = q.coefficients();
        for k in 0..=20 {
            let s = k as f64 / 20.0;
            assert!((q.eval(s) - monomial_eval(&c, s)).abs() < 1e-12);
            assert!((q.elevate_to(6).eval(s) - q.eval(s)).abs() < 1e-12);
        }
    }

    #[test]
    fn integral_matches_antiderivative() {
        let q = PolynomialInS::from_bernstein(vec![1.0, -2.0, 0.5, 3.0]);
        let c = q.coefficients();
        let anti = |s: f64| c.iter().enumerate().map(|(j, x)| x * s.powi(j as i32 + 1) / (j + 1) as f64).sum::<f64>();
        for t in [0.0, 0.3, 0.75, 1.0] {
            assert!((q.integral_to_one(t) - (anti(1.0) - anti(t))).abs() < 1e-12);
        }
        assert!((PolynomialInS::constant(2.0).integral_to_one(0.25) - 1.5).abs() < 1e-15);
    }
}
