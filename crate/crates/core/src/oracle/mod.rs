//! Exact computations on finite product spaces with atomic laws.
//!
//! For `f` of `m` coordinates, `Q_s(f) = E[f(ω_0) f(ω_s)]` where `ω_s`
//! resamples each coordinate independently with probability `s`. Conditioning
//! on the resampled set `S` gives
//! `Q_s(f) = Σ_S s^|S| (1-s)^(m-|S|) E[g_S^2]` with `g_S = E[f | coordinates outside S]`,
//! a polynomial in `s` computed here by exhaustive enumeration over atoms.

pub mod corpus;
pub mod coupling;
pub mod poly;

use std::fmt;
use std::sync::Arc;

use crate::distributions::WeightDistribution;
use crate::error::{Error, Result};

pub use coupling::{coupling_draw, effective_time, CouplingParams};
pub use poly::PolynomialInS;

pub const MAX_COORDINATES: usize = 12;
pub const MAX_CONFIGURATIONS: f64 = 1e6;

type Evaluator = dyn Fn(&[f64]) -> f64 + Send + Sync;

/// A real function of `m` weights.
#[derive(Clone)]
pub struct FiniteFunction {
    label: String,
    m: usize,
    eval: Arc<Evaluator>,
}

impl fmt::Debug for FiniteFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("FiniteFunction").field("label", &self.label).field("m", &self.m).finish()
    }
}

impl FiniteFunction {
    pub fn new(label: impl Into<String>, m: usize, eval: impl Fn(&[f64]) -> f64 + Send + Sync + 'static) -> Self {
        FiniteFunction {
            label: label.into(),
            m,
            eval: Arc::new(eval),
        }
    }

    pub fn constant(m: usize, c: f64) -> Self {
        Self::new(format!("const({c})"), m, move |_| c)
    }

    pub fn coordinate(m: usize, i: usize) -> Self {
        Self::new(format!("coord({i})"), m, move |w| w[i])
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn evaluate(&self, w: &[f64]) -> f64 {
        debug_assert_eq!(w.len(), self.m);
        (self.eval)(w)
    }

    /// Values on every configuration; coordinate 0 is the most significant digit.
    pub fn table(&self, atoms: &Atoms) -> Result<Vec<f64>> {
        atoms.check(self.m)?;
        let k = atoms.len();
        let total = k.pow(self.m as u32);
        let mut w = vec![0.0; self.m];
        Ok((0..total)
            .map(|mut idx| {
                for slot in w.iter_mut().rev() {
                    *slot = atoms.values[idx % k];
                    idx /= k;
                }
                self.evaluate(&w)
            })
            .collect())
    }
}

/// Support points and probabilities of an atomic law.
#[derive(Clone, Debug, PartialEq)]
pub struct Atoms {
    pub values: Vec<f64>,
    pub probs: Vec<f64>,
}

impl Atoms {
    pub fn of(dist: &WeightDistribution) -> Result<Self> {
        let pairs = dist.atoms().ok_or(Error::NotAtomic)?;
        Ok(Atoms {
            values: pairs.iter().map(|p| p.0).collect(),
            probs: pairs.iter().map(|p| p.1).collect(),
        })
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    fn check(&self, m: usize) -> Result<()> {
        if m > MAX_COORDINATES || (self.len() as f64).powi(m as i32) > MAX_CONFIGURATIONS {
            return Err(Error::EnumerationGuard { m, atoms: self.len() });
        }
        Ok(())
    }
}

/// Averages out the axis at `pos` of a tensor with `dims` axes of size `probs.len()`.
fn average_axis(data: &[f64], dims: usize, pos: usize, probs: &[f64]) -> Vec<f64> {
    let k = probs.len();
    let inner = k.pow((dims - 1 - pos) as u32);
    let outer = k.pow(pos as u32);
    let mut out = vec![0.0; outer * inner];
    for o in 0..outer {
        for (a, p) in probs.iter().enumerate() {
            let src = &data[(o * k + a) * inner..(o * k + a + 1) * inner];
            for (dst, x) in out[o * inner..(o + 1) * inner].iter_mut().zip(src) {
                *dst += p * x;
            }
        }
    }
    out
}

fn expectation(data: &[f64], dims: usize, probs: &[f64]) -> f64 {
    let mut cur = data.to_vec();
    for d in (0..dims).rev() {
        cur = average_axis(&cur, d + 1, d, probs);
    }
    cur[0]
}

/// `e_k = Σ_{|S| = k} E[g_S h_S]`, where `g_S`, `h_S` are the conditional
/// expectations of the two tables given the coordinates outside `S`.
fn subset_moments(f: &[f64], g: Option<&[f64]>, m: usize, probs: &[f64]) -> Vec<f64> {
    struct Node {
        f: Vec<f64>,
        g: Option<Vec<f64>>,
        remaining: Vec<usize>,
    }

    fn visit(node: &Node, min_axis: usize, removed: usize, probs: &[f64], moments: &mut [f64]) {
        let dims = node.remaining.len();
        let product: Vec<f64> = match &node.g {
            Some(g) => node.f.iter().zip(g).map(|(a, b)| a * b).collect(),
            None => node.f.iter().map(|a| a * a).collect(),
        };
        moments[removed] += expectation(&product, dims, probs);
        for pos in 0..dims {
            let axis = node.remaining[pos];
            if axis < min_axis {
                continue;
            }
            let mut remaining = node.remaining.clone();
            remaining.remove(pos);
            let child = Node {
                f: average_axis(&node.f, dims, pos, probs),
                g: node.g.as_ref().map(|g| average_axis(g, dims, pos, probs)),
                remaining,
            };
            visit(&child, axis + 1, removed + 1, probs, moments);
        }
    }

    let mut moments = vec![0.0; m + 1];
    let root = Node {
        f: f.to_vec(),
        g: g.map(|g| g.to_vec()),
        remaining: (0..m).collect(),
    };
    visit(&root, 0, 0, probs, &mut moments);
    moments
}

/// `Q_s(f)` as an exact polynomial of degree `m`.
pub fn q_polynomial(f: &FiniteFunction, dist: &WeightDistribution) -> Result<PolynomialInS> {
    let atoms = Atoms::of(dist)?;
    let table = f.table(&atoms)?;
    Ok(PolynomialInS::from_mixture(&subset_moments(&table, None, f.m(), &atoms.probs)))
}

/// `E[f(ω_0) g(ω_s)]` as a polynomial in `s`.
pub fn cross_polynomial(f: &FiniteFunction, g: &FiniteFunction, dist: &WeightDistribution) -> Result<PolynomialInS> {
    if f.m() != g.m() {
        return Err(Error::Config(format!("coordinate counts differ: {} vs {}", f.m(), g.m())));
    }
    let atoms = Atoms::of(dist)?;
    let (tf, tg) = (f.table(&atoms)?, g.table(&atoms)?);
    Ok(PolynomialInS::from_mixture(&subset_moments(&tf, Some(&tg), f.m(), &atoms.probs)))
}

/// Tables of `D_i^x f = f∘σ_i^x - ∫ f∘σ_i^y dF(y)` over the other `m - 1`
/// coordinates, one per atom `x`.
fn derivative_tables(table: &[f64], m: usize, i: usize, probs: &[f64]) -> Vec<Vec<f64>> {
    let k = probs.len();
    let inner = k.pow((m - 1 - i) as u32);
    let outer = k.pow(i as u32);
    let mean = average_axis(table, m, i, probs);
    (0..k)
        .map(|a| {
            let mut out = Vec::with_capacity(outer * inner);
            for o in 0..outer {
                for j in 0..inner {
                    out.push(table[(o * k + a) * inner + j] - mean[o * inner + j]);
                }
            }
            out
        })
        .collect()
}

/// `Inf_i(f(ω_0), f(ω_s)) = Σ_x P(x) Q_s(D_i^x f)` as a polynomial of degree `m - 1`.
pub fn influence_polynomial(f: &FiniteFunction, i: usize, dist: &WeightDistribution) -> Result<PolynomialInS> {
    let atoms = Atoms::of(dist)?;
    let table = f.table(&atoms)?;
    Ok(influence_from_table(&table, f.m(), i, &atoms.probs))
}

fn influence_from_table(table: &[f64], m: usize, i: usize, probs: &[f64]) -> PolynomialInS {
    assert!(i < m, "coordinate {i} out of range for m = {m}");
    let mut weights = vec![0.0; m];
    for (p, d) in probs.iter().zip(derivative_tables(table, m, i, probs)) {
        for (w, e) in weights.iter_mut().zip(subset_moments(&d, None, m - 1, probs)) {
            *w += p * e;
        }
    }
    PolynomialInS::from_mixture(&weights)
}

/// Co-influence of coordinate `i` between `ω_0` and `ω_s`.
pub fn influence_exact(f: &FiniteFunction, i: usize, dist: &WeightDistribution, s: f64) -> Result<f64> {
    Ok(influence_polynomial(f, i, dist)?.eval(s))
}

/// `Q_s`, every `Inf_i`, and the covariance-formula residual at `t`.
#[derive(Clone, Debug)]
pub struct CovarianceCheck {
    pub q: PolynomialInS,
    pub influences: Vec<PolynomialInS>,
}

impl CovarianceCheck {
    pub fn new(f: &FiniteFunction, dist: &WeightDistribution) -> Result<Self> {
        let atoms = Atoms::of(dist)?;
        let table = f.table(&atoms)?;
        let m = f.m();
        let q = PolynomialInS::from_mixture(&subset_moments(&table, None, m, &atoms.probs));
        let influences = (0..m).map(|i| influence_from_table(&table, m, i, &atoms.probs)).collect();
        Ok(CovarianceCheck { q, influences })
    }

    pub fn covariance(&self, t: f64) -> f64 {
        self.q.eval(t) - self.q.eval(1.0)
    }

    /// `∫_t^1 Σ_i Inf_i(s) ds`.
    pub fn integrated_influence(&self, t: f64) -> f64 {
        self.influences.iter().map(|p| p.integral_to_one(t)).sum()
    }

    pub fn residual(&self, t: f64) -> f64 {
        self.covariance(t) - self.integrated_influence(t)
    }
}

/// `Cov(f(ω_0), f(ω_t)) - ∫_t^1 Σ_i Inf_i(f(ω_0), f(ω_s)) ds`.
pub fn verify_cov_formula(f: &FiniteFunction, dist: &WeightDistribution, t: f64) -> Result<f64> {
    if !(0.0..=1.0).contains(&t) {
        return Err(Error::InvalidTime(t));
    }
    Ok(CovarianceCheck::new(f, dist)?.residual(t))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn bernoulli() -> WeightDistribution {
        WeightDistribution::atomic(&[(0.0, 0.5), (1.0, 0.5)]).unwrap()
    }

    #[test]
    fn single_bit_identity() {
        let f = FiniteFunction::coordinate(1, 0);
        let q = q_polynomial(&f, &bernoulli()).unwrap();
        assert_eq!(q.coefficients(), vec![0.5, -0.25]);
        for s in [0.0, 0.3, 1.0] {
            assert_eq!(influence_exact(&f, 0, &bernoulli(), s).unwrap(), 0.25);
        }
        assert_eq!(verify_cov_formula(&f, &bernoulli(), 0.0).unwrap(), 0.0);
    }

    #[test]
    fn constants_and_independence() {
        let dist = WeightDistribution::atomic(&[(1.0, 0.2), (2.0, 0.5), (4.0, 0.3)]).unwrap();
        let c = FiniteFunction::constant(3, 2.0);
        let q = q_polynomial(&c, &dist).unwrap();
        for s in [0.0, 0.5, 1.0] {
            assert!((q.eval(s) - 4.0).abs() < 1e-12);
        }
        assert!(verify_cov_formula(&c, &dist, 0.2).unwrap().abs() < 1e-12);
        let f = FiniteFunction::new("sum", 3, |w| w[0] + w[1] * w[2]);
        let q = q_polynomial(&f, &dist).unwrap();
        let mean = 2.4 + 2.4 * 2.4;
        assert!((q.eval(1.0) - mean * mean).abs() < 1e-12);
        let g = FiniteFunction::new("skip", 3, |w| w[0] * w[2]);
        assert_eq!(influence_exact(&g, 1, &dist, 0.4).unwrap(), 0.0);
    }

    #[test]
    fn guard() {
        let f = FiniteFunction::constant(13, 1.0);
        assert!(matches!(q_polynomial(&f, &bernoulli()), Err(Error::EnumerationGuard { .. })));
        let u = WeightDistribution::uniform(0.0, 1.0).unwrap();
        assert!(matches!(q_polynomial(&FiniteFunction::constant(2, 1.0), &u), Err(Error::NotAtomic)));
    }
}
