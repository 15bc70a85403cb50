//! A three-way coupling of resampled configurations.
//!
//! With `p = 1 - √(1-s)`, `q = 1 - √(1-t)` and `rho = (q - p) / (1 - p)`:
//! `V'` is `V` with coordinates swapped for those of `W` at rate `rho`; `X`
//! and `Y` are `V'` with coordinates swapped for `W'` and `W''` at rate `p`;
//! `Z` is `V` with coordinates swapped for `W'''` at rate `q`. Then
//! `(X, Y)` has the law of `(ω_0, ω_s)` and `(X, Z)` that of `(ω_0, ω_t)`.

use serde::Serialize;

use crate::distributions::WeightDistribution;
use crate::error::{Error, Result};
use crate::rng::CounterStream;

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct CouplingParams {
    pub s: f64,
    pub t: f64,
    pub p: f64,
    pub q: f64,
    pub rho: f64,
}

impl CouplingParams {
    pub fn new(s: f64, t: f64) -> Result<Self> {
        for x in [s, t] {
            if !(0.0..=1.0).contains(&x) {
                return Err(Error::InvalidTime(x));
            }
        }
        if s > t {
            return Err(Error::Config(format!("coupling needs s <= t, got s = {s}, t = {t}")));
        }
        let p = 1.0 - (1.0 - s).sqrt();
        let q = 1.0 - (1.0 - t).sqrt();
        let rho = if p < 1.0 { ((q - p) / (1.0 - p)).clamp(0.0, 1.0) } else { 0.0 };
        Ok(CouplingParams { s, t, p, q, rho })
    }
}

/// Probability that one coordinate is resampled by time `t` in either of two
/// independent replicas: `2t - t^2`.
pub fn effective_time(t: f64) -> f64 {
    2.0 * t - t * t
}

/// One draw of `(X, Y, Z)`, each of length `m`.
pub fn coupling_draw(
    params: &CouplingParams,
    dist: &WeightDistribution,
    m: usize,
    stream: &mut CounterStream,
) -> (Vec<f64>, Vec<f64>, Vec<f64>) {
    let mut x = Vec::with_capacity(m);
    let mut y = Vec::with_capacity(m);
    let mut z = Vec::with_capacity(m);
    for _ in 0..m {
        let mut draw = || dist.sample(stream.next_unit());
        let (v, w, w1, w2, w3) = (draw(), draw(), draw(), draw(), draw());
        let v_prime = if stream.bernoulli(params.rho) { w } else { v };
        x.push(if stream.bernoulli(params.p) { w1 } else { v_prime });
        y.push(if stream.bernoulli(params.p) { w2 } else { v_prime });
        z.push(if stream.bernoulli(params.q) { w3 } else { v });
    }
    (x, y, z)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parameters() {
        let c = CouplingParams::new(0.5, 0.5).unwrap();
        assert_eq!(c.rho, 0.0);
        assert_eq!(c.p, c.q);
        let c = CouplingParams::new(0.0, 0.75).unwrap();
        assert_eq!((c.p, c.q, c.rho), (0.0, 0.5, 0.5));
        assert!(CouplingParams::new(0.6, 0.2).is_err());
        assert!(CouplingParams::new(0.0, 1.2).is_err());
    }

    #[test]
    fn effective_times() {
        assert_eq!(effective_time(0.0), 0.0);
        assert_eq!(effective_time(1.0), 1.0);
        assert_eq!(effective_time(0.5), 0.75);
    }

    #[test]
    fn no_resampling_at_zero() {
        let dist = WeightDistribution::uniform(0.0, 1.0).unwrap();
        let params = CouplingParams::new(0.0, 0.3).unwrap();
        let mut stream = CounterStream::new(1, 2);
        for _ in 0..100 {
            let (x, y, _) = coupling_draw(&params, &dist, 5, &mut stream);
            assert_eq!(x, y);
        }
    }
}
