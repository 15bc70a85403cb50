//! Seeded dynamical weight fields and their time slices.
//!
//! Each edge carries a base weight `omega`, a resampled weight `omega_prime`
//! and a clock `U` in `(0, 1]`. The slice at time `t` keeps `omega(e)` while
//! `U(e) > t` and switches to `omega_prime(e)` otherwise. Replica `i` has its
//! own pair `(omega_i, U_i)` and uses `omega_i` as the replacement value.
//!
//! All draws are keyed by `(seed, stream, edge coordinates)` and never by the
//! region, so enlarging the box leaves the weights of interior edges intact.

use std::sync::Arc;

use crate::distributions::WeightDistribution;
use crate::error::{Error, Result};
use crate::lattice::{Edge, EdgeId, Region};
use crate::rng::{unit_half_open, unit_open_closed, KeyedHash};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Stream {
    Omega,
    OmegaPrime,
    Clock,
    ReplicaOmega(usize),
    ReplicaClock(usize),
}

impl Stream {
    fn label(self) -> (u64, u64) {
        match self {
            Stream::Omega => (1, 0),
            Stream::OmegaPrime => (2, 0),
            Stream::Clock => (3, 0),
            Stream::ReplicaOmega(i) => (4, i as u64),
            Stream::ReplicaClock(i) => (5, i as u64),
        }
    }
}

#[derive(Clone, Debug)]
pub struct DynamicalField {
    seed: u64,
    dist: Arc<WeightDistribution>,
    region: Arc<Region>,
    replica_count: usize,
}

impl DynamicalField {
    pub fn new(seed: u64, dist: WeightDistribution, region: Region, replica_count: usize) -> Self {
        Self::shared(seed, Arc::new(dist), Arc::new(region), replica_count)
    }

    pub fn shared(seed: u64, dist: Arc<WeightDistribution>, region: Arc<Region>, replica_count: usize) -> Self {
        DynamicalField {
            seed,
            dist,
            region,
            replica_count,
        }
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn dist(&self) -> &WeightDistribution {
        &self.dist
    }

    pub fn region(&self) -> &Region {
        &self.region
    }

    pub fn replica_count(&self) -> usize {
        self.replica_count
    }

    fn raw_bits(&self, stream: Stream, e: &Edge) -> u64 {
        let (tag, index) = stream.label();
        let mut h = KeyedHash::new(self.seed).absorb(tag).absorb(index).absorb(e.axis as u64);
        for &c in &e.base.0 {
            h = h.absorb_i64(c);
        }
        h.finish()
    }

    /// The uniform variable driving `stream` at edge `e`. Clocks live in
    /// `(0, 1]` so that `t = 0` never resamples; weight streams use `[0, 1)`.
    pub fn uniform(&self, stream: Stream, e: &Edge) -> f64 {
        let bits = self.raw_bits(stream, e);
        match stream {
            Stream::Clock | Stream::ReplicaClock(_) => unit_open_closed(bits),
            _ => unit_half_open(bits),
        }
    }

    fn draw(&self, stream: Stream, e: &Edge) -> f64 {
        self.dist.sample(self.uniform(stream, e))
    }

    pub fn omega(&self, e: &Edge) -> f64 {
        self.draw(Stream::Omega, e)
    }

    pub fn omega_prime(&self, e: &Edge) -> f64 {
        self.draw(Stream::OmegaPrime, e)
    }

    pub fn clock(&self, e: &Edge) -> f64 {
        self.uniform(Stream::Clock, e)
    }

    fn check_edge(&self, e: &Edge) -> Result<()> {
        self.region.edge_id(e).map(|_| ())
    }

    fn check_replica(&self, i: usize) -> Result<()> {
        if i == 0 || i > self.replica_count {
            return Err(Error::ReplicaOutOfRange {
                index: i,
                count: self.replica_count,
            });
        }
        Ok(())
    }

    /// `omega_t(e)`: resampled iff `U(e) <= t`.
    pub fn weight_at(&self, e: &Edge, t: f64) -> Result<f64> {
        self.check_edge(e)?;
        Ok(if self.clock(e) > t { self.omega(e) } else { self.omega_prime(e) })
    }

    /// `omega_t^(i)(e)` for `1 <= i <= replica_count`.
    pub fn replica_weight_at(&self, i: usize, e: &Edge, t: f64) -> Result<f64> {
        self.check_replica(i)?;
        self.check_edge(e)?;
        Ok(if self.uniform(Stream::ReplicaClock(i), e) > t {
            self.omega(e)
        } else {
            self.draw(Stream::ReplicaOmega(i), e)
        })
    }

    /// Materialises the slice at time `t`, or of replica `i` when given.
    pub fn config_slice(&self, t: f64, replica: Option<usize>) -> Result<WeightConfig> {
        let (omega_stream, clock_stream) = match replica {
            None => (Stream::OmegaPrime, Stream::Clock),
            Some(i) => {
                self.check_replica(i)?;
                (Stream::ReplicaOmega(i), Stream::ReplicaClock(i))
            }
        };
        let track = self.realize(&[(omega_stream, clock_stream)]);
        Ok(track.slice(0, t))
    }

    /// Draws `omega` once together with the listed (replacement, clock)
    /// stream pairs, so that many slices can be cut without rehashing.
    pub fn realize(&self, tracks: &[(Stream, Stream)]) -> Realization {
        let region = &self.region;
        let slots = region.n_edge_slots();
        let mut omega = vec![f64::INFINITY; slots];
        let mut alt = vec![vec![f64::INFINITY; slots]; tracks.len()];
        let mut clocks = vec![vec![1.0; slots]; tracks.len()];
        for id in region.edge_ids() {
            let e = region.edge_at(id);
            omega[id.0] = self.omega(&e);
            for (k, &(w, c)) in tracks.iter().enumerate() {
                alt[k][id.0] = self.draw(w, &e);
                clocks[k][id.0] = self.uniform(c, &e);
            }
        }
        Realization {
            region: self.region.clone(),
            exact: self.dist.is_integer_atomic(),
            omega,
            alt,
            clocks,
        }
    }

    /// The base weights with the main (omega', U) pair.
    pub fn realize_main(&self) -> Realization {
        self.realize(&[(Stream::OmegaPrime, Stream::Clock)])
    }
}

/// Dense per-edge draws from which time slices are cut.
#[derive(Clone, Debug)]
pub struct Realization {
    region: Arc<Region>,
    exact: bool,
    omega: Vec<f64>,
    alt: Vec<Vec<f64>>,
    clocks: Vec<Vec<f64>>,
}

impl Realization {
    pub fn region(&self) -> &Arc<Region> {
        &self.region
    }

    pub fn clock(&self, track: usize, id: EdgeId) -> f64 {
        self.clocks[track][id.0]
    }

    pub fn slice(&self, track: usize, t: f64) -> WeightConfig {
        let weights = self
            .omega
            .iter()
            .zip(&self.alt[track])
            .zip(&self.clocks[track])
            .map(|((&w, &w2), &u)| if u > t { w } else { w2 })
            .collect();
        WeightConfig {
            region: self.region.clone(),
            weights,
            exact: self.exact,
        }
    }
}

/// Weights on every edge of a region. Unused slots hold `+inf`.
#[derive(Clone, Debug, PartialEq)]
pub struct WeightConfig {
    region: Arc<Region>,
    weights: Vec<f64>,
    exact: bool,
}

impl WeightConfig {
    /// A configuration with every edge set to `w`.
    pub fn constant(region: Arc<Region>, w: f64, exact: bool) -> Self {
        Self::from_fn(region, exact, |_| w)
    }

    pub fn from_fn(region: Arc<Region>, exact: bool, mut f: impl FnMut(EdgeId) -> f64) -> Self {
        let mut weights = vec![f64::INFINITY; region.n_edge_slots()];
        for id in region.edge_ids() {
            weights[id.0] = f(id);
        }
        WeightConfig { region, weights, exact }
    }

    pub fn region(&self) -> &Region {
        &self.region
    }

    pub fn shared_region(&self) -> &Arc<Region> {
        &self.region
    }

    /// Whether weights are small integers, so sums are exact and ties are compared with `==`.
    pub fn is_exact(&self) -> bool {
        self.exact
    }

    #[inline]
    pub fn weight(&self, id: EdgeId) -> f64 {
        self.weights[id.0]
    }

    pub fn weight_of(&self, e: &Edge) -> Result<f64> {
        Ok(self.weight(self.region.edge_id(e)?))
    }

    pub fn set_weight(&mut self, id: EdgeId, x: f64) {
        debug_assert!(self.region.is_edge(id) && x >= 0.0);
        self.weights[id.0] = x;
    }

    /// `sigma_e^x`: the same configuration with edge `id` set to `x`.
    pub fn with_weight(&self, id: EdgeId, x: f64) -> Self {
        let mut out = self.clone();
        out.set_weight(id, x);
        out
    }

    /// Sum of weights along `path`, accumulated in order.
    pub fn path_weight(&self, path: &[EdgeId]) -> f64 {
        path.iter().fold(0.0, |acc, id| acc + self.weight(*id))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lattice::Vertex;

    fn field(seed: u64) -> DynamicalField {
        let region = Region::around(&Vertex::on_axis(2, 8), Some(4)).unwrap();
        DynamicalField::new(seed, WeightDistribution::uniform(0.0, 1.0).unwrap(), region, 3)
    }

    #[test]
    fn endpoints_of_time() {
        let f = field(11);
        let r = f.region().clone();
        for id in r.edge_ids() {
            let e = r.edge_at(id);
            assert_eq!(f.weight_at(&e, 0.0).unwrap(), f.omega(&e));
            assert_eq!(f.weight_at(&e, 1.0).unwrap(), f.omega_prime(&e));
            assert_eq!(f.replica_weight_at(2, &e, 0.0).unwrap(), f.omega(&e));
        }
    }

    #[test]
    fn single_jump_at_clock() {
        let f = field(5);
        let r = f.region().clone();
        for id in r.edge_ids().take(50) {
            let e = r.edge_at(id);
            let u = f.clock(&e);
            let below = f64::max(u - 1e-9, 0.0);
            assert_eq!(f.weight_at(&e, below).unwrap(), f.omega(&e));
            assert_eq!(f.weight_at(&e, u).unwrap(), f.omega_prime(&e));
        }
    }

    #[test]
    fn slices_match_pointwise_queries() {
        let f = field(9);
        let real = f.realize(&[(Stream::OmegaPrime, Stream::Clock), (Stream::ReplicaOmega(1), Stream::ReplicaClock(1))]);
        let s = real.slice(0, 0.4);
        let s1 = real.slice(1, 0.7);
        assert_eq!(s, f.config_slice(0.4, None).unwrap());
        assert_eq!(s1, f.config_slice(0.7, Some(1)).unwrap());
        for id in f.region().edge_ids() {
            let e = f.region().edge_at(id);
            assert_eq!(s.weight(id), f.weight_at(&e, 0.4).unwrap());
            assert_eq!(s1.weight(id), f.replica_weight_at(1, &e, 0.7).unwrap());
        }
    }

    #[test]
    fn weights_do_not_depend_on_region() {
        let small = field(3);
        let big = DynamicalField::new(3, small.dist().clone(), small.region().scaled_padding(2).unwrap(), 0);
        for id in small.region().edge_ids() {
            let e = small.region().edge_at(id);
            assert_eq!(small.weight_at(&e, 0.5).unwrap(), big.weight_at(&e, 0.5).unwrap());
        }
    }

    #[test]
    fn errors() {
        let f = field(1);
        let far = Edge::new(Vertex(vec![100, 0]), 0);
        assert!(matches!(f.weight_at(&far, 0.5), Err(Error::EdgeOutsideRegion { .. })));
        let e = Edge::new(Vertex(vec![0, 0]), 0);
        assert!(matches!(f.replica_weight_at(0, &e, 0.5), Err(Error::ReplicaOutOfRange { .. })));
        assert!(matches!(f.replica_weight_at(4, &e, 0.5), Err(Error::ReplicaOutOfRange { .. })));
        assert!(f.config_slice(0.5, Some(4)).is_err());
    }
}
