//! Test functions for the exact checks: random tables, monotone functions
//! and passage times on tiny boxes.

use std::sync::Arc;

use crate::distributions::WeightDistribution;
use crate::field::WeightConfig;
use crate::geodesy::{geodesic_between, shortest_path_between};
use crate::lattice::{EdgeId, Region, Vertex};
use crate::oracle::FiniteFunction;
use crate::rng::{unit_half_open, KeyedHash};

/// The atom sets the corpus is checked against.
pub fn standard_atom_sets() -> Vec<(&'static str, WeightDistribution)> {
    vec![
        ("atoms{1,2}", WeightDistribution::atomic(&[(1.0, 0.5), (2.0, 0.5)]).unwrap()),
        ("atoms{0,1}", WeightDistribution::atomic(&[(0.0, 0.5), (1.0, 0.5)]).unwrap()),
        ("atoms{0,1,3}", WeightDistribution::atomic(&[(0.0, 0.2), (1.0, 0.5), (3.0, 0.3)]).unwrap()),
    ]
}

/// The box with vertices `[0, nx-1] x [0, ny-1]` between opposite corners.
pub fn grid_region(nx: i64, ny: i64) -> Arc<Region> {
    Arc::new(Region::grid2(nx, ny).expect("nonempty grid"))
}

fn config_from(region: &Arc<Region>, edges: &[EdgeId], w: &[f64]) -> WeightConfig {
    let exact = w.iter().all(|x| x.fract() == 0.0 && x.abs() < 1e15);
    let mut config = WeightConfig::constant(region.clone(), 0.0, exact);
    for (id, &x) in edges.iter().zip(w) {
        config.set_weight(*id, x);
    }
    config
}

/// Coordinate `k` is the `k`-th edge of the region in slot order.
pub fn region_edges(region: &Region) -> Vec<EdgeId> {
    region.edge_ids().collect()
}

/// Passage time between the region's endpoints as a function of all edge weights.
pub fn passage_time_function(region: Arc<Region>) -> FiniteFunction {
    let edges = region_edges(&region);
    let label = format!("T[{}->{}, {} edges]", region.origin(), region.target(), edges.len());
    let (s, t) = (region.origin_index(), region.target_index());
    FiniteFunction::new(label, edges.len(), move |w| {
        shortest_path_between(&config_from(&region, &edges, w), s, t)
            .expect("connected box")
            .time
    })
}

/// `1{edge k lies on every geodesic}`.
pub fn membership_function(region: Arc<Region>, k: usize) -> FiniteFunction {
    let edges = region_edges(&region);
    let label = format!("pi-member[{k}]");
    let (s, t) = (region.origin_index(), region.target_index());
    let id = edges[k];
    FiniteFunction::new(label, edges.len(), move |w| {
        let g = geodesic_between(&config_from(&region, &edges, w), s, t).expect("connected box");
        if g.pi.binary_search(&id).is_ok() {
            1.0
        } else {
            0.0
        }
    })
}

/// A pseudo-random table: each configuration gets an independent value in `[-1, 1)`.
pub fn random_table(seed: u64, m: usize) -> FiniteFunction {
    FiniteFunction::new(format!("table(seed={seed}, m={m})"), m, move |w| {
        let h = w.iter().fold(KeyedHash::new(seed), |h, x| h.absorb(x.to_bits())).finish();
        2.0 * unit_half_open(h) - 1.0
    })
}

fn monotone_functions() -> Vec<FiniteFunction> {
    vec![
        FiniteFunction::new("sum3", 3, |w| w.iter().sum()),
        FiniteFunction::new("sum5", 5, |w| w.iter().sum()),
        FiniteFunction::new("max3", 3, |w| w.iter().cloned().fold(f64::MIN, f64::max)),
        FiniteFunction::new("max5", 5, |w| w.iter().cloned().fold(f64::MIN, f64::max)),
        FiniteFunction::new("min4", 4, |w| w.iter().cloned().fold(f64::MAX, f64::min)),
        FiniteFunction::new("min6", 6, |w| w.iter().cloned().fold(f64::MAX, f64::min)),
        FiniteFunction::new("weighted4", 4, |w| w[0] + 2.0 * w[1] + 0.5 * w[2] + 3.0 * w[3]),
        FiniteFunction::new("min-of-sums4", 4, |w| (w[0] + w[1]).min(w[2] + w[3])),
        FiniteFunction::new("max-of-sums6", 6, |w| (w[0] + w[1] + w[2]).max(w[3] + w[4] + w[5])),
        FiniteFunction::new("series-parallel5", 5, |w| (w[0] + w[1].min(w[2])).min(w[3] + w[4])),
        FiniteFunction::new("squares3", 3, |w| w.iter().map(|x| x * x).sum()),
        FiniteFunction::new("product-plus2", 2, |w| w[0] * w[1] + w[0]),
    ]
}

/// Fifty functions: four passage times, twelve monotone functions, four
/// elementary ones and thirty random tables with 1 to 6 coordinates.
pub fn build_corpus(seed: u64) -> Vec<FiniteFunction> {
    let mut out = vec![
        passage_time_function(grid_region(2, 2)),
        passage_time_function(grid_region(2, 3)),
        passage_time_function(Arc::new(
            Region::boxed(vec![0, 0], vec![1, 2], Vertex(vec![0, 0]), Vertex(vec![1, 0])).unwrap(),
        )),
        passage_time_function(Arc::new(
            Region::boxed(vec![0, 0], vec![1, 2], Vertex(vec![0, 0]), Vertex(vec![0, 2])).unwrap(),
        )),
    ];
    out.extend(monotone_functions());
    out.push(FiniteFunction::constant(3, 1.5));
    out.push(FiniteFunction::coordinate(1, 0));
    out.push(FiniteFunction::coordinate(4, 2));
    out.push(FiniteFunction::new("xor-like3", 3, |w| ((w[0] + w[1] + w[2]) % 2.0) - 0.5));
    for k in 0..30 {
        out.push(random_table(seed.wrapping_add(k as u64), 1 + k % 6));
    }
    out
}
