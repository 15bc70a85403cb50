#![allow(dead_code)]

use std::sync::Arc;

use fppchaos::rng::CounterStream;
use fppchaos::{EdgeId, Region, WeightConfig, WeightDistribution};

/// Every simple path from `s` to `t` with its weight, by depth-first search.
pub fn simple_paths(config: &WeightConfig, s: usize, t: usize) -> Vec<(f64, Vec<EdgeId>)> {
    fn dfs(
        config: &WeightConfig,
        x: usize,
        t: usize,
        seen: &mut Vec<bool>,
        path: &mut Vec<EdgeId>,
        out: &mut Vec<(f64, Vec<EdgeId>)>,
    ) {
        if x == t {
            out.push((config.path_weight(path), path.clone()));
            return;
        }
        let mut next = Vec::new();
        config.region().for_each_neighbor(x, |y, id| next.push((y, id)));
        for (y, id) in next {
            if !seen[y] {
                seen[y] = true;
                path.push(id);
                dfs(config, y, t, seen, path, out);
                path.pop();
                seen[y] = false;
            }
        }
    }
    let mut seen = vec![false; config.region().n_vertices()];
    seen[s] = true;
    let mut out = Vec::new();
    dfs(config, s, t, &mut seen, &mut Vec::new(), &mut out);
    out
}

pub fn ties(a: f64, b: f64, exact: bool) -> bool {
    if exact {
        a == b
    } else {
        (a - b).abs() <= 1e-12 * (1.0 + a.abs().max(b.abs()))
    }
}

/// Brute-force passage time, geodesics (sorted traversal-order edge lists) and their common edges.
pub fn brute_geodesics(config: &WeightConfig) -> (f64, Vec<Vec<EdgeId>>, Vec<EdgeId>) {
    let region = config.region();
    let paths = simple_paths(config, region.origin_index(), region.target_index());
    let best = paths.iter().map(|p| p.0).fold(f64::INFINITY, f64::min);
    let mut geodesics: Vec<Vec<EdgeId>> =
        paths.into_iter().filter(|p| ties(p.0, best, config.is_exact())).map(|p| p.1).collect();
    geodesics.sort();
    let mut common: Vec<EdgeId> = geodesics[0].clone();
    common.sort();
    for g in &geodesics[1..] {
        common.retain(|e| g.contains(e));
    }
    (best, geodesics, common)
}

pub fn random_config(region: &Arc<Region>, dist: &WeightDistribution, stream: &mut CounterStream) -> WeightConfig {
    WeightConfig::from_fn(region.clone(), dist.is_integer_atomic(), |_| dist.sample(stream.next_unit()))
}

pub fn box_region(nx: i64, ny: i64) -> Arc<Region> {
    Arc::new(Region::grid2(nx, ny).unwrap())
}

pub fn uniform() -> WeightDistribution {
    WeightDistribution::uniform(0.0, 1.0).unwrap()
}

pub fn exponential() -> WeightDistribution {
    WeightDistribution::exponential(1.0, 0.0).unwrap()
}

pub fn two_point() -> WeightDistribution {
    WeightDistribution::atomic(&[(1.0, 0.5), (2.0, 0.5)]).unwrap()
}

pub fn three_point() -> WeightDistribution {
    WeightDistribution::atomic(&[(0.0, 0.2), (1.0, 0.5), (3.0, 0.3)]).unwrap()
}

/// `∫ min(A, B + y) dF(y)` by hand for the laws used here.
pub fn mean_replaced_time(a: f64, b: f64, dist: &WeightDistribution) -> f64 {
    let c = a - b;
    if let Some(atoms) = dist.atoms() {
        return atoms.iter().map(|(x, p)| p * a.min(b + x)).sum();
    }
    match dist.to_string().split(':').next().unwrap() {
        "uniform" => {
            if c <= 0.0 {
                a
            } else if c >= 1.0 {
                b + 0.5
            } else {
                b * c + c * c / 2.0 + (1.0 - c) * a
            }
        }
        "exp" => {
            if c <= 0.0 {
                a
            } else {
                b + 1.0 - (-c).exp()
            }
        }
        other => panic!("no hand formula for {other}"),
    }
}
