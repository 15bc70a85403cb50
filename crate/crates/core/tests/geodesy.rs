mod common;

use common::*;
use fppchaos::geodesy::{enumerate_all_geodesics, geodesic, geodesic_intersection, replacement_values, shortest_path};
use fppchaos::rng::CounterStream;
use fppchaos::{Edge, ReplacementEngine, Vertex, WeightConfig};

fn endpoints(config: &WeightConfig) -> (Vertex, Vertex) {
    (config.region().origin().clone(), config.region().target().clone())
}

#[test]
fn passage_times_match_simple_path_enumeration() {
    let mut stream = CounterStream::new(3, 0);
    for (nx, ny) in [(2, 2), (3, 3), (3, 4), (4, 4)] {
        let region = box_region(nx, ny);
        for dist in [uniform(), exponential(), two_point(), three_point()] {
            for _ in 0..10 {
                let config = random_config(&region, &dist, &mut stream);
                let (u, v) = endpoints(&config);
                let (best, _, _) = brute_geodesics(&config);
                let sp = shortest_path(&config, &u, &v).unwrap();
                assert!(ties(sp.time, best, config.is_exact()), "{} vs {best}", sp.time);
                assert!(ties(config.path_weight(&sp.path), sp.time, config.is_exact()));
            }
        }
    }
}

#[test]
fn geodesic_sets_match_enumeration() {
    let mut stream = CounterStream::new(4, 0);
    for (nx, ny) in [(2, 3), (3, 3), (4, 4), (4, 5)] {
        let region = box_region(nx, ny);
        for dist in [two_point(), three_point(), uniform()] {
            for _ in 0..8 {
                let config = random_config(&region, &dist, &mut stream);
                let (u, v) = endpoints(&config);
                let (_, all, common) = brute_geodesics(&config);
                assert_eq!(enumerate_all_geodesics(&config, &u, &v).unwrap(), all);
                assert_eq!(geodesic_intersection(&config, &u, &v).unwrap(), common);
                assert_eq!(geodesic(&config, &u, &v).unwrap().pi, common);
            }
        }
    }
}

#[test]
fn zero_weights_use_the_deletion_fallback() {
    let zero_heavy = fppchaos::WeightDistribution::atomic(&[(0.0, 0.6), (1.0, 0.4)]).unwrap();
    let mut stream = CounterStream::new(5, 0);
    let region = box_region(4, 4);
    for _ in 0..40 {
        let config = random_config(&region, &zero_heavy, &mut stream);
        let (u, v) = endpoints(&config);
        let (_, _, common) = brute_geodesics(&config);
        assert_eq!(geodesic_intersection(&config, &u, &v).unwrap(), common);
    }
}

#[test]
fn replacement_identity_against_recomputation() {
    let mut stream = CounterStream::new(6, 0);
    let region = box_region(4, 4);
    for dist in [two_point(), three_point(), uniform(), exponential()] {
        for _ in 0..20 {
            let config = random_config(&region, &dist, &mut stream);
            let (u, v) = endpoints(&config);
            let mut engine = ReplacementEngine::new(&config, &u, &v).unwrap();
            for id in region.edge_ids() {
                let e: Edge = region.edge_at(id);
                let naive = replacement_values(&config, &e, &u, &v).unwrap();
                assert_eq!(engine.values(id), naive);
                for x in [0.0, 0.5, 1.0, 2.0, 3.0, dist.sample(stream.next_unit())] {
                    let direct = shortest_path(&config.with_weight(id, x), &u, &v).unwrap().time;
                    assert!(ties(direct, naive.passage_time_with(x), config.is_exact()), "{direct} vs {naive:?} at {x}");
                }
            }
        }
    }
}

#[test]
fn replacement_values_by_brute_force() {
    // A: best simple path avoiding e. B may undercut the best simple path
    // through e when its two legs cross, but then A <= B and the crossing
    // point already yields a path avoiding e, so min(A, B + x) is unchanged.
    let mut stream = CounterStream::new(7, 0);
    let region = box_region(3, 4);
    for _ in 0..20 {
        let config = random_config(&region, &three_point(), &mut stream);
        let (u, v) = endpoints(&config);
        let paths = simple_paths(&config, region.origin_index(), region.target_index());
        for id in region.edge_ids() {
            let w = config.weight(id);
            let a = paths.iter().filter(|p| !p.1.contains(&id)).map(|p| p.0).fold(f64::INFINITY, f64::min);
            let b = paths.iter().filter(|p| p.1.contains(&id)).map(|p| p.0 - w).fold(f64::INFINITY, f64::min);
            let rv = replacement_values(&config, &region.edge_at(id), &u, &v).unwrap();
            assert_eq!(rv.a, a);
            assert!(rv.b <= b);
            if rv.b < b {
                assert!(rv.a <= rv.b, "{rv:?} vs simple-path B = {b}");
            }
        }
    }
}

#[test]
fn candidate_prefilter_keeps_every_nonzero_profile() {
    let mut stream = CounterStream::new(8, 0);
    let region = box_region(5, 5);
    for dist in [uniform(), two_point()] {
        for _ in 0..10 {
            let config = random_config(&region, &dist, &mut stream);
            let (u, v) = endpoints(&config);
            let mut engine = ReplacementEngine::new(&config, &u, &v).unwrap();
            let candidates = engine.candidates(dist.r());
            for id in region.edge_ids() {
                let rv = engine.values(id);
                if rv.a - rv.b > dist.r() {
                    assert!(candidates.contains(&id), "edge {id:?} with A - B = {} was filtered", rv.a - rv.b);
                }
            }
        }
    }
}
