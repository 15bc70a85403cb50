//! Passage times, geodesics and replacement values.
//!
//! Shortest paths are computed by label setting with a binary heap. Among
//! equally short predecessors the one with the smallest vertex index (that is,
//! the lexicographically smallest vertex) becomes the tree parent, so witness
//! paths are deterministic.
//!
//! For integer weights all sums are exact in `f64` and ties are compared with
//! `==`. Otherwise two values are tied when they agree to a relative
//! tolerance of `1e-12`.

use std::cmp::Ordering;
use std::collections::BinaryHeap;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::field::WeightConfig;
use crate::lattice::{Edge, EdgeId, Vertex};

pub const CONTINUOUS_TIE_TOLERANCE: f64 = 1e-12;
pub const ENUMERATION_EDGE_LIMIT: usize = 40;

const NONE: usize = usize::MAX;

/// Equality up to a relative tolerance; zero tolerance means exact comparison.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct TieTolerance(pub f64);

impl TieTolerance {
    pub fn for_config(config: &WeightConfig) -> Self {
        if config.is_exact() {
            TieTolerance(0.0)
        } else {
            TieTolerance(CONTINUOUS_TIE_TOLERANCE)
        }
    }

    #[inline]
    pub fn eq(self, a: f64, b: f64) -> bool {
        a == b || (a - b).abs() <= self.0 * a.abs().max(b.abs())
    }

    /// `a < b` and not tied.
    #[inline]
    pub fn lt(self, a: f64, b: f64) -> bool {
        a < b && !self.eq(a, b)
    }

    #[inline]
    pub fn le(self, a: f64, b: f64) -> bool {
        a <= b || self.eq(a, b)
    }
}

#[derive(Clone, Copy, Debug)]
struct Frontier(f64, usize);

impl PartialEq for Frontier {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}

impl Eq for Frontier {}

impl PartialOrd for Frontier {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Frontier {
    // Reversed so that `BinaryHeap` pops the smallest distance, then the smallest index.
    fn cmp(&self, other: &Self) -> Ordering {
        other.0.total_cmp(&self.0).then_with(|| other.1.cmp(&self.1))
    }
}

/// How far a label-setting run proceeds.
#[derive(Clone, Copy, Debug, PartialEq)]
pub(crate) enum Extent {
    /// Settle every reachable vertex.
    Full,
    /// Stop as soon as the vertex is settled.
    UntilTarget(usize),
    /// Settle everything within distance `limit`; the rest is left at `+inf`.
    Within(f64),
}

/// Distances from one root, with a deterministic shortest-path tree.
#[derive(Clone, Debug)]
pub struct ShortestPathTree {
    root: usize,
    dist: Vec<f64>,
    parent: Vec<usize>,
    parent_edge: Vec<usize>,
}

impl ShortestPathTree {
    pub(crate) fn run(config: &WeightConfig, root: usize, blocked: Option<EdgeId>, extent: Extent) -> Self {
        let region = config.region();
        let n = region.n_vertices();
        let mut dist = vec![f64::INFINITY; n];
        let mut parent = vec![NONE; n];
        let mut parent_edge = vec![NONE; n];
        let mut settled = vec![false; n];
        let mut heap = BinaryHeap::new();
        dist[root] = 0.0;
        heap.push(Frontier(0.0, root));
        while let Some(Frontier(d, x)) = heap.pop() {
            if settled[x] || d > dist[x] {
                continue;
            }
            if let Extent::Within(limit) = extent {
                if d > limit {
                    break;
                }
            }
            settled[x] = true;
            if extent == Extent::UntilTarget(x) {
                break;
            }
            region.for_each_neighbor(x, |y, id| {
                if settled[y] || Some(id) == blocked {
                    return;
                }
                let nd = d + config.weight(id);
                if nd < dist[y] {
                    dist[y] = nd;
                    parent[y] = x;
                    parent_edge[y] = id.0;
                    heap.push(Frontier(nd, y));
                } else if nd == dist[y] && x < parent[y] {
                    parent[y] = x;
                    parent_edge[y] = id.0;
                }
            });
        }
        if !matches!(extent, Extent::Full) {
            for (d, s) in dist.iter_mut().zip(&settled) {
                if !s {
                    *d = f64::INFINITY;
                }
            }
        }
        ShortestPathTree {
            root,
            dist,
            parent,
            parent_edge,
        }
    }

    pub fn root(&self) -> usize {
        self.root
    }

    #[inline]
    pub fn dist(&self, v: usize) -> f64 {
        self.dist[v]
    }

    pub fn distances(&self) -> &[f64] {
        &self.dist
    }

    pub fn parent_edge(&self, v: usize) -> Option<EdgeId> {
        (self.parent_edge[v] != NONE).then(|| EdgeId(self.parent_edge[v]))
    }

    /// Tree path from the root to `v` as edges in traversal order.
    pub fn path_to(&self, v: usize) -> Option<Vec<EdgeId>> {
        if self.dist[v].is_infinite() {
            return None;
        }
        let mut path = Vec::new();
        let mut x = v;
        while x != self.root {
            path.push(EdgeId(self.parent_edge[x]));
            x = self.parent[x];
        }
        path.reverse();
        Some(path)
    }

    /// Whether `x` lies in the subtree hanging below `top`.
    fn in_subtree(&self, mut x: usize, top: usize) -> bool {
        loop {
            if x == top {
                return true;
            }
            if x == self.root || self.parent[x] == NONE {
                return false;
            }
            x = self.parent[x];
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ShortestPath {
    pub time: f64,
    pub path: Vec<EdgeId>,
    pub touched_boundary: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct GeodesicResult {
    pub time: f64,
    pub witness_path: Vec<EdgeId>,
    /// Edges common to every geodesic, sorted.
    pub pi: Vec<EdgeId>,
    pub touched_boundary: bool,
}

/// Passage time with the edge deleted (`a`) and the cheapest way through it
/// without its own weight (`b`). Then `T(sigma_e^x) = min(a, b + x)`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct ReplacementValues {
    pub a: f64,
    pub b: f64,
}

impl ReplacementValues {
    /// Deleting the edge separated the endpoints inside the region.
    pub fn disconnected(&self) -> bool {
        self.a.is_infinite()
    }

    pub fn passage_time_with(&self, x: f64) -> f64 {
        self.a.min(self.b + x)
    }
}

fn endpoint_indices(config: &WeightConfig, u: &Vertex, v: &Vertex) -> Result<(usize, usize)> {
    let region = config.region();
    Ok((region.vertex_index(u)?, region.vertex_index(v)?))
}

fn touches_boundary(config: &WeightConfig, source: usize, path: &[EdgeId]) -> bool {
    let region = config.region();
    let mut x = source;
    if region.on_boundary(x) {
        return true;
    }
    for &id in path {
        let (a, b) = region.endpoints(id);
        x = if a == x { b } else { a };
        if region.on_boundary(x) {
            return true;
        }
    }
    false
}

pub fn shortest_path(config: &WeightConfig, u: &Vertex, v: &Vertex) -> Result<ShortestPath> {
    let (s, t) = endpoint_indices(config, u, v)?;
    shortest_path_between(config, s, t)
}

pub(crate) fn shortest_path_between(config: &WeightConfig, s: usize, t: usize) -> Result<ShortestPath> {
    let tree = ShortestPathTree::run(config, s, None, Extent::UntilTarget(t));
    let path = tree.path_to(t).ok_or(Error::Disconnected)?;
    Ok(ShortestPath {
        time: tree.dist(t),
        touched_boundary: touches_boundary(config, s, &path),
        path,
    })
}

/// Passage time, one geodesic, and the intersection of all geodesics.
pub fn geodesic(config: &WeightConfig, u: &Vertex, v: &Vertex) -> Result<GeodesicResult> {
    let (s, t) = endpoint_indices(config, u, v)?;
    geodesic_between(config, s, t)
}

pub fn geodesic_intersection(config: &WeightConfig, u: &Vertex, v: &Vertex) -> Result<Vec<EdgeId>> {
    Ok(geodesic(config, u, v)?.pi)
}

pub(crate) fn geodesic_between(config: &WeightConfig, s: usize, t: usize) -> Result<GeodesicResult> {
    let tol = TieTolerance::for_config(config);
    let from_s = ShortestPathTree::run(config, s, None, Extent::UntilTarget(t));
    let witness = from_s.path_to(t).ok_or(Error::Disconnected)?;
    let time = from_s.dist(t);
    let limit = time + tol.0 * time;
    let from_s = ShortestPathTree::run(config, s, None, Extent::Within(limit));
    let from_t = ShortestPathTree::run(config, t, None, Extent::Within(limit));
    let pi = intersection_from_trees(config, &from_s, &from_t, &witness, time, tol);
    Ok(GeodesicResult {
        time,
        touched_boundary: touches_boundary(config, s, &witness),
        witness_path: witness,
        pi,
    })
}

/// Edges of the witness path that no other geodesic avoids.
///
/// Every geodesic covers `[0, T]` by the distance intervals of its edges. When
/// all tight edges have positive weight, a witness edge is avoidable exactly
/// when some other tight edge has an interval overlapping its own. Zero-weight
/// tight edges break that argument, and then each witness edge is tested by
/// deleting it.
fn intersection_from_trees(
    config: &WeightConfig,
    from_s: &ShortestPathTree,
    from_t: &ShortestPathTree,
    witness: &[EdgeId],
    time: f64,
    tol: TieTolerance,
) -> Vec<EdgeId> {
    let region = config.region();
    let slack = tol.0 * time;
    let mut on_witness = vec![false; region.n_edge_slots()];
    let mut intervals = Vec::with_capacity(witness.len());
    let mut x = from_s.root();
    let mut degenerate = false;
    for &id in witness {
        on_witness[id.0] = true;
        let (a, b) = region.endpoints(id);
        let next = if a == x { b } else { a };
        let w = config.weight(id);
        degenerate |= w <= slack;
        intervals.push((from_s.dist(x), from_s.dist(x) + w));
        x = next;
    }
    let mut avoidable = vec![false; witness.len()];
    'edges: for id in region.edge_ids() {
        if on_witness[id.0] {
            continue;
        }
        let w = config.weight(id);
        let (a, b) = region.endpoints(id);
        for (c, d) in [(a, b), (b, a)] {
            let (dc, dd) = (from_s.dist(c), from_t.dist(d));
            if !dc.is_finite() || !dd.is_finite() || !tol.eq(dc + w + dd, time) {
                continue;
            }
            if w <= slack {
                degenerate = true;
                break 'edges;
            }
            let (lo, hi) = (dc, dc + w);
            let start = intervals.partition_point(|&(_, h)| h - lo <= slack);
            for (k, &(wl, wh)) in intervals.iter().enumerate().skip(start) {
                if hi - wl <= slack {
                    break;
                }
                if wh.min(hi) - wl.max(lo) > slack {
                    avoidable[k] = true;
                }
            }
        }
    }
    let target = from_t.root();
    let mut pi: Vec<EdgeId> = if degenerate {
        witness
            .iter()
            .copied()
            .filter(|&id| {
                let deleted = ShortestPathTree::run(config, from_s.root(), Some(id), Extent::UntilTarget(target));
                tol.lt(time, deleted.dist(target))
            })
            .collect()
    } else {
        witness.iter().zip(&avoidable).filter(|(_, &av)| !av).map(|(&id, _)| id).collect()
    };
    pi.sort_unstable();
    pi
}

/// Replacement values by two label-setting runs in the configuration with `e` deleted.
pub fn replacement_values(config: &WeightConfig, e: &Edge, u: &Vertex, v: &Vertex) -> Result<ReplacementValues> {
    let id = config.region().edge_id(e)?;
    let (s, t) = endpoint_indices(config, u, v)?;
    Ok(replacement_values_naive(config, id, s, t))
}

pub(crate) fn replacement_values_naive(config: &WeightConfig, id: EdgeId, s: usize, t: usize) -> ReplacementValues {
    let from_s = ShortestPathTree::run(config, s, Some(id), Extent::Full);
    let from_t = ShortestPathTree::run(config, t, Some(id), Extent::Full);
    let (a, b) = config.region().endpoints(id);
    ReplacementValues {
        a: from_s.dist(t),
        b: (from_s.dist(a) + from_t.dist(b)).min(from_s.dist(b) + from_t.dist(a)),
    }
}

/// Children lists of a shortest-path tree in compressed form.
#[derive(Clone, Debug)]
struct Children {
    offsets: Vec<usize>,
    list: Vec<usize>,
}

impl Children {
    fn of(tree: &ShortestPathTree) -> Self {
        let n = tree.parent.len();
        let mut offsets = vec![0usize; n + 1];
        for &p in &tree.parent {
            if p != NONE {
                offsets[p + 1] += 1;
            }
        }
        for k in 0..n {
            offsets[k + 1] += offsets[k];
        }
        let mut fill = offsets.clone();
        let mut list = vec![0; offsets[n]];
        for (x, &p) in tree.parent.iter().enumerate() {
            if p != NONE {
                list[fill[p]] = x;
                fill[p] += 1;
            }
        }
        Children { offsets, list }
    }

    fn of_vertex(&self, x: usize) -> &[usize] {
        &self.list[self.offsets[x]..self.offsets[x + 1]]
    }
}

#[derive(Clone, Debug)]
struct Scratch {
    generation: u32,
    member: Vec<u32>,
    settled: Vec<u32>,
    dist: Vec<f64>,
    members: Vec<usize>,
    heap: BinaryHeap<Frontier>,
}

impl Scratch {
    fn new(n: usize) -> Self {
        Scratch {
            generation: 0,
            member: vec![0; n],
            settled: vec![0; n],
            dist: vec![f64::INFINITY; n],
            members: Vec::new(),
            heap: BinaryHeap::new(),
        }
    }
}

/// Replacement values for many edges of one configuration.
///
/// Two full runs rooted at the endpoints are shared by all queries. Deleting an
/// edge only changes distances inside the subtree it supports, so each query
/// re-solves that subtree from its undisturbed neighbours. Results coincide
/// with [`replacement_values`] bit for bit.
#[derive(Clone, Debug)]
pub struct ReplacementEngine<'a> {
    config: &'a WeightConfig,
    target: usize,
    from_s: ShortestPathTree,
    from_t: ShortestPathTree,
    children_s: Children,
    children_t: Children,
    scratch: Scratch,
    tol: TieTolerance,
}

impl<'a> ReplacementEngine<'a> {
    pub fn new(config: &'a WeightConfig, u: &Vertex, v: &Vertex) -> Result<Self> {
        let (s, t) = endpoint_indices(config, u, v)?;
        Ok(Self::between(config, s, t))
    }

    pub(crate) fn between(config: &'a WeightConfig, source: usize, target: usize) -> Self {
        let from_s = ShortestPathTree::run(config, source, None, Extent::Full);
        let from_t = ShortestPathTree::run(config, target, None, Extent::Full);
        ReplacementEngine {
            config,
            target,
            children_s: Children::of(&from_s),
            children_t: Children::of(&from_t),
            from_s,
            from_t,
            scratch: Scratch::new(config.region().n_vertices()),
            tol: TieTolerance::for_config(config),
        }
    }

    pub fn passage_time(&self) -> f64 {
        self.from_s.dist(self.target)
    }

    pub fn from_source(&self) -> &ShortestPathTree {
        &self.from_s
    }

    pub fn from_target(&self) -> &ShortestPathTree {
        &self.from_t
    }

    /// Edges that can have `A - B > r`: those with `B + r <= T` when `B` is
    /// bounded below by undeleted distances.
    pub fn candidates(&self, r: f64) -> Vec<EdgeId> {
        let region = self.config.region();
        let time = self.passage_time();
        region
            .edge_ids()
            .filter(|&id| {
                let (a, b) = region.endpoints(id);
                let through = (self.from_s.dist(a) + self.from_t.dist(b)).min(self.from_s.dist(b) + self.from_t.dist(a));
                self.tol.le(through + r, time)
            })
            .collect()
    }

    pub fn values(&mut self, id: EdgeId) -> ReplacementValues {
        let (a, b) = self.config.region().endpoints(id);
        let [s_to_t, s_to_a, s_to_b] = Self::avoiding(
            self.config,
            &self.from_s,
            &self.children_s,
            &mut self.scratch,
            id,
            [self.target, a, b],
        );
        let [t_to_a, t_to_b, _] = Self::avoiding(
            self.config,
            &self.from_t,
            &self.children_t,
            &mut self.scratch,
            id,
            [a, b, b],
        );
        ReplacementValues {
            a: s_to_t,
            b: (s_to_a + t_to_b).min(s_to_b + t_to_a),
        }
    }

    /// Distances from the tree root to `targets` with edge `id` deleted.
    fn avoiding(
        config: &WeightConfig,
        tree: &ShortestPathTree,
        children: &Children,
        scratch: &mut Scratch,
        id: EdgeId,
        targets: [usize; 3],
    ) -> [f64; 3] {
        let region = config.region();
        let (a, b) = region.endpoints(id);
        let top = if tree.parent_edge[b] == id.0 {
            b
        } else if tree.parent_edge[a] == id.0 {
            a
        } else {
            NONE
        };
        let mut out = targets.map(|x| tree.dist(x));
        if top == NONE {
            return out;
        }
        let inside: Vec<bool> = targets.iter().map(|&x| tree.in_subtree(x, top)).collect();
        if !inside.iter().any(|&i| i) {
            return out;
        }

        scratch.generation += 1;
        let generation = scratch.generation;
        scratch.members.clear();
        scratch.members.push(top);
        scratch.member[top] = generation;
        let mut k = 0;
        while k < scratch.members.len() {
            let x = scratch.members[k];
            for &c in children.of_vertex(x) {
                scratch.member[c] = generation;
                scratch.members.push(c);
            }
            k += 1;
        }

        scratch.heap.clear();
        for k in 0..scratch.members.len() {
            let x = scratch.members[k];
            let mut best = f64::INFINITY;
            region.for_each_neighbor(x, |y, e| {
                if e != id && scratch.member[y] != generation {
                    best = best.min(tree.dist(y) + config.weight(e));
                }
            });
            scratch.dist[x] = best;
            if best.is_finite() {
                scratch.heap.push(Frontier(best, x));
            }
        }

        let mut pending = targets
            .iter()
            .zip(&inside)
            .enumerate()
            .filter(|(k, (x, &i))| i && !targets[..*k].contains(x))
            .count();
        while let Some(Frontier(d, x)) = scratch.heap.pop() {
            if scratch.settled[x] == generation || d > scratch.dist[x] {
                continue;
            }
            scratch.settled[x] = generation;
            if targets.contains(&x) {
                pending -= 1;
                if pending == 0 {
                    break;
                }
            }
            region.for_each_neighbor(x, |y, e| {
                if e == id || scratch.member[y] != generation || scratch.settled[y] == generation {
                    return;
                }
                let nd = d + config.weight(e);
                if nd < scratch.dist[y] {
                    scratch.dist[y] = nd;
                    scratch.heap.push(Frontier(nd, y));
                }
            });
        }
        for (k, &x) in targets.iter().enumerate() {
            if inside[k] {
                out[k] = if scratch.settled[x] == generation {
                    scratch.dist[x]
                } else {
                    f64::INFINITY
                };
            }
        }
        out
    }
}

/// Every geodesic from `u` to `v`, as edge lists in traversal order, sorted.
pub fn enumerate_all_geodesics(config: &WeightConfig, u: &Vertex, v: &Vertex) -> Result<Vec<Vec<EdgeId>>> {
    let region = config.region();
    let edges = region.n_edges();
    if edges > ENUMERATION_EDGE_LIMIT {
        return Err(Error::RegionTooLarge {
            edges,
            limit: ENUMERATION_EDGE_LIMIT,
        });
    }
    let (s, t) = endpoint_indices(config, u, v)?;
    let tol = TieTolerance::for_config(config);
    let from_s = ShortestPathTree::run(config, s, None, Extent::Full);
    let from_t = ShortestPathTree::run(config, t, None, Extent::Full);
    let time = from_s.dist(t);
    if time.is_infinite() {
        return Err(Error::Disconnected);
    }

    struct Walk<'w> {
        config: &'w WeightConfig,
        from_s: &'w ShortestPathTree,
        from_t: &'w ShortestPathTree,
        target: usize,
        time: f64,
        tol: TieTolerance,
        visited: Vec<bool>,
        path: Vec<EdgeId>,
        found: Vec<Vec<EdgeId>>,
    }

    impl Walk<'_> {
        fn descend(&mut self, x: usize) {
            if x == self.target {
                self.found.push(self.path.clone());
                return;
            }
            let mut steps = Vec::new();
            self.config.region().for_each_neighbor(x, |y, id| steps.push((y, id)));
            for (y, id) in steps {
                let dy = self.from_s.dist(y);
                if self.visited[y]
                    || !self.tol.eq(self.from_s.dist(x) + self.config.weight(id), dy)
                    || !self.tol.eq(dy + self.from_t.dist(y), self.time)
                {
                    continue;
                }
                self.visited[y] = true;
                self.path.push(id);
                self.descend(y);
                self.path.pop();
                self.visited[y] = false;
            }
        }
    }

    let mut walk = Walk {
        config,
        from_s: &from_s,
        from_t: &from_t,
        target: t,
        time,
        tol,
        visited: vec![false; region.n_vertices()],
        path: Vec::new(),
        found: Vec::new(),
    };
    walk.visited[s] = true;
    walk.descend(s);
    let mut found = walk.found;
    found.sort();
    Ok(found)
}

#[cfg(test)]
mod tests {
    use std::sync::Arc;

    use super::*;
    use crate::lattice::Region;

    fn square() -> Arc<Region> {
        Arc::new(Region::boxed(vec![0, 0], vec![1, 1], Vertex(vec![0, 0]), Vertex(vec![1, 0])).unwrap())
    }

    fn direct(region: &Region) -> EdgeId {
        region.edge_id(&Edge::new(Vertex(vec![0, 0]), 0)).unwrap()
    }

    #[test]
    fn constant_weights_give_l1_distance() {
        let region = Arc::new(Region::around(&Vertex(vec![3, 0]), Some(2)).unwrap());
        for c in [1.0, 2.5] {
            let config = WeightConfig::constant(region.clone(), c, c == 1.0);
            let sp = shortest_path(&config, region.origin(), region.target()).unwrap();
            assert_eq!(sp.time, 3.0 * c);
            assert_eq!(sp.path.len(), 3);
            assert_eq!(config.path_weight(&sp.path), sp.time);
            assert!(!sp.touched_boundary);
        }
    }

    #[test]
    fn expensive_direct_edge_forces_detour() {
        let region = Arc::new(Region::boxed(vec![0, 0], vec![1, 2], Vertex(vec![0, 0]), Vertex(vec![1, 0])).unwrap());
        let e = direct(&region);
        let config = WeightConfig::from_fn(region.clone(), true, |id| if id == e { 5.0 } else { 1.0 });
        let sp = shortest_path(&config, region.origin(), region.target()).unwrap();
        assert_eq!(sp.time, 3.0);
        assert_eq!(sp.path.len(), 3);
    }

    #[test]
    fn unit_square_replacement_values() {
        let region = square();
        let config = WeightConfig::constant(region.clone(), 1.0, true);
        let (o, v) = (region.origin().clone(), region.target().clone());
        let rv = replacement_values(&config, &Edge::new(Vertex(vec![0, 0]), 0), &o, &v).unwrap();
        assert_eq!(rv, ReplacementValues { a: 3.0, b: 0.0 });
        let top = Edge::new(Vertex(vec![0, 1]), 0);
        let rv = replacement_values(&config, &top, &o, &v).unwrap();
        assert_eq!(rv, ReplacementValues { a: 1.0, b: 2.0 });
    }

    #[test]
    fn unit_square_intersections() {
        let region = square();
        let e = direct(&region);
        let (o, v) = (region.origin().clone(), region.target().clone());
        let cheap = WeightConfig::constant(region.clone(), 1.0, true);
        let g = geodesic(&cheap, &o, &v).unwrap();
        assert_eq!((g.time, g.pi.clone()), (1.0, vec![e]));
        let dear = cheap.with_weight(e, 3.0);
        let g = geodesic(&dear, &o, &v).unwrap();
        assert_eq!(g.time, 3.0);
        assert!(g.pi.is_empty());
        assert_eq!(enumerate_all_geodesics(&dear, &o, &v).unwrap().len(), 2);
    }

    #[test]
    fn staircases_on_two_by_two() {
        let region = Arc::new(Region::grid2(2, 2).unwrap());
        let config = WeightConfig::constant(region.clone(), 1.0, true);
        let all = enumerate_all_geodesics(&config, region.origin(), region.target()).unwrap();
        assert_eq!(all.len(), 2);
        assert!(geodesic_intersection(&config, region.origin(), region.target()).unwrap().is_empty());
    }

    #[test]
    fn straight_geodesic_is_unique_for_constant_weights() {
        let region = Arc::new(Region::boxed(vec![-1, -2], vec![3, 2], Vertex(vec![0, 0]), Vertex(vec![2, 0])).unwrap());
        assert_eq!(region.n_edges(), 40);
        let config = WeightConfig::constant(region.clone(), 1.0, true);
        let all = enumerate_all_geodesics(&config, region.origin(), region.target()).unwrap();
        assert_eq!(all.len(), 1);
        let pi = geodesic_intersection(&config, region.origin(), region.target()).unwrap();
        assert_eq!(pi.len(), 2);
    }

    #[test]
    fn zero_weights_use_deletion_test() {
        let region = Arc::new(Region::grid2(3, 2).unwrap());
        let e = region.edge_id(&Edge::new(Vertex(vec![0, 0]), 1)).unwrap();
        let config = WeightConfig::from_fn(region.clone(), true, |id| if id == e { 0.0 } else { 1.0 });
        let g = geodesic(&config, region.origin(), region.target()).unwrap();
        let all = enumerate_all_geodesics(&config, region.origin(), region.target()).unwrap();
        let common: Vec<EdgeId> = all[0].iter().copied().filter(|id| all.iter().all(|p| p.contains(id))).collect();
        let mut common = common;
        common.sort();
        assert_eq!(g.pi, common);
    }

    #[test]
    fn enumeration_guard() {
        let region = Arc::new(Region::grid2(6, 6).unwrap());
        let config = WeightConfig::constant(region.clone(), 1.0, true);
        assert!(matches!(
            enumerate_all_geodesics(&config, region.origin(), region.target()),
            Err(Error::RegionTooLarge { .. })
        ));
    }

    #[test]
    fn boundary_flag() {
        let region = Arc::new(Region::grid2(3, 3).unwrap());
        let config = WeightConfig::constant(region.clone(), 1.0, true);
        assert!(shortest_path(&config, region.origin(), region.target()).unwrap().touched_boundary);
    }
}
