//! Finite boxes of the `Z^d` nearest-neighbour lattice.
//!
//! Vertices inside a [`Region`] are addressed by a mixed-radix index whose
//! most significant digit is the first coordinate, so index order coincides
//! with lexicographic order of coordinates. Edge slots are
//! `axis * n_vertices + index(base)`; slots whose base sits on the upper face
//! along `axis` do not correspond to edges.

use std::fmt;

use serde::Serialize;

use crate::error::{Error, Result};

pub const MIN_PADDING: i64 = 16;

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct Vertex(pub Vec<i64>);

impl Vertex {
    pub fn origin(d: usize) -> Self {
        Vertex(vec![0; d])
    }

    /// `n * e_1` in `d` dimensions.
    pub fn on_axis(d: usize, n: i64) -> Self {
        let mut c = vec![0; d];
        c[0] = n;
        Vertex(c)
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn l1_norm(&self) -> i64 {
        self.0.iter().map(|c| c.abs()).sum()
    }
}

impl fmt::Display for Vertex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.0.iter().map(|c| c.to_string()).collect();
        write!(f, "{}", parts.join(","))
    }
}

impl From<Vec<i64>> for Vertex {
    fn from(c: Vec<i64>) -> Self {
        Vertex(c)
    }
}

/// The undirected edge `{base, base + e_axis}`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct Edge {
    pub base: Vertex,
    pub axis: usize,
}

impl Edge {
    pub fn new(base: Vertex, axis: usize) -> Self {
        Edge { base, axis }
    }

    /// Canonical form of the edge joining two nearest neighbours.
    pub fn between(a: &Vertex, b: &Vertex) -> Option<Self> {
        if a.dim() != b.dim() {
            return None;
        }
        let diffs: Vec<(usize, i64)> = a.0.iter().zip(&b.0).map(|(x, y)| y - x).enumerate().filter(|(_, d)| *d != 0).collect();
        match diffs.as_slice() {
            [(axis, 1)] => Some(Edge::new(a.clone(), *axis)),
            [(axis, -1)] => Some(Edge::new(b.clone(), *axis)),
            _ => None,
        }
    }

    pub fn head(&self) -> Vertex {
        let mut c = self.base.0.clone();
        c[self.axis] += 1;
        Vertex(c)
    }
}

/// Dense index of an edge slot inside a region.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct EdgeId(pub usize);

/// An inclusive box `lo..=hi` together with the two endpoints of interest.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Region {
    lo: Vec<i64>,
    hi: Vec<i64>,
    sizes: Vec<usize>,
    strides: Vec<usize>,
    n_vertices: usize,
    origin: Vertex,
    target: Vertex,
    padding: i64,
}

/// Padding used when none is configured: `max(ceil(0.75 |v|_1), 16)`.
pub fn default_padding(v: &Vertex) -> i64 {
    let l1 = v.l1_norm();
    ((3 * l1 + 3) / 4).max(MIN_PADDING)
}

impl Region {
    /// Bounding box of `{0, v}` inflated by `padding` in every coordinate.
    pub fn around(target: &Vertex, padding: Option<i64>) -> Result<Self> {
        let d = target.dim();
        if d < 2 {
            return Err(Error::InvalidRegion(format!("dimension must be at least 2, got {d}")));
        }
        let pad = padding.unwrap_or_else(|| default_padding(target));
        if pad < 0 {
            return Err(Error::InvalidRegion(format!("padding {pad} is negative")));
        }
        let lo = target.0.iter().map(|&c| c.min(0) - pad).collect();
        let hi = target.0.iter().map(|&c| c.max(0) + pad).collect();
        Self::build(lo, hi, Vertex::origin(d), target.clone(), pad)
    }

    /// An explicit box. Both endpoints must lie inside it.
    pub fn boxed(lo: Vec<i64>, hi: Vec<i64>, origin: Vertex, target: Vertex) -> Result<Self> {
        Self::build(lo, hi, origin, target, 0)
    }

    /// The box `[0, nx-1] x [0, ny-1]` with endpoints at two opposite corners.
    pub fn grid2(nx: i64, ny: i64) -> Result<Self> {
        Self::boxed(vec![0, 0], vec![nx - 1, ny - 1], Vertex(vec![0, 0]), Vertex(vec![nx - 1, ny - 1]))
    }

    fn build(lo: Vec<i64>, hi: Vec<i64>, origin: Vertex, target: Vertex, padding: i64) -> Result<Self> {
        let d = lo.len();
        if d < 2 || hi.len() != d || origin.dim() != d || target.dim() != d {
            return Err(Error::InvalidRegion("dimension mismatch or d < 2".into()));
        }
        if lo.iter().zip(&hi).any(|(l, h)| h < l) {
            return Err(Error::InvalidRegion(format!("empty box {lo:?}..={hi:?}")));
        }
        let sizes: Vec<usize> = lo.iter().zip(&hi).map(|(l, h)| (h - l + 1) as usize).collect();
        let mut strides = vec![1usize; d];
        for k in (0..d - 1).rev() {
            strides[k] = strides[k + 1] * sizes[k + 1];
        }
        let n_vertices = strides[0] * sizes[0];
        let region = Region {
            lo,
            hi,
            sizes,
            strides,
            n_vertices,
            origin,
            target,
            padding,
        };
        for endpoint in [&region.origin, &region.target] {
            if !region.contains(endpoint) {
                return Err(Error::InvalidRegion(format!("endpoint {endpoint} lies outside the box")));
            }
        }
        Ok(region)
    }

    /// The same endpoints with the padding multiplied by `factor`.
    pub fn scaled_padding(&self, factor: i64) -> Result<Self> {
        Self::around(&self.target, Some(self.padding * factor))
    }

    pub fn dim(&self) -> usize {
        self.lo.len()
    }

    pub fn lo(&self) -> &[i64] {
        &self.lo
    }

    pub fn hi(&self) -> &[i64] {
        &self.hi
    }

    pub fn padding(&self) -> i64 {
        self.padding
    }

    pub fn origin(&self) -> &Vertex {
        &self.origin
    }

    pub fn target(&self) -> &Vertex {
        &self.target
    }

    pub fn n_vertices(&self) -> usize {
        self.n_vertices
    }

    /// Number of edge slots, including the unused ones on upper faces.
    pub fn n_edge_slots(&self) -> usize {
        self.n_vertices * self.dim()
    }

    pub fn n_edges(&self) -> usize {
        (0..self.dim())
            .map(|axis| self.n_vertices / self.sizes[axis] * (self.sizes[axis] - 1))
            .sum()
    }

    pub fn contains(&self, v: &Vertex) -> bool {
        v.dim() == self.dim() && v.0.iter().zip(self.lo.iter().zip(&self.hi)).all(|(c, (l, h))| l <= c && c <= h)
    }

    pub fn vertex_index(&self, v: &Vertex) -> Result<usize> {
        if !self.contains(v) {
            return Err(Error::VertexOutsideRegion(v.0.clone()));
        }
        Ok(v.0.iter().enumerate().map(|(k, c)| (c - self.lo[k]) as usize * self.strides[k]).sum())
    }

    pub fn vertex_at(&self, index: usize) -> Vertex {
        Vertex((0..self.dim()).map(|k| self.coord(index, k) as i64 + self.lo[k]).collect())
    }

    /// Offset of the `k`-th coordinate of vertex `index` from `lo[k]`.
    #[inline]
    pub fn coord(&self, index: usize, k: usize) -> usize {
        (index / self.strides[k]) % self.sizes[k]
    }

    pub fn edge_id(&self, e: &Edge) -> Result<EdgeId> {
        let outside = || Error::EdgeOutsideRegion {
            base: e.base.0.clone(),
            axis: e.axis,
        };
        if e.axis >= self.dim() || !self.contains(&e.base) || e.base.0[e.axis] >= self.hi[e.axis] {
            return Err(outside());
        }
        let base = self.vertex_index(&e.base).map_err(|_| outside())?;
        Ok(EdgeId(e.axis * self.n_vertices + base))
    }

    pub fn edge_at(&self, id: EdgeId) -> Edge {
        let (base, axis) = self.split_slot(id);
        Edge::new(self.vertex_at(base), axis)
    }

    #[inline]
    fn split_slot(&self, id: EdgeId) -> (usize, usize) {
        (id.0 % self.n_vertices, id.0 / self.n_vertices)
    }

    /// Whether an edge slot is an actual edge of the box.
    #[inline]
    pub fn is_edge(&self, id: EdgeId) -> bool {
        let (base, axis) = self.split_slot(id);
        axis < self.dim() && self.coord(base, axis) + 1 < self.sizes[axis]
    }

    /// Vertex indices of the two endpoints, lower one first.
    #[inline]
    pub fn endpoints(&self, id: EdgeId) -> (usize, usize) {
        let (base, axis) = self.split_slot(id);
        (base, base + self.strides[axis])
    }

    pub fn edge_between(&self, a: usize, b: usize) -> Option<EdgeId> {
        let (lo, hi) = if a < b { (a, b) } else { (b, a) };
        (0..self.dim()).find_map(|axis| {
            (hi - lo == self.strides[axis] && self.coord(lo, axis) + 1 < self.sizes[axis])
                .then(|| EdgeId(axis * self.n_vertices + lo))
        })
    }

    pub fn edge_ids(&self) -> impl Iterator<Item = EdgeId> + '_ {
        (0..self.n_edge_slots()).map(EdgeId).filter(move |&id| self.is_edge(id))
    }

    /// Calls `f(neighbour, edge)` for every lattice neighbour of `v` inside the box.
    #[inline]
    pub fn for_each_neighbor(&self, v: usize, mut f: impl FnMut(usize, EdgeId)) {
        for axis in 0..self.dim() {
            let stride = self.strides[axis];
            let c = self.coord(v, axis);
            if c > 0 {
                f(v - stride, EdgeId(axis * self.n_vertices + v - stride));
            }
            if c + 1 < self.sizes[axis] {
                f(v + stride, EdgeId(axis * self.n_vertices + v));
            }
        }
    }

    pub fn on_boundary(&self, v: usize) -> bool {
        (0..self.dim()).any(|k| {
            let c = self.coord(v, k);
            c == 0 || c + 1 == self.sizes[k]
        })
    }

    pub fn origin_index(&self) -> usize {
        self.vertex_index(&self.origin).expect("origin inside region")
    }

    pub fn target_index(&self) -> usize {
        self.vertex_index(&self.target).expect("target inside region")
    }
}
