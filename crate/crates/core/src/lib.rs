//! Dynamical first-passage percolation on `Z^d`.
//!
//! Edge weights are resampled one edge at a time as a time parameter moves
//! from 0 to 1. The crate computes passage times, geodesics and the
//! intersection of all geodesics, per-edge replacement values and
//! co-influences, Monte Carlo estimators for variance, covariance and
//! geodesic overlap, and exact enumeration oracles on tiny product spaces.

pub mod distributions;
pub mod error;
pub mod experiments;
pub mod field;
pub mod geodesy;
pub mod influence;
pub mod lattice;
pub mod oracle;
pub mod rng;
pub mod stats;

pub use distributions::{DistributionKind, WeightDistribution};
pub use error::{Error, Result};
pub use field::{DynamicalField, Realization, Stream, WeightConfig};
pub use geodesy::{enumerate_all_geodesics, geodesic, geodesic_intersection, replacement_values, shortest_path, GeodesicResult, ReplacementEngine, ReplacementValues, ShortestPath};
pub use lattice::{Edge, EdgeId, Region, Vertex};
