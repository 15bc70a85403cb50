//! Per-edge profiles of the discrete derivative of the passage time.
//!
//! Replacing the weight of edge `e` by `x` gives `T = min(A, B + x)`, so the
//! centred derivative `D(x) = T(x) - ∫ T(y) dF(y)` has the shape
//! `H - (Z - x)_+` with `Z = max(r, A - B)` and `H = ∫ (Z - y)_+ dF(y)`.
//! `Y = max(r, Z - H)` is where `D` turns nonnegative.

use serde::Serialize;

use crate::distributions::WeightDistribution;
use crate::error::{Error, Result};
use crate::field::WeightConfig;
use crate::geodesy::{replacement_values, ReplacementValues};
use crate::lattice::Edge;

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct EdgeProfile {
    pub a: f64,
    pub b: f64,
    pub z: f64,
    pub h: f64,
    pub y: f64,
}

impl EdgeProfile {
    pub fn from_replacement(rv: ReplacementValues, dist: &WeightDistribution) -> Result<Self> {
        if rv.disconnected() {
            return Err(Error::Disconnected);
        }
        let r = dist.r();
        let z = r.max(rv.a - rv.b);
        let h = dist.expect_positive_part(z);
        Ok(EdgeProfile {
            a: rv.a,
            b: rv.b,
            z,
            h,
            y: r.max(z - h),
        })
    }

    /// A profile assembled from raw thresholds, for harness checks. It need
    /// not be consistent with any weight configuration.
    pub fn synthetic(z: f64, h: f64, y: f64) -> Self {
        EdgeProfile { a: z, b: 0.0, z, h, y }
    }

    /// The identically zero profile of an edge that cannot matter.
    pub fn zero(dist: &WeightDistribution) -> Self {
        let r = dist.r();
        EdgeProfile {
            a: r,
            b: 0.0,
            z: r,
            h: 0.0,
            y: r,
        }
    }

    pub fn is_zero(&self) -> bool {
        self.h == 0.0
    }

    /// `D(x) = H - (Z - x)_+`.
    pub fn derivative(&self, x: f64) -> f64 {
        self.h - (self.z - x).max(0.0)
    }

    /// Negative part `(D(x))_- = (Z - H - x)_+` of the derivative.
    pub fn derivative_negative_part(&self, x: f64) -> f64 {
        (-self.derivative(x)).max(0.0)
    }
}

/// Profile of edge `e` for the passage time between the region's endpoints.
pub fn edge_profile(config: &WeightConfig, e: &Edge, dist: &WeightDistribution) -> Result<EdgeProfile> {
    let region = config.region();
    let rv = replacement_values(config, e, region.origin(), region.target())?;
    EdgeProfile::from_replacement(rv, dist)
}

/// `∫ (a - x)_+ (b - x)_+ dF(x)`.
fn product_of_positive_parts(a: f64, b: f64, dist: &WeightDistribution) -> f64 {
    let c = a.min(b);
    if c <= dist.r() {
        return 0.0;
    }
    a * b * dist.cdf(c) - (a + b) * dist.partial_moment(1, c) + dist.partial_moment(2, c)
}

/// `∫ D_0(x) D_t(x) dF(x)` for two profiles of the same edge.
///
/// Expanding the product and using `∫ (Z - x)_+ dF = H` leaves
/// `∫ (Z_0 - x)_+ (Z_t - x)_+ dF - H_0 H_t`, where only `x < min(Z_0, Z_t)`
/// contributes to the integral.
pub fn co_influence_term(p0: &EdgeProfile, pt: &EdgeProfile, dist: &WeightDistribution) -> f64 {
    if p0.is_zero() || pt.is_zero() {
        return 0.0;
    }
    product_of_positive_parts(p0.z, pt.z, dist) - p0.h * pt.h
}

/// `∫ (D_0)_-(x) (D_t)_-(x) dF(x)`, using `(D)_- = (Y - x)_+` on the support.
pub fn negative_part_term(p0: &EdgeProfile, pt: &EdgeProfile, dist: &WeightDistribution) -> f64 {
    product_of_positive_parts(p0.y, pt.y, dist)
}
