//! Chord-length distributions: the radial derivative -d/dr g(r u) equals
//! the measure of lines parallel to u whose chord through the body is
//! longer than r.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geom::{ConvexBody, Vec2};

use super::lens::SelfOverlap;
use super::DEFAULT_POLYGONIZE;

/// Survival function of chord lengths in a fixed direction: `exceedance[i]`
/// is the 1-D measure of lines parallel to `direction` whose chord length
/// exceeds `radii[i]`.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ChordLengthDistribution {
    pub direction: Vec2,
    pub radii: Vec<f64>,
    pub exceedance: Vec<f64>,
}

/// Computes F(r) = -d/dr g(r u) by central differences along the ray
/// (one-sided at r below the step). Radii beyond the maximal chord report
/// zero. `direction` must be a unit vector.
pub fn chord_length_cdf(
    body: &ConvexBody,
    direction: Vec2,
    radii: &[f64],
) -> Result<ChordLengthDistribution> {
    if !direction.is_finite() || (direction.norm() - 1.0).abs() > 1e-9 {
        return Err(Error::NonFinite("direction must be a unit vector"));
    }
    let overlap = match body {
        ConvexBody::Polygon(p) => SelfOverlap::new(p.clone()),
        ConvexBody::Support(s) => SelfOverlap::new(s.polygonize(DEFAULT_POLYGONIZE)?),
    };
    let diam = ConvexBody::Polygon(overlap.difference_polygon().clone()).diameter();
    let step = 1e-4 * diam;
    let g = |r: f64| overlap.value(direction * r);
    let mut exceedance = Vec::with_capacity(radii.len());
    for &r in radii {
        if !(r >= 0.0) {
            return Err(Error::NonFinite("radii must be >= 0"));
        }
        let f = if r < step {
            -(g(r + step) - g(r)) / step
        } else {
            -(g(r + step) - g(r - step)) / (2.0 * step)
        };
        exceedance.push(f.max(0.0));
    }
    Ok(ChordLengthDistribution {
        direction,
        radii: radii.to_vec(),
        exceedance,
    })
}
