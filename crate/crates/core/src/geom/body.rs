//! Convex bodies: polygonal or support-series backed, plus the operations
//! shared by both representations (reflection, difference body, affine
//! diameters, JSON interchange).

use serde::{Deserialize, Serialize};

use super::polygon::ConvexPolygon;
use super::support::{wrap_angle, SupportBody};
use super::vec::Vec2;
use crate::error::{Error, Result};

/// A planar convex body in one of the two supported representations.
#[derive(Debug, Clone, PartialEq)]
pub enum ConvexBody {
    Polygon(ConvexPolygon),
    Support(SupportBody),
}

impl From<ConvexPolygon> for ConvexBody {
    fn from(p: ConvexPolygon) -> Self {
        ConvexBody::Polygon(p)
    }
}

impl From<SupportBody> for ConvexBody {
    fn from(s: SupportBody) -> Self {
        ConvexBody::Support(s)
    }
}

impl ConvexBody {
    pub fn area(&self) -> f64 {
        match self {
            ConvexBody::Polygon(p) => p.area(),
            ConvexBody::Support(s) => s.area(),
        }
    }

    pub fn centroid(&self) -> Vec2 {
        match self {
            ConvexBody::Polygon(p) => p.centroid(),
            ConvexBody::Support(s) => s.centroid(),
        }
    }

    pub fn translate(&self, t: Vec2) -> ConvexBody {
        match self {
            ConvexBody::Polygon(p) => ConvexBody::Polygon(p.translate(t)),
            ConvexBody::Support(s) => ConvexBody::Support(s.translate(t)),
        }
    }

    /// The body `{2c - p : p ∈ K}`.
    pub fn reflect_about(&self, c: Vec2) -> ConvexBody {
        match self {
            ConvexBody::Polygon(p) => ConvexBody::Polygon(p.reflect_about(c)),
            ConvexBody::Support(s) => ConvexBody::Support(s.reflect_about(c)),
        }
    }

    /// Support value in direction `u` (`u` need not be unit).
    pub fn support(&self, u: Vec2) -> f64 {
        match self {
            ConvexBody::Polygon(p) => p.support(u),
            ConvexBody::Support(s) => s.support(u),
        }
    }

    pub fn bounding_box(&self) -> (Vec2, Vec2) {
        match self {
            ConvexBody::Polygon(p) => p.bounding_box(),
            ConvexBody::Support(s) => {
                let hx = s.h(0.0);
                let hy = s.h(std::f64::consts::FRAC_PI_2);
                let hmx = s.h(std::f64::consts::PI);
                let hmy = s.h(1.5 * std::f64::consts::PI);
                (Vec2::new(-hmx, -hmy), Vec2::new(hx, hy))
            }
        }
    }

    /// Maximal width of the body.
    pub fn diameter(&self) -> f64 {
        match self {
            ConvexBody::Support(s) => s.diameter(),
            ConvexBody::Polygon(p) => {
                let mut best: f64 = 0.0;
                for a in p.vertices() {
                    for b in p.vertices() {
                        best = best.max((*a - *b).norm());
                    }
                }
                best
            }
        }
    }

    pub fn contains(&self, z: Vec2, tol: f64) -> bool {
        match self {
            ConvexBody::Polygon(p) => p.contains(z, tol),
            ConvexBody::Support(s) => s.contains(z, tol),
        }
    }

    /// Distance from `z` to the boundary (unsigned).
    pub fn boundary_distance(&self, z: Vec2) -> f64 {
        match self {
            ConvexBody::Polygon(p) => p.boundary_distance(z),
            ConvexBody::Support(s) => s.signed_boundary_distance(z).0.abs(),
        }
    }

    /// Dense counterclockwise boundary sample (for comparison metrics).
    pub fn boundary_samples(&self, n: usize) -> Vec<Vec2> {
        match self {
            ConvexBody::Support(s) => (0..n)
                .map(|i| s.boundary_point(std::f64::consts::TAU * i as f64 / n as f64))
                .collect(),
            ConvexBody::Polygon(p) => {
                // Arc-length-uniform walk along the edges.
                let verts = p.vertices();
                let m = verts.len();
                let mut lens = Vec::with_capacity(m);
                let mut total = 0.0;
                for i in 0..m {
                    let l = (verts[(i + 1) % m] - verts[i]).norm();
                    lens.push(l);
                    total += l;
                }
                let mut out = Vec::with_capacity(n);
                let step = total / n as f64;
                let mut edge = 0usize;
                let mut along = 0.0;
                for _ in 0..n {
                    while along > lens[edge] {
                        along -= lens[edge];
                        edge = (edge + 1) % m;
                    }
                    let t = along / lens[edge];
                    out.push(verts[edge] + (verts[(edge + 1) % m] - verts[edge]) * t);
                    along += step;
                }
                out
            }
        }
    }
}

/// Reflection of a body through the point `c`.
pub fn reflect_about(body: &ConvexBody, c: Vec2) -> ConvexBody {
    body.reflect_about(c)
}

/// Difference body K + (-K); centrally symmetric about the origin, and the
/// support of the covariogram of K.
pub fn difference_body(body: &ConvexBody) -> ConvexBody {
    match body {
        ConvexBody::Support(s) => ConvexBody::Support(s.difference_body()),
        ConvexBody::Polygon(p) => {
            let neg = p.reflect_about(Vec2::ZERO);
            ConvexBody::Polygon(p.minkowski_sum(&neg))
        }
    }
}

/// Whether the chord `[q1, q2]` is an affine diameter of `body`: both
/// endpoints must lie on the boundary within `tol`, and the test holds iff
/// `q1 - q2` is within `tol` of the boundary of the difference body.
pub fn is_affine_diameter(body: &ConvexBody, q1: Vec2, q2: Vec2, tol: f64) -> Result<bool> {
    for q in [q1, q2] {
        let d = body.boundary_distance(q);
        if d > tol {
            return Err(Error::NotOnBoundary(q.x, q.y, d));
        }
    }
    let dk = difference_body(body);
    Ok(dk.boundary_distance(q1 - q2) <= tol)
}

/// A counterclockwise boundary arc, sampled densely.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct BoundaryArc {
    /// Normal angle at the arc start (support bodies), canonicalized to
    /// `[0, 2π)`.
    pub start_angle: f64,
    /// Normal angle at the arc end; may exceed 2π to encode wraparound.
    pub end_angle: f64,
    /// Sampled boundary points in counterclockwise order.
    pub samples: Vec<Vec2>,
}

impl BoundaryArc {
    /// Samples the counterclockwise arc of `body` from normal angle
    /// `start` to `end` (unwrapped upward when `end <= start`).
    pub fn sample(body: &SupportBody, start: f64, end: f64, n: usize) -> BoundaryArc {
        let start = wrap_angle(start);
        let mut end = end;
        while end <= start {
            end += std::f64::consts::TAU;
        }
        let samples = (0..n)
            .map(|i| {
                let t = start + (end - start) * i as f64 / (n - 1).max(1) as f64;
                body.boundary_point(t)
            })
            .collect();
        BoundaryArc {
            start_angle: start,
            end_angle: end,
            samples,
        }
    }
}

/// JSON interchange form of a body:
/// `{"type":"polygon","vertices":[[x,y],...]}` or
/// `{"type":"support","a0":r,"cos":[...],"sin":[...]}`.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "lowercase")]
pub enum BodyJson {
    Polygon { vertices: Vec<[f64; 2]> },
    Support {
        a0: f64,
        #[serde(default)]
        cos: Vec<f64>,
        #[serde(default)]
        sin: Vec<f64>,
    },
}

impl ConvexBody {
    pub fn to_json(&self) -> BodyJson {
        match self {
            ConvexBody::Polygon(p) => BodyJson::Polygon {
                vertices: p.vertices().iter().map(|v| [v.x, v.y]).collect(),
            },
            ConvexBody::Support(s) => BodyJson::Support {
                a0: s.coefficient_a0(),
                cos: s.cos_coeffs().to_vec(),
                sin: s.sin_coeffs().to_vec(),
            },
        }
    }

    pub fn from_json(json: BodyJson) -> Result<ConvexBody> {
        match json {
            BodyJson::Polygon { vertices } => {
                let pts = vertices.into_iter().map(|[x, y]| Vec2::new(x, y)).collect();
                Ok(ConvexBody::Polygon(ConvexPolygon::new(pts)?))
            }
            BodyJson::Support { a0, cos, sin } => {
                Ok(ConvexBody::Support(SupportBody::new(a0, cos, sin)?))
            }
        }
    }

    pub fn from_json_str(text: &str) -> Result<ConvexBody> {
        let json: BodyJson = serde_json::from_str(text)?;
        ConvexBody::from_json(json)
    }

    pub fn to_json_string(&self) -> String {
        serde_json::to_string_pretty(&self.to_json()).expect("body serialization cannot fail")
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn unit_square() -> ConvexBody {
        ConvexBody::Polygon(
            ConvexPolygon::new(vec![
                Vec2::new(0.0, 0.0),
                Vec2::new(1.0, 0.0),
                Vec2::new(1.0, 1.0),
                Vec2::new(0.0, 1.0),
            ])
            .unwrap(),
        )
    }

    #[test]
    fn difference_body_of_square() {
        let d = difference_body(&unit_square());
        assert!((d.area() - 4.0).abs() < 1e-12);
        let (lo, hi) = d.bounding_box();
        assert!((lo - Vec2::new(-1.0, -1.0)).norm() < 1e-12);
        assert!((hi - Vec2::new(1.0, 1.0)).norm() < 1e-12);
    }

    #[test]
    fn difference_body_of_disk_is_double_disk() {
        let disk = ConvexBody::Support(SupportBody::disk(1.0).unwrap());
        let d = difference_body(&disk);
        match &d {
            ConvexBody::Support(s) => {
                assert!((s.h(0.3) - 2.0).abs() < 1e-14);
            }
            _ => panic!("expected support body"),
        }
    }

    #[test]
    fn affine_diameter_of_disk() {
        let disk = ConvexBody::Support(SupportBody::disk(1.0).unwrap());
        assert!(is_affine_diameter(&disk, Vec2::new(1.0, 0.0), Vec2::new(-1.0, 0.0), 1e-9).unwrap());
        assert!(!is_affine_diameter(&disk, Vec2::new(1.0, 0.0), Vec2::new(0.0, 1.0), 1e-9).unwrap());
    }

    #[test]
    fn affine_diameter_needs_boundary_points() {
        let disk = ConvexBody::Support(SupportBody::disk(1.0).unwrap());
        assert!(is_affine_diameter(&disk, Vec2::new(0.5, 0.0), Vec2::new(-1.0, 0.0), 1e-9).is_err());
    }

    #[test]
    fn opposite_normal_points_form_affine_diameters() {
        let body = SupportBody::new(1.0, vec![0.0, 0.0, 0.1], vec![]).unwrap();
        let k = ConvexBody::Support(body.clone());
        for i in 0..16 {
            let th = std::f64::consts::TAU * i as f64 / 16.0;
            let q1 = body.boundary_point(th);
            let q2 = body.boundary_point(th + PI);
            assert!(is_affine_diameter(&k, q1, q2, 1e-9).unwrap(), "theta {th}");
        }
    }

    #[test]
    fn body_json_roundtrip() {
        let b = unit_square();
        let s = b.to_json_string();
        let back = ConvexBody::from_json_str(&s).unwrap();
        assert!((back.area() - 1.0).abs() < 1e-14);

        let sb = ConvexBody::Support(SupportBody::new(1.0, vec![0.0, 0.0, 0.1], vec![]).unwrap());
        let s = sb.to_json_string();
        let back = ConvexBody::from_json_str(&s).unwrap();
        assert!((back.area() - sb.area()).abs() < 1e-14);
    }

    #[test]
    fn malformed_json_rejected() {
        assert!(ConvexBody::from_json_str("{\"type\":\"polygon\",\"vertices\":[[0,0],[1,0]]}").is_err());
    }
}
