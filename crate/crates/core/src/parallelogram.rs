//! The inscribed parallelogram attached to a lag vector.
//!
//! For a strictly convex, C¹-regular body K and a lag x strictly inside the
//! support of the covariogram (minus the origin), the boundaries of K and
//! K + x cross at exactly two points. Those two points and their translates
//! by -x form a parallelogram inscribed in K whose edges are x and the
//! vector D; the covariogram gradient is the quarter-turn of D, and the
//! outward normals at the four vertices carry the whole Hessian.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geom::support::{wrap_angle, SupportBody};
use crate::geom::vec::{det2, rot90, rot90_inv, Mat2, Vec2};

/// Fraction of the difference-body diameter kept clear of the excluded loci
/// (origin and support boundary) when accepting lags.
const LAG_MARGIN_FRACTION: f64 = 1e-6;

/// Number of samples in the first bracketing scan for boundary crossings.
const SCAN_SAMPLES: usize = 256;

/// Parallelogram inscribed in a body, vertices counterclockwise, with the
/// outward unit normals at the vertices.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct InscribedParallelogram {
    /// The lag vector; vertices satisfy v[0] - v[1] = lag = v[3] - v[2].
    pub lag: Vec2,
    /// Vertices in counterclockwise order on the body boundary.
    pub vertices: [Vec2; 4],
    /// Outward unit normals of the body at the vertices.
    pub normals: [Vec2; 4],
    /// Gauss-map angles of the normals, in [0, 2π).
    pub normal_angles: [f64; 4],
    /// The non-lag edge vector, v[0] - v[3].
    pub edge: Vec2,
}

impl InscribedParallelogram {
    /// Vertex by 1-based cyclic index.
    #[inline]
    pub fn vertex(&self, i: usize) -> Vec2 {
        self.vertices[(i + 3) % 4]
    }

    /// Normal by 1-based cyclic index.
    #[inline]
    pub fn normal(&self, i: usize) -> Vec2 {
        self.normals[(i + 3) % 4]
    }

    /// Center of the parallelogram (midpoint of both diagonals).
    pub fn center(&self) -> Vec2 {
        (self.vertices[0] + self.vertices[2]) * 0.5
    }

    /// The diagonal chord vector v[0] - v[2] = lag + edge.
    pub fn diagonal(&self) -> Vec2 {
        self.vertices[0] - self.vertices[2]
    }

    /// An always-admissible probe direction for the normal-fan
    /// quadrilateral: the outward normal of the side [v4, v1].
    pub fn edge_probe(&self) -> Vec2 {
        rot90_inv(self.edge).normalized().expect("edge is nonzero")
    }
}

/// Checks that the lag is admissible for `body` and returns the difference
/// body and margin.
fn check_lag(body: &SupportBody, x: Vec2) -> Result<(SupportBody, f64)> {
    if !x.is_finite() {
        return Err(Error::NonFinite("lag"));
    }
    let dk = body.difference_body();
    let margin = LAG_MARGIN_FRACTION * dk.diameter();
    let (sd, _) = dk.signed_boundary_distance(x);
    if x.norm() < margin || sd > -margin {
        return Err(Error::OutsideDomain);
    }
    Ok((dk, margin))
}

/// Finds the two crossing angles of bd K and bd K + x: roots of
/// f(θ) = signed distance of p(θ) - x from bd K, bracketed by a uniform
/// scan and polished by bisection plus a secant step to 1e-12 in θ.
fn crossing_angles(body: &SupportBody, x: Vec2) -> Result<(f64, f64)> {
    let f = |theta: f64| body.signed_boundary_distance(body.boundary_point(theta) - x).0;
    let tau = std::f64::consts::TAU;
    let mut n = SCAN_SAMPLES;
    for _ in 0..4 {
        let values: Vec<f64> = (0..=n).map(|i| f(tau * i as f64 / n as f64)).collect();
        let mut roots = Vec::new();
        for i in 0..n {
            let (a, b) = (values[i], values[i + 1]);
            if a == 0.0 {
                roots.push(tau * i as f64 / n as f64);
            } else if a * b < 0.0 {
                let lo = tau * i as f64 / n as f64;
                let hi = tau * (i + 1) as f64 / n as f64;
                roots.push(polish_root(&f, lo, hi, a, b));
            }
        }
        if roots.len() == 2 {
            return Ok((roots[0], roots[1]));
        }
        n *= 2;
    }
    Err(Error::CrossingSearch(format!(
        "expected 2 transversal crossings for lag ({:.6}, {:.6})",
        x.x, x.y
    )))
}

/// Bisection to tight bracket, then one secant refinement.
fn polish_root(f: &dyn Fn(f64) -> f64, mut lo: f64, mut hi: f64, mut flo: f64, mut fhi: f64) -> f64 {
    for _ in 0..60 {
        let mid = 0.5 * (lo + hi);
        if hi - lo < 1e-12 {
            break;
        }
        let fm = f(mid);
        if fm == 0.0 {
            return mid;
        }
        if flo * fm < 0.0 {
            hi = mid;
            fhi = fm;
        } else {
            lo = mid;
            flo = fm;
        }
    }
    let denom = fhi - flo;
    if denom.abs() > 0.0 {
        let sec = lo - flo * (hi - lo) / denom;
        if sec > lo && sec < hi {
            return sec;
        }
    }
    0.5 * (lo + hi)
}

/// Computes the inscribed parallelogram of `body` at lag `x`.
///
/// The first vertex is the crossing for which det2(x, D) > 0, fixing the
/// counterclockwise labeling; the remaining vertices are the translates by
/// -x and the normals come from the Gauss parametrization angles.
pub fn inscribed_parallelogram(body: &SupportBody, x: Vec2) -> Result<InscribedParallelogram> {
    check_lag(body, x)?;
    let (ta, tb) = crossing_angles(body, x)?;
    let pa = body.boundary_point(ta);
    let pb = body.boundary_point(tb);
    let (theta1, p1, theta4, p4) = if det2(x, pa - pb) > 0.0 {
        (ta, pa, tb, pb)
    } else {
        (tb, pb, ta, pa)
    };
    let on_boundary_tol = (body.precision() * 1e3).max(1e-9) * body.diameter().max(1.0);
    let theta2 = body.boundary_angle_of(p1 - x, on_boundary_tol)?;
    let theta3 = body.boundary_angle_of(p4 - x, on_boundary_tol)?;
    let angles = [wrap_angle(theta1), theta2, theta3, wrap_angle(theta4)];
    let vertices = [p1, p1 - x, p4 - x, p4];
    let normals = [
        Vec2::from_angle(angles[0]),
        Vec2::from_angle(angles[1]),
        Vec2::from_angle(angles[2]),
        Vec2::from_angle(angles[3]),
    ];
    for i in 0..4 {
        if det2(normals[i], normals[(i + 1) % 4]) <= 0.0 {
            return Err(Error::CrossingSearch(format!(
                "normals are not in counterclockwise order at lag ({:.6}, {:.6})",
                x.x, x.y
            )));
        }
    }
    Ok(InscribedParallelogram {
        lag: x,
        vertices,
        normals,
        normal_angles: angles,
        edge: p1 - p4,
    })
}

/// Analytic covariogram gradient: the counterclockwise quarter turn of the
/// parallelogram's non-lag edge vector.
pub fn gradient_analytic(body: &SupportBody, x: Vec2) -> Result<Vec2> {
    Ok(rot90(inscribed_parallelogram(body, x)?.edge))
}

/// Convex quadrilateral realizing the geometric action of the covariogram
/// Hessian on a probe vector: corners q1 = probe, q3 = origin, and the i-th
/// parallelogram normal is outward on side [q_i, q_{i+1}].
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct NormalFanQuadrilateral {
    pub probe: Vec2,
    /// q1..q4 counterclockwise; corners[0] = probe, corners[2] = origin.
    pub corners: [Vec2; 4],
    /// Side normals, i.e. the parallelogram's vertex normals.
    pub normals: [Vec2; 4],
}

impl NormalFanQuadrilateral {
    /// The diagonal q4 - q2, which equals -R G(x) probe.
    pub fn diagonal(&self) -> Vec2 {
        self.corners[3] - self.corners[1]
    }
}

/// Builds the normal-fan quadrilateral for lag `x` and probe `h`.
/// Requires the cyclic counterclockwise order u1, u2, -h/|h|, u3, u4, h/|h|
/// on the unit circle.
pub fn quadrilateral_q(body: &SupportBody, x: Vec2, h: Vec2) -> Result<NormalFanQuadrilateral> {
    let par = inscribed_parallelogram(body, x)?;
    quadrilateral_for(&par, h)
}

/// Same as [`quadrilateral_q`] with a precomputed parallelogram.
pub fn quadrilateral_for(
    par: &InscribedParallelogram,
    h: Vec2,
) -> Result<NormalFanQuadrilateral> {
    let hn = h.normalized().ok_or(Error::NonFinite("probe must be nonzero"))?;
    let [u1, u2, u3, u4] = par.normals;
    // Cyclic counterclockwise order u1, u2, -h, u3, u4, h.
    let ring = [u1, u2, -hn, u3, u4, hn];
    for i in 0..6 {
        if det2(ring[i], ring[(i + 1) % 6]) <= 0.0 {
            return Err(Error::CyclicOrder);
        }
    }
    let solve = |a: Vec2, alpha: f64, b: Vec2, beta: f64| -> Result<Vec2> {
        let m = Mat2::new(a.x, a.y, b.x, b.y);
        let inv = m
            .inverse(1e-12)
            .ok_or_else(|| Error::ParallelDirections(m.det().abs()))?;
        Ok(inv.apply(Vec2::new(alpha, beta)))
    };
    // Side [q1,q2] has normal u1 through q1 = h; side [q2,q3] has normal u2
    // through q3 = o; side [q3,q4] has normal u3 through o; side [q4,q1]
    // has normal u4 through h.
    let q2 = solve(u1, h.dot(u1), u2, 0.0)?;
    let q4 = solve(u3, 0.0, u4, h.dot(u4))?;
    Ok(NormalFanQuadrilateral {
        probe: h,
        corners: [h, q2, Vec2::ZERO, q4],
        normals: par.normals,
    })
}

/// Oblique projection onto the line of `v1` along `v2`: the `v1`-component
/// of `y` in the (v1, v2) decomposition.
pub fn oblique_project(v1: Vec2, v2: Vec2, y: Vec2) -> Result<Vec2> {
    let den = det2(v2, v1);
    if den.abs() <= 1e-12 * v1.norm() * v2.norm() {
        return Err(Error::ParallelDirections(den.abs()));
    }
    Ok(v1 * (det2(v2, y) / den))
}

/// Matrix of the oblique projection, `-v1 v2ᵀ R / det(v2, v1)`.
pub fn oblique_projection_matrix(v1: Vec2, v2: Vec2) -> Result<Mat2> {
    let den = det2(v2, v1);
    if den.abs() <= 1e-12 * v1.norm() * v2.norm() {
        return Err(Error::ParallelDirections(den.abs()));
    }
    Ok(Mat2::outer(v1, v2).matmul(Mat2::ROT90).scale(-1.0 / den))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cov::oracle::CovariogramOracle;
    use crate::geom::ConvexBody;
    use crate::sampling::sample_domain;

    fn disk() -> SupportBody {
        SupportBody::disk(1.0).unwrap()
    }

    fn cos3_body() -> SupportBody {
        SupportBody::new(1.0, vec![0.0, 0.0, 0.1], vec![]).unwrap()
    }

    #[test]
    fn disk_unit_lag_parallelogram_closed_form() {
        // Unit circles centered at o and (1,0) cross at (1/2, ±√3/2).
        let par = inscribed_parallelogram(&disk(), Vec2::new(1.0, 0.0)).unwrap();
        let s3 = 3f64.sqrt() / 2.0;
        assert!((par.vertices[0] - Vec2::new(0.5, s3)).norm() < 1e-9);
        assert!((par.vertices[3] - Vec2::new(0.5, -s3)).norm() < 1e-9);
        assert!((par.edge - Vec2::new(0.0, 3f64.sqrt())).norm() < 1e-9);
    }

    #[test]
    fn defining_equations_hold_on_fixture() {
        let body = cos3_body();
        let par = inscribed_parallelogram(&body, Vec2::new(0.8, 0.1)).unwrap();
        assert!((par.vertices[0] - par.vertices[1] - par.lag).norm() < 1e-9);
        assert!((par.vertices[3] - par.vertices[2] - par.lag).norm() < 1e-9);
        // All four vertices on the boundary.
        for v in par.vertices {
            assert!(body.signed_boundary_distance(v).0.abs() < 1e-9);
        }
        // Outward normal positivity around the cycle.
        for i in 0..4 {
            assert!(det2(par.normals[i], par.normals[(i + 1) % 4]) > 0.0);
        }
    }

    #[test]
    fn small_lag_edge_approaches_affine_diameter_chord() {
        // Continuity check: as the lag shrinks, the parallelogram flattens
        // toward a chord whose direction stabilizes.
        let body = cos3_body();
        let dir = Vec2::from_angle(0.4);
        let d1 = inscribed_parallelogram(&body, dir * 0.02).unwrap().edge;
        let d2 = inscribed_parallelogram(&body, dir * 0.01).unwrap().edge;
        let a1 = d1.normalized().unwrap();
        let a2 = d2.normalized().unwrap();
        assert!((a1 - a2).norm() < 0.02, "directions {a1:?} vs {a2:?}");
    }

    #[test]
    fn rejects_lag_outside_domain() {
        assert!(matches!(
            inscribed_parallelogram(&disk(), Vec2::new(2.5, 0.0)),
            Err(Error::OutsideDomain)
        ));
        assert!(matches!(
            inscribed_parallelogram(&disk(), Vec2::ZERO),
            Err(Error::OutsideDomain)
        ));
    }

    #[test]
    fn translate_invariance_of_vertices() {
        let body = cos3_body();
        let t = Vec2::new(0.25, -0.4);
        let moved = body.translate(t);
        let x = Vec2::new(0.7, 0.3);
        let a = inscribed_parallelogram(&body, x).unwrap();
        let b = inscribed_parallelogram(&moved, x).unwrap();
        for i in 0..4 {
            assert!((b.vertices[i] - a.vertices[i] - t).norm() < 1e-9, "vertex {i}");
            assert!((b.normals[i] - a.normals[i]).norm() < 1e-9);
        }
    }

    #[test]
    fn continuity_under_small_perturbations() {
        let body = cos3_body();
        let x = Vec2::new(0.6, 0.35);
        let base = inscribed_parallelogram(&body, x).unwrap();
        let delta = 1e-6;
        for dir in 0..8 {
            let dx = Vec2::from_angle(0.785 * dir as f64) * delta;
            let moved = inscribed_parallelogram(&body, x + dx).unwrap();
            for i in 0..4 {
                let motion = (moved.vertices[i] - base.vertices[i]).norm();
                assert!(motion < 100.0 * delta, "vertex {i} moved {motion}");
            }
        }
    }

    #[test]
    fn gradient_matches_finite_differences() {
        let body = cos3_body();
        let k = ConvexBody::Support(body.clone());
        let oracle = CovariogramOracle::analytic(&k).unwrap();
        let pts = sample_domain(&oracle, 100, 3);
        for x in pts {
            let ga = gradient_analytic(&body, x).unwrap();
            let gf = oracle.gradient(x).unwrap();
            let tol = 1e-4 * (1.0 + ga.norm());
            assert!((ga - gf).norm() < tol, "at {x:?}: {ga:?} vs {gf:?}");
        }
    }

    #[test]
    fn disk_gradient_closed_form() {
        let g = gradient_analytic(&disk(), Vec2::new(1.0, 0.0)).unwrap();
        assert!((g - Vec2::new(-(3f64.sqrt()), 0.0)).norm() < 1e-9);
    }

    #[test]
    fn gradient_is_odd() {
        let body = cos3_body();
        let x = Vec2::new(0.5, -0.6);
        let a = gradient_analytic(&body, x).unwrap();
        let b = gradient_analytic(&body, -x).unwrap();
        assert!((a + b).norm() < 1e-8);
    }

    #[test]
    fn quadrilateral_probe_scaling_is_linear() {
        let body = cos3_body();
        let x = Vec2::new(0.8, 0.1);
        let par = inscribed_parallelogram(&body, x).unwrap();
        let h = par.edge_probe();
        let q1 = quadrilateral_for(&par, h).unwrap();
        let q2 = quadrilateral_for(&par, h * 2.0).unwrap();
        assert!((q2.diagonal() - q1.diagonal() * 2.0).norm() < 1e-9);
    }

    #[test]
    fn quadrilateral_rejects_bad_cyclic_order() {
        let body = cos3_body();
        let x = Vec2::new(0.8, 0.1);
        let par = inscribed_parallelogram(&body, x).unwrap();
        // The lag direction itself lies inside the normal fan, violating
        // the required cyclic order.
        let bad = par.normals[0];
        assert!(matches!(quadrilateral_for(&par, bad), Err(Error::CyclicOrder)));
    }

    #[test]
    fn oblique_project_examples() {
        let e1 = Vec2::new(1.0, 0.0);
        let e2 = Vec2::new(0.0, 1.0);
        let y = Vec2::new(3.0, 4.0);
        assert!((oblique_project(e1, e2, y).unwrap() - Vec2::new(3.0, 0.0)).norm() < 1e-15);
        let v1 = Vec2::new(0.6, 0.3);
        let v2 = Vec2::new(-0.2, 0.9);
        assert!(oblique_project(v1, v2, v2).unwrap().norm() < 1e-15);
        let p = oblique_project(v1, v2, y).unwrap();
        let pp = oblique_project(v1, v2, p).unwrap();
        assert!((p - pp).norm() < 1e-12);
        assert!(oblique_project(v1, v1 * -3.0, y).is_err());
    }

    #[test]
    fn oblique_projection_matrix_matches_pointwise() {
        let v1 = Vec2::new(0.6, 0.3);
        let v2 = Vec2::new(-0.2, 0.9);
        let m = oblique_projection_matrix(v1, v2).unwrap();
        for k in 0..8 {
            let y = Vec2::from_angle(0.7 * k as f64) * (1.0 + k as f64);
            let a = m.apply(y);
            let b = oblique_project(v1, v2, y).unwrap();
            assert!((a - b).norm() < 1e-12);
        }
    }
}
