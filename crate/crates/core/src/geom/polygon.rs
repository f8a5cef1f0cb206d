//! Strictly convex counterclockwise polygons and convex clipping.

use serde::{Deserialize, Serialize};

use super::vec::{det2, Vec2};
use crate::error::{Error, Result};

/// Relative tolerance for coalescing collinear vertices produced by clipping.
const COALESCE_EPS: f64 = 1e-12;

/// Strictly convex polygon with counterclockwise vertices.
///
/// Construction validates: at least 3 vertices, finite coordinates,
/// strictly positive turning at every vertex, positive area.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConvexPolygon {
    vertices: Vec<Vec2>,
}

impl ConvexPolygon {
    pub fn new(vertices: Vec<Vec2>) -> Result<Self> {
        if vertices.len() < 3 {
            return Err(Error::TooFewVertices(vertices.len()));
        }
        for v in &vertices {
            if !v.is_finite() {
                return Err(Error::NonFinite("polygon vertex"));
            }
        }
        let n = vertices.len();
        for i in 0..n {
            let a = vertices[i];
            let b = vertices[(i + 1) % n];
            let c = vertices[(i + 2) % n];
            if det2(b - a, c - b) <= 0.0 {
                return Err(Error::NotStrictlyConvex { index: (i + 1) % n });
            }
        }
        let poly = ConvexPolygon { vertices };
        if poly.area() <= 0.0 {
            return Err(Error::DegenerateArea);
        }
        Ok(poly)
    }

    /// Builds a polygon from a clipped vertex loop: consecutive duplicates
    /// and collinear runs are coalesced at a scale-relative tolerance before
    /// validation. Returns `None` when the loop degenerates (area ~ 0 or
    /// fewer than 3 distinct vertices), which callers treat as empty.
    pub fn from_loop(points: Vec<Vec2>) -> Option<Self> {
        let scale = points
            .iter()
            .map(|p| p.x.abs().max(p.y.abs()))
            .fold(0.0_f64, f64::max)
            .max(1e-300);
        let dist_tol = COALESCE_EPS * scale;

        // Drop consecutive (near-)duplicates, including across the seam.
        let mut pts: Vec<Vec2> = Vec::with_capacity(points.len());
        for p in points {
            if pts.last().map_or(true, |q| (p - *q).norm() > dist_tol) {
                pts.push(p);
            }
        }
        while pts.len() >= 2 && (pts[0] - *pts.last().unwrap()).norm() <= dist_tol {
            pts.pop();
        }

        // Coalesce collinear (or slightly reflex, from round-off) middles;
        // the threshold is the relative sine of the turn so that chains of
        // very short edges from dense polygonizations are kept.
        loop {
            let n = pts.len();
            if n < 3 {
                return None;
            }
            let mut removed = false;
            let mut out = Vec::with_capacity(n);
            for i in 0..n {
                let a = pts[(i + n - 1) % n];
                let b = pts[i];
                let c = pts[(i + 1) % n];
                let e1 = b - a;
                let e2 = c - b;
                if det2(e1, e2) <= COALESCE_EPS * e1.norm() * e2.norm() {
                    removed = true;
                } else {
                    out.push(b);
                }
            }
            if !removed {
                break;
            }
            pts = out;
        }
        if pts.len() < 3 {
            return None;
        }
        let poly = ConvexPolygon { vertices: pts };
        if poly.area() <= COALESCE_EPS * scale * scale {
            return None;
        }
        // Round-off in clipping can still leave a marginally reflex loop;
        // such slivers carry no usable area.
        let n = poly.vertices.len();
        for i in 0..n {
            let a = poly.vertices[i];
            let b = poly.vertices[(i + 1) % n];
            let c = poly.vertices[(i + 2) % n];
            if det2(b - a, c - b) <= 0.0 {
                return None;
            }
        }
        Some(poly)
    }

    #[inline]
    pub fn vertices(&self) -> &[Vec2] {
        &self.vertices
    }

    #[inline]
    pub fn len(&self) -> usize {
        self.vertices.len()
    }

    #[inline]
    pub fn is_empty(&self) -> bool {
        false
    }

    #[inline]
    pub fn vertex(&self, i: usize) -> Vec2 {
        self.vertices[i % self.vertices.len()]
    }

    /// Shoelace area; strictly positive by construction.
    pub fn area(&self) -> f64 {
        shoelace(&self.vertices)
    }

    /// Area centroid.
    pub fn centroid(&self) -> Vec2 {
        let n = self.vertices.len();
        let mut cx = 0.0;
        let mut cy = 0.0;
        let mut a = 0.0;
        for i in 0..n {
            let p = self.vertices[i];
            let q = self.vertices[(i + 1) % n];
            let w = det2(p, q);
            a += w;
            cx += (p.x + q.x) * w;
            cy += (p.y + q.y) * w;
        }
        Vec2::new(cx / (3.0 * a), cy / (3.0 * a))
    }

    pub fn translate(&self, t: Vec2) -> ConvexPolygon {
        ConvexPolygon {
            vertices: self.vertices.iter().map(|v| *v + t).collect(),
        }
    }

    /// Reflection through the point `c` (orientation-preserving in 2-D).
    pub fn reflect_about(&self, c: Vec2) -> ConvexPolygon {
        ConvexPolygon {
            vertices: self.vertices.iter().map(|v| c * 2.0 - *v).collect(),
        }
    }

    pub fn bounding_box(&self) -> (Vec2, Vec2) {
        let mut lo = self.vertices[0];
        let mut hi = self.vertices[0];
        for v in &self.vertices {
            lo.x = lo.x.min(v.x);
            lo.y = lo.y.min(v.y);
            hi.x = hi.x.max(v.x);
            hi.y = hi.y.max(v.y);
        }
        (lo, hi)
    }

    /// Support value `max_{v} <v, u>`.
    pub fn support(&self, u: Vec2) -> f64 {
        self.vertices[self.support_index(u)].dot(u)
    }

    /// Index of the vertex extremal in direction `u`, by binary search over
    /// the edge-direction sequence (O(log n)).
    pub fn support_index(&self, u: Vec2) -> usize {
        let n = self.vertices.len();
        if n < 8 {
            let mut best = 0;
            for i in 1..n {
                if self.vertices[i].dot(u) > self.vertices[best].dot(u) {
                    best = i;
                }
            }
            return best;
        }
        // Vertex i is extremal iff edge (i-1,i) ascends and edge (i,i+1)
        // descends along u. The ascent indicator changes sign exactly twice
        // around the cycle; locate the descent start after an ascending seed.
        let ascends = |i: usize| -> bool {
            let e = self.vertices[(i + 1) % n] - self.vertices[i];
            e.dot(u) > 0.0
        };
        // Find an ascending edge as the search seed.
        let mut seed = None;
        let step = (n / 16).max(1);
        let mut i = 0;
        while i < n {
            if ascends(i) {
                seed = Some(i);
                break;
            }
            i += step;
        }
        let seed = match seed {
            Some(s) => s,
            None => {
                // All coarse probes descend: the ascending run is short;
                // fall back to a linear scan.
                let mut best = 0;
                for i in 1..n {
                    if self.vertices[i].dot(u) > self.vertices[best].dot(u) {
                        best = i;
                    }
                }
                return best;
            }
        };
        // Binary search: first non-ascending edge after `seed` (cyclically).
        let mut lo = 0usize; // offsets from seed: edge seed+lo ascends
        let mut hi = n; // edge seed+hi does not ascend (wraps past max)
        while hi - lo > 1 {
            let mid = (lo + hi) / 2;
            if ascends((seed + mid) % n) {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        (seed + hi) % n
    }

    /// Whether `p` lies in the closed polygon, via fan binary search (O(log n)).
    pub fn contains(&self, p: Vec2, tol: f64) -> bool {
        let n = self.vertices.len();
        let v0 = self.vertices[0];
        let d = p - v0;
        // Locate the fan wedge [v0, v_i, v_{i+1}] containing the direction d.
        if det2(self.vertices[1] - v0, d) < -tol || det2(self.vertices[n - 1] - v0, d) > tol {
            return false;
        }
        let mut lo = 1usize;
        let mut hi = n - 1;
        while hi - lo > 1 {
            let mid = (lo + hi) / 2;
            if det2(self.vertices[mid] - v0, d) >= 0.0 {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        det2(self.vertices[hi] - self.vertices[lo], p - self.vertices[lo]) >= -tol
    }

    /// Euclidean distance from `p` to the polygon boundary (O(n)).
    pub fn boundary_distance(&self, p: Vec2) -> f64 {
        let n = self.vertices.len();
        let mut best = f64::INFINITY;
        for i in 0..n {
            let a = self.vertices[i];
            let b = self.vertices[(i + 1) % n];
            best = best.min(point_segment_distance(p, a, b));
        }
        best
    }

    /// Minkowski sum with another convex polygon, by merging the two edge
    /// fans in angular order.
    pub fn minkowski_sum(&self, other: &ConvexPolygon) -> ConvexPolygon {
        let start_a = lowest_vertex(&self.vertices);
        let start_b = lowest_vertex(&other.vertices);
        let na = self.vertices.len();
        let nb = other.vertices.len();
        let edge = |verts: &[Vec2], start: usize, k: usize| -> Vec2 {
            let n = verts.len();
            verts[(start + k + 1) % n] - verts[(start + k) % n]
        };
        let mut out = Vec::with_capacity(na + nb);
        let mut p = self.vertices[start_a] + other.vertices[start_b];
        let mut i = 0;
        let mut j = 0;
        while i < na || j < nb {
            out.push(p);
            let take_a = if i == na {
                false
            } else if j == nb {
                true
            } else {
                det2(edge(&self.vertices, start_a, i), edge(&other.vertices, start_b, j)) >= 0.0
            };
            if take_a {
                p += edge(&self.vertices, start_a, i);
                i += 1;
            } else {
                p += edge(&other.vertices, start_b, j);
                j += 1;
            }
        }
        ConvexPolygon::from_loop(out).expect("Minkowski sum of convex polygons is convex")
    }
}

fn lowest_vertex(verts: &[Vec2]) -> usize {
    let mut best = 0;
    for (i, v) in verts.iter().enumerate() {
        let b = verts[best];
        if v.y < b.y || (v.y == b.y && v.x < b.x) {
            best = i;
        }
    }
    best
}

/// Convex hull of a point set (Andrew's monotone chain), counterclockwise,
/// collinear points dropped. Returns fewer than 3 points for degenerate input.
pub fn convex_hull_points(mut pts: Vec<Vec2>) -> Vec<Vec2> {
    pts.sort_by(|a, b| (a.x, a.y).partial_cmp(&(b.x, b.y)).unwrap());
    pts.dedup_by(|a, b| a == b);
    if pts.len() < 3 {
        return pts;
    }
    let turn = |chain: &[Vec2], p: Vec2| -> f64 {
        let a = chain[chain.len() - 2];
        let b = chain[chain.len() - 1];
        det2(b - a, p - b)
    };
    let mut lower: Vec<Vec2> = Vec::new();
    for &p in &pts {
        while lower.len() >= 2 && turn(&lower, p) <= 0.0 {
            lower.pop();
        }
        lower.push(p);
    }
    let mut upper: Vec<Vec2> = Vec::new();
    for &p in pts.iter().rev() {
        while upper.len() >= 2 && turn(&upper, p) <= 0.0 {
            upper.pop();
        }
        upper.push(p);
    }
    lower.pop();
    upper.pop();
    lower.extend(upper);
    lower
}

pub(crate) fn shoelace(verts: &[Vec2]) -> f64 {
    let n = verts.len();
    let mut acc = 0.0;
    for i in 0..n {
        acc += det2(verts[i], verts[(i + 1) % n]);
    }
    0.5 * acc
}

fn point_segment_distance(p: Vec2, a: Vec2, b: Vec2) -> f64 {
    let ab = b - a;
    let t = ((p - a).dot(ab) / ab.norm_sq()).clamp(0.0, 1.0);
    (p - (a + ab * t)).norm()
}

/// Shoelace area of this polygon (the d-dimensional volume at d = 2).
pub fn polygon_area(p: &ConvexPolygon) -> f64 {
    p.area()
}

/// Intersection of two convex polygons by half-plane clipping of `a`
/// against every edge of `b`. Empty intersections are a value (`None`),
/// not an error.
pub fn convex_intersection(a: &ConvexPolygon, b: &ConvexPolygon) -> Option<ConvexPolygon> {
    let mut current: Vec<Vec2> = a.vertices().to_vec();
    let nb = b.len();
    for i in 0..nb {
        let e0 = b.vertex(i);
        let e1 = b.vertex(i + 1);
        current = clip_halfplane(&current, e0, e1);
        if current.len() < 3 {
            return None;
        }
    }
    ConvexPolygon::from_loop(current)
}

/// Keep the part of `poly` on the left of the directed edge `e0 -> e1`.
fn clip_halfplane(poly: &[Vec2], e0: Vec2, e1: Vec2) -> Vec<Vec2> {
    let n = poly.len();
    if n == 0 {
        return Vec::new();
    }
    let dir = e1 - e0;
    let mut out = Vec::with_capacity(n + 2);
    for i in 0..n {
        let s = poly[i];
        let e = poly[(i + 1) % n];
        let sc = det2(dir, s - e0);
        let ec = det2(dir, e - e0);
        let s_in = sc >= 0.0;
        let e_in = ec >= 0.0;
        match (s_in, e_in) {
            (true, true) => out.push(e),
            (true, false) => {
                let t = sc / (sc - ec);
                out.push(s + (e - s) * t);
            }
            (false, true) => {
                let t = sc / (sc - ec);
                out.push(s + (e - s) * t);
                out.push(e);
            }
            (false, false) => {}
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn unit_square() -> ConvexPolygon {
        ConvexPolygon::new(vec![
            Vec2::new(0.0, 0.0),
            Vec2::new(1.0, 0.0),
            Vec2::new(1.0, 1.0),
            Vec2::new(0.0, 1.0),
        ])
        .unwrap()
    }

    fn triangle() -> ConvexPolygon {
        ConvexPolygon::new(vec![Vec2::new(0.0, 0.0), Vec2::new(1.0, 0.0), Vec2::new(0.0, 1.0)])
            .unwrap()
    }

    #[test]
    fn unit_square_area() {
        assert_eq!(unit_square().area(), 1.0);
    }

    #[test]
    fn triangle_area() {
        assert_eq!(triangle().area(), 0.5);
    }

    #[test]
    fn scaled_square_area_is_homogeneous_degree_2() {
        let scaled = ConvexPolygon::new(
            unit_square().vertices().iter().map(|v| *v * 2.0).collect(),
        )
        .unwrap();
        assert_eq!(scaled.area(), 4.0);
    }

    #[test]
    fn clockwise_rejected() {
        let r = ConvexPolygon::new(vec![
            Vec2::new(0.0, 0.0),
            Vec2::new(0.0, 1.0),
            Vec2::new(1.0, 0.0),
        ]);
        assert!(r.is_err());
    }

    #[test]
    fn collinear_rejected() {
        let r = ConvexPolygon::new(vec![
            Vec2::new(0.0, 0.0),
            Vec2::new(0.5, 0.0),
            Vec2::new(1.0, 0.0),
            Vec2::new(0.0, 1.0),
        ]);
        assert!(r.is_err());
    }

    #[test]
    fn intersection_idempotent() {
        let s = unit_square();
        let r = convex_intersection(&s, &s).unwrap();
        assert!((r.area() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn intersection_shifted_square() {
        // Oracle: count of a 2048 x 2048 pixel-center raster falling in both
        // squares; agrees with the clipped area to 1e-3.
        let s = unit_square();
        let t = s.translate(Vec2::new(0.5, 0.0));
        let r = convex_intersection(&s, &t).unwrap();
        let n = 2048usize;
        let mut count = 0u64;
        for i in 0..n {
            for j in 0..n {
                let p = Vec2::new((i as f64 + 0.5) / n as f64, (j as f64 + 0.5) / n as f64);
                let in_s = p.x >= 0.0 && p.x <= 1.0 && p.y >= 0.0 && p.y <= 1.0;
                let in_t = p.x >= 0.5 && p.x <= 1.5 && p.y >= 0.0 && p.y <= 1.0;
                if in_s && in_t {
                    count += 1;
                }
            }
        }
        let raster = count as f64 / (n * n) as f64;
        assert!((r.area() - 0.5).abs() < 1e-12);
        assert!((r.area() - raster).abs() < 1e-3);
    }

    #[test]
    fn intersection_disjoint_is_empty() {
        let s = unit_square();
        let t = s.translate(Vec2::new(3.0, 0.0));
        assert!(convex_intersection(&s, &t).is_none());
    }

    #[test]
    fn intersection_commutes() {
        let s = unit_square();
        let t = triangle().translate(Vec2::new(0.2, 0.1));
        let ab = convex_intersection(&s, &t).unwrap();
        let ba = convex_intersection(&t, &s).unwrap();
        assert!((ab.area() - ba.area()).abs() < 1e-14);
        assert!(ab.area() <= s.area().min(t.area()) + 1e-14);
    }

    #[test]
    fn reflect_square_about_center_is_identity() {
        let s = unit_square();
        let r = s.reflect_about(Vec2::new(0.5, 0.5));
        assert!((r.area() - 1.0).abs() < 1e-14);
        for v in r.vertices() {
            assert!(s.vertices().iter().any(|w| (*w - *v).norm() < 1e-12));
        }
    }

    #[test]
    fn support_index_matches_linear_scan() {
        let mut pts = Vec::new();
        let n = 257;
        for k in 0..n {
            let th = std::f64::consts::TAU * k as f64 / n as f64;
            pts.push(Vec2::new(1.5 * th.cos(), th.sin()));
        }
        let poly = ConvexPolygon::new(pts).unwrap();
        for a in 0..64 {
            let u = Vec2::from_angle(0.098 * a as f64);
            let fast = poly.support(u);
            let slow = poly
                .vertices()
                .iter()
                .map(|v| v.dot(u))
                .fold(f64::NEG_INFINITY, f64::max);
            assert!((fast - slow).abs() < 1e-12, "direction {a}");
        }
    }

    #[test]
    fn contains_matches_halfplane_test() {
        let mut pts = Vec::new();
        let n = 129;
        for k in 0..n {
            let th = std::f64::consts::TAU * k as f64 / n as f64;
            pts.push(Vec2::new(th.cos(), th.sin()));
        }
        let poly = ConvexPolygon::new(pts).unwrap();
        for i in 0..40 {
            for j in 0..40 {
                let p = Vec2::new(-1.2 + 0.06 * i as f64, -1.2 + 0.06 * j as f64);
                let slow = (0..n).all(|k| {
                    det2(poly.vertex(k + 1) - poly.vertex(k), p - poly.vertex(k)) >= -1e-12
                });
                assert_eq!(poly.contains(p, 1e-12), slow, "at {p:?}");
            }
        }
    }

    #[test]
    fn minkowski_square_with_reflection_is_double_square() {
        let s = unit_square();
        let neg = s.reflect_about(Vec2::ZERO);
        let d = s.minkowski_sum(&neg);
        assert!((d.area() - 4.0).abs() < 1e-12);
        let (lo, hi) = d.bounding_box();
        assert!((lo.x + 1.0).abs() < 1e-12 && (hi.x - 1.0).abs() < 1e-12);
        assert!((lo.y + 1.0).abs() < 1e-12 && (hi.y - 1.0).abs() < 1e-12);
    }
}
