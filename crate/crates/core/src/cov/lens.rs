//! Fast self-overlap areas: area(P ∩ (P + x)) for a fixed convex polygon P.
//!
//! Boundaries of two translates of the same convex curve cross at most
//! twice, so the overlap is a "lens" bounded by one vertex chain of P and
//! one of P + x. Locating the two chains costs O(log² n) point tests and
//! the area is assembled from precomputed shoelace prefix sums in O(1),
//! which is what makes dense covariogram grids affordable.

use crate::geom::polygon::ConvexPolygon;
use crate::geom::vec::{det2, Vec2};

pub struct SelfOverlap {
    poly: ConvexPolygon,
    /// prefix[k] = Σ_{j<k} det2(v_j, v_{j+1}), compensated summation.
    prefix: Vec<f64>,
    /// Difference polygon P + (-P); the support of x ↦ area(P ∩ (P+x)).
    diff: ConvexPolygon,
    /// Vertex angles of `diff` as seen from the origin, unwrapped to be
    /// increasing; `diff_rot` is the vertex index of the smallest angle.
    diff_angles: Vec<f64>,
    diff_rot: usize,
    area: f64,
    scale: f64,
}

impl SelfOverlap {
    pub fn new(poly: ConvexPolygon) -> Self {
        let verts = poly.vertices();
        let n = verts.len();
        let mut prefix = Vec::with_capacity(n + 1);
        let mut sum = 0.0;
        let mut comp = 0.0; // Kahan compensation
        prefix.push(0.0);
        for i in 0..n {
            let term = det2(verts[i], verts[(i + 1) % n]);
            let y = term - comp;
            let t = sum + y;
            comp = (t - sum) - y;
            sum = t;
            prefix.push(sum);
        }
        let area = 0.5 * sum;
        let neg = poly.reflect_about(Vec2::ZERO);
        let diff = poly.minkowski_sum(&neg);
        // The difference polygon contains the origin in its interior, so its
        // vertex angles are cyclically increasing; store them rotated to a
        // monotone table for the ray-exit search.
        let m = diff.len();
        let raw: Vec<f64> = diff.vertices().iter().map(|v| v.angle()).collect();
        let mut diff_rot = 0;
        for i in 1..m {
            if raw[i] < raw[diff_rot] {
                diff_rot = i;
            }
        }
        let diff_angles: Vec<f64> = (0..m).map(|i| raw[(diff_rot + i) % m]).collect();
        let (lo, hi) = poly.bounding_box();
        let scale = (hi - lo).norm().max(1e-300);
        SelfOverlap {
            poly,
            prefix,
            diff,
            diff_angles,
            diff_rot,
            area,
            scale,
        }
    }

    #[inline]
    pub fn polygon(&self) -> &ConvexPolygon {
        &self.poly
    }

    #[inline]
    pub fn difference_polygon(&self) -> &ConvexPolygon {
        &self.diff
    }

    #[inline]
    pub fn area(&self) -> f64 {
        self.area
    }

    /// Σ det2(v_k, v_{k+1}) over the cyclic edge run from vertex `a` to
    /// vertex `b`.
    fn chain(&self, a: usize, b: usize) -> f64 {
        let n = self.poly.len();
        if a <= b {
            self.prefix[b] - self.prefix[a]
        } else {
            self.prefix[n] - self.prefix[a] + self.prefix[b]
        }
    }

    /// area(P ∩ (P + x)); zero outside the difference polygon.
    pub fn value(&self, x: Vec2) -> f64 {
        if !x.is_finite() {
            return 0.0;
        }
        if x.norm() <= 1e-14 * self.scale {
            return self.area;
        }
        if !self.diff.contains(x, 0.0) {
            return 0.0;
        }
        let n = self.poly.len();
        let verts = self.poly.vertices();

        // Chain of P-vertices inside P + x (v - x ∈ P), and chain of
        // (P + x)-vertices inside P (v + x ∈ P). Each is a contiguous
        // cyclic run.
        let inside_p = |i: usize| self.poly.contains(verts[i] - x, 0.0);
        let inside_w = |i: usize| self.poly.contains(verts[i] + x, 0.0);

        // Support vertex against the lag is always strictly outside the
        // other translate, giving a guaranteed anchor for both searches.
        let out_p = self.poly.support_index(-x);
        let out_w = self.poly.support_index(x);

        // Seed guesses: the overlap hugs the boundary near the support
        // vertex along the outward normal where the lag exits the
        // difference polygon.
        let exit_normal = self.ray_exit_normal(x);
        let seeds_p = [
            self.poly.support_index(exit_normal),
            self.poly.support_index(x),
        ];
        let seeds_w = [
            self.poly.support_index(-exit_normal),
            self.poly.support_index(-x),
        ];

        let arc_p = self.find_arc(&inside_p, out_p, &seeds_p);
        let arc_w = self.find_arc(&inside_w, out_w, &seeds_w);

        let (i_start, i_end) = match arc_p {
            Some(arc) => arc,
            None => return 0.0, // overlap thinner than the vertex spacing
        };
        let (j_start, j_end) = match arc_w {
            Some(arc) => arc,
            None => return 0.0,
        };

        // Crossing where bd P leaves P + x: on P-edge (i_end, i_end+1) and
        // on W-edge (j_start-1, j_start). The other crossing symmetrically.
        let w = |i: usize| verts[i % n] + x;
        let exit = segment_intersection(
            verts[i_end],
            verts[(i_end + 1) % n],
            w((j_start + n - 1) % n),
            w(j_start),
        )
        .unwrap_or_else(|| (verts[(i_end + 1) % n] + w(j_start)) * 0.5);
        let entry = segment_intersection(
            verts[(i_start + n - 1) % n],
            verts[i_start],
            w(j_end),
            w((j_end + 1) % n),
        )
        .unwrap_or_else(|| (verts[(i_start + n - 1) % n] + w(j_end)) * 0.5);

        let chain_p = self.chain(i_start, i_end);
        let chain_w = self.chain(j_start, j_end) + det2(x, verts[j_end] - verts[j_start]);

        let mut twice = chain_p + chain_w;
        twice += det2(entry, verts[i_start]);
        twice += det2(verts[i_end], exit);
        twice += det2(exit, w(j_start));
        twice += det2(w(j_end), entry);

        (0.5 * twice).clamp(0.0, self.area)
    }

    /// Outward normal of the difference polygon at the exit point of the
    /// ray from the origin through `x`.
    fn ray_exit_normal(&self, x: Vec2) -> Vec2 {
        let n = self.diff.len();
        let a = x.angle();
        // Last table entry <= a; wraps to the final wedge below the minimum.
        let k = match self.diff_angles.partition_point(|&ang| ang <= a) {
            0 => n - 1,
            p => p - 1,
        };
        let i = (self.diff_rot + k) % n;
        let e = self.diff.vertex(i + 1) - self.diff.vertex(i);
        Vec2::new(e.y, -e.x)
    }

    /// Locates the contiguous cyclic run where `inside` holds, given a
    /// guaranteed-outside anchor and candidate seeds. Returns vertex indices
    /// (first_inside, last_inside), or None when no inside vertex is found.
    fn find_arc(
        &self,
        inside: &dyn Fn(usize) -> bool,
        outside_anchor: usize,
        seeds: &[usize],
    ) -> Option<(usize, usize)> {
        let n = self.poly.len();
        let mut seed = None;
        for &s in seeds {
            if s != outside_anchor && inside(s) {
                seed = Some(s);
                break;
            }
        }
        if seed.is_none() {
            // Coarse sweep; the run, if any, is at least a few vertices wide
            // whenever the overlap carries measurable area.
            let stride = (n / 4096).max(1);
            let mut i = 0;
            while i < n {
                if inside(i) {
                    seed = Some(i);
                    break;
                }
                i += stride;
            }
        }
        let seed = seed?;

        // Binary search for the run ends between the seed (inside) and the
        // anchor (outside); the predicate flips exactly once on each side.
        let gap_ccw = (outside_anchor + n - seed) % n;
        let mut lo = 0usize;
        let mut hi = gap_ccw;
        while hi - lo > 1 {
            let mid = (lo + hi) / 2;
            if inside((seed + mid) % n) {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        let last = (seed + lo) % n;

        let gap_cw = (seed + n - outside_anchor) % n;
        let mut lo2 = 0usize;
        let mut hi2 = gap_cw;
        while hi2 - lo2 > 1 {
            let mid = (lo2 + hi2) / 2;
            if inside((seed + n - mid) % n) {
                lo2 = mid;
            } else {
                hi2 = mid;
            }
        }
        let first = (seed + n - lo2) % n;
        Some((first, last))
    }
}

/// Intersection of segments [a0, a1] and [b0, b1]; None when near-parallel
/// or when the crossing parameter falls far outside both segments.
fn segment_intersection(a0: Vec2, a1: Vec2, b0: Vec2, b1: Vec2) -> Option<Vec2> {
    let da = a1 - a0;
    let db = b1 - b0;
    let den = det2(da, db);
    let scale = da.norm() * db.norm();
    if den.abs() <= 1e-14 * scale {
        return None;
    }
    let t = det2(b0 - a0, db) / den;
    if !(-0.5..=1.5).contains(&t) {
        return None;
    }
    Some(a0 + da * t)
}
