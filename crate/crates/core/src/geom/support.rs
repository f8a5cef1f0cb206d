//! Strictly convex bodies represented by a finite trigonometric support
//! series h(θ) = a0 + Σ_k (a_k cos kθ + b_k sin kθ).
//!
//! The boundary point with outward unit normal u(θ) = (cos θ, sin θ) is
//! p(θ) = h(θ) u(θ) + h'(θ) R u(θ), and the curvature radius there is
//! h(θ) + h''(θ); the representation is valid exactly when that quantity
//! stays positive.

use std::f64::consts::{PI, TAU};

use serde::{Deserialize, Serialize};

use super::polygon::ConvexPolygon;
use super::vec::{rot90, Vec2};
use crate::error::{Error, Result};

/// Grid size used to certify h + h'' > 0 at construction.
const CONVEXITY_GRID: usize = 4096;
/// Lower bound demanded of h + h'' on the certification grid.
const CONVEXITY_FLOOR: f64 = 1e-6;

/// Canonicalizes an angle to `[0, 2π)`.
pub fn wrap_angle(theta: f64) -> f64 {
    let t = theta.rem_euclid(TAU);
    if t >= TAU {
        0.0
    } else {
        t
    }
}

/// Strictly convex, C¹-regular planar body given by a trigonometric
/// support series.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SupportBody {
    a0: f64,
    cos_coeffs: Vec<f64>,
    sin_coeffs: Vec<f64>,
    /// Tolerance for boundary membership and root polishing.
    precision: f64,
}

impl SupportBody {
    /// Validates positivity of h and of the curvature radius h + h''
    /// on a dense grid.
    pub fn new(a0: f64, cos_coeffs: Vec<f64>, sin_coeffs: Vec<f64>) -> Result<Self> {
        if !a0.is_finite()
            || cos_coeffs.iter().any(|c| !c.is_finite())
            || sin_coeffs.iter().any(|c| !c.is_finite())
        {
            return Err(Error::NonFinite("support coefficients"));
        }
        let body = SupportBody {
            a0,
            cos_coeffs,
            sin_coeffs,
            precision: 1e-9,
        };
        let mut min_h = f64::INFINITY;
        let mut min_r = f64::INFINITY;
        let mut arg_r = 0.0;
        for i in 0..CONVEXITY_GRID {
            let th = TAU * i as f64 / CONVEXITY_GRID as f64;
            let h = body.h(th);
            let r = h + body.h2(th);
            min_h = min_h.min(h);
            if r < min_r {
                min_r = r;
                arg_r = th;
            }
        }
        if min_r < CONVEXITY_FLOOR {
            return Err(Error::NotConvexBody { min: min_r, angle: arg_r });
        }
        if min_h <= 0.0 {
            return Err(Error::NonPositiveSupport { min: min_h });
        }
        Ok(body)
    }

    pub fn with_precision(mut self, precision: f64) -> Self {
        self.precision = precision.abs().max(1e-15);
        self
    }

    /// Disk of radius `r` centered at the origin.
    pub fn disk(r: f64) -> Result<Self> {
        SupportBody::new(r, vec![], vec![])
    }

    /// Axis-aligned ellipse with semi-axes `a` (x) and `b` (y), as a
    /// truncated support series. The support function
    /// sqrt(a² cos²θ + b² sin²θ) is analytic, so its Fourier coefficients
    /// decay geometrically; harmonics below 1e-14 are dropped. Only even
    /// harmonics occur, so the result is exactly centrally symmetric.
    pub fn ellipse(a: f64, b: f64) -> Result<Self> {
        assert!(a > 0.0 && b > 0.0, "semi-axes must be positive");
        let h = |th: f64| (a * a * th.cos().powi(2) + b * b * th.sin().powi(2)).sqrt();
        let quad_n = 8192;
        let max_k = 128;
        let mut a0 = 0.0;
        for i in 0..quad_n {
            a0 += h(TAU * i as f64 / quad_n as f64);
        }
        a0 /= quad_n as f64;
        let mut cos_coeffs = vec![0.0; max_k];
        for k in (2..=max_k).step_by(2) {
            let mut ak = 0.0;
            for i in 0..quad_n {
                let th = TAU * i as f64 / quad_n as f64;
                ak += h(th) * (k as f64 * th).cos();
            }
            ak *= 2.0 / quad_n as f64;
            cos_coeffs[k - 1] = ak;
        }
        while cos_coeffs.last().map_or(false, |c| c.abs() < 1e-14) {
            cos_coeffs.pop();
        }
        SupportBody::new(a0, cos_coeffs, vec![])
    }

    #[inline]
    pub fn coefficient_a0(&self) -> f64 {
        self.a0
    }

    #[inline]
    pub fn cos_coeffs(&self) -> &[f64] {
        &self.cos_coeffs
    }

    #[inline]
    pub fn sin_coeffs(&self) -> &[f64] {
        &self.sin_coeffs
    }

    #[inline]
    pub fn precision(&self) -> f64 {
        self.precision
    }

    pub fn max_harmonic(&self) -> usize {
        self.cos_coeffs.len().max(self.sin_coeffs.len())
    }

    /// Support value h(θ).
    pub fn h(&self, theta: f64) -> f64 {
        let mut acc = self.a0;
        for (i, &a) in self.cos_coeffs.iter().enumerate() {
            let k = (i + 1) as f64;
            acc += a * (k * theta).cos();
        }
        for (i, &b) in self.sin_coeffs.iter().enumerate() {
            let k = (i + 1) as f64;
            acc += b * (k * theta).sin();
        }
        acc
    }

    /// First derivative h'(θ).
    pub fn h1(&self, theta: f64) -> f64 {
        let mut acc = 0.0;
        for (i, &a) in self.cos_coeffs.iter().enumerate() {
            let k = (i + 1) as f64;
            acc -= a * k * (k * theta).sin();
        }
        for (i, &b) in self.sin_coeffs.iter().enumerate() {
            let k = (i + 1) as f64;
            acc += b * k * (k * theta).cos();
        }
        acc
    }

    /// Second derivative h''(θ).
    pub fn h2(&self, theta: f64) -> f64 {
        let mut acc = 0.0;
        for (i, &a) in self.cos_coeffs.iter().enumerate() {
            let k = (i + 1) as f64;
            acc -= a * k * k * (k * theta).cos();
        }
        for (i, &b) in self.sin_coeffs.iter().enumerate() {
            let k = (i + 1) as f64;
            acc -= b * k * k * (k * theta).sin();
        }
        acc
    }

    /// Support value in an arbitrary (non-unit allowed) direction:
    /// `|u| * h(angle(u))`.
    pub fn support(&self, u: Vec2) -> f64 {
        u.norm() * self.h(u.angle())
    }

    /// Boundary point and outward unit normal for normal angle `theta`.
    pub fn boundary(&self, theta: f64) -> (Vec2, Vec2) {
        let u = Vec2::from_angle(theta);
        let p = u * self.h(theta) + rot90(u) * self.h1(theta);
        (p, u)
    }

    /// Boundary point only.
    #[inline]
    pub fn boundary_point(&self, theta: f64) -> Vec2 {
        self.boundary(theta).0
    }

    /// Curvature radius h + h'' at normal angle `theta`.
    #[inline]
    pub fn curvature_radius(&self, theta: f64) -> f64 {
        self.h(theta) + self.h2(theta)
    }

    /// Exact area, `π a0² + (π/2) Σ (1 - k²)(a_k² + b_k²)`.
    pub fn area(&self) -> f64 {
        let mut acc = PI * self.a0 * self.a0;
        for (i, &a) in self.cos_coeffs.iter().enumerate() {
            let k = (i + 1) as f64;
            acc += 0.5 * PI * (1.0 - k * k) * a * a;
        }
        for (i, &b) in self.sin_coeffs.iter().enumerate() {
            let k = (i + 1) as f64;
            acc += 0.5 * PI * (1.0 - k * k) * b * b;
        }
        acc
    }

    /// Area centroid, by trapezoid quadrature of the boundary moment
    /// integrals (exact for trigonometric polynomials below the grid's
    /// Nyquist order).
    pub fn centroid(&self) -> Vec2 {
        let n = 4096.max(8 * self.max_harmonic());
        let mut mx = 0.0;
        let mut my = 0.0;
        for i in 0..n {
            let th = TAU * i as f64 / n as f64;
            let p = self.boundary_point(th);
            let w = self.curvature_radius(th); // |p'(θ)| factor along R u
            let u = Vec2::from_angle(th);
            // dp = w R u dθ: dx = -w u.y dθ, dy = w u.x dθ.
            // ∫∫ x dA = ∮ x²/2 dy and ∫∫ y dA = -∮ y²/2 dx.
            mx += 0.5 * p.x * p.x * w * u.x;
            my += 0.5 * p.y * p.y * w * u.y;
        }
        let scale = TAU / n as f64;
        Vec2::new(mx * scale / self.area(), my * scale / self.area())
    }

    /// Maximal width, i.e. the diameter of the body.
    pub fn diameter(&self) -> f64 {
        let n = 2048;
        let mut best: f64 = 0.0;
        for i in 0..n {
            let th = TAU * i as f64 / n as f64;
            best = best.max(self.h(th) + self.h(th + PI));
        }
        best
    }

    /// Homothety about the origin by `factor > 0`.
    pub fn scale(&self, factor: f64) -> SupportBody {
        SupportBody {
            a0: self.a0 * factor,
            cos_coeffs: self.cos_coeffs.iter().map(|c| c * factor).collect(),
            sin_coeffs: self.sin_coeffs.iter().map(|c| c * factor).collect(),
            precision: self.precision,
        }
    }

    /// Translate by `t`: adds `<t, u>` to the support function.
    pub fn translate(&self, t: Vec2) -> SupportBody {
        let mut cos_coeffs = self.cos_coeffs.clone();
        let mut sin_coeffs = self.sin_coeffs.clone();
        if cos_coeffs.is_empty() {
            cos_coeffs.push(0.0);
        }
        if sin_coeffs.is_empty() {
            sin_coeffs.push(0.0);
        }
        cos_coeffs[0] += t.x;
        sin_coeffs[0] += t.y;
        SupportBody {
            a0: self.a0,
            cos_coeffs,
            sin_coeffs,
            precision: self.precision,
        }
    }

    /// Reflection through the point `c`: the support series of -K,
    /// recentered by 2c.
    pub fn reflect_about(&self, c: Vec2) -> SupportBody {
        let cos_coeffs: Vec<f64> = self
            .cos_coeffs
            .iter()
            .enumerate()
            .map(|(i, &a)| if (i + 1) % 2 == 0 { a } else { -a })
            .collect();
        let sin_coeffs: Vec<f64> = self
            .sin_coeffs
            .iter()
            .enumerate()
            .map(|(i, &b)| if (i + 1) % 2 == 0 { b } else { -b })
            .collect();
        let reflected = SupportBody {
            a0: self.a0,
            cos_coeffs,
            sin_coeffs,
            precision: self.precision,
        };
        reflected.translate(c * 2.0)
    }

    /// Difference body K + (-K): odd harmonics cancel, even ones double.
    pub fn difference_body(&self) -> SupportBody {
        let cos_coeffs: Vec<f64> = self
            .cos_coeffs
            .iter()
            .enumerate()
            .map(|(i, &a)| if (i + 1) % 2 == 0 { 2.0 * a } else { 0.0 })
            .collect();
        let sin_coeffs: Vec<f64> = self
            .sin_coeffs
            .iter()
            .enumerate()
            .map(|(i, &b)| if (i + 1) % 2 == 0 { 2.0 * b } else { 0.0 })
            .collect();
        SupportBody {
            a0: 2.0 * self.a0,
            cos_coeffs,
            sin_coeffs,
            precision: self.precision,
        }
    }

    /// Inscribed polygon with vertices at `n` uniformly spaced normal angles.
    pub fn polygonize(&self, n: usize) -> Result<ConvexPolygon> {
        if n < 16 {
            return Err(Error::PolygonizeTooCoarse(n));
        }
        let pts: Vec<Vec2> = (0..n)
            .map(|i| self.boundary_point(TAU * i as f64 / n as f64))
            .collect();
        ConvexPolygon::from_loop(pts).ok_or(Error::DegenerateArea)
    }

    /// Signed distance from `z` to the boundary (negative inside), together
    /// with the normal angle of the nearest supporting line:
    /// `max_φ (<z, u(φ)> - h(φ))`.
    pub fn signed_boundary_distance(&self, z: Vec2) -> (f64, f64) {
        let f = |phi: f64| z.dot(Vec2::from_angle(phi)) - self.h(phi);
        let df = |phi: f64| z.dot(rot90(Vec2::from_angle(phi))) - self.h1(phi);
        let ddf = |phi: f64| -z.dot(Vec2::from_angle(phi)) - self.h2(phi);

        let n = 64.max(8 * self.max_harmonic());
        let mut best_phi = 0.0;
        let mut best = f64::NEG_INFINITY;
        for i in 0..n {
            let phi = TAU * i as f64 / n as f64;
            let v = f(phi);
            if v > best {
                best = v;
                best_phi = phi;
            }
        }
        // Newton polish of the stationarity condition; the coarse grid is
        // dense enough that the maximizer is within one cell.
        let mut phi = best_phi;
        for _ in 0..40 {
            let d = df(phi);
            let dd = ddf(phi);
            if dd >= -1e-14 {
                break;
            }
            let step = d / dd;
            phi -= step;
            if step.abs() < 1e-14 {
                break;
            }
        }
        if f(phi) < best {
            phi = best_phi; // Newton wandered; keep the grid winner
        }
        (f(phi), wrap_angle(phi))
    }

    /// Normal angle of a point assumed to be on the boundary (within `tol`).
    pub fn boundary_angle_of(&self, q: Vec2, tol: f64) -> Result<f64> {
        let (sd, phi) = self.signed_boundary_distance(q);
        if sd.abs() > tol {
            return Err(Error::NotOnBoundary(q.x, q.y, sd));
        }
        Ok(phi)
    }

    /// Whether `z` lies in the closed body within `tol`.
    pub fn contains(&self, z: Vec2, tol: f64) -> bool {
        self.signed_boundary_distance(z).0 <= tol
    }
}
