//! Exact 2-D vector and matrix arithmetic.
//!
//! Everything downstream is phrased through `det2` and the fixed
//! counterclockwise quarter-turn `Mat2::ROT90`, for which
//! `det2(a, b) == -a · (ROT90 b)` holds identically.

use std::ops::{Add, AddAssign, Div, Mul, Neg, Sub, SubAssign};

use serde::{Deserialize, Serialize};

/// Point or vector in the Euclidean plane.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct Vec2 {
    pub x: f64,
    pub y: f64,
}

impl Vec2 {
    pub const ZERO: Vec2 = Vec2 { x: 0.0, y: 0.0 };

    #[inline]
    pub const fn new(x: f64, y: f64) -> Self {
        Vec2 { x, y }
    }

    #[inline]
    pub fn dot(self, other: Vec2) -> f64 {
        self.x * other.x + self.y * other.y
    }

    #[inline]
    pub fn norm(self) -> f64 {
        self.x.hypot(self.y)
    }

    #[inline]
    pub fn norm_sq(self) -> f64 {
        self.x * self.x + self.y * self.y
    }

    /// Unit vector in the same direction; `None` for (near-)zero input.
    pub fn normalized(self) -> Option<Vec2> {
        let n = self.norm();
        if n <= f64::EPSILON {
            None
        } else {
            Some(self / n)
        }
    }

    /// Unit direction at angle `theta` from the positive x-axis.
    #[inline]
    pub fn from_angle(theta: f64) -> Vec2 {
        Vec2::new(theta.cos(), theta.sin())
    }

    /// Angle in `[0, 2π)`.
    #[inline]
    pub fn angle(self) -> f64 {
        let a = self.y.atan2(self.x);
        if a < 0.0 {
            a + std::f64::consts::TAU
        } else {
            a
        }
    }

    #[inline]
    pub fn is_finite(self) -> bool {
        self.x.is_finite() && self.y.is_finite()
    }
}

/// Signed area of the parallelogram spanned by `a` and `b`:
/// positive when `b` lies counterclockwise of `a`.
#[inline]
pub fn det2(a: Vec2, b: Vec2) -> f64 {
    a.x * b.y - a.y * b.x
}

/// Counterclockwise quarter turn, `ROT90 * v`.
#[inline]
pub fn rot90(v: Vec2) -> Vec2 {
    Vec2::new(-v.y, v.x)
}

/// Clockwise quarter turn, the inverse of [`rot90`].
#[inline]
pub fn rot90_inv(v: Vec2) -> Vec2 {
    Vec2::new(v.y, -v.x)
}

impl Add for Vec2 {
    type Output = Vec2;
    #[inline]
    fn add(self, o: Vec2) -> Vec2 {
        Vec2::new(self.x + o.x, self.y + o.y)
    }
}

impl AddAssign for Vec2 {
    #[inline]
    fn add_assign(&mut self, o: Vec2) {
        self.x += o.x;
        self.y += o.y;
    }
}

impl Sub for Vec2 {
    type Output = Vec2;
    #[inline]
    fn sub(self, o: Vec2) -> Vec2 {
        Vec2::new(self.x - o.x, self.y - o.y)
    }
}

impl SubAssign for Vec2 {
    #[inline]
    fn sub_assign(&mut self, o: Vec2) {
        self.x -= o.x;
        self.y -= o.y;
    }
}

impl Neg for Vec2 {
    type Output = Vec2;
    #[inline]
    fn neg(self) -> Vec2 {
        Vec2::new(-self.x, -self.y)
    }
}

impl Mul<f64> for Vec2 {
    type Output = Vec2;
    #[inline]
    fn mul(self, s: f64) -> Vec2 {
        Vec2::new(self.x * s, self.y * s)
    }
}

impl Mul<Vec2> for f64 {
    type Output = Vec2;
    #[inline]
    fn mul(self, v: Vec2) -> Vec2 {
        v * self
    }
}

impl Div<f64> for Vec2 {
    type Output = Vec2;
    #[inline]
    fn div(self, s: f64) -> Vec2 {
        Vec2::new(self.x / s, self.y / s)
    }
}

/// Row-major 2x2 matrix.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Mat2 {
    pub a11: f64,
    pub a12: f64,
    pub a21: f64,
    pub a22: f64,
}

impl Mat2 {
    pub const IDENTITY: Mat2 = Mat2::new(1.0, 0.0, 0.0, 1.0);

    /// The 90-degree counterclockwise rotation; `ROT90 * ROT90 == -I`,
    /// `det ROT90 == 1`.
    pub const ROT90: Mat2 = Mat2::new(0.0, -1.0, 1.0, 0.0);

    #[inline]
    pub const fn new(a11: f64, a12: f64, a21: f64, a22: f64) -> Self {
        Mat2 { a11, a12, a21, a22 }
    }

    /// Outer product `a bᵀ`.
    #[inline]
    pub fn outer(a: Vec2, b: Vec2) -> Mat2 {
        Mat2::new(a.x * b.x, a.x * b.y, a.y * b.x, a.y * b.y)
    }

    #[inline]
    pub fn det(self) -> f64 {
        self.a11 * self.a22 - self.a12 * self.a21
    }

    #[inline]
    pub fn trace(self) -> f64 {
        self.a11 + self.a22
    }

    #[inline]
    pub fn transpose(self) -> Mat2 {
        Mat2::new(self.a11, self.a21, self.a12, self.a22)
    }

    /// Frobenius norm.
    #[inline]
    pub fn norm(self) -> f64 {
        (self.a11 * self.a11 + self.a12 * self.a12 + self.a21 * self.a21 + self.a22 * self.a22)
            .sqrt()
    }

    /// Inverse via the 2x2 adjugate closed form. `None` when `|det|` is
    /// below `tol` times the squared norm scale.
    pub fn inverse(self, tol: f64) -> Option<Mat2> {
        let d = self.det();
        let scale = self.norm();
        if d.abs() <= tol * scale * scale {
            return None;
        }
        Some(Mat2::new(self.a22 / d, -self.a12 / d, -self.a21 / d, self.a11 / d))
    }

    #[inline]
    pub fn apply(self, v: Vec2) -> Vec2 {
        Vec2::new(self.a11 * v.x + self.a12 * v.y, self.a21 * v.x + self.a22 * v.y)
    }

    #[inline]
    pub fn matmul(self, o: Mat2) -> Mat2 {
        Mat2::new(
            self.a11 * o.a11 + self.a12 * o.a21,
            self.a11 * o.a12 + self.a12 * o.a22,
            self.a21 * o.a11 + self.a22 * o.a21,
            self.a21 * o.a12 + self.a22 * o.a22,
        )
    }

    #[inline]
    pub fn scale(self, s: f64) -> Mat2 {
        Mat2::new(self.a11 * s, self.a12 * s, self.a21 * s, self.a22 * s)
    }

    #[inline]
    pub fn is_finite(self) -> bool {
        self.a11.is_finite() && self.a12.is_finite() && self.a21.is_finite() && self.a22.is_finite()
    }
}

impl Add for Mat2 {
    type Output = Mat2;
    #[inline]
    fn add(self, o: Mat2) -> Mat2 {
        Mat2::new(self.a11 + o.a11, self.a12 + o.a12, self.a21 + o.a21, self.a22 + o.a22)
    }
}

impl Sub for Mat2 {
    type Output = Mat2;
    #[inline]
    fn sub(self, o: Mat2) -> Mat2 {
        Mat2::new(self.a11 - o.a11, self.a12 - o.a12, self.a21 - o.a21, self.a22 - o.a22)
    }
}

impl Neg for Mat2 {
    type Output = Mat2;
    #[inline]
    fn neg(self) -> Mat2 {
        self.scale(-1.0)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn det2_unit_basis() {
        assert_eq!(det2(Vec2::new(1.0, 0.0), Vec2::new(0.0, 1.0)), 1.0);
    }

    #[test]
    fn det2_repeated_argument_is_zero() {
        let v = Vec2::new(3.7, -1.2);
        assert_eq!(det2(v, v), 0.0);
    }

    #[test]
    fn det2_direct_arithmetic() {
        assert_eq!(det2(Vec2::new(1.0, 2.0), Vec2::new(3.0, 4.0)), -2.0);
    }

    #[test]
    fn det2_equals_minus_a_rot_b() {
        let a = Vec2::new(0.3, -2.1);
        let b = Vec2::new(1.7, 0.4);
        let via_rot = -a.dot(Mat2::ROT90.apply(b));
        assert!((det2(a, b) - via_rot).abs() < 1e-15);
    }

    #[test]
    fn rot90_squares_to_minus_identity() {
        let r2 = Mat2::ROT90.matmul(Mat2::ROT90);
        assert_eq!(r2, Mat2::new(-1.0, 0.0, 0.0, -1.0));
        assert_eq!(Mat2::ROT90.det(), 1.0);
    }

    #[test]
    fn inverse_roundtrip() {
        let m = Mat2::new(2.0, 1.0, -0.5, 3.0);
        let inv = m.inverse(1e-12).unwrap();
        let p = m.matmul(inv);
        assert!((p.a11 - 1.0).abs() < 1e-14);
        assert!(p.a12.abs() < 1e-14);
        assert!(p.a21.abs() < 1e-14);
        assert!((p.a22 - 1.0).abs() < 1e-14);
    }
}
