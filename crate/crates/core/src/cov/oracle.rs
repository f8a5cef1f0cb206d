//! The covariogram oracle: a uniform interface to g, ∇g, and the Hessian G
//! at a lag, backed either by a body (values via its inscribed polygon) or
//! by a sampled grid (values via bicubic interpolation). Derivatives are
//! always central finite differences of the value path, so the oracle stays
//! independent of the analytic parallelogram formulas it is used to check.

use crate::error::{Error, Result};
use crate::geom::polygon::ConvexPolygon;
use crate::geom::{difference_body, ConvexBody, Mat2, Vec2};

use super::grid::{CovariogramGrid, ORACLE_POLYGONIZE};
use super::lens::SelfOverlap;

/// Sampling-domain margin as a fraction of the difference-body diameter:
/// lags closer than this to the support boundary or to the origin are
/// excluded from derivative-based operations.
pub const DOMAIN_MARGIN_FRACTION: f64 = 0.02;

enum Backing {
    Analytic {
        body: ConvexBody,
        overlap: SelfOverlap,
        dk: ConvexBody,
    },
    Grid {
        grid: CovariogramGrid,
        dk_poly: ConvexPolygon,
    },
}

/// Uniform access to covariogram values and finite-difference derivatives.
pub struct CovariogramOracle {
    backing: Backing,
    step: f64,
    dk_diameter: f64,
    margin: f64,
}

impl CovariogramOracle {
    /// Oracle backed by the body itself. Support bodies are polygonized at
    /// [`ORACLE_POLYGONIZE`] vertices so that value(0) matches the exact
    /// area to ~1e-9 at unit scale; the finite-difference step defaults to
    /// 1e-4 times the difference-body diameter.
    pub fn analytic(body: &ConvexBody) -> Result<Self> {
        Self::analytic_with_resolution(body, ORACLE_POLYGONIZE)
    }

    pub fn analytic_with_resolution(body: &ConvexBody, n_poly: usize) -> Result<Self> {
        let overlap = match body {
            ConvexBody::Polygon(p) => SelfOverlap::new(p.clone()),
            ConvexBody::Support(s) => SelfOverlap::new(s.polygonize(n_poly)?),
        };
        let dk = difference_body(body);
        let dk_diameter = dk.diameter();
        Ok(CovariogramOracle {
            backing: Backing::Analytic {
                body: body.clone(),
                overlap,
                dk,
            },
            step: 1e-4 * dk_diameter,
            dk_diameter,
            margin: DOMAIN_MARGIN_FRACTION * dk_diameter,
        })
    }

    /// Oracle backed by sampled data only. The support region is recovered
    /// from the grid; the finite-difference step defaults to twice the grid
    /// spacing.
    pub fn from_grid(grid: CovariogramGrid) -> Result<Self> {
        let dk_poly = grid.support_polygon()?;
        let dk_diameter = ConvexBody::Polygon(dk_poly.clone()).diameter();
        let step = 2.0 * grid.spacing();
        Ok(CovariogramOracle {
            backing: Backing::Grid { grid, dk_poly },
            step,
            dk_diameter,
            margin: DOMAIN_MARGIN_FRACTION * dk_diameter,
        })
    }

    pub fn with_step(mut self, step: f64) -> Self {
        self.step = step.abs().max(1e-300);
        self
    }

    #[inline]
    pub fn step(&self) -> f64 {
        self.step
    }

    #[inline]
    pub fn dk_diameter(&self) -> f64 {
        self.dk_diameter
    }

    #[inline]
    pub fn margin(&self) -> f64 {
        self.margin
    }

    /// The backing body, when the oracle is body-backed.
    pub fn body(&self) -> Option<&ConvexBody> {
        match &self.backing {
            Backing::Analytic { body, .. } => Some(body),
            Backing::Grid { .. } => None,
        }
    }

    pub fn grid(&self) -> Option<&CovariogramGrid> {
        match &self.backing {
            Backing::Grid { grid, .. } => Some(grid),
            Backing::Analytic { .. } => None,
        }
    }

    /// Covariogram value at lag `x`; zero outside the support.
    pub fn value(&self, x: Vec2) -> f64 {
        match &self.backing {
            Backing::Analytic { overlap, .. } => overlap.value(x),
            Backing::Grid { grid, dk_poly } => {
                if dk_poly.contains(x, 1e-9 * self.dk_diameter) {
                    grid.interpolate(x).max(0.0)
                } else {
                    0.0
                }
            }
        }
    }

    /// Signed distance from `x` to the boundary of the covariogram support
    /// (negative inside).
    pub fn dk_signed_distance(&self, x: Vec2) -> f64 {
        match &self.backing {
            Backing::Analytic { dk, .. } => {
                let d = dk.boundary_distance(x);
                if dk.contains(x, 0.0) {
                    -d
                } else {
                    d
                }
            }
            Backing::Grid { dk_poly, .. } => {
                let d = dk_poly.boundary_distance(x);
                if dk_poly.contains(x, 0.0) {
                    -d
                } else {
                    d
                }
            }
        }
    }

    /// Whether `x` lies in the margin-shrunk sampling domain
    /// (strictly inside the support, away from the origin).
    pub fn in_sampling_domain(&self, x: Vec2) -> bool {
        x.norm() >= self.margin && self.dk_signed_distance(x) <= -self.margin
    }

    /// Weaker admissibility: just enough clearance from the origin and the
    /// support boundary for the finite-difference stencils. Derived lags
    /// (conjugates, hexagon lags) are allowed here even when they fall
    /// inside the sampling margin.
    pub fn in_derivative_domain(&self, x: Vec2) -> bool {
        let clearance = 4.0 * self.step;
        x.norm() >= clearance && self.dk_signed_distance(x) <= -clearance
    }

    fn check_stencil(&self, x: Vec2, radius: f64) -> Result<()> {
        if !x.is_finite() {
            return Err(Error::NonFinite("lag"));
        }
        if x.norm() <= 1.5 * radius {
            return Err(Error::StencilOutsideDomain);
        }
        for (dx, dy) in [(1.0, 0.0), (-1.0, 0.0), (0.0, 1.0), (0.0, -1.0), (1.0, 1.0), (1.0, -1.0), (-1.0, 1.0), (-1.0, -1.0)] {
            let p = x + Vec2::new(dx, dy) * radius;
            if self.dk_signed_distance(p) >= 0.0 {
                return Err(Error::StencilOutsideDomain);
            }
        }
        Ok(())
    }

    /// Central-difference gradient with the oracle's step.
    pub fn gradient(&self, x: Vec2) -> Result<Vec2> {
        let h = self.step;
        self.check_stencil(x, h)?;
        let gx = (self.value(x + Vec2::new(h, 0.0)) - self.value(x - Vec2::new(h, 0.0))) / (2.0 * h);
        let gy = (self.value(x + Vec2::new(0.0, h)) - self.value(x - Vec2::new(0.0, h))) / (2.0 * h);
        Ok(Vec2::new(gx, gy))
    }

    /// Central-difference Hessian (symmetric by construction).
    pub fn hessian(&self, x: Vec2) -> Result<Mat2> {
        let h = self.step;
        self.check_stencil(x, h * std::f64::consts::SQRT_2)?;
        let g0 = self.value(x);
        let gpx = self.value(x + Vec2::new(h, 0.0));
        let gmx = self.value(x - Vec2::new(h, 0.0));
        let gpy = self.value(x + Vec2::new(0.0, h));
        let gmy = self.value(x - Vec2::new(0.0, h));
        let gpp = self.value(x + Vec2::new(h, h));
        let gpm = self.value(x + Vec2::new(h, -h));
        let gmp = self.value(x + Vec2::new(-h, h));
        let gmm = self.value(x + Vec2::new(-h, -h));
        let h2 = h * h;
        let gxx = (gpx - 2.0 * g0 + gmx) / h2;
        let gyy = (gpy - 2.0 * g0 + gmy) / h2;
        let gxy = (gpp - gpm - gmp + gmm) / (4.0 * h2);
        Ok(Mat2::new(gxx, gxy, gxy, gyy))
    }
}

/// Central-difference gradient of the oracle's value field.
pub fn fd_gradient(oracle: &CovariogramOracle, x: Vec2) -> Result<Vec2> {
    oracle.gradient(x)
}

/// Central-difference Hessian of the oracle's value field.
pub fn fd_hessian(oracle: &CovariogramOracle, x: Vec2) -> Result<Mat2> {
    oracle.hessian(x)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cov::grid::covariogram_grid;
    use crate::geom::{ConvexPolygon, SupportBody};

    fn unit_square_body() -> ConvexBody {
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
    fn analytic_value_at_origin_is_area() {
        let disk = ConvexBody::Support(SupportBody::disk(1.0).unwrap());
        let o = CovariogramOracle::analytic(&disk).unwrap();
        assert!((o.value(Vec2::ZERO) - std::f64::consts::PI).abs() < 1e-9);
    }

    #[test]
    fn oracle_value_is_even() {
        let body = ConvexBody::Support(SupportBody::new(1.0, vec![0.0, 0.0, 0.1], vec![]).unwrap());
        let o = CovariogramOracle::analytic(&body).unwrap();
        for k in 0..16 {
            let x = Vec2::from_angle(0.4 * k as f64) * (0.3 + 0.05 * k as f64);
            assert!((o.value(x) - o.value(-x)).abs() < 1e-12);
        }
    }

    #[test]
    fn disk_fd_gradient_matches_closed_form() {
        // g(r) = 2 acos(r/2) - r sqrt(1 - r²/4), so g'(1) = -√3.
        let disk = ConvexBody::Support(SupportBody::disk(1.0).unwrap());
        let o = CovariogramOracle::analytic(&disk).unwrap();
        let g = o.gradient(Vec2::new(1.0, 0.0)).unwrap();
        assert!((g.x + 3f64.sqrt()).abs() < 1e-5, "gx = {}", g.x);
        assert!(g.y.abs() < 1e-5);
    }

    #[test]
    fn fd_gradient_is_odd() {
        let body = ConvexBody::Support(SupportBody::new(1.0, vec![0.0, 0.0, 0.1], vec![]).unwrap());
        let o = CovariogramOracle::analytic(&body).unwrap();
        let x = Vec2::new(0.8, 0.1);
        let a = o.gradient(x).unwrap();
        let b = o.gradient(-x).unwrap();
        assert!((a + b).norm() < 1e-6);
    }

    #[test]
    fn synthetic_quadratic_grid_hessian() {
        // Feed the quadratic field 1 + x₁² as a grid (positive everywhere, so
        // the recovered support spans the grid); the finite-difference
        // Hessian of the interpolant must recover [[2,0],[0,0]].
        let n = 64;
        let spacing = 0.05;
        let half = (n - 1) as f64 / 2.0 * spacing;
        let origin = Vec2::new(-half, -half);
        let mut values = vec![0.0; n * n];
        for iy in 0..n {
            for ix in 0..n {
                let x = origin.x + ix as f64 * spacing;
                values[iy * n + ix] = 1.0 + x * x;
            }
        }
        let grid = CovariogramGrid::from_values(origin, spacing, n, values, String::new()).unwrap();
        let o = CovariogramOracle::from_grid(grid).unwrap();
        let h = o.hessian(Vec2::new(0.4, 0.3)).unwrap();
        assert!((h.a11 - 2.0).abs() < 1e-6, "a11 {}", h.a11);
        assert!(h.a12.abs() < 1e-6);
        assert!(h.a22.abs() < 1e-6);
    }

    #[test]
    fn grid_and_analytic_oracles_agree() {
        let body = unit_square_body();
        let grid = covariogram_grid(&body, 256).unwrap();
        let og = CovariogramOracle::from_grid(grid).unwrap();
        let oa = CovariogramOracle::analytic(&body).unwrap();
        for (x, y) in [(0.3, 0.1), (-0.2, 0.5), (0.6, -0.3)] {
            let p = Vec2::new(x, y);
            assert!((og.value(p) - oa.value(p)).abs() < 1e-3);
            let ga = oa.gradient(p).unwrap();
            let gg = og.gradient(p).unwrap();
            assert!((ga - gg).norm() < 0.05, "at {p:?}: {ga:?} vs {gg:?}");
        }
    }

    #[test]
    fn stencil_outside_domain_rejected() {
        let disk = ConvexBody::Support(SupportBody::disk(1.0).unwrap());
        let o = CovariogramOracle::analytic(&disk).unwrap();
        assert!(matches!(
            o.gradient(Vec2::new(1.9999, 0.0)),
            Err(Error::StencilOutsideDomain)
        ));
        assert!(matches!(
            o.gradient(Vec2::new(1e-6, 0.0)),
            Err(Error::StencilOutsideDomain)
        ));
    }
}
