//! Sampled covariogram grids: construction, CSV interchange, bicubic
//! interpolation, and recovery of the covariogram support from grid data.

use std::io::{BufRead, Write};

use crate::error::{Error, Result};
use crate::geom::polygon::{convex_hull_points, ConvexPolygon};
use crate::geom::{difference_body, ConvexBody, Vec2};

use super::lens::SelfOverlap;

/// Polygonization resolution behind sampled grids and analytic oracles;
/// chosen so the inscribed-polygon area bias stays below 1e-9 for
/// unit-scale bodies.
pub const ORACLE_POLYGONIZE: usize = 1 << 18;

/// Covariogram sampled on a square n×n grid, centered on the origin and
/// covering the bounding box of the difference body with a few cells of
/// zero margin.
#[derive(Debug, Clone)]
pub struct CovariogramGrid {
    origin: Vec2,
    spacing: f64,
    n: usize,
    /// Row-major: `values[iy * n + ix]`.
    values: Vec<f64>,
    body_id: String,
}

impl CovariogramGrid {
    /// Wraps raw sampled values. Validates shape and non-negativity.
    pub fn from_values(
        origin: Vec2,
        spacing: f64,
        n: usize,
        values: Vec<f64>,
        body_id: String,
    ) -> Result<Self> {
        if values.len() != n * n {
            return Err(Error::BadGrid(format!(
                "expected {} values, got {}",
                n * n,
                values.len()
            )));
        }
        if !(spacing > 0.0) || !origin.is_finite() {
            return Err(Error::BadGrid("non-positive spacing or bad origin".into()));
        }
        if values.iter().any(|v| !v.is_finite() || *v < 0.0) {
            return Err(Error::BadGrid("values must be finite and >= 0".into()));
        }
        Ok(CovariogramGrid {
            origin,
            spacing,
            n,
            values,
            body_id,
        })
    }

    #[inline]
    pub fn origin(&self) -> Vec2 {
        self.origin
    }

    #[inline]
    pub fn spacing(&self) -> f64 {
        self.spacing
    }

    #[inline]
    pub fn n(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn values(&self) -> &[f64] {
        &self.values
    }

    #[inline]
    pub fn body_id(&self) -> &str {
        &self.body_id
    }

    #[inline]
    pub fn at(&self, ix: usize, iy: usize) -> f64 {
        self.values[iy * self.n + ix]
    }

    #[inline]
    pub fn point(&self, ix: usize, iy: usize) -> Vec2 {
        self.origin + Vec2::new(ix as f64 * self.spacing, iy as f64 * self.spacing)
    }

    /// Bicubic (Catmull-Rom) interpolation; zero outside the grid.
    pub fn interpolate(&self, p: Vec2) -> f64 {
        let gx = (p.x - self.origin.x) / self.spacing;
        let gy = (p.y - self.origin.y) / self.spacing;
        if gx < 0.0 || gy < 0.0 || gx > (self.n - 1) as f64 || gy > (self.n - 1) as f64 {
            return 0.0;
        }
        let ix = (gx.floor() as usize).min(self.n - 2);
        let iy = (gy.floor() as usize).min(self.n - 2);
        let tx = gx - ix as f64;
        let ty = gy - iy as f64;
        let wx = catmull_rom_weights(tx);
        let wy = catmull_rom_weights(ty);
        let mut acc = 0.0;
        for dy in 0..4usize {
            let jy = (iy + dy).saturating_sub(1).min(self.n - 1);
            let mut row = 0.0;
            for dx in 0..4usize {
                let jx = (ix + dx).saturating_sub(1).min(self.n - 1);
                row += wx[dx] * self.at(jx, jy);
            }
            acc += wy[dy] * row;
        }
        acc
    }

    /// Writes the grid as CSV with header `x,y,g`, row-major.
    pub fn write_csv<W: Write>(&self, mut w: W) -> Result<()> {
        writeln!(w, "x,y,g")?;
        for iy in 0..self.n {
            for ix in 0..self.n {
                let p = self.point(ix, iy);
                writeln!(w, "{},{},{}", p.x, p.y, self.at(ix, iy))?;
            }
        }
        Ok(())
    }

    /// Reads a grid written by [`CovariogramGrid::write_csv`], validating
    /// square shape and uniform spacing.
    pub fn read_csv<R: BufRead>(r: R) -> Result<Self> {
        let mut xs = Vec::new();
        let mut ys = Vec::new();
        let mut gs = Vec::new();
        for (lineno, line) in r.lines().enumerate() {
            let line = line?;
            let line = line.trim();
            if line.is_empty() || (lineno == 0 && line.starts_with('x')) {
                continue;
            }
            let mut parts = line.split(',');
            let parse = |s: Option<&str>| -> Result<f64> {
                s.ok_or_else(|| Error::BadGrid(format!("short row at line {lineno}")))?
                    .trim()
                    .parse::<f64>()
                    .map_err(|e| Error::BadGrid(format!("line {lineno}: {e}")))
            };
            xs.push(parse(parts.next())?);
            ys.push(parse(parts.next())?);
            gs.push(parse(parts.next())?);
        }
        let count = gs.len();
        let n = (count as f64).sqrt().round() as usize;
        if n < 2 || n * n != count {
            return Err(Error::BadGrid(format!("{count} rows is not a square grid")));
        }
        let origin = Vec2::new(xs[0], ys[0]);
        let spacing = xs[1] - xs[0];
        if !(spacing > 0.0) {
            return Err(Error::BadGrid("non-increasing x spacing".into()));
        }
        let tol = spacing * 1e-6;
        for iy in 0..n {
            for ix in 0..n {
                let k = iy * n + ix;
                let expect_x = origin.x + ix as f64 * spacing;
                let expect_y = origin.y + iy as f64 * spacing;
                if (xs[k] - expect_x).abs() > tol || (ys[k] - expect_y).abs() > tol {
                    return Err(Error::BadGrid(format!(
                        "non-uniform grid at row {k}: ({}, {})",
                        xs[k], ys[k]
                    )));
                }
            }
        }
        CovariogramGrid::from_values(origin, spacing, n, gs, String::new())
    }

    /// Extracts boundary points of the covariogram support (the difference
    /// body) from the sampled values. Near the support boundary the
    /// covariogram vanishes like dist^{3/2}, so the zero crossing along each
    /// grid line is located by linear extrapolation of g^{2/3}.
    pub fn support_boundary_points(&self) -> Vec<Vec2> {
        let n = self.n;
        let mut pts = Vec::new();
        let value_floor = 1e-7 * self.values.iter().cloned().fold(0.0, f64::max).max(1e-300);
        let mut scan = |line: &dyn Fn(usize) -> (Vec2, f64)| {
            // Walk outward from the max along the line; extrapolate the last
            // solid pair to the zero of g^{2/3}.
            let vals: Vec<(Vec2, f64)> = (0..n).map(line).collect();
            let mut best = 0;
            for (i, v) in vals.iter().enumerate() {
                if v.1 > vals[best].1 {
                    best = i;
                }
            }
            if vals[best].1 <= value_floor {
                return;
            }
            for dir in [1isize, -1isize] {
                let mut last: Option<usize> = None;
                let mut i = best as isize;
                while i >= 0 && (i as usize) < n {
                    if vals[i as usize].1 >= value_floor {
                        last = Some(i as usize);
                    } else if last.is_some() {
                        break;
                    }
                    i += dir;
                }
                let Some(b) = last else { continue };
                let border = if dir > 0 { n - 1 } else { 0 };
                if b == border {
                    // Positive all the way to the grid edge: the support
                    // reaches (at least) the sampled region.
                    pts.push(vals[b].0);
                    continue;
                }
                let a = (b as isize - dir) as usize;
                if a >= n || vals[a].1 <= vals[b].1 {
                    pts.push(vals[b].0);
                    continue;
                }
                let za = vals[a].1.powf(2.0 / 3.0);
                let zb = vals[b].1.powf(2.0 / 3.0);
                let t = (zb / (za - zb)).clamp(0.0, 1.5);
                let pb = vals[b].0;
                pts.push(pb + (pb - vals[a].0) * t);
            }
        };
        for ix in 0..n {
            let col = |iy: usize| (self.point(ix, iy), self.at(ix, iy));
            scan(&col);
        }
        for iy in 0..n {
            let row = |ix: usize| (self.point(ix, iy), self.at(ix, iy));
            scan(&row);
        }
        pts
    }

    /// Convex polygon estimate of the covariogram support.
    pub fn support_polygon(&self) -> Result<ConvexPolygon> {
        let hull = convex_hull_points(self.support_boundary_points());
        ConvexPolygon::from_loop(hull)
            .ok_or_else(|| Error::BadGrid("could not recover the support region".into()))
    }
}

fn catmull_rom_weights(t: f64) -> [f64; 4] {
    let t2 = t * t;
    let t3 = t2 * t;
    [
        -0.5 * t3 + t2 - 0.5 * t,
        1.5 * t3 - 2.5 * t2 + 1.0,
        -1.5 * t3 + 2.0 * t2 + 0.5 * t,
        0.5 * t3 - 0.5 * t2,
    ]
}

/// Samples the covariogram of `body` on an n×n grid covering the bounding
/// box of its difference body (n >= 32), with the grid symmetric about the
/// origin and a few cells of zero margin on each side.
pub fn covariogram_grid(body: &ConvexBody, n: usize) -> Result<CovariogramGrid> {
    if n < 32 {
        return Err(Error::TooFewSamples { min: 32, got: n });
    }
    let dk = difference_body(body);
    let (lo, hi) = dk.bounding_box();
    let extent = (hi.x - lo.x).max(hi.y - lo.y);
    let spacing = extent / (n - 9) as f64;
    let half = (n - 1) as f64 / 2.0 * spacing;
    let origin = Vec2::new(-half, -half);

    let overlap = match body {
        ConvexBody::Polygon(p) => SelfOverlap::new(p.clone()),
        ConvexBody::Support(s) => SelfOverlap::new(s.polygonize(ORACLE_POLYGONIZE)?),
    };
    let mut values = vec![0.0; n * n];
    for iy in 0..n {
        let y = origin.y + iy as f64 * spacing;
        for ix in 0..n {
            let x = origin.x + ix as f64 * spacing;
            values[iy * n + ix] = overlap.value(Vec2::new(x, y));
        }
    }
    CovariogramGrid::from_values(origin, spacing, n, values, String::new())
}
