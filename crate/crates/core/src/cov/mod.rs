//! Covariogram evaluation (exact for polygons, polygonization-backed for
//! support bodies), sampled grids, finite-difference oracles, spectral
//! consistency checks, and chord-length distributions.

pub mod chord;
pub mod grid;
pub mod lens;
pub mod oracle;
pub mod spectral;

use crate::geom::polygon::{convex_intersection, ConvexPolygon};
use crate::geom::{ConvexBody, Vec2};
use lens::SelfOverlap;

/// Default polygonization resolution for one-off support-body evaluations.
/// The inscribed-polygon area bias is O(perimeter / n²).
pub const DEFAULT_POLYGONIZE: usize = 4096;

/// Covariogram value: area(K ∩ (K + x)). Exact for polygons up to floating
/// round-off; support bodies are evaluated through their inscribed polygon
/// at [`DEFAULT_POLYGONIZE`] vertices. Zero outside the difference body.
pub fn covariogram_value(body: &ConvexBody, x: Vec2) -> f64 {
    match body {
        ConvexBody::Polygon(p) => polygon_covariogram(p, x),
        ConvexBody::Support(s) => {
            let poly = s
                .polygonize(DEFAULT_POLYGONIZE)
                .expect("validated support body polygonizes");
            SelfOverlap::new(poly).value(x)
        }
    }
}

fn polygon_covariogram(p: &ConvexPolygon, x: Vec2) -> f64 {
    if p.len() <= 64 {
        convex_intersection(p, &p.translate(x)).map_or(0.0, |q| q.area())
    } else {
        SelfOverlap::new(p.clone()).value(x)
    }
}

/// Cross covariogram: area(K ∩ (L + x)). Coincides with the covariogram
/// when K = L.
pub fn cross_covariogram(k: &ConvexBody, l: &ConvexBody, x: Vec2) -> f64 {
    let pk = body_polygon(k);
    let pl = body_polygon(l).translate(x);
    convex_intersection(&pk, &pl).map_or(0.0, |q| q.area())
}

fn body_polygon(body: &ConvexBody) -> ConvexPolygon {
    match body {
        ConvexBody::Polygon(p) => p.clone(),
        ConvexBody::Support(s) => s
            .polygonize(DEFAULT_POLYGONIZE)
            .expect("validated support body polygonizes"),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geom::support::SupportBody;
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
    fn square_covariogram_closed_form() {
        let k = unit_square();
        for (x, y) in [(0.5_f64, 0.0_f64), (0.25, -0.5), (-0.7, 0.3), (0.0, 0.0)] {
            let expect = if x.abs() < 1.0 && y.abs() < 1.0 {
                (1.0 - x.abs()) * (1.0 - y.abs())
            } else {
                0.0
            };
            let got = covariogram_value(&k, Vec2::new(x, y));
            assert!((got - expect).abs() < 1e-12, "({x},{y})");
        }
    }

    #[test]
    fn value_at_origin_is_area() {
        let k = unit_square();
        assert!((covariogram_value(&k, Vec2::ZERO) - 1.0).abs() < 1e-12);
        let disk = ConvexBody::Support(SupportBody::disk(1.0).unwrap());
        assert!((covariogram_value(&disk, Vec2::ZERO) - PI).abs() < 2e-6);
    }

    #[test]
    fn disk_covariogram_closed_form_at_unit_lag() {
        // Two unit disks with centers one apart: 2π/3 - √3/2.
        let disk = ConvexBody::Support(SupportBody::disk(1.0).unwrap());
        let expect = 2.0 * PI / 3.0 - 3f64.sqrt() / 2.0;
        let got = covariogram_value(&disk, Vec2::new(1.0, 0.0));
        assert!((got - expect).abs() < 2e-6, "{got} vs {expect}");
    }

    #[test]
    fn monte_carlo_oracle_disk_unit_lag() {
        // 10^6 quasi-uniform samples in the bounding box of the overlap of
        // the two disks; agreement within a generous sampling band.
        let mut state: u64 = 0x9E3779B97F4A7C15;
        let mut next = || {
            // SplitMix64
            state = state.wrapping_add(0x9E3779B97F4A7C15);
            let mut z = state;
            z = (z ^ (z >> 30)).wrapping_mul(0xBF58476D1CE4E5B9);
            z = (z ^ (z >> 27)).wrapping_mul(0x94D049BB133111EB);
            (z ^ (z >> 31)) as f64 / u64::MAX as f64
        };
        let n = 1_000_000;
        let mut hits = 0u32;
        // box [0,1] x [-1,1] contains the overlap of disks at o and (1,0)
        for _ in 0..n {
            let p = Vec2::new(next(), 2.0 * next() - 1.0);
            if p.norm() <= 1.0 && (p - Vec2::new(1.0, 0.0)).norm() <= 1.0 {
                hits += 1;
            }
        }
        let est = 2.0 * hits as f64 / n as f64;
        let expect = 2.0 * PI / 3.0 - 3f64.sqrt() / 2.0;
        let sigma = 2.0 * (expect / 2.0 * (1.0 - expect / 2.0) / n as f64).sqrt();
        assert!((est - expect).abs() < 4.0 * sigma, "{est} vs {expect}");
    }

    #[test]
    fn evenness_and_translation_reflection_invariance() {
        let k = unit_square();
        let t = Vec2::new(0.37, -1.2);
        let kt = k.translate(t);
        let kr = k.reflect_about(Vec2::new(0.1, 0.4));
        let mut s: u64 = 7;
        for _ in 0..100 {
            s = s.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
            let a = ((s >> 32) as f64 / u32::MAX as f64) * 2.4 - 1.2;
            s = s.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
            let b = ((s >> 32) as f64 / u32::MAX as f64) * 2.4 - 1.2;
            let x = Vec2::new(a, b);
            let g = covariogram_value(&k, x);
            assert!((g - covariogram_value(&k, -x)).abs() < 1e-12);
            assert!((g - covariogram_value(&kt, x)).abs() < 1e-12);
            assert!((g - covariogram_value(&kr, x)).abs() < 1e-12);
        }
    }

    #[test]
    fn support_is_difference_body() {
        let k = unit_square();
        // supp g = [-1,1]²: positive strictly inside, zero outside.
        assert!(covariogram_value(&k, Vec2::new(0.999, 0.999)) > 0.0);
        assert_eq!(covariogram_value(&k, Vec2::new(1.001, 0.0)), 0.0);
        assert_eq!(covariogram_value(&k, Vec2::new(0.0, -1.001)), 0.0);
    }

    #[test]
    fn monotone_along_rays() {
        let body = ConvexBody::Support(SupportBody::new(1.0, vec![0.0, 0.0, 0.1], vec![]).unwrap());
        let u = Vec2::from_angle(0.7);
        let mut prev = f64::INFINITY;
        for i in 0..40 {
            let g = covariogram_value(&body, u * (i as f64 * 0.05));
            assert!(g <= prev + 1e-9);
            prev = g;
        }
    }

    #[test]
    fn cross_covariogram_reduces_to_covariogram() {
        let k = unit_square();
        for (x, y) in [(0.3, 0.2), (-0.5, 0.1)] {
            let a = cross_covariogram(&k, &k, Vec2::new(x, y));
            let b = covariogram_value(&k, Vec2::new(x, y));
            assert!((a - b).abs() < 1e-12);
        }
    }

    #[test]
    fn cross_covariogram_disjoint_is_zero() {
        let k = unit_square();
        let l = k.translate(Vec2::new(5.0, 0.0));
        assert_eq!(cross_covariogram(&k, &l, Vec2::ZERO), 0.0);
    }

    #[test]
    fn cross_covariogram_square_disk() {
        // Unit square [0,1]² against the unit disk at the origin, no lag:
        // the overlap is a quarter disk.
        let k = unit_square();
        let disk = ConvexBody::Support(SupportBody::disk(1.0).unwrap());
        let got = cross_covariogram(&k, &disk, Vec2::ZERO);
        assert!((got - PI / 4.0).abs() < 1e-5, "{got}");
        // Raster oracle at 1024².
        let n = 1024;
        let mut count = 0u64;
        for i in 0..n {
            for j in 0..n {
                let p = Vec2::new((i as f64 + 0.5) / n as f64, (j as f64 + 0.5) / n as f64);
                if p.norm() <= 1.0 {
                    count += 1;
                }
            }
        }
        let raster = count as f64 / (n * n) as f64;
        assert!((got - raster).abs() < 2e-3);
    }
}
