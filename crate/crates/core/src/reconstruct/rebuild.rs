//! Symmetric-body reconstruction, body comparison up to translation and
//! reflection, and the covariogram-equality harness.

use serde::{Deserialize, Serialize};

use crate::cov::grid::covariogram_grid;
use crate::cov::lens::SelfOverlap;
use crate::cov::oracle::CovariogramOracle;
use crate::error::{Error, Result};
use crate::geom::polygon::ConvexPolygon;
use crate::geom::{difference_body, BodyJson, ConvexBody, Vec2};
use crate::symmetry::{central_symmetry_test, default_symmetry_tol, SymmetrySource};

/// Reconstructs a centrally symmetric body from its covariogram as half the
/// covariogram support. Refuses when the Monge-Ampère symmetry test fails.
pub fn reconstruct_symmetric(oracle: &CovariogramOracle) -> Result<ConvexBody> {
    let source = SymmetrySource::Oracle(oracle);
    let tol = default_symmetry_tol(&source);
    let verdict = central_symmetry_test(source, 128, tol)?;
    if !verdict.is_symmetric {
        return Err(Error::NotSymmetric(verdict.max_monge_ampere_residual));
    }
    match oracle.body() {
        Some(body) => {
            // Analytic backing: the support of g is the difference body,
            // exactly.
            match difference_body(body) {
                ConvexBody::Support(s) => Ok(ConvexBody::Support(s.scale(0.5))),
                ConvexBody::Polygon(p) => {
                    let halved: Vec<Vec2> = p.vertices().iter().map(|v| *v * 0.5).collect();
                    Ok(ConvexBody::Polygon(
                        ConvexPolygon::from_loop(halved).ok_or(Error::DegenerateArea)?,
                    ))
                }
            }
        }
        None => {
            let grid = oracle.grid().expect("oracle is grid-backed");
            let dk = grid.support_polygon()?;
            let halved: Vec<Vec2> = dk.vertices().iter().map(|v| *v * 0.5).collect();
            Ok(ConvexBody::Polygon(
                ConvexPolygon::from_loop(halved).ok_or(Error::DegenerateArea)?,
            ))
        }
    }
}

/// Hausdorff comparison of two bodies modulo translation and reflection.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct BodyComparison {
    pub hausdorff: f64,
    /// Whether the best match used the reflection of the second body.
    pub reflected: bool,
    /// Translation applied to the (possibly reflected) second body.
    pub translation: Vec2,
}

/// For convex bodies the Hausdorff distance equals the sup-norm distance of
/// support functions; the translation is optimized by centroid alignment
/// followed by a shrinking pattern search of the convex objective
/// max_u |h_A(u) - h_B(u) - <t, u>|.
pub fn compare_bodies(a: &ConvexBody, b: &ConvexBody) -> BodyComparison {
    const DIRS: usize = 512;
    let dirs: Vec<Vec2> = (0..DIRS)
        .map(|i| Vec2::from_angle(std::f64::consts::TAU * i as f64 / DIRS as f64))
        .collect();
    let ha: Vec<f64> = dirs.iter().map(|u| a.support(*u)).collect();

    let mut best = BodyComparison {
        hausdorff: f64::INFINITY,
        reflected: false,
        translation: Vec2::ZERO,
    };
    for reflected in [false, true] {
        let cand = if reflected {
            b.reflect_about(Vec2::ZERO)
        } else {
            b.clone()
        };
        let hb: Vec<f64> = dirs.iter().map(|u| cand.support(*u)).collect();
        let objective = |t: Vec2| -> f64 {
            let mut worst: f64 = 0.0;
            for i in 0..DIRS {
                worst = worst.max((ha[i] - hb[i] - t.dot(dirs[i])).abs());
            }
            worst
        };
        let mut t = a.centroid() - cand.centroid();
        let mut f = objective(t);
        let mut h = (f * 0.5).max(1e-12);
        for _ in 0..200 {
            let mut improved = false;
            for dir in [
                Vec2::new(1.0, 0.0),
                Vec2::new(-1.0, 0.0),
                Vec2::new(0.0, 1.0),
                Vec2::new(0.0, -1.0),
            ] {
                let cand_t = t + dir * h;
                let cand_f = objective(cand_t);
                if cand_f < f {
                    t = cand_t;
                    f = cand_f;
                    improved = true;
                }
            }
            if !improved {
                h *= 0.5;
                if h < 1e-14 {
                    break;
                }
            }
        }
        if f < best.hausdorff {
            best = BodyComparison {
                hausdorff: f,
                reflected,
                translation: t,
            };
        }
    }
    best
}

/// Max |g_K - g_L| over an n×n lattice covering the union of the two
/// difference-body bounding boxes.
pub fn equality_harness(k: &ConvexBody, l: &ConvexBody, n: usize) -> f64 {
    let overlap_of = |body: &ConvexBody| match body {
        ConvexBody::Polygon(p) => SelfOverlap::new(p.clone()),
        ConvexBody::Support(s) => SelfOverlap::new(
            s.polygonize(crate::cov::DEFAULT_POLYGONIZE)
                .expect("validated support body"),
        ),
    };
    let ok = overlap_of(k);
    let ol = overlap_of(l);
    let (klo, khi) = ok.difference_polygon().bounding_box();
    let (llo, lhi) = ol.difference_polygon().bounding_box();
    let lo = Vec2::new(klo.x.min(llo.x), klo.y.min(llo.y));
    let hi = Vec2::new(khi.x.max(lhi.x), khi.y.max(lhi.y));
    let n = n.max(2);
    let mut worst: f64 = 0.0;
    for iy in 0..n {
        for ix in 0..n {
            let p = Vec2::new(
                lo.x + (hi.x - lo.x) * ix as f64 / (n - 1) as f64,
                lo.y + (hi.y - lo.y) * iy as f64 / (n - 1) as f64,
            );
            worst = worst.max((ok.value(p) - ol.value(p)).abs());
        }
    }
    worst
}

/// Outcome of a reconstruction run, with an optional comparison against a
/// known ground-truth body.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ReconstructionReport {
    /// "symmetric" for half-support reconstruction, "arc" for traced arcs.
    pub mode: String,
    pub body: Option<BodyJson>,
    pub comparison: Option<BodyComparison>,
    pub diagnostics: Vec<String>,
}

impl ReconstructionReport {
    pub fn symmetric(body: &ConvexBody, truth: Option<&ConvexBody>) -> Self {
        ReconstructionReport {
            mode: "symmetric".into(),
            body: Some(body.to_json()),
            comparison: truth.map(|t| compare_bodies(t, body)),
            diagnostics: Vec::new(),
        }
    }
}

/// Convenience: grid-backed oracle of a body at resolution `n`.
pub fn grid_oracle(body: &ConvexBody, n: usize) -> Result<CovariogramOracle> {
    CovariogramOracle::from_grid(covariogram_grid(body, n)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geom::SupportBody;

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
    fn compare_translated_body() {
        let a = unit_square_body();
        let b = a.translate(Vec2::new(0.7, -0.3));
        let c = compare_bodies(&a, &b);
        assert!(c.hausdorff < 1e-9, "distance {}", c.hausdorff);
        assert!(!c.reflected);
        assert!((c.translation - Vec2::new(-0.7, 0.3)).norm() < 1e-6);
    }

    #[test]
    fn compare_reflected_body() {
        let tri = ConvexBody::Polygon(
            ConvexPolygon::new(vec![
                Vec2::new(0.0, 0.0),
                Vec2::new(1.0, 0.0),
                Vec2::new(0.0, 1.0),
            ])
            .unwrap(),
        );
        let b = tri.reflect_about(Vec2::ZERO).translate(Vec2::new(0.3, 0.4));
        let c = compare_bodies(&tri, &b);
        assert!(c.hausdorff < 1e-9, "distance {}", c.hausdorff);
        assert!(c.reflected);
    }

    #[test]
    fn compare_square_and_disk_of_equal_area() {
        let a = unit_square_body();
        let r = (1.0 / std::f64::consts::PI).sqrt();
        let disk = ConvexBody::Support(SupportBody::disk(r).unwrap());
        let c = compare_bodies(&a, &disk);
        assert!(c.hausdorff > 0.1, "distance {}", c.hausdorff);
    }

    #[test]
    fn harness_translation_and_reflection_zero() {
        let k = unit_square_body();
        assert!(equality_harness(&k, &k.translate(Vec2::new(0.4, 0.9)), 48) < 1e-12);
        assert!(equality_harness(&k, &k.reflect_about(Vec2::new(0.2, 0.1)), 48) < 1e-12);
    }

    #[test]
    fn harness_detects_scaling_at_origin() {
        let k = unit_square_body();
        let scaled = ConvexBody::Polygon(
            ConvexPolygon::new(vec![
                Vec2::new(0.0, 0.0),
                Vec2::new(1.01, 0.0),
                Vec2::new(1.01, 1.01),
                Vec2::new(0.0, 1.01),
            ])
            .unwrap(),
        );
        assert!(equality_harness(&k, &scaled, 33) > 0.01);
    }

    #[test]
    fn symmetric_reconstruction_analytic_ellipse() {
        let e = ConvexBody::Support(SupportBody::ellipse(1.0, 0.6).unwrap());
        let oracle = CovariogramOracle::analytic(&e).unwrap();
        let rec = reconstruct_symmetric(&oracle).unwrap();
        let c = compare_bodies(&e, &rec);
        assert!(c.hausdorff < 1e-9, "distance {}", c.hausdorff);
    }

    #[test]
    fn symmetric_reconstruction_refused_for_asymmetric_body() {
        let body =
            ConvexBody::Support(SupportBody::new(1.0, vec![0.0, 0.0, 0.1], vec![]).unwrap());
        let oracle = CovariogramOracle::analytic(&body).unwrap();
        assert!(matches!(
            reconstruct_symmetric(&oracle),
            Err(Error::NotSymmetric(_))
        ));
    }

    #[test]
    fn disk_grid_reconstruction_recovers_radius() {
        let disk = ConvexBody::Support(SupportBody::disk(1.0).unwrap());
        let oracle = grid_oracle(&disk, 512).unwrap();
        let spacing = oracle.grid().unwrap().spacing();
        let rec = reconstruct_symmetric(&oracle).unwrap();
        if let ConvexBody::Polygon(p) = &rec {
            for v in p.vertices() {
                assert!((v.norm() - 1.0).abs() < 2.0 * spacing, "radius {}", v.norm());
            }
        } else {
            panic!("expected polygon reconstruction");
        }
    }
}
