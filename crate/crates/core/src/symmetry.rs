//! Central-symmetry detection through the Monge-Ampère condition
//! det G ≡ -1, the affine-diameter characterization of inscribed
//! parallelogram diagonals, and the hexagon-inscription criterion.

use serde::{Deserialize, Serialize};

use crate::cov::oracle::CovariogramOracle;
use crate::error::{Error, Result};
use crate::geom::polygon::convex_hull_points;
use crate::geom::support::SupportBody;
use crate::geom::vec::{det2, rot90_inv, Vec2};
use crate::geom::{is_affine_diameter, ConvexBody};
use crate::identities::hessian_from;
use crate::parallelogram::{inscribed_parallelogram, InscribedParallelogram};
use crate::sampling::{low_discrepancy_2d, sample_domain};

/// Default Monge-Ampère tolerance for body-backed (analytic) inputs.
pub const ANALYTIC_SYMMETRY_TOL: f64 = 1e-6;

/// Seed recorded in verdicts for the quasi-uniform sample sequence.
pub const DEFAULT_SAMPLE_SEED: u64 = 17;

/// Input to the central-symmetry test: either covariogram data alone or a
/// strictly convex body (which additionally enables a direct geometric
/// cross-check).
pub enum SymmetrySource<'a> {
    Oracle(&'a CovariogramOracle),
    Body(&'a SupportBody),
}

/// Outcome of the Monge-Ampère central-symmetry test.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SymmetryVerdict {
    pub is_symmetric: bool,
    /// max |det G + 1| over the sample.
    pub max_monge_ampere_residual: f64,
    /// Lag realizing the maximum.
    pub witness: Vec2,
    pub samples_used: usize,
    pub tol: f64,
    pub seed: u64,
    /// Body-backed runs only: relative area defect of K against its
    /// reflection through its centroid (zero for centrally symmetric K).
    pub geometric_defect: Option<f64>,
}

/// Default tolerance for a source: 1e-6 for analytic backing, ten times the
/// estimated interpolation error of det G for grid backing.
pub fn default_symmetry_tol(source: &SymmetrySource<'_>) -> f64 {
    match source {
        SymmetrySource::Body(_) => ANALYTIC_SYMMETRY_TOL,
        SymmetrySource::Oracle(o) => match o.grid() {
            None => ANALYTIC_SYMMETRY_TOL,
            Some(g) => {
                // Bicubic second derivatives carry an O((s/d)²) relative
                // error; det G doubles it. The constant is calibrated
                // against the symmetric fixtures.
                let rel = g.spacing() / o.dk_diameter();
                (10.0 * 2000.0 * rel * rel).max(1e-6)
            }
        },
    }
}

/// Samples det G quasi-uniformly over the margin-shrunk lag domain and
/// tests max |det G + 1| <= tol. Body-backed inputs are cross-checked by
/// reflecting the body through its centroid and comparing areas.
pub fn central_symmetry_test(
    source: SymmetrySource<'_>,
    n_samples: usize,
    tol: f64,
) -> Result<SymmetryVerdict> {
    if n_samples < 64 {
        return Err(Error::TooFewSamples { min: 64, got: n_samples });
    }
    let seed = DEFAULT_SAMPLE_SEED;
    let mut max_residual: f64 = 0.0;
    let mut witness = Vec2::ZERO;
    let mut used = 0usize;
    match &source {
        SymmetrySource::Oracle(oracle) => {
            for x in sample_domain(oracle, n_samples, seed) {
                let det = oracle.hessian(x)?.det();
                used += 1;
                let r = (det + 1.0).abs();
                if r > max_residual {
                    max_residual = r;
                    witness = x;
                }
            }
        }
        SymmetrySource::Body(body) => {
            let dk = body.difference_body();
            let margin = 0.02 * dk.diameter();
            let r_box = dk.diameter() / 2.0 + margin;
            let mut k = 0u64;
            let mut guard = 0u64;
            while used < n_samples && guard < 1_000_000 {
                let (a, b) = low_discrepancy_2d(k, seed);
                k += 1;
                guard += 1;
                let x = Vec2::new((2.0 * a - 1.0) * r_box, (2.0 * b - 1.0) * r_box);
                if x.norm() < margin || dk.signed_boundary_distance(x).0 > -margin {
                    continue;
                }
                let par = inscribed_parallelogram(body, x)?;
                let det = hessian_from(&par).det();
                used += 1;
                let r = (det + 1.0).abs();
                if r > max_residual {
                    max_residual = r;
                    witness = x;
                }
            }
        }
    }
    let geometric_defect = match &source {
        SymmetrySource::Body(body) => {
            let k = ConvexBody::Support((*body).clone());
            let kc = k.reflect_about(body.centroid());
            let overlap = crate::cov::cross_covariogram(&k, &kc, Vec2::ZERO);
            Some(1.0 - overlap / body.area())
        }
        SymmetrySource::Oracle(_) => None,
    };
    Ok(SymmetryVerdict {
        is_symmetric: max_residual <= tol,
        max_monge_ampere_residual: max_residual,
        witness,
        samples_used: used,
        tol,
        seed,
        geometric_defect,
    })
}

/// Which diagonals of the inscribed parallelogram at `x` are affine
/// diameters of the body. Central symmetry is equivalent to at least one
/// of the two being an affine diameter at every admissible lag.
pub fn affine_diameter_diagonals(body: &SupportBody, x: Vec2) -> Result<(bool, bool)> {
    let par = inscribed_parallelogram(body, x)?;
    let k = ConvexBody::Support(body.clone());
    let tol = 1e-7 * body.diameter();
    let diag13 = is_affine_diameter(&k, par.vertex(1), par.vertex(3), tol)?;
    let diag24 = is_affine_diameter(&k, par.vertex(2), par.vertex(4), tol)?;
    Ok((diag13, diag24))
}

/// Centrally symmetric convex hexagon with counterclockwise vertices.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SymmetricHexagon {
    vertices: [Vec2; 6],
}

impl SymmetricHexagon {
    /// Validates convexity, counterclockwise order, and central symmetry
    /// (opposite vertices average to a common center within a relative
    /// 1e-9).
    pub fn new(vertices: [Vec2; 6]) -> Result<Self> {
        let scale = vertices.iter().map(|v| v.norm()).fold(1e-12, f64::max);
        for i in 0..6 {
            let a = vertices[i];
            let b = vertices[(i + 1) % 6];
            let c = vertices[(i + 2) % 6];
            if det2(b - a, c - b) <= 0.0 {
                return Err(Error::NotStrictlyConvex { index: (i + 1) % 6 });
            }
        }
        let center = (vertices[0] + vertices[3]) * 0.5;
        for i in 0..3 {
            let defect = (vertices[i] + vertices[i + 3] - center * 2.0).norm();
            if defect > 1e-9 * scale {
                return Err(Error::HexagonNotSymmetric(defect));
            }
        }
        Ok(SymmetricHexagon { vertices })
    }

    #[inline]
    pub fn vertices(&self) -> &[Vec2; 6] {
        &self.vertices
    }

    /// Vertex by 1-based cyclic index.
    #[inline]
    pub fn vertex(&self, i: usize) -> Vec2 {
        self.vertices[(i + 5) % 6]
    }

    pub fn center(&self) -> Vec2 {
        (self.vertices[0] + self.vertices[3]) * 0.5
    }

    /// The three lag vectors x_i = h_{2i+1} - h_{2i-1} attached to the
    /// hexagon (indices cyclic).
    pub fn lags(&self) -> [Vec2; 3] {
        [
            self.vertex(3) - self.vertex(1),
            self.vertex(5) - self.vertex(3),
            self.vertex(7) - self.vertex(5),
        ]
    }

    /// The edge vectors h_{2i+2} - h_{2i+1} that the covariogram must
    /// reproduce for a translate of the hexagon to be inscribed.
    pub fn criterion_edges(&self) -> [Vec2; 3] {
        [
            self.vertex(4) - self.vertex(3),
            self.vertex(6) - self.vertex(5),
            self.vertex(8) - self.vertex(7),
        ]
    }
}

/// Builds the centrally symmetric hexagon conv(P ∪ Q) from two inscribed
/// parallelograms sharing their first/third-vertex diagonal.
pub fn hexagon_from_parallelograms(
    p: &InscribedParallelogram,
    q: &InscribedParallelogram,
) -> Result<SymmetricHexagon> {
    let scale = p.vertices.iter().map(|v| v.norm()).fold(1e-12, f64::max);
    let tol = 1e-6 * scale;
    let d1 = (p.vertex(1) - q.vertex(1)).norm();
    let d3 = (p.vertex(3) - q.vertex(3)).norm();
    if d1 > tol || d3 > tol {
        return Err(Error::DiagonalNotShared(d1.max(d3)));
    }
    if (p.lag - q.lag).norm() <= tol {
        return Err(Error::HexagonDegenerate(4));
    }
    let pts = vec![
        p.vertex(1),
        p.vertex(2),
        p.vertex(3),
        p.vertex(4),
        q.vertex(2),
        q.vertex(4),
    ];
    let hull = convex_hull_points(pts);
    if hull.len() != 6 {
        return Err(Error::HexagonDegenerate(hull.len()));
    }
    // Rotate so the shared first vertex leads.
    let start = hull
        .iter()
        .position(|v| (*v - p.vertex(1)).norm() <= tol)
        .ok_or(Error::HexagonDegenerate(6))?;
    let mut vertices = [Vec2::ZERO; 6];
    for i in 0..6 {
        vertices[i] = hull[(start + i) % 6];
    }
    SymmetricHexagon::new(vertices)
}

/// Outcome of the hexagon-inscription test.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct HexagonTest {
    pub inscribed: bool,
    /// |D(x_i) - (h_{2i+2} - h_{2i+1})| for i = 1, 2, 3.
    pub edge_residuals: [f64; 3],
    /// Π (1 + det G(x_i)).
    pub det_product: f64,
}

/// Tests whether a translate of `hex` is inscribed in the body behind the
/// oracle: the gradient-derived edge vectors D(x_i) must match the hexagon
/// edges within `tol`, and Π(1 + det G(x_i)) must be >= -tol.
pub fn hexagon_inscription_test(
    oracle: &CovariogramOracle,
    hex: &SymmetricHexagon,
    tol: f64,
) -> Result<HexagonTest> {
    let lags = hex.lags();
    let edges = hex.criterion_edges();
    let mut edge_residuals = [0.0; 3];
    let mut det_product = 1.0;
    for i in 0..3 {
        if !oracle.in_sampling_domain(lags[i]) {
            return Err(Error::OutsideDomain);
        }
        let grad = oracle.gradient(lags[i])?;
        let d = rot90_inv(grad);
        edge_residuals[i] = (d - edges[i]).norm();
        det_product *= 1.0 + oracle.hessian(lags[i])?.det();
    }
    let inscribed = edge_residuals.iter().all(|r| *r <= tol) && det_product >= -tol;
    Ok(HexagonTest {
        inscribed,
        edge_residuals,
        det_product,
    })
}
