//! Analytic covariogram Hessian from the inscribed parallelogram's normals,
//! and machine-checkable residuals for the determinant, orthogonality, and
//! Plücker identities it satisfies.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geom::support::SupportBody;
use crate::geom::vec::{det2, Mat2, Vec2};
use crate::parallelogram::{inscribed_parallelogram, InscribedParallelogram};

/// Both displayed forms of the Hessian built from the vertex normals:
/// u2 u1ᵀ/det(u2,u1) - u3 u4ᵀ/det(u3,u4) and its transpose-shaped twin.
/// They coincide because the Hessian is symmetric.
pub fn hessian_forms(par: &InscribedParallelogram) -> (Mat2, Mat2) {
    let [u1, u2, u3, u4] = par.normals;
    let d21 = det2(u2, u1);
    let d34 = det2(u3, u4);
    let first = Mat2::outer(u2, u1).scale(1.0 / d21) - Mat2::outer(u3, u4).scale(1.0 / d34);
    let second = Mat2::outer(u1, u2).scale(1.0 / d21) - Mat2::outer(u4, u3).scale(1.0 / d34);
    (first, second)
}

/// Analytic covariogram Hessian at lag `x`.
pub fn hessian_analytic(body: &SupportBody, x: Vec2) -> Result<Mat2> {
    Ok(hessian_from(&inscribed_parallelogram(body, x)?))
}

/// Analytic Hessian from a precomputed parallelogram (symmetrized average
/// of the two equal forms).
pub fn hessian_from(par: &InscribedParallelogram) -> Mat2 {
    let (a, b) = hessian_forms(par);
    (a + b).scale(0.5)
}

/// Determinant relations of the Hessian at a lag.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct DetRelations {
    pub det_g: f64,
    /// Relative residual of det G = -det(u2,u3) det(u4,u1) /
    /// (det(u3,u4) det(u1,u2)).
    pub res_det_formula: f64,
    /// Relative residual of 1 + det G = det(u2,u4) det(u1,u3) /
    /// (det(u3,u4) det(u1,u2)).
    pub res_det_offset: f64,
}

/// Evaluates both determinant identities; `det_g` is always negative for
/// valid inputs.
pub fn det_relations(body: &SupportBody, x: Vec2) -> Result<DetRelations> {
    let par = inscribed_parallelogram(body, x)?;
    Ok(det_relations_from(&par))
}

pub fn det_relations_from(par: &InscribedParallelogram) -> DetRelations {
    let g = hessian_from(par);
    let det_g = g.det();
    let [u1, u2, u3, u4] = par.normals;
    let denom = det2(u3, u4) * det2(u1, u2);
    let rhs_formula = -det2(u2, u3) * det2(u4, u1) / denom;
    let rhs_offset = det2(u2, u4) * det2(u1, u3) / denom;
    let scale = 1.0 + det_g.abs();
    DetRelations {
        det_g,
        res_det_formula: (det_g - rhs_formula).abs() / scale,
        res_det_offset: ((1.0 + det_g) - rhs_offset).abs() / scale,
    }
}

/// Scale-free residual of the conjugate-normal orthogonality
/// u1ᵀ G⁻¹ u3 = 0, evaluated through the adjugate form
/// R G R = -det G · G⁻¹ (so no division by det G is needed):
/// |u1ᵀ R G R u3| / ‖G‖.
pub fn orthogonality_residual(body: &SupportBody, x: Vec2) -> Result<f64> {
    let par = inscribed_parallelogram(body, x)?;
    Ok(orthogonality_residual_from(&par))
}

pub fn orthogonality_residual_from(par: &InscribedParallelogram) -> f64 {
    let g = hessian_from(par);
    let rgr = Mat2::ROT90.matmul(g).matmul(Mat2::ROT90);
    (par.normals[0].dot(rgr.apply(par.normals[2]))).abs() / g.norm()
}

/// Two-dimensional Plücker identity defect:
/// det(v1,v3) det(v2,v4) - det(v2,v3) det(v1,v4) - det(v4,v3) det(v2,v1).
/// Exactly zero in real arithmetic; in floating point bounded by a few ulps
/// of (max |v_i|)⁴.
pub fn plucker(v1: Vec2, v2: Vec2, v3: Vec2, v4: Vec2) -> f64 {
    det2(v1, v3) * det2(v2, v4) - det2(v2, v3) * det2(v1, v4) - det2(v4, v3) * det2(v2, v1)
}

/// Full per-lag identity report, serialized as one JSON line by the CLI.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct HessianReport {
    pub lag: Vec2,
    pub hessian: Mat2,
    pub det_g: f64,
    /// ‖form1 - form2‖ / ‖G‖ for the two displayed Hessian forms.
    pub form_discrepancy: f64,
    /// ‖G - G_fd‖ / ‖G‖ against the finite-difference oracle, when one was
    /// supplied.
    pub fd_mismatch: Option<f64>,
    pub res_det_formula: f64,
    pub res_det_offset: f64,
    pub res_orthogonality: f64,
}

/// Builds the identity report at `x`, optionally comparing against a
/// finite-difference Hessian.
pub fn hessian_report(
    body: &SupportBody,
    x: Vec2,
    fd: Option<Mat2>,
) -> Result<HessianReport> {
    let par = inscribed_parallelogram(body, x)?;
    let (f1, f2) = hessian_forms(&par);
    let g = (f1 + f2).scale(0.5);
    let det = det_relations_from(&par);
    if det.det_g >= 0.0 {
        return Err(Error::CrossingSearch(format!(
            "Hessian determinant must be negative, got {}",
            det.det_g
        )));
    }
    Ok(HessianReport {
        lag: x,
        hessian: g,
        det_g: det.det_g,
        form_discrepancy: (f1 - f2).norm() / g.norm(),
        fd_mismatch: fd.map(|m| (g - m).norm() / g.norm()),
        res_det_formula: det.res_det_formula,
        res_det_offset: det.res_det_offset,
        res_orthogonality: orthogonality_residual_from(&par),
    })
}
