//! Recovery of boundary data from covariogram values alone: conjugate lag
//! pairs sharing an inscribed-parallelogram diagonal, the normal pairs they
//! determine, boundary-arc tracing, and symmetric-body reconstruction.

mod rebuild;
mod trace;

pub use rebuild::{
    compare_bodies, equality_harness, grid_oracle, reconstruct_symmetric, BodyComparison,
    ReconstructionReport,
};
pub use trace::{trace_arc, ArcTrace, TraceStatus};

use serde::{Deserialize, Serialize};

use crate::cov::oracle::CovariogramOracle;
use crate::error::{Error, Result};
use crate::geom::support::SupportBody;
use crate::geom::vec::{det2, rot90, rot90_inv, Mat2, Vec2};
use crate::geom::ConvexBody;
use crate::identities::hessian_from;
use crate::parallelogram::inscribed_parallelogram;

/// Lags with |1 + det G| below this are rejected: the conjugate machinery
/// needs the shared diagonal to not be an affine diameter.
pub const DEGENERATE_DET_TOL: f64 = 1e-2;

/// The parallelogram edge vector D(z) expressed through oracle data.
fn edge_vector(oracle: &CovariogramOracle, z: Vec2) -> Result<Vec2> {
    Ok(rot90_inv(oracle.gradient(z)?))
}

/// The diagonal chord vector x + D(x) expressed through oracle data.
fn diagonal_map(oracle: &CovariogramOracle, z: Vec2) -> Result<Vec2> {
    Ok(z + edge_vector(oracle, z)?)
}

#[derive(PartialEq)]
enum Validation {
    Valid,
    Refuted,
    /// The mixed lag fell outside the testable domain (degenerate hexagon).
    Inconclusive,
}

/// Discriminates true conjugates from parallelograms that merely share the
/// diagonal *vector* on the other chord of the body: for a genuine shared
/// diagonal, the hexagon conv(P(x) ∪ P(y)) is inscribed, so its third lag
/// m = x - D(y) = y - D(x) must reproduce D(m) = ±(D(y) - D(x)) from the
/// covariogram alone (the sign depends on which parallelogram sits
/// counterclockwise-first).
fn validate_conjugate(oracle: &CovariogramOracle, x: Vec2, y: Vec2, dx: Vec2) -> Validation {
    let Ok(dy) = edge_vector(oracle, y) else {
        return Validation::Refuted;
    };
    let tol = 1e-3 * oracle.dk_diameter();
    let m = x - dy;
    if !oracle.in_derivative_domain(m) {
        return Validation::Inconclusive;
    }
    let Ok(dm) = edge_vector(oracle, m) else {
        return Validation::Inconclusive;
    };
    let rhs = dy - dx;
    if (dm - rhs).norm() <= tol || (dm + rhs).norm() <= tol {
        Validation::Valid
    } else {
        Validation::Refuted
    }
}

/// Finds the conjugate lag y ≠ x whose inscribed parallelogram shares the
/// diagonal of the one at x, using covariogram data only: Newton's method on
/// φ(z) = z + D(z) = φ(x) with Jacobian I - R G(z), seeded along the segment
/// where the conjugate provably lies (origin→x when 1 + det G > 0, x→φ(x)
/// when negative). Body-backed oracles additionally run the independent
/// geometric construction (boundary crossings with the reflected body) and
/// both strategies must agree.
pub fn find_conjugate(oracle: &CovariogramOracle, x: Vec2) -> Result<Vec2> {
    find_conjugate_seeded(oracle, x, None)
}

pub(crate) fn find_conjugate_seeded(
    oracle: &CovariogramOracle,
    x: Vec2,
    warm: Option<Vec2>,
) -> Result<Vec2> {
    if !oracle.in_derivative_domain(x) {
        return Err(Error::OutsideDomain);
    }
    let gx = oracle.hessian(x)?;
    let s = 1.0 + gx.det();
    if s.abs() < DEGENERATE_DET_TOL {
        return Err(Error::DegenerateHessianDet(s));
    }
    let w = diagonal_map(oracle, x)?;
    let diam = oracle.dk_diameter();
    let separation = 1e-3 * diam;
    // Grid-backed derivatives carry interpolation noise; the fixed-point
    // residual cannot drop below it.
    let accept = match oracle.grid() {
        None => 1e-10 * diam,
        Some(g) => 1e-2 * g.spacing(),
    };

    // Newton on F(z) = sign·z + D(z) - target. sign = +1 solves the shared
    // first-diagonal equation (Jacobian I - R G), sign = -1 the shared
    // second-diagonal one (Jacobian -(I + R G)); both are invertible away
    // from det G = -1.
    let newton_to = |seed: Vec2, target: Vec2, sign: f64| -> Option<Vec2> {
        let mut z = seed;
        let mut best: Option<(f64, Vec2)> = None;
        for _ in 0..30 {
            if !oracle.in_derivative_domain(z) {
                break;
            }
            let f = edge_vector(oracle, z).ok()? + z * sign - target;
            let fnorm = f.norm();
            if best.map_or(true, |(b, _)| fnorm < b) {
                best = Some((fnorm, z));
            }
            if fnorm <= accept * 0.2 {
                break;
            }
            let g = oracle.hessian(z).ok()?;
            let jac = Mat2::IDENTITY.scale(sign) - Mat2::ROT90.matmul(g);
            let inv = jac.inverse(1e-12)?;
            let mut step = inv.apply(f);
            let cap = 0.1 * diam;
            if step.norm() > cap {
                step = step * (cap / step.norm());
            }
            z -= step;
        }
        let (fnorm, z) = best?;
        (fnorm <= accept).then_some(z)
    };

    let dx = w - x;
    // A conjugate candidate must solve the fixed-point equation, be
    // distinct from x, and pass the hexagon validation; candidates whose
    // validation is untestable (mixed lag at the domain edge) are kept as
    // fallbacks in case nothing validates.
    let mut fallback: Option<Vec2> = None;
    let direct_residual = |r: Vec2| -> f64 {
        diagonal_map(oracle, r).map_or(f64::INFINITY, |phi| (phi - w).norm())
    };
    let mut admit = |r: Vec2, fallback: &mut Option<Vec2>| -> bool {
        if (r - x).norm() <= separation
            || !oracle.in_derivative_domain(r)
            || direct_residual(r) > accept
        {
            return false;
        }
        match validate_conjugate(oracle, x, r, dx) {
            Validation::Valid => true,
            Validation::Refuted => false,
            Validation::Inconclusive => {
                if fallback.is_none() {
                    *fallback = Some(r);
                }
                false
            }
        }
    };

    // Residual of the generalized equation at a probe.
    let residual_at = |z: Vec2, target: Vec2, sign: f64| -> Option<(f64, Vec2)> {
        if !oracle.in_derivative_domain(z) {
            return None;
        }
        let d = edge_vector(oracle, z).ok()?;
        Some(((d + z * sign - target).norm(), z))
    };
    // Newton runs from the best few probes of a seed list.
    let hunt = |probes: &[Vec2], target: Vec2, sign: f64| -> Vec<Vec2> {
        let mut residuals: Vec<(f64, Vec2)> = probes
            .iter()
            .filter_map(|z| residual_at(*z, target, sign))
            .collect();
        residuals.sort_by(|p, q| p.0.partial_cmp(&q.0).expect("finite residuals"));
        let mut out = Vec::new();
        for &(_, seed) in residuals.iter().take(8) {
            if let Some(r) = newton_to(seed, target, sign) {
                if !out.iter().any(|q: &Vec2| (*q - r).norm() < separation) {
                    out.push(r);
                }
            }
        }
        out
    };
    let segment_probes = |a: Vec2, b: Vec2| -> Vec<Vec2> {
        let side = rot90(b - a);
        let mut out = Vec::new();
        for i in 1..48 {
            let t = i as f64 / 48.0;
            for bow in [0.0, 0.2, -0.2] {
                out.push(a + (b - a) * t + side * (bow * t * (1.0 - t)));
            }
        }
        out
    };
    // Polar sweep of the whole admissible domain, for the cold fallback.
    let global_probes = || -> Vec<Vec2> {
        let mut out = Vec::new();
        let rmax = diam / 2.0;
        for ir in 1..=12 {
            let r = rmax * ir as f64 / 12.5;
            for ia in 0..28 {
                let ang = std::f64::consts::TAU * (ia as f64 + 0.5 * (ir % 2) as f64) / 28.0;
                out.push(Vec2::from_angle(ang) * r);
            }
        }
        out
    };

    let mut found: Option<Vec2> = None;
    if let Some(ws) = warm {
        if let Some(r) = newton_to(ws, w, 1.0) {
            // Warm starts come from an already-accepted neighbor; an
            // inconclusive validation keeps them.
            if (r - x).norm() > separation
                && oracle.in_derivative_domain(r)
                && validate_conjugate(oracle, x, r, dx) != Validation::Refuted
            {
                found = Some(r);
            }
        }
    }
    if found.is_none() {
        // Direct route: the conjugate lies near the segment from the origin
        // to x (when 1 + det G > 0) or from x to the diagonal vector (when
        // negative), the degenerate limits of the sliding second
        // parallelogram. Roots realizing the same diagonal vector on the
        // body's other chord are rejected by the hexagon validation.
        let (a, b) = if s > 0.0 { (Vec2::ZERO, x) } else { (x, w) };
        for r in hunt(&segment_probes(a, b), w, 1.0) {
            if admit(r, &mut fallback) {
                found = Some(r);
                break;
            }
        }
    }
    if found.is_none() {
        // The second parallelogram can bow far off the predicted segment;
        // sweep the whole domain for basins of the direct equation.
        for r in hunt(&global_probes(), w, 1.0) {
            if admit(r, &mut fallback) {
                found = Some(r);
                break;
            }
        }
    }
    if found.is_none() {
        // Indirect route for conjugates hugging the excluded loci, where
        // the direct residual landscape is too steep to scan: the mixed
        // hexagon lag m = y - D(x) solves m + D(m) = ±(x - D(x)) when the
        // pair is ordered one way around the hexagon and
        // D(m) - m = ±(D(x) - x) when ordered the other way, all with
        // known right-hand sides; m sits mid-domain exactly when y does
        // not. Recovered conjugates are polished on the direct equation.
        'indirect: for sign in [1.0, -1.0] {
            for flip in [1.0, -1.0] {
                let target = (x - dx) * (flip * sign);
                let mut probes = segment_probes(Vec2::ZERO, target * sign);
                probes.extend(segment_probes(Vec2::ZERO, target * -sign));
                probes.extend(global_probes());
                for m in hunt(&probes, target, sign) {
                    let Some(y) = newton_to(dx + m * flip, w, 1.0) else {
                        continue;
                    };
                    if admit(y, &mut fallback) {
                        found = Some(y);
                        break 'indirect;
                    }
                }
            }
        }
    }
    let y = found.or(fallback).ok_or_else(|| {
        Error::ConjugateSearch(format!(
            "no conjugate root found near lag ({:.6}, {:.6})",
            x.x, x.y
        ))
    })?;

    if let Some(ConvexBody::Support(body)) = oracle.body() {
        let yg = conjugate_geometric(body, x)?;
        // Finite-difference noise in D is amplified by (1 + det G)⁻¹ near
        // the degenerate locus; the strategies agree only to that level.
        // When the reflected body crosses the boundary more than six times
        // there are several legitimate conjugates; the geometric one must
        // then still solve the covariogram-side equation.
        let agree_tol = 1e-3 * diam;
        let same_point = (yg - y).norm() <= agree_tol;
        let both_valid = (yg - x).norm() > separation
            && validate_conjugate(oracle, x, yg, dx) != Validation::Refuted;
        if !same_point && !both_valid {
            return Err(Error::ConjugateSearch(format!(
                "covariogram-only root ({:.8}, {:.8}) and geometric construction ({:.8}, {:.8}) disagree",
                y.x, y.y, yg.x, yg.y
            )));
        }
    }
    Ok(y)
}

/// The geometric conjugate construction: reflect the body through the
/// parallelogram center and intersect the appropriate boundary arcs. Valid
/// for body-backed data only; serves as the independent second strategy.
pub fn conjugate_geometric(body: &SupportBody, x: Vec2) -> Result<Vec2> {
    let par = inscribed_parallelogram(body, x)?;
    let s = 1.0 + hessian_from(&par).det();
    if s.abs() < DEGENERATE_DET_TOL {
        return Err(Error::DegenerateHessianDet(s));
    }
    let c = par.center();
    let reflected = body.reflect_about(c);
    let [t1, t2, _t3, t4] = par.normal_angles;
    // Crossing of the boundary of K with the boundary of the reflected
    // body, on the open arc between two vertex angles.
    let crossing = |from: f64, to: f64| -> Result<Vec2> {
        let mut hi = to;
        while hi <= from {
            hi += std::f64::consts::TAU;
        }
        let f = |theta: f64| reflected.signed_boundary_distance(body.boundary_point(theta)).0;
        let n = 256;
        // Trim endpoint neighborhoods: the arc ends are themselves
        // crossings.
        let pad = (hi - from) * 1e-4;
        let (lo, hi) = (from + pad, hi - pad);
        let mut prev_t = lo;
        let mut prev_f = f(lo);
        for i in 1..=n {
            let t = lo + (hi - lo) * i as f64 / n as f64;
            let ft = f(t);
            if prev_f == 0.0 {
                return Ok(body.boundary_point(prev_t));
            }
            if prev_f * ft < 0.0 {
                // Bisection + secant polish.
                let (mut a, mut b, mut fa, mut fb) = (prev_t, t, prev_f, ft);
                for _ in 0..60 {
                    if b - a < 1e-13 {
                        break;
                    }
                    let m = 0.5 * (a + b);
                    let fm = f(m);
                    if fa * fm <= 0.0 {
                        b = m;
                        fb = fm;
                    } else {
                        a = m;
                        fa = fm;
                    }
                }
                let root = if (fb - fa).abs() > 0.0 {
                    let sec = a - fa * (b - a) / (fb - fa);
                    if sec > a && sec < b {
                        sec
                    } else {
                        0.5 * (a + b)
                    }
                } else {
                    0.5 * (a + b)
                };
                return Ok(body.boundary_point(root));
            }
            prev_t = t;
            prev_f = ft;
        }
        Err(Error::ConjugateSearch(
            "no interior crossing with the reflected body on the predicted arc".into(),
        ))
    };
    if s > 0.0 {
        // Crossing q on the open arc from the first to the second vertex;
        // the conjugate is p1 - q.
        let q = crossing(t1, t2)?;
        Ok(par.vertex(1) - q)
    } else {
        // Crossing q on the open arc from the fourth to the first vertex;
        // the conjugate is q - p3.
        let q = crossing(t4, t1)?;
        Ok(q - par.vertex(3))
    }
}

/// The unordered direction pair {u1(x), -u3(x)} recovered from covariogram
/// data through the eigenvectors of G(x) G(y)⁻¹ for a conjugate pair
/// (x, y), sign-normalized into the half-plane of x and ordered
/// counterclockwise relative to x.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct NormalPair {
    pub lag: Vec2,
    /// Unit directions, both with non-negative inner product against the
    /// lag, ordered counterclockwise.
    pub pair: [Vec2; 2],
    /// Relative eigenvalue separation of G(x) G(y)⁻¹.
    pub eigen_gap: f64,
    /// Angle between the two recovered directions, in (0, π).
    pub angle_gap: f64,
    /// The conjugate lag used.
    pub conjugate: Vec2,
}

/// Recovers the normal pair at `x` from the oracle.
pub fn normal_pair(oracle: &CovariogramOracle, x: Vec2) -> Result<NormalPair> {
    let y = find_conjugate(oracle, x)?;
    normal_pair_with_conjugate(oracle, x, y)
}

pub(crate) fn normal_pair_with_conjugate(
    oracle: &CovariogramOracle,
    x: Vec2,
    y: Vec2,
) -> Result<NormalPair> {
    let gx = oracle.hessian(x)?;
    let gy = oracle.hessian(y)?;
    let gy_inv = gy
        .inverse(1e-12)
        .ok_or_else(|| Error::ConjugateSearch("conjugate Hessian is singular".into()))?;
    let m = gx.matmul(gy_inv);
    let tr = m.trace();
    let det = m.det();
    let disc = tr * tr - 4.0 * det;
    let scale = tr.abs().max(det.abs().sqrt()).max(1e-300);
    if disc <= (1e-8 * scale) * (1e-8 * scale) {
        return Err(Error::EigenGapTooSmall(disc.max(0.0).sqrt() / scale));
    }
    let root = disc.sqrt();
    let l1 = 0.5 * (tr + root);
    let l2 = 0.5 * (tr - root);
    let eigen_gap = (l1 - l2).abs() / l1.abs().max(l2.abs()).max(1e-300);
    let eigvec = |lambda: f64| -> Vec2 {
        // Kernel of M - λI: orthogonal to its larger row.
        let r1 = Vec2::new(m.a11 - lambda, m.a12);
        let r2 = Vec2::new(m.a21, m.a22 - lambda);
        let r = if r1.norm() >= r2.norm() { r1 } else { r2 };
        rot90(r).normalized().unwrap_or(Vec2::new(1.0, 0.0))
    };
    let mut v1 = eigvec(l1);
    let mut v2 = eigvec(l2);
    if x.dot(v1) < 0.0 {
        v1 = -v1;
    }
    if x.dot(v2) < 0.0 {
        v2 = -v2;
    }
    let pair = if det2(v1, v2) >= 0.0 { [v1, v2] } else { [v2, v1] };
    let angle_gap = pair[0].dot(pair[1]).clamp(-1.0, 1.0).acos();
    if angle_gap < 1e-6 {
        return Err(Error::EigenGapTooSmall(angle_gap));
    }
    Ok(NormalPair {
        lag: x,
        pair,
        eigen_gap,
        angle_gap,
        conjugate: y,
    })
}

/// Ground-truth direction pair {u1(x), -u3(x)} straight from the body, in
/// the same normalization as [`normal_pair`]. Used to validate recovery.
pub fn normal_pair_ground_truth(body: &SupportBody, x: Vec2) -> Result<[Vec2; 2]> {
    let par = inscribed_parallelogram(body, x)?;
    let mut a = par.normal(1);
    let mut b = -par.normal(3);
    if x.dot(a) < 0.0 {
        a = -a;
    }
    if x.dot(b) < 0.0 {
        b = -b;
    }
    Ok(if det2(a, b) >= 0.0 { [a, b] } else { [b, a] })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sampling::sample_domain;

    fn cos3_body() -> SupportBody {
        SupportBody::new(1.0, vec![0.0, 0.0, 0.1], vec![]).unwrap()
    }

    fn angle_between(a: Vec2, b: Vec2) -> f64 {
        a.dot(b).clamp(-1.0, 1.0).acos()
    }

    #[test]
    fn conjugate_shares_diagonal_and_strategies_agree() {
        let body = cos3_body();
        let k = ConvexBody::Support(body.clone());
        let oracle = CovariogramOracle::analytic(&k).unwrap();
        let mut tested = 0;
        for x in sample_domain(&oracle, 40, 23) {
            let y = match find_conjugate(&oracle, x) {
                Ok(y) => y,
                Err(Error::DegenerateHessianDet(_)) => continue,
                Err(e) => panic!("unexpected error at {x:?}: {e}"),
            };
            // Shared diagonal in oracle terms.
            let wx = diagonal_map(&oracle, x).unwrap();
            let wy = diagonal_map(&oracle, y).unwrap();
            assert!((wx - wy).norm() < 1e-8, "at {x:?}: residual {}", (wx - wy).norm());
            assert!((y - x).norm() > 1e-3);
            // Shared diagonal in body terms.
            let px = inscribed_parallelogram(&body, x).unwrap();
            let py = inscribed_parallelogram(&body, y).unwrap();
            assert!((px.vertex(1) - py.vertex(1)).norm() < 1e-4);
            assert!((px.vertex(3) - py.vertex(3)).norm() < 1e-4);
            tested += 1;
        }
        assert!(tested >= 25, "only {tested} lags tested");
    }

    #[test]
    fn conjugate_is_symmetric_relation() {
        let body = cos3_body();
        let oracle = CovariogramOracle::analytic(&ConvexBody::Support(body)).unwrap();
        // A lag with 1 + det G well away from zero, so the conjugate is
        // well-conditioned in both directions.
        let x = Vec2::new(0.10629150390625, 1.02010009765625);
        let y = find_conjugate(&oracle, x).unwrap();
        let back = find_conjugate(&oracle, y).unwrap();
        let wx = diagonal_map(&oracle, x).unwrap();
        let wb = diagonal_map(&oracle, back).unwrap();
        assert!((wx - wb).norm() < 1e-6, "diagonal drift {}", (wx - wb).norm());
    }

    #[test]
    fn disk_has_no_conjugates() {
        let disk = ConvexBody::Support(SupportBody::disk(1.0).unwrap());
        let oracle = CovariogramOracle::analytic(&disk).unwrap();
        assert!(matches!(
            find_conjugate(&oracle, Vec2::new(1.0, 0.0)),
            Err(Error::DegenerateHessianDet(_))
        ));
    }

    #[test]
    fn normal_pair_matches_ground_truth_analytic() {
        let body = cos3_body();
        let k = ConvexBody::Support(body.clone());
        let oracle = CovariogramOracle::analytic(&k).unwrap();
        let mut tested = 0;
        for x in sample_domain(&oracle, 30, 31) {
            let np = match normal_pair(&oracle, x) {
                Ok(np) => np,
                Err(Error::DegenerateHessianDet(_)) => continue,
                Err(e) => panic!("unexpected error at {x:?}: {e}"),
            };
            let truth = normal_pair_ground_truth(&body, x).unwrap();
            for i in 0..2 {
                let d = angle_between(np.pair[i], truth[i]);
                assert!(d < 1e-3, "at {x:?} member {i}: {d} rad");
            }
            assert!(np.eigen_gap > 0.0);
            assert!(np.lag.dot(np.pair[0]) >= -1e-12);
            assert!(np.lag.dot(np.pair[1]) >= -1e-12);
            tested += 1;
        }
        assert!(tested >= 20);
    }

    #[test]
    fn reflected_body_swaps_the_pair_members() {
        let body = cos3_body();
        let neg = body.reflect_about(Vec2::ZERO);
        let x = Vec2::new(0.8, 0.1);
        let t = normal_pair_ground_truth(&body, x).unwrap();
        let tn = normal_pair_ground_truth(&neg, x).unwrap();
        // {u1(K,x), -u3(K,x)} equals {u1(-K,x), -u3(-K,x)} as a set: the
        // ordered members swap roles.
        let same = angle_between(t[0], tn[0]) + angle_between(t[1], tn[1]);
        assert!(same < 1e-9, "sets differ: {same}");
        // Oracles of K and -K carry identical data, so recovery cannot
        // distinguish them.
        let ok = CovariogramOracle::analytic(&ConvexBody::Support(body)).unwrap();
        let on = CovariogramOracle::analytic(&ConvexBody::Support(neg)).unwrap();
        let a = normal_pair(&ok, x).unwrap();
        let b = normal_pair(&on, x).unwrap();
        assert!(angle_between(a.pair[0], b.pair[0]) < 1e-6);
        assert!(angle_between(a.pair[1], b.pair[1]) < 1e-6);
    }
}
