//! Boundary-arc tracing: predictor-corrector continuation of the curve of
//! lags whose recovered normal pair keeps one member fixed. Along that
//! curve one parallelogram vertex is pinned, so the lag curve itself is a
//! translate of the boundary arc swept by the opposite vertex.

use serde::{Deserialize, Serialize};

use crate::cov::oracle::CovariogramOracle;
use crate::error::Result;
use crate::geom::vec::{det2, rot90, Vec2};

use super::{find_conjugate_seeded, normal_pair, normal_pair_with_conjugate, NormalPair};

/// Why a trace stopped.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub enum TraceStatus {
    /// Requested arc length reached.
    Complete,
    /// The curve left the margin-shrunk sampling domain.
    LeftDomain,
    /// 1 + det G changed sign, ending the region where the construction is
    /// valid.
    SignRegionChanged,
    /// A recovered direction could not be matched uniquely to the reference
    /// neighborhoods.
    MembershipLost,
    /// Derivative or conjugate evaluation failed numerically.
    NumericalFailure(String),
}

/// Result of a continuation run.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ArcTrace {
    pub start: Vec2,
    /// The traced lag curve x(t).
    pub curve: Vec<Vec2>,
    /// The recovered boundary arc, up to an unknown global translation
    /// (normalized here to translation zero, i.e. identical to `curve`).
    pub arc: Vec<Vec2>,
    /// Center of the neighborhood of the held pair member.
    pub held_center: Vec2,
    /// Center of the neighborhood of the free pair member.
    pub free_center: Vec2,
    /// Angular radius of both neighborhoods.
    pub neighborhood_radius: f64,
    pub step: f64,
    pub status: TraceStatus,
    /// Largest |angle(held member) - angle(reference)| over accepted points.
    pub held_max_deviation: f64,
    /// True when the rejected member never entered the held neighborhood
    /// and the held member never left it.
    pub swap_clean: bool,
}

fn angle_between(a: Vec2, b: Vec2) -> f64 {
    a.dot(b).clamp(-1.0, 1.0).acos()
}

/// Signed angle from `reference` to `v`.
fn signed_angle(reference: Vec2, v: Vec2) -> f64 {
    det2(reference, v).atan2(reference.dot(v))
}

struct Membership {
    /// Signed angle of the held member against its reference.
    held_offset: f64,
    /// Unsigned deviations for bookkeeping.
    held_dev: f64,
    free_dev: f64,
    /// Whether the *other* member intruded into the held neighborhood.
    intrusion: bool,
    conjugate: Vec2,
}

fn classify(np: &NormalPair, held_ref: Vec2, free_ref: Vec2, radius: f64) -> Option<Membership> {
    let d = [
        (angle_between(np.pair[0], held_ref), angle_between(np.pair[0], free_ref)),
        (angle_between(np.pair[1], held_ref), angle_between(np.pair[1], free_ref)),
    ];
    // Unique assignment: exactly one member in each neighborhood.
    let held_idx = match (d[0].0 <= radius, d[1].0 <= radius) {
        (true, false) => 0,
        (false, true) => 1,
        _ => return None,
    };
    let free_idx = 1 - held_idx;
    if d[free_idx].1 > radius {
        return None;
    }
    Some(Membership {
        held_offset: signed_angle(held_ref, np.pair[held_idx]),
        held_dev: d[held_idx].0,
        free_dev: d[free_idx].1,
        intrusion: d[free_idx].0 <= radius,
        conjugate: np.conjugate,
    })
}

/// Traces the lag curve along which the held member of the recovered normal
/// pair keeps the angle it has at `x0`, by tangent prediction and a secant
/// corrector transverse to the motion. Stops after `arclen` of curve length
/// or at the first domain, sign-region, or membership violation; every
/// termination is a reported status, not an error.
pub fn trace_arc(
    oracle: &CovariogramOracle,
    x0: Vec2,
    arclen: f64,
    step: f64,
) -> Result<ArcTrace> {
    let np0 = normal_pair(oracle, x0)?;
    let radius = (np0.angle_gap / 4.0).min(0.2);
    // Convention: hold the counterclockwise-second member of the pair at
    // the start lag. Which geometric normal that is cannot be decided from
    // covariogram data (reflection ambiguity); either choice traces a
    // boundary arc of the body or of its reflection.
    let free_ref = np0.pair[0];
    let held_ref = np0.pair[1];
    let sign0 = (1.0 + oracle.hessian(x0)?.det()).signum();
    let step = step.abs().max(1e-9 * oracle.dk_diameter());

    let mut curve = vec![x0];
    let mut held_max_dev: f64 = 0.0;
    let mut swap_clean = true;
    let mut warm = np0.conjugate;

    // Constraint value at a lag, warm-started on the previous conjugate.
    let eval = |z: Vec2, warm: Vec2| -> Option<Membership> {
        if !oracle.in_sampling_domain(z) {
            return None;
        }
        let y = find_conjugate_seeded(oracle, z, Some(warm)).ok()?;
        let np = normal_pair_with_conjugate(oracle, z, y).ok()?;
        classify(&np, held_ref, free_ref, radius)
    };

    // Initial tangent from a central-difference gradient of the constraint.
    let delta = 0.5 * step;
    let mut grad = Vec2::ZERO;
    for (dir, slot) in [(Vec2::new(1.0, 0.0), 0), (Vec2::new(0.0, 1.0), 1)] {
        let plus = eval(x0 + dir * delta, warm);
        let minus = eval(x0 - dir * delta, warm);
        let (Some(p), Some(m)) = (plus, minus) else {
            return Ok(ArcTrace {
                start: x0,
                curve: curve.clone(),
                arc: curve,
                held_center: held_ref,
                free_center: free_ref,
                neighborhood_radius: radius,
                step,
                status: TraceStatus::NumericalFailure(
                    "constraint gradient estimation failed at the start lag".into(),
                ),
                held_max_deviation: 0.0,
                swap_clean: true,
            });
        };
        let g = (p.held_offset - m.held_offset) / (2.0 * delta);
        if slot == 0 {
            grad.x = g;
        } else {
            grad.y = g;
        }
    }
    let mut tangent = match rot90(grad).normalized() {
        Some(t) => t,
        None => {
            return Ok(ArcTrace {
                start: x0,
                curve: curve.clone(),
                arc: curve,
                held_center: held_ref,
                free_center: free_ref,
                neighborhood_radius: radius,
                step,
                status: TraceStatus::NumericalFailure("degenerate constraint gradient".into()),
                held_max_deviation: 0.0,
                swap_clean: true,
            });
        }
    };
    // Deterministic initial orientation: counterclockwise around the origin.
    if det2(x0, tangent) < 0.0 {
        tangent = -tangent;
    }

    let mut z = x0;
    let mut traced = 0.0;
    let max_steps = ((arclen / step).ceil() as usize + 8).max(16);
    let mut status = TraceStatus::Complete;

    for _ in 0..max_steps {
        if traced >= arclen {
            status = TraceStatus::Complete;
            break;
        }
        let predicted = z + tangent * step;
        if !oracle.in_sampling_domain(predicted) {
            status = TraceStatus::LeftDomain;
            break;
        }
        // Secant corrector transverse to the motion.
        let normal = rot90(tangent);
        let mut corrected = predicted;
        let c0 = match eval(corrected, warm) {
            Some(m) => m,
            None => {
                status = TraceStatus::MembershipLost;
                break;
            }
        };
        let mut last = c0;
        if last.held_offset.abs() > 1e-12 {
            let probe = corrected + normal * delta;
            if let Some(cp) = eval(probe, warm) {
                let slope = (cp.held_offset - last.held_offset) / delta;
                if slope.abs() > 1e-12 {
                    let mut shift = -last.held_offset / slope;
                    let cap = 2.0 * step;
                    shift = shift.clamp(-cap, cap);
                    let candidate = corrected + normal * shift;
                    if let Some(cc) = eval(candidate, warm) {
                        if cc.held_offset.abs() < last.held_offset.abs() {
                            corrected = candidate;
                            last = cc;
                        }
                    }
                }
            }
        }
        if !oracle.in_sampling_domain(corrected) {
            status = TraceStatus::LeftDomain;
            break;
        }
        let det_sign = match oracle.hessian(corrected) {
            Ok(g) => (1.0 + g.det()).signum(),
            Err(e) => {
                status = TraceStatus::NumericalFailure(e.to_string());
                break;
            }
        };
        if det_sign != sign0 {
            status = TraceStatus::SignRegionChanged;
            break;
        }
        held_max_dev = held_max_dev.max(last.held_dev);
        if last.intrusion || last.held_dev > radius || last.free_dev > radius {
            swap_clean = swap_clean && !last.intrusion;
            status = TraceStatus::MembershipLost;
            break;
        }
        warm = last.conjugate;
        let moved = corrected - z;
        if let Some(t) = moved.normalized() {
            tangent = t;
        }
        traced += moved.norm();
        z = corrected;
        curve.push(z);
    }
    if traced < arclen && status == TraceStatus::Complete {
        status = TraceStatus::NumericalFailure("step budget exhausted".into());
    }

    Ok(ArcTrace {
        start: x0,
        arc: curve.clone(),
        curve,
        held_center: held_ref,
        free_center: free_ref,
        neighborhood_radius: radius,
        step,
        status,
        held_max_deviation: held_max_dev,
        swap_clean,
    })
}
