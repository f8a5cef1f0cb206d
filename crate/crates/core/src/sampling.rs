//! Deterministic quasi-uniform sampling of the admissible lag domain.
//!
//! Uses the additive-recurrence (plastic-constant) low-discrepancy sequence;
//! the seed offsets the sequence so runs are reproducible and recordable.

use crate::cov::oracle::CovariogramOracle;
use crate::geom::Vec2;

/// Plastic constant based 2-D low-discrepancy sequence, point `k` offset by
/// `seed`, in the unit square.
pub fn low_discrepancy_2d(k: u64, seed: u64) -> (f64, f64) {
    // 1/φ_p and 1/φ_p² for the plastic constant φ_p ≈ 1.3247.
    const A1: f64 = 0.754877666246692;
    const A2: f64 = 0.569840290998053;
    let j = k.wrapping_add(seed.wrapping_mul(0x9E3779B9)) as f64 + 0.5;
    ((A1 * j).fract(), (A2 * j).fract())
}

/// Quasi-uniform points of the oracle's margin-shrunk sampling domain
/// (strictly inside the covariogram support, away from the origin).
pub fn sample_domain(oracle: &CovariogramOracle, count: usize, seed: u64) -> Vec<Vec2> {
    let r = oracle.dk_diameter() / 2.0 + oracle.margin();
    let mut out = Vec::with_capacity(count);
    let mut k = 0u64;
    let mut guard = 0u64;
    while out.len() < count && guard < 1_000_000 {
        let (a, b) = low_discrepancy_2d(k, seed);
        k += 1;
        guard += 1;
        let p = Vec2::new((2.0 * a - 1.0) * r, (2.0 * b - 1.0) * r);
        if oracle.in_sampling_domain(p) {
            out.push(p);
        }
    }
    out
}
