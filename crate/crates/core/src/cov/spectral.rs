//! Rasterized consistency check: the autocorrelation of the indicator,
//! computed once by direct shifted-overlap counting and once through the
//! squared modulus of the discrete Fourier transform, must agree to
//! rounding; scaled by pixel area it must track the exact covariogram.

use rustfft::{num_complex::Complex, FftPlanner};

use crate::error::{Error, Result};
use crate::geom::{ConvexBody, Vec2};

use super::covariogram_value;

/// Outcome of [`convolution_check`].
#[derive(Debug, Clone)]
pub struct ConvolutionReport {
    pub n: usize,
    /// Max |direct count - spectral autocorrelation| over the sampled shifts.
    pub max_spectral_vs_direct: f64,
    /// Max |pixel-area-scaled autocorrelation - covariogram| over the
    /// sampled shifts.
    pub max_vs_exact: f64,
    /// Pixel side length.
    pub pixel: f64,
}

/// Rasterizes the indicator of `body` on an n×n pixel grid (n a power of
/// two, n >= 128), autocorrelates it both by direct overlap counting (on a
/// lattice of sample shifts) and by FFT on the zero-padded grid, and
/// compares both paths against the exact covariogram.
pub fn convolution_check(body: &ConvexBody, n: usize) -> Result<ConvolutionReport> {
    if n < 128 || !n.is_power_of_two() {
        return Err(Error::TooFewSamples { min: 128, got: n });
    }
    let (lo, hi) = body.bounding_box();
    let extent = (hi.x - lo.x).max(hi.y - lo.y);
    let pixel = extent / n as f64;

    // Indicator raster: rows of bit masks, pixel centers.
    let words_per_row = n.div_ceil(64);
    let mut rows: Vec<u64> = vec![0; n * words_per_row];
    let mut mask = vec![vec![false; n]; n];
    for iy in 0..n {
        // Row interval by bisection on the two boundary crossings.
        let y = lo.y + (iy as f64 + 0.5) * pixel;
        for ix in 0..n {
            let x = lo.x + (ix as f64 + 0.5) * pixel;
            if body.contains(Vec2::new(x, y), 0.0) {
                rows[iy * words_per_row + ix / 64] |= 1u64 << (ix % 64);
                mask[iy][ix] = true;
            }
        }
    }

    // Spectral path: zero-pad to 2n x 2n, |F|², inverse.
    let m = 2 * n;
    let mut planner = FftPlanner::<f64>::new();
    let fft = planner.plan_fft_forward(m);
    let ifft = planner.plan_fft_inverse(m);
    let mut field: Vec<Complex<f64>> = vec![Complex::new(0.0, 0.0); m * m];
    for iy in 0..n {
        for ix in 0..n {
            if mask[iy][ix] {
                field[iy * m + ix] = Complex::new(1.0, 0.0);
            }
        }
    }
    // Row transforms, then column transforms.
    for row in field.chunks_exact_mut(m) {
        fft.process(row);
    }
    let mut col = vec![Complex::new(0.0, 0.0); m];
    for ix in 0..m {
        for iy in 0..m {
            col[iy] = field[iy * m + ix];
        }
        fft.process(&mut col);
        for iy in 0..m {
            field[iy * m + ix] = col[iy];
        }
    }
    for v in field.iter_mut() {
        *v = Complex::new(v.norm_sqr(), 0.0);
    }
    for row in field.chunks_exact_mut(m) {
        ifft.process(row);
    }
    for ix in 0..m {
        for iy in 0..m {
            col[iy] = field[iy * m + ix];
        }
        ifft.process(&mut col);
        for iy in 0..m {
            field[iy * m + ix] = col[iy];
        }
    }
    let scale = 1.0 / (m * m) as f64;
    let autocorr = |dx: isize, dy: isize| -> f64 {
        let ix = dx.rem_euclid(m as isize) as usize;
        let iy = dy.rem_euclid(m as isize) as usize;
        field[iy * m + ix].re * scale
    };

    // Direct path on a lattice of shifts.
    let direct = |dx: isize, dy: isize| -> f64 {
        let mut count = 0u64;
        for iy in 0..n as isize {
            let jy = iy + dy;
            if jy < 0 || jy >= n as isize {
                continue;
            }
            count += shifted_row_overlap(
                &rows[iy as usize * words_per_row..(iy as usize + 1) * words_per_row],
                &rows[jy as usize * words_per_row..(jy as usize + 1) * words_per_row],
                dx,
                n,
            );
        }
        count as f64
    };

    let mut max_spectral_vs_direct: f64 = 0.0;
    let mut max_vs_exact: f64 = 0.0;
    let lattice = 33isize;
    for a in 0..lattice {
        for b in 0..lattice {
            let dx = -(n as isize) + (2 * n as isize) * a / (lattice - 1);
            let dy = -(n as isize) + (2 * n as isize) * b / (lattice - 1);
            let d = direct(dx, dy);
            let s = autocorr(dx, dy);
            max_spectral_vs_direct = max_spectral_vs_direct.max((d - s).abs());
            let lag = Vec2::new(dx as f64 * pixel, dy as f64 * pixel);
            let exact = covariogram_value(body, lag);
            max_vs_exact = max_vs_exact.max((d * pixel * pixel - exact).abs());
        }
    }

    Ok(ConvolutionReport {
        n,
        max_spectral_vs_direct,
        max_vs_exact,
        pixel,
    })
}

/// Popcount of `rowa AND (rowb shifted by dx)`, rows given as bit masks.
fn shifted_row_overlap(rowa: &[u64], rowb: &[u64], dx: isize, n: usize) -> u64 {
    let mut count = 0;
    for ix_word in 0..rowa.len() {
        let mut a = rowa[ix_word];
        if a == 0 {
            continue;
        }
        // Intersect with rowb shifted right by dx pixels (pixel ix of the
        // shifted row equals pixel ix - dx of rowb).
        let base = ix_word as isize * 64;
        let mut b_word: u64 = 0;
        for bit in 0..64usize {
            let src = base + bit as isize - dx;
            if src >= 0 && (src as usize) < n {
                let w = rowb[src as usize / 64];
                if (w >> (src as usize % 64)) & 1 == 1 {
                    b_word |= 1u64 << bit;
                }
            }
        }
        a &= b_word;
        count += a.count_ones() as u64;
    }
    count
}

#[cfg(test)]
mod tests {
    use super::*;
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
    fn spectral_matches_direct_counts() {
        let report = convolution_check(&unit_square_body(), 128).unwrap();
        let budget = 1e-9 * (report.n * report.n) as f64;
        assert!(
            report.max_spectral_vs_direct < budget,
            "spectral vs direct: {} (budget {budget})",
            report.max_spectral_vs_direct
        );
    }

    #[test]
    fn raster_tracks_exact_covariogram() {
        let report = convolution_check(&unit_square_body(), 512).unwrap();
        // O(1/n) boundary pixels of a unit-perimeter-4 body.
        assert!(
            report.max_vs_exact < 5.0 / report.n as f64,
            "raster vs exact: {}",
            report.max_vs_exact
        );
    }

    #[test]
    fn reflection_leaves_autocorrelation_unchanged() {
        let body = ConvexBody::Support(SupportBody::new(1.0, vec![0.0, 0.0, 0.1], vec![]).unwrap());
        let a = convolution_check(&body, 128).unwrap();
        let b = convolution_check(&body.reflect_about(Vec2::ZERO), 128).unwrap();
        assert!((a.max_vs_exact - b.max_vs_exact).abs() < 2e-2);
        assert!(a.max_spectral_vs_direct < 1e-9 * (a.n * a.n) as f64);
        assert!(b.max_spectral_vs_direct < 1e-9 * (b.n * b.n) as f64);
    }
}
