//! Type-1 (nonuniform to uniform) NUFFT by Gaussian gridding.
//!
//! Computes f(n) = sum_q c_q e^{i n xi_q} for integer n in [-m/2, m/2) from
//! arbitrary frequencies xi_q. Sources are spread onto a 2x oversampled grid
//! with a truncated periodized Gaussian, transformed with an FFT and
//! deconvolved analytically. The kernel parameters give ~1e-12 relative
//! accuracy.

use num_complex::Complex64;
use rustfft::FftPlanner;

use crate::error::{Error, Result};

/// Half-width of the spreading kernel in fine-grid points.
const M_SP: usize = 12;
/// Oversampling ratio of the fine grid.
const RATIO: usize = 2;

fn tau(m: usize) -> f64 {
    // Greengard-Lee choice for R = 2: tau = pi Msp / (m^2 R (R - 1/2)).
    std::f64::consts::PI * M_SP as f64 / ((m * m) as f64 * RATIO as f64 * (RATIO as f64 - 0.5))
}

fn check_size(m: usize) -> Result<()> {
    if m < 8 || m % 2 != 0 {
        return Err(Error::Config(format!(
            "NUFFT output size must be even and at least 8, got {m}"
        )));
    }
    Ok(())
}

/// Spreads one source onto the periodic fine grid, returning the first fine
/// index and the kernel values at the 2 Msp + 1 covered points.
#[inline]
fn kernel_row(xi: f64, mr: usize, t: f64) -> (usize, [f64; 2 * M_SP + 1]) {
    let h = 2.0 * std::f64::consts::PI / mr as f64;
    let wrapped = xi.rem_euclid(2.0 * std::f64::consts::PI);
    let l0 = (wrapped / h).floor() as isize;
    let mut vals = [0.0; 2 * M_SP + 1];
    for (idx, v) in vals.iter_mut().enumerate() {
        let l = l0 - M_SP as isize + idx as isize;
        let d = wrapped - l as f64 * h;
        *v = (-d * d / (4.0 * t)).exp();
    }
    let first = (l0 - M_SP as isize).rem_euclid(mr as isize) as usize;
    (first, vals)
}

/// 1D type-1 NUFFT: out[i] = sum_q c_q e^{i (i - m/2) xi_q}, i = 0..m.
pub fn nufft1d(xi: &[f64], coeffs: &[Complex64], m: usize) -> Result<Vec<Complex64>> {
    check_size(m)?;
    if xi.len() != coeffs.len() {
        return Err(Error::Config(format!(
            "{} frequencies but {} coefficients",
            xi.len(),
            coeffs.len()
        )));
    }
    let t = tau(m);
    let mr = RATIO * m;
    let mut grid = vec![Complex64::ZERO; mr];
    for (&x, &c) in xi.iter().zip(coeffs) {
        if !x.is_finite() {
            return Err(Error::Domain(format!("non-finite NUFFT frequency {x}")));
        }
        let (first, vals) = kernel_row(x, mr, t);
        for (idx, &v) in vals.iter().enumerate() {
            grid[(first + idx) % mr] += v * c;
        }
    }
    let mut planner = FftPlanner::new();
    planner.plan_fft_forward(mr).process(&mut grid);
    Ok(deconvolve1d(&grid, m, t))
}

/// Deconvolution and mode extraction shared by the 1D and 2D paths:
/// f(n) = (sqrt(pi/t)/Mr) e^{t n^2} FFT[(-n) mod Mr].
fn deconvolve1d(spectrum: &[Complex64], m: usize, t: f64) -> Vec<Complex64> {
    let mr = spectrum.len();
    let scale = (std::f64::consts::PI / t).sqrt() / mr as f64;
    (0..m)
        .map(|i| {
            let n = i as isize - (m / 2) as isize;
            let idx = (-n).rem_euclid(mr as isize) as usize;
            scale * ((n * n) as f64 * t).exp() * spectrum[idx]
        })
        .collect()
}

/// 2D type-1 NUFFT on an m x m grid:
/// out[i1 * m + i2] = sum_q c_q e^{i (n1 xi1_q + n2 xi2_q)} with
/// n1 = i1 - m/2, n2 = i2 - m/2.
pub fn nufft2d(xi: &[(f64, f64)], coeffs: &[Complex64], m: usize) -> Result<Vec<Complex64>> {
    check_size(m)?;
    if xi.len() != coeffs.len() {
        return Err(Error::Config(format!(
            "{} frequencies but {} coefficients",
            xi.len(),
            coeffs.len()
        )));
    }
    let t = tau(m);
    let mr = RATIO * m;
    let mut grid = vec![Complex64::ZERO; mr * mr];
    for (&(x1, x2), &c) in xi.iter().zip(coeffs) {
        if !x1.is_finite() || !x2.is_finite() {
            return Err(Error::Domain(format!(
                "non-finite NUFFT frequency ({x1}, {x2})"
            )));
        }
        let (f1, v1) = kernel_row(x1, mr, t);
        let (f2, v2) = kernel_row(x2, mr, t);
        for (i1, &a) in v1.iter().enumerate() {
            let row = ((f1 + i1) % mr) * mr;
            let ca = c * a;
            for (i2, &b) in v2.iter().enumerate() {
                grid[row + (f2 + i2) % mr] += ca * b;
            }
        }
    }
    // Row FFTs, then column FFTs.
    let mut planner = FftPlanner::new();
    let fft = planner.plan_fft_forward(mr);
    for r in 0..mr {
        fft.process(&mut grid[r * mr..(r + 1) * mr]);
    }
    let mut col = vec![Complex64::ZERO; mr];
    for cidx in 0..mr {
        for r in 0..mr {
            col[r] = grid[r * mr + cidx];
        }
        fft.process(&mut col);
        for r in 0..mr {
            grid[r * mr + cidx] = col[r];
        }
    }
    let scale = std::f64::consts::PI / t / ((mr * mr) as f64);
    let half = (m / 2) as isize;
    let mut out = vec![Complex64::ZERO; m * m];
    for i1 in 0..m {
        let n1 = i1 as isize - half;
        let r = (-n1).rem_euclid(mr as isize) as usize;
        let e1 = ((n1 * n1) as f64 * t).exp();
        for i2 in 0..m {
            let n2 = i2 as isize - half;
            let cidx = (-n2).rem_euclid(mr as isize) as usize;
            let e2 = ((n2 * n2) as f64 * t).exp();
            out[i1 * m + i2] = scale * e1 * e2 * grid[r * mr + cidx];
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::Rng;
    use rand::SeedableRng;

    fn direct1d(xi: &[f64], c: &[Complex64], m: usize) -> Vec<Complex64> {
        (0..m)
            .map(|i| {
                let n = i as isize - (m / 2) as isize;
                xi.iter()
                    .zip(c)
                    .map(|(&x, &cq)| cq * Complex64::from_polar(1.0, n as f64 * x))
                    .sum()
            })
            .collect()
    }

    #[test]
    fn matches_direct_sum_1d() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(11);
        let n_src = 200;
        let m = 64;
        let xi: Vec<f64> = (0..n_src)
            .map(|_| rng.gen_range(-std::f64::consts::PI..std::f64::consts::PI))
            .collect();
        let c: Vec<Complex64> = (0..n_src)
            .map(|_| Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)))
            .collect();
        let fast = nufft1d(&xi, &c, m).unwrap();
        let slow = direct1d(&xi, &c, m);
        let norm: f64 = slow.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        let err: f64 = fast
            .iter()
            .zip(&slow)
            .map(|(a, b)| (a - b).norm_sqr())
            .sum::<f64>()
            .sqrt();
        assert!(err / norm < 1e-11, "relative error {}", err / norm);
    }

    #[test]
    fn matches_direct_sum_2d() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(5);
        let n_src = 150;
        let m = 32;
        let xi: Vec<(f64, f64)> = (0..n_src)
            .map(|_| {
                (
                    rng.gen_range(-std::f64::consts::PI..std::f64::consts::PI),
                    rng.gen_range(-std::f64::consts::PI..std::f64::consts::PI),
                )
            })
            .collect();
        let c: Vec<Complex64> = (0..n_src)
            .map(|_| Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)))
            .collect();
        let fast = nufft2d(&xi, &c, m).unwrap();
        let mut err = 0.0_f64;
        let mut norm = 0.0_f64;
        for i1 in 0..m {
            let n1 = i1 as isize - (m / 2) as isize;
            for i2 in 0..m {
                let n2 = i2 as isize - (m / 2) as isize;
                let exact: Complex64 = xi
                    .iter()
                    .zip(&c)
                    .map(|(&(x1, x2), &cq)| {
                        cq * Complex64::from_polar(1.0, n1 as f64 * x1 + n2 as f64 * x2)
                    })
                    .sum();
                err += (fast[i1 * m + i2] - exact).norm_sqr();
                norm += exact.norm_sqr();
            }
        }
        let rel = (err / norm).sqrt();
        assert!(rel < 1e-11, "relative error {rel}");
    }

    #[test]
    fn single_source_at_origin_is_flat() {
        let c = Complex64::new(0.7, -0.2);
        let out = nufft1d(&[0.0], &[c], 16).unwrap();
        for v in out {
            assert!((v - c).norm() < 1e-10);
        }
    }

    #[test]
    fn frequency_wrapping_is_exact() {
        let xi = 1.234;
        let c = [Complex64::new(1.0, 0.5)];
        let a = nufft1d(&[xi], &c, 32).unwrap();
        let b = nufft1d(&[xi + 2.0 * std::f64::consts::PI], &c, 32).unwrap();
        for (x, y) in a.iter().zip(&b) {
            assert!((x - y).norm() < 1e-12);
        }
    }

    #[test]
    fn invalid_sizes_rejected() {
        assert!(nufft1d(&[0.0], &[Complex64::ONE], 7).is_err());
        assert!(nufft1d(&[0.0], &[Complex64::ONE], 4).is_err());
        assert!(nufft1d(&[0.0, 1.0], &[Complex64::ONE], 16).is_err());
        assert!(nufft1d(&[f64::NAN], &[Complex64::ONE], 16).is_err());
    }
}
