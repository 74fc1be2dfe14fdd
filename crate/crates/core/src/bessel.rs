//! Bessel functions J0, J1, Y0, Y1 and Hankel functions H0^(1), H1^(1) for
//! positive real argument, self-contained and accurate to ~1e-13 relative.
//!
//! Three regimes:
//! - x < 2: ascending power series for all four functions;
//! - 2 <= x < 17: Miller downward recurrence for the J_n array, then the
//!   Neumann expansion of Y0 (and its derivative for Y1), which avoids the
//!   catastrophic cancellation of the raw Y series at moderate argument;
//! - x >= 17: Hankel asymptotic expansions truncated at the smallest term.

use num_complex::Complex64;

use crate::error::{Error, Result};

const EULER_GAMMA: f64 = 0.577_215_664_901_532_9;
const FRAC_2_PI: f64 = std::f64::consts::FRAC_2_PI;

/// J0, Y0, J1, Y1 at x > 0.
pub fn j0y0j1y1(x: f64) -> (f64, f64, f64, f64) {
    debug_assert!(x > 0.0);
    if x < 2.0 {
        small_argument(x)
    } else if x < 17.0 {
        miller_neumann(x)
    } else {
        let (j0, y0) = asymptotic(0, x);
        let (j1, y1) = asymptotic(1, x);
        (j0, y0, j1, y1)
    }
}

pub fn hankel1_0(z: f64) -> Result<Complex64> {
    if !(z > 0.0) {
        return Err(Error::Domain(format!(
            "Hankel function argument must be positive: {z}"
        )));
    }
    let (j0, y0, _, _) = j0y0j1y1(z);
    Ok(Complex64::new(j0, y0))
}

pub fn hankel1_1(z: f64) -> Result<Complex64> {
    if !(z > 0.0) {
        return Err(Error::Domain(format!(
            "Hankel function argument must be positive: {z}"
        )));
    }
    let (_, _, j1, y1) = j0y0j1y1(z);
    Ok(Complex64::new(j1, y1))
}

fn small_argument(x: f64) -> (f64, f64, f64, f64) {
    let q = 0.25 * x * x;
    let lg = (0.5 * x).ln() + EULER_GAMMA;

    // J0 and the harmonic-number series entering Y0.
    let mut term = 1.0;
    let mut j0 = 1.0;
    let mut h = 0.0;
    let mut y0_sum = 0.0;
    for k in 1..40 {
        term *= -q / ((k * k) as f64);
        h += 1.0 / k as f64;
        j0 += term;
        y0_sum -= term * h; // (-1)^{k+1} H_k q^k / (k!)^2
        if term.abs() < 1e-18 {
            break;
        }
    }
    let y0 = FRAC_2_PI * (lg * j0 + y0_sum);

    // J1 and the psi-sum series entering Y1 (DLMF 10.8.1 with n = 1).
    let mut term = 0.5 * x;
    let mut j1 = term;
    let mut h_k = 0.0;
    let mut h_k1 = 1.0;
    let mut psi_sum = term * (h_k + h_k1); // k = 0 contribution
    for k in 1..40 {
        term *= -q / ((k * (k + 1)) as f64);
        h_k += 1.0 / k as f64;
        h_k1 += 1.0 / (k + 1) as f64;
        j1 += term;
        psi_sum += term * (h_k + h_k1);
        if term.abs() < 1e-18 {
            break;
        }
    }
    // DLMF 10.8.1 with n = 1: the psi sum splits into a -2 gamma J1 part and
    // the harmonic part accumulated in psi_sum above.
    let y1 = FRAC_2_PI * (0.5 * x).ln() * j1 - FRAC_2_PI / x
        - std::f64::consts::FRAC_1_PI * (psi_sum - 2.0 * EULER_GAMMA * j1);
    (j0, y0, j1, y1)
}

/// Miller downward recurrence for J_0..J_{nmax}, normalized by
/// J_0 + 2 sum_k J_{2k} = 1.
pub(crate) fn j_array(x: f64, nmax: usize) -> Vec<f64> {
    let start = nmax + ((1.4 * x) as usize) + 20;
    let mut jp = 0.0_f64;
    let mut j = 1e-30_f64;
    let mut out = vec![0.0; nmax + 1];
    let mut norm = 0.0;
    for n in (0..=start).rev() {
        let jm = (2.0 * (n + 1) as f64 / x) * j - jp;
        jp = j;
        j = jm;
        // j now holds J_n (unnormalized); jp holds J_{n+1}.
        if n <= nmax {
            out[n] = j;
        }
        if n > 0 && n % 2 == 0 {
            norm += 2.0 * j;
        }
        // Rescale to avoid overflow for small x.
        if j.abs() > 1e250 {
            let s = 1e-250;
            j *= s;
            jp *= s;
            norm *= s;
            for v in out.iter_mut() {
                *v *= s;
            }
        }
    }
    norm += j; // J_0 term
    for v in out.iter_mut() {
        *v /= norm;
    }
    out
}

fn miller_neumann(x: f64) -> (f64, f64, f64, f64) {
    // Enough orders that J_{2k} has decayed below 1e-18.
    let nmax = (x as usize) + 34;
    let js = j_array(x, nmax);
    let j0 = js[0];
    let j1 = js[1];
    let lg = (0.5 * x).ln() + EULER_GAMMA;

    // Y0 = (2/pi)(ln(x/2)+gamma) J0 - (4/pi) sum_k (-1)^k J_{2k}/k
    let mut s = 0.0;
    let mut sp = 0.0; // same series with J_{2k}' = (J_{2k-1}-J_{2k+1})/2
    let mut sign = -1.0;
    let mut k = 1usize;
    while 2 * k + 1 <= nmax {
        s += sign * js[2 * k] / k as f64;
        sp += sign * 0.5 * (js[2 * k - 1] - js[2 * k + 1]) / k as f64;
        sign = -sign;
        k += 1;
    }
    let y0 = FRAC_2_PI * lg * j0 - 2.0 * FRAC_2_PI * s;
    // Y1 = -Y0' with J0' = -J1.
    let y0p = FRAC_2_PI * (j0 / x + lg * (-j1)) - 2.0 * FRAC_2_PI * sp;
    (j0, y0, j1, -y0p)
}

/// Hankel asymptotic expansion, usable for x >= 17 at ~1e-14 relative.
fn asymptotic(nu: u32, x: f64) -> (f64, f64) {
    let mu = 4.0 * (nu * nu) as f64;
    let omega = x - (nu as f64 * 0.5 + 0.25) * std::f64::consts::PI;
    let mut p = 0.0;
    let mut q = 0.0;
    let mut c = 1.0_f64; // a_k(nu) / x^k
    let mut k = 0usize;
    let mut last = f64::INFINITY;
    loop {
        let term = c;
        if term.abs() > last {
            break; // divergent tail reached
        }
        last = term.abs();
        if k % 2 == 0 {
            p += if (k / 2) % 2 == 0 { term } else { -term };
        } else {
            q += if ((k - 1) / 2) % 2 == 0 { term } else { -term };
        }
        if term.abs() < 1e-18 || k > 60 {
            break;
        }
        k += 1;
        c *= (mu - ((2 * k - 1) * (2 * k - 1)) as f64) / (8.0 * k as f64 * x);
    }
    let amp = (2.0 / (std::f64::consts::PI * x)).sqrt();
    let (s, co) = omega.sin_cos();
    (amp * (p * co - q * s), amp * (p * s + q * co))
}
