//! Separation-of-variables solution for plane-wave scattering by a
//! sound-soft circle. Serves as the analytic oracle for the boundary
//! integral solver.
//!
//! Far-field convention: u_s(r) ~ e^{i kappa |r|} / sqrt(|r|) psi_inf(rhat).

use num_complex::Complex64;

use crate::bessel;
use crate::error::{Error, Result};
use crate::scene::Vec2;

/// Cylinder function values J_n and Y_n for n = 0..=nmax at x > 0.
/// J by Miller downward recurrence, Y by stable upward recurrence.
fn jn_yn(x: f64, nmax: usize) -> Result<(Vec<f64>, Vec<f64>)> {
    if !(x > 0.0) {
        return Err(Error::Domain(format!("cylinder argument must be positive: {x}")));
    }
    let js = bessel::j_array(x, nmax.max(1));
    let (_, y0, _, y1) = bessel::j0y0j1y1(x);
    let mut ys = vec![0.0; nmax + 1];
    ys[0] = y0;
    if nmax >= 1 {
        ys[1] = y1;
        for n in 1..nmax {
            ys[n + 1] = (2.0 * n as f64 / x) * ys[n] - ys[n - 1];
        }
    }
    Ok((js, ys))
}

/// Truncation order: enough that J_n(x)/H_n(x) has decayed well below 1e-16.
fn truncation(x: f64) -> usize {
    (x + 10.0 * x.cbrt() + 12.0).ceil() as usize
}

/// Scattering by a sound-soft circle of radius `a` centered at `center`,
/// illuminated by the unit-amplitude plane wave e^{i kappa d . r}.
pub struct SoftCircle {
    kappa: f64,
    center: Vec2,
    /// Incidence angle beta with d = (cos beta, sin beta).
    beta: f64,
    /// Mie coefficients c_n = -J_n(kappa a)/H_n(kappa a), n = 0..=nmax.
    coeffs: Vec<Complex64>,
    /// 1 / H_n(kappa a), used by the boundary density.
    inv_h: Vec<Complex64>,
}

impl SoftCircle {
    pub fn new(kappa: f64, radius: f64, center: Vec2, direction: Vec2) -> Result<SoftCircle> {
        if !(kappa > 0.0) || !(radius > 0.0) {
            return Err(Error::Domain(
                "circle oracle requires positive wavenumber and radius".into(),
            ));
        }
        let x = kappa * radius;
        let nmax = truncation(x);
        let (js, ys) = jn_yn(x, nmax)?;
        let mut coeffs = Vec::with_capacity(nmax + 1);
        let mut inv_h = Vec::with_capacity(nmax + 1);
        for n in 0..=nmax {
            let h = Complex64::new(js[n], ys[n]);
            coeffs.push(-js[n] / h);
            inv_h.push(1.0 / h);
        }
        Ok(SoftCircle {
            kappa,
            center,
            beta: direction.y.atan2(direction.x),
            coeffs,
            inv_h,
        })
    }

    /// Far-field pattern at observation angle theta.
    pub fn farfield(&self, theta: f64) -> Complex64 {
        let phi = theta - self.beta;
        let mut s = self.coeffs[0];
        for n in 1..self.coeffs.len() {
            // c_{-n} = c_n, so the pair contributes 2 c_n cos(n phi).
            s += 2.0 * (n as f64 * phi).cos() * self.coeffs[n];
        }
        let amp = (2.0 / (std::f64::consts::PI * self.kappa)).sqrt();
        let phase = Complex64::from_polar(1.0, -std::f64::consts::FRAC_PI_4);
        let centered = amp * phase * s;
        // Off-center circle: incident phase at the center and the far-field
        // translation phase.
        let rhat = Vec2::from_angle(theta);
        let d = Vec2::from_angle(self.beta);
        let shift = Complex64::from_polar(1.0, self.kappa * (d.dot(self.center) - rhat.dot(self.center)));
        centered * shift
    }

    /// Normal derivative of the total field at the boundary point with polar
    /// angle theta (outward normal).
    pub fn boundary_density(&self, radius: f64, theta: f64) -> Complex64 {
        let phi = theta - self.beta;
        let mut s = Complex64::ZERO;
        let mut i_pow = Complex64::ONE;
        for n in 0..self.inv_h.len() {
            // i^{-n}/H_{-n} = i^n/H_n, so pairs combine to a cosine as well.
            let w = if n == 0 { 1.0 } else { 2.0 * (n as f64 * phi).cos() };
            s += w * i_pow * self.inv_h[n];
            i_pow *= Complex64::I;
        }
        let d = Vec2::from_angle(self.beta);
        let shift = Complex64::from_polar(1.0, self.kappa * d.dot(self.center));
        Complex64::new(0.0, -2.0 / (std::f64::consts::PI * radius)) * s * shift
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::kernels;

    /// Far field recomputed from the boundary density through the Green
    /// representation u_s = -int_Gamma G(x, y) dnu u(y) ds(y).
    #[test]
    fn farfield_consistent_with_boundary_density() {
        let kappa = 3.0;
        let a = 1.3;
        let center = Vec2::new(0.4, -0.2);
        let dir = Vec2::from_angle(0.3);
        let mie = SoftCircle::new(kappa, a, center, dir).unwrap();
        let gamma = Complex64::from_polar(
            1.0 / (8.0 * std::f64::consts::PI * kappa).sqrt(),
            std::f64::consts::FRAC_PI_4,
        );
        let n = 256;
        for &theta in &[0.0, 1.1, 2.7, -2.0] {
            let rhat = Vec2::from_angle(theta);
            let mut s = Complex64::ZERO;
            for q in 0..n {
                let t = 2.0 * std::f64::consts::PI * q as f64 / n as f64;
                let y = center.add(Vec2::from_angle(t).scale(a));
                let dens = mie.boundary_density(a, t);
                s += Complex64::from_polar(1.0, -kappa * rhat.dot(y)) * dens;
            }
            let quad = -gamma * s * (2.0 * std::f64::consts::PI * a / n as f64);
            let series = mie.farfield(theta);
            assert!(
                (quad - series).norm() < 1e-10,
                "theta {theta}: {quad} vs {series}"
            );
        }
    }

    #[test]
    fn near_field_from_density_vanishes_inside() {
        // The single-layer representation of u_s evaluated inside the circle
        // must equal -u_inc (extinction theorem).
        let kappa = 2.0;
        let a = 1.0;
        let center = Vec2::new(0.0, 0.0);
        let dir = Vec2::new(1.0, 0.0);
        let mie = SoftCircle::new(kappa, a, center, dir).unwrap();
        let n = 512;
        let p = Vec2::new(0.2, -0.3);
        let mut s = Complex64::ZERO;
        for q in 0..n {
            let t = 2.0 * std::f64::consts::PI * q as f64 / n as f64;
            let y = Vec2::from_angle(t).scale(a);
            s += kernels::green(kappa, p, y).unwrap() * mie.boundary_density(a, t);
        }
        let u_s = -s * (2.0 * std::f64::consts::PI * a / n as f64);
        let u_inc = Complex64::from_polar(1.0, kappa * dir.dot(p));
        assert!((u_s + u_inc).norm() < 1e-10, "total inside: {}", u_s + u_inc);
    }

    #[test]
    fn reciprocity() {
        // psi_inf(rhat; d) = psi_inf(-d; -rhat).
        let mie_fwd = SoftCircle::new(4.0, 0.8, Vec2::new(1.0, 2.0), Vec2::from_angle(0.7)).unwrap();
        let theta_obs = 2.3;
        let mie_rev = SoftCircle::new(
            4.0,
            0.8,
            Vec2::new(1.0, 2.0),
            Vec2::from_angle(theta_obs + std::f64::consts::PI),
        )
        .unwrap();
        let f1 = mie_fwd.farfield(theta_obs);
        let f2 = mie_rev.farfield(0.7 + std::f64::consts::PI);
        assert!((f1 - f2).norm() < 1e-12, "{f1} vs {f2}");
    }

    #[test]
    fn centered_pattern_depends_only_on_angle_difference() {
        let k = 5.0;
        let a = 1.0;
        let m1 = SoftCircle::new(k, a, Vec2::new(0.0, 0.0), Vec2::from_angle(0.0)).unwrap();
        let m2 = SoftCircle::new(k, a, Vec2::new(0.0, 0.0), Vec2::from_angle(1.0)).unwrap();
        let f1 = m1.farfield(0.4);
        let f2 = m2.farfield(1.4);
        assert!((f1 - f2).norm() < 1e-12);
    }
}
