//! Free-space Helmholtz kernels in 2D.
//!
//! The outgoing Green's function is G_k(r, r') = (i/4) H0^(1)(k |r - r'|),
//! satisfying the Sommerfeld radiation condition.

use num_complex::Complex64;

use crate::bessel::{hankel1_0, hankel1_1};
use crate::error::{Error, Result};
use crate::scene::Vec2;

/// Points closer than this are treated as coincident.
pub const SINGULARITY_THRESHOLD: f64 = 1e-13;

pub fn green(kappa: f64, r: Vec2, rp: Vec2) -> Result<Complex64> {
    let dist = r.sub(rp).norm();
    if dist < SINGULARITY_THRESHOLD {
        return Err(Error::Singularity { dist });
    }
    Ok(Complex64::new(0.0, 0.25) * hankel1_0(kappa * dist)?)
}

/// Normal derivative with respect to the first argument:
/// d/dnu(x) G_k(x, rp) = -(i k / 4) H1^(1)(k R) (nu . (x - rp)) / R.
pub fn green_dnu(kappa: f64, x: Vec2, nu: Vec2, rp: Vec2) -> Result<Complex64> {
    let d = x.sub(rp);
    let dist = d.norm();
    if dist < SINGULARITY_THRESHOLD {
        return Err(Error::Singularity { dist });
    }
    Ok(Complex64::new(0.0, -0.25 * kappa) * hankel1_1(kappa * dist)? * (nu.dot(d) / dist))
}

/// Combined-field trace (d/dnu(x) - i eta) G_k(x, rp), the coupling kernel
/// between a point source at rp and a boundary node x with outward normal nu.
pub fn green_cfie(kappa: f64, eta: f64, x: Vec2, nu: Vec2, rp: Vec2) -> Result<Complex64> {
    Ok(green_dnu(kappa, x, nu, rp)? - Complex64::new(0.0, eta) * green(kappa, x, rp)?)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn symmetric_in_arguments() {
        let a = Vec2::new(0.3, -1.2);
        let b = Vec2::new(2.0, 0.7);
        let g1 = green(3.0, a, b).unwrap();
        let g2 = green(3.0, b, a).unwrap();
        assert!((g1 - g2).norm() < 1e-15);
    }

    #[test]
    fn satisfies_helmholtz_equation() {
        // Five-point Laplacian of G plus k^2 G vanishes away from the source.
        let kappa = 2.5;
        let src = Vec2::new(0.0, 0.0);
        let p = Vec2::new(1.1, 0.6);
        let h = 1e-4;
        let g = |x: f64, y: f64| green(kappa, Vec2::new(x, y), src).unwrap();
        let lap = (g(p.x + h, p.y) + g(p.x - h, p.y) + g(p.x, p.y + h) + g(p.x, p.y - h)
            - 4.0 * g(p.x, p.y))
            / (h * h);
        let resid = lap + kappa * kappa * g(p.x, p.y);
        assert!(resid.norm() < 1e-5, "residual {resid}");
    }

    #[test]
    fn normal_derivative_matches_finite_difference() {
        let kappa = 4.0;
        let src = Vec2::new(-0.5, 0.3);
        let x = Vec2::new(1.0, 2.0);
        let nu = Vec2::from_angle(0.77);
        let h = 1e-6;
        let plus = green(kappa, x.add(nu.scale(h)), src).unwrap();
        let minus = green(kappa, x.sub(nu.scale(h)), src).unwrap();
        let fd = (plus - minus) / (2.0 * h);
        let exact = green_dnu(kappa, x, nu, src).unwrap();
        assert!((fd - exact).norm() < 1e-8, "{fd} vs {exact}");
    }

    #[test]
    fn logarithmic_singularity_scaling() {
        // G ~ -(1/2pi) ln R as R -> 0.
        let kappa = 1.0;
        let src = Vec2::new(0.0, 0.0);
        for r in [1e-6, 1e-8] {
            let g = green(kappa, Vec2::new(r, 0.0), src).unwrap();
            let lead = -(r.ln()) / (2.0 * std::f64::consts::PI);
            assert!((g.re - lead).abs() / lead.abs() < 1e-2);
        }
    }

    #[test]
    fn coincident_points_error() {
        let p = Vec2::new(1.0, 1.0);
        assert!(matches!(
            green(1.0, p, p),
            Err(Error::Singularity { .. })
        ));
        assert!(green_dnu(1.0, p, Vec2::new(1.0, 0.0), p).is_err());
    }
}
