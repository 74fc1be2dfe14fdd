//! Mapping from physical susceptibilities of a small nonlinear inclusion to
//! the point-scatterer coupling coefficients.
//!
//! A subwavelength inclusion with linear susceptibility eta1(omega) and
//! quadratic or cubic susceptibility eta2, eta3 acts, to leading order in
//! its size, as a point scatterer whose coupling coefficients absorb the
//! 2D free-space normalization 4 pi and the squared wavenumber of the
//! harmonic being driven. Mixing terms that involve conjugate fields pick up
//! the multinomial count of their frequency arguments.

use crate::error::{Error, Result};
use crate::scene::Nonlinearity;

const FOUR_PI: f64 = 4.0 * std::f64::consts::PI;

fn check_kappa(kappa: f64) -> Result<()> {
    if !(kappa > 0.0) {
        return Err(Error::Domain(format!(
            "wavenumber must be positive: {kappa}"
        )));
    }
    Ok(())
}

/// Linear coupling sigma = 4 pi kappa^2 eta1.
pub fn linear_sigma(kappa: f64, eta1: f64) -> Result<f64> {
    check_kappa(kappa)?;
    Ok(FOUR_PI * kappa * kappa * eta1)
}

/// Coupling coefficients of a quadratic point scatterer.
#[derive(Debug, Clone, Copy)]
pub struct QuadraticCoefficients {
    pub sig1_1: f64,
    pub sig1_2: f64,
    pub sig2_1: f64,
    pub sig2_2: f64,
}

/// Quadratic mapping at fundamental wavenumber `kappa`:
/// - linear responses 4 pi kappa_j^2 eta1_j at each harmonic,
/// - down-conversion (difference frequency omega2 - omega1) in the
///   fundamental equation: 8 pi kappa1^2 eta2_mix, with the factor 2 from the
///   two orderings of the distinct arguments,
/// - second-harmonic generation: 4 pi kappa2^2 eta2_gen.
pub fn quadratic(
    kappa: f64,
    eta1_fund: f64,
    eta1_second: f64,
    eta2_mix: f64,
    eta2_gen: f64,
) -> Result<QuadraticCoefficients> {
    check_kappa(kappa)?;
    let k1sq = kappa * kappa;
    let k2sq = 4.0 * kappa * kappa;
    Ok(QuadraticCoefficients {
        sig1_1: FOUR_PI * k1sq * eta1_fund,
        sig1_2: FOUR_PI * k2sq * eta1_second,
        sig2_1: 2.0 * FOUR_PI * k1sq * eta2_mix,
        sig2_2: FOUR_PI * k2sq * eta2_gen,
    })
}

impl QuadraticCoefficients {
    /// Uniform population of m scatterers with these coefficients.
    pub fn uniform(&self, m: usize) -> Nonlinearity {
        Nonlinearity::Quadratic {
            sig1_1: vec![self.sig1_1; m],
            sig1_2: vec![self.sig1_2; m],
            sig2_1: vec![self.sig2_1; m],
            sig2_2: vec![self.sig2_2; m],
        }
    }
}

/// Coupling coefficients of a cubic point scatterer.
#[derive(Debug, Clone, Copy)]
pub struct CubicCoefficients {
    pub sig1_1: f64,
    pub sig1_2: f64,
    pub sig3_1: f64,
    pub sig3_2: f64,
    pub sig3_3: f64,
}

/// Cubic mapping at fundamental wavenumber `kappa`:
/// - linear responses at the fundamental and third harmonic,
/// - Kerr self-action (omega1 + omega1 - omega1): 12 pi kappa1^2 eta3_kerr,
///   three orderings of the repeated arguments,
/// - back-conversion (omega3 - omega1 - omega1): 12 pi kappa1^2 eta3_mix,
/// - third-harmonic generation: 4 pi kappa3^2 eta3_gen.
pub fn cubic(
    kappa: f64,
    eta1_fund: f64,
    eta1_third: f64,
    eta3_kerr: f64,
    eta3_mix: f64,
    eta3_gen: f64,
) -> Result<CubicCoefficients> {
    check_kappa(kappa)?;
    let k1sq = kappa * kappa;
    let k3sq = 9.0 * kappa * kappa;
    Ok(CubicCoefficients {
        sig1_1: FOUR_PI * k1sq * eta1_fund,
        sig1_2: FOUR_PI * k3sq * eta1_third,
        sig3_1: 3.0 * FOUR_PI * k1sq * eta3_kerr,
        sig3_2: 3.0 * FOUR_PI * k1sq * eta3_mix,
        sig3_3: FOUR_PI * k3sq * eta3_gen,
    })
}

impl CubicCoefficients {
    pub fn uniform(&self, m: usize) -> Nonlinearity {
        Nonlinearity::Cubic {
            sig1_1: vec![self.sig1_1; m],
            sig1_2: vec![self.sig1_2; m],
            sig3_1: vec![self.sig3_1; m],
            sig3_2: vec![self.sig3_2; m],
            sig3_3: vec![self.sig3_3; m],
        }
    }
}
