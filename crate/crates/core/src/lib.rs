//! Two-dimensional time-harmonic acoustic scattering by mixtures of point
//! scatterers (linear, quadratically or cubically nonlinear) and sound-soft
//! extended obstacles, together with a fast direct imaging method that
//! reconstructs obstacle shapes from multistatic far-field data.
//!
//! The forward solvers couple a Foldy–Lax description of the point
//! scatterers with a combined-field boundary integral equation on the
//! obstacle boundaries. The inverse side evaluates an imaging function
//! `I(r) = uᵀ P v` over a spatial grid, either by direct summation or by a
//! type-1 non-uniform FFT.

pub mod bessel;
pub mod bie;
pub mod coeffs;
pub mod coupled;
pub mod error;
pub mod farfield;
pub mod foldylax;
pub mod imaging;
pub mod kernels;
pub mod linalg;
pub mod mie;
pub mod newton;
pub mod nufft;
pub mod scene;
pub mod validate;

mod nlsolve;

pub use error::{Error, Result};
pub use num_complex::Complex64;
pub use scene::{
    BoundaryDiscretization, HarmonicSet, IncidentWave, Nonlinearity, ParametricCurve,
    PointScattererSet, Scene, Vec2,
};
