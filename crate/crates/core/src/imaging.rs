//! Direct imaging of the multistatic response matrix.
//!
//! The indicator at a sampling point r is
//!   I(r) = u(r)^H P conj(v(r)),
//! with observation and illumination steering vectors
//!   u_i = e^{-i kappa rhat_i . r} / sqrt(M),  v_j = e^{i kappa d_j . r} / sqrt(N),
//! chosen so that every term of the multistatic sum is stationary at a
//! scatterer location. Expanded,
//! I(r) = sum_{ij} P_ij e^{i kappa (rhat_i - d_j) . r} / sqrt(M N):
//! a sum of complex exponentials with frequencies in [-2 kappa, 2 kappa]^2,
//! which a type-1 NUFFT evaluates on the whole grid at once.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::farfield::{
    build_response_matrix, DirectionGrid, ResponseMatrix, ResponseOptions, ScattererMotion,
};
use crate::nufft;
use crate::scene::{ParametricCurve, PointScattererSet, Vec2};

/// Square sampling grid: size x size points with spacing 2 half_width / size,
/// covering [center - half_width, center + half_width) in both axes.
#[derive(Debug, Clone)]
pub struct ImageGrid {
    pub center: Vec2,
    pub half_width: f64,
    pub size: usize,
}

impl ImageGrid {
    pub fn centered(half_width: f64, size: usize) -> ImageGrid {
        ImageGrid {
            center: Vec2::new(0.0, 0.0),
            half_width,
            size,
        }
    }

    pub fn coord(&self, i: usize) -> f64 {
        -self.half_width + 2.0 * self.half_width * i as f64 / self.size as f64
    }

    pub fn point(&self, ix: usize, iy: usize) -> Vec2 {
        self.center.add(Vec2::new(self.coord(ix), self.coord(iy)))
    }

    fn validate(&self) -> Result<()> {
        if self.size < 8 || self.size % 2 != 0 {
            return Err(Error::Config(format!(
                "image grid size must be even and at least 8, got {}",
                self.size
            )));
        }
        if !(self.half_width > 0.0) {
            return Err(Error::Config(format!(
                "image grid half-width must be positive: {}",
                self.half_width
            )));
        }
        Ok(())
    }
}

/// Indicator values, row-major: values[ix * size + iy] = I(point(ix, iy)).
#[derive(Debug, Clone)]
pub struct Image {
    pub grid: ImageGrid,
    pub values: Vec<Complex64>,
}

impl Image {
    pub fn magnitudes(&self) -> Vec<f64> {
        self.values.iter().map(|z| z.norm()).collect()
    }

    pub fn max_magnitude(&self) -> f64 {
        self.values.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    /// Grid point of the largest indicator magnitude.
    pub fn peak(&self) -> Vec2 {
        let mut best = 0;
        let mut mag = -1.0;
        for (q, z) in self.values.iter().enumerate() {
            if z.norm() > mag {
                mag = z.norm();
                best = q;
            }
        }
        self.grid.point(best / self.grid.size, best % self.grid.size)
    }
}

fn steering_scale(p: &ResponseMatrix) -> f64 {
    1.0 / ((p.observation.len() * p.incidence.len()) as f64).sqrt()
}

/// Reference evaluation by direct summation, O(grid^2 M N). Kept as the
/// accuracy baseline for the NUFFT path.
pub fn image_direct(p: &ResponseMatrix, grid: &ImageGrid) -> Result<Image> {
    grid.validate()?;
    let m = p.observation.len();
    let n = p.incidence.len();
    let scale = steering_scale(p);
    let obs_dirs: Vec<Vec2> = (0..m).map(|i| p.observation.direction(i)).collect();
    let inc_dirs: Vec<Vec2> = (0..n).map(|j| p.incidence.direction(j)).collect();
    let mut values = vec![Complex64::ZERO; grid.size * grid.size];
    for ix in 0..grid.size {
        for iy in 0..grid.size {
            let r = grid.point(ix, iy);
            // t = P v, then I = u . t.
            let v: Vec<Complex64> = inc_dirs
                .iter()
                .map(|d| Complex64::from_polar(1.0, -p.kappa * d.dot(r)))
                .collect();
            let mut acc = Complex64::ZERO;
            for (i, od) in obs_dirs.iter().enumerate() {
                let mut row = Complex64::ZERO;
                for j in 0..n {
                    row += p.data[(i, j)] * v[j];
                }
                acc += Complex64::from_polar(1.0, p.kappa * od.dot(r)) * row;
            }
            values[ix * grid.size + iy] = scale * acc;
        }
    }
    Ok(Image {
        grid: grid.clone(),
        values,
    })
}

/// NUFFT evaluation of the indicator on the whole grid. Requires the grid to
/// resolve the highest spatial frequency: size >= 4 kappa half_width / pi.
pub fn image_nufft(p: &ResponseMatrix, grid: &ImageGrid) -> Result<Image> {
    grid.validate()?;
    let min_size = 4.0 * p.kappa * grid.half_width / std::f64::consts::PI;
    if (grid.size as f64) < min_size {
        return Err(Error::Config(format!(
            "image grid of size {} cannot resolve kappa = {}, half-width = {}: need at least {} points per axis",
            grid.size,
            p.kappa,
            grid.half_width,
            min_size.ceil()
        )));
    }
    let m = p.observation.len();
    let n = p.incidence.len();
    let scale = steering_scale(p);
    // Frequencies omega_ij = kappa (rhat_i - d_j), rescaled so that integer
    // grid indices reproduce omega . r over [-L, L)^2; the grid center adds
    // a per-source phase.
    let rescale = 2.0 * grid.half_width / grid.size as f64;
    let mut xi = Vec::with_capacity(m * n);
    let mut coeffs = Vec::with_capacity(m * n);
    for i in 0..m {
        let od = p.observation.direction(i);
        for j in 0..n {
            let dd = p.incidence.direction(j);
            let omega = Vec2::new(p.kappa * (od.x - dd.x), p.kappa * (od.y - dd.y));
            xi.push((rescale * omega.x, rescale * omega.y));
            coeffs.push(
                scale
                    * p.data[(i, j)]
                    * Complex64::from_polar(1.0, omega.dot(grid.center)),
            );
        }
    }
    let values = nufft::nufft2d(&xi, &coeffs, grid.size)?;
    Ok(Image {
        grid: grid.clone(),
        values,
    })
}

/// Forward model of an imaging experiment: one obstacle collection probed
/// through a population of point scatterers.
#[derive(Debug, Clone)]
pub struct ExperimentScene {
    pub obstacles: Vec<ParametricCurve>,
    pub scatterers: PointScattererSet,
    pub motion: ScattererMotion,
    pub kappa: f64,
    pub nodes_per_curve: usize,
}

/// Response matrix and reconstruction at one harmonic of an experiment.
pub struct HarmonicImage {
    /// Index into the nonlinearity's harmonic list (0 = fundamental).
    pub harmonic: usize,
    /// Recorded wavenumber of this harmonic.
    pub kappa: f64,
    pub response: ResponseMatrix,
    pub image: Image,
}

/// Builds response matrices and NUFFT images for the requested harmonics.
/// Higher harmonics of scenes with obstacles are recorded as the difference
/// against the free point scatterers, isolating the obstacle contribution.
pub fn run_imaging_experiment(
    scene: &ExperimentScene,
    directions: usize,
    grid: &ImageGrid,
    harmonics: &[usize],
) -> Result<Vec<HarmonicImage>> {
    let dirs = DirectionGrid::uniform(directions);
    harmonics
        .iter()
        .map(|&h| {
            let opts = ResponseOptions {
                harmonic: h,
                subtract_free_scatterers: h > 0 && !scene.obstacles.is_empty(),
            };
            let response = build_response_matrix(
                &scene.obstacles,
                &scene.scatterers,
                &scene.motion,
                scene.kappa,
                scene.nodes_per_curve,
                &dirs,
                &dirs,
                &opts,
            )?;
            let image = image_nufft(&response, grid)?;
            Ok(HarmonicImage {
                harmonic: h,
                kappa: response.kappa,
                response,
                image,
            })
        })
        .collect()
}
