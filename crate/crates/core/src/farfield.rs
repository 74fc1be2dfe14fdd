//! Multistatic far-field response matrices.
//!
//! A response matrix collects the far-field pattern of a scene at a chosen
//! harmonic for a grid of observation angles (rows) against a grid of
//! incidence angles (columns).

use num_complex::Complex64;

use crate::coupled::CoupledSystem;
use crate::error::{Error, Result};
use crate::foldylax;
use crate::linalg::CMat;
use crate::scene::{place_aligned_point_scatterers, IncidentWave, ParametricCurve, PointScattererSet, Vec2};

#[derive(Debug, Clone)]
pub struct DirectionGrid {
    pub angles: Vec<f64>,
}

impl DirectionGrid {
    /// n angles uniformly spaced on [0, 2 pi).
    pub fn uniform(n: usize) -> DirectionGrid {
        DirectionGrid {
            angles: (0..n)
                .map(|q| 2.0 * std::f64::consts::PI * q as f64 / n as f64)
                .collect(),
        }
    }

    pub fn from_angles(angles: Vec<f64>) -> DirectionGrid {
        DirectionGrid { angles }
    }

    pub fn len(&self) -> usize {
        self.angles.len()
    }

    pub fn is_empty(&self) -> bool {
        self.angles.is_empty()
    }

    pub fn direction(&self, q: usize) -> Vec2 {
        Vec2::from_angle(self.angles[q])
    }
}

/// Far-field data matrix: data[(i, j)] is the pattern at observation angle
/// `observation.angles[i]` for incidence angle `incidence.angles[j]`, at
/// wavenumber `kappa` (the harmonic wavenumber of the recorded field).
#[derive(Debug, Clone)]
pub struct ResponseMatrix {
    pub kappa: f64,
    pub observation: DirectionGrid,
    pub incidence: DirectionGrid,
    pub data: CMat,
}

/// How the point scatterers relate to the incidence direction.
#[derive(Debug, Clone)]
pub enum ScattererMotion {
    /// Positions fixed across all incidence directions.
    Fixed,
    /// For incidence angle beta the k-th scatterer sits at
    /// radii[k] (cos beta, sin beta), staying aligned with the source.
    AlignedWithIncidence { radii: Vec<f64> },
}

#[derive(Debug, Clone)]
pub struct ResponseOptions {
    /// Index into the harmonic list of the nonlinearity (0 = fundamental).
    pub harmonic: usize,
    /// Record the difference between the full scene and the same point
    /// scatterers without the obstacles. Isolates the obstacle contribution
    /// when the scatterer response is known.
    pub subtract_free_scatterers: bool,
}

impl Default for ResponseOptions {
    fn default() -> Self {
        ResponseOptions {
            harmonic: 0,
            subtract_free_scatterers: false,
        }
    }
}

/// Builds the multistatic response matrix of a scene of sound-soft obstacles
/// and point scatterers. Heavy factorizations are shared across columns.
#[allow(clippy::too_many_arguments)]
pub fn build_response_matrix(
    obstacles: &[ParametricCurve],
    scatterers: &PointScattererSet,
    motion: &ScattererMotion,
    kappa: f64,
    nodes_per_curve: usize,
    observation: &DirectionGrid,
    incidence: &DirectionGrid,
    opts: &ResponseOptions,
) -> Result<ResponseMatrix> {
    let indices = scatterers.nonlinearity.harmonic_indices();
    if opts.harmonic >= indices.len() {
        return Err(Error::Config(format!(
            "harmonic index {} out of range for a nonlinearity with {} harmonics",
            opts.harmonic,
            indices.len()
        )));
    }
    let h = opts.harmonic;
    let kappa_h = indices[h] as f64 * kappa;
    let nobs = observation.len();
    let ninc = incidence.len();
    let mut data = CMat::zeros(nobs, ninc);

    if obstacles.is_empty() {
        // Point scatterers alone.
        let fixed_prep = match motion {
            ScattererMotion::Fixed => Some(foldylax::prepare(scatterers, kappa)?),
            ScattererMotion::AlignedWithIncidence { .. } => None,
        };
        for j in 0..ninc {
            let inc = IncidentWave::new(kappa, incidence.direction(j))?;
            let set;
            let prep = match (&fixed_prep, motion) {
                (Some(p), _) => p,
                (None, ScattererMotion::AlignedWithIncidence { radii }) => {
                    let pos = place_aligned_point_scatterers(radii, incidence.angles[j])
                        .map_err(|e| e.at_column(j))?;
                    set = foldylax::prepare(&scatterers.at_positions(pos)?, kappa)
                        .map_err(|e| e.at_column(j))?;
                    &set
                }
                _ => unreachable!(),
            };
            let sol = prep.solve(&inc).map_err(|e| e.at_column(j))?;
            for i in 0..nobs {
                let v = if opts.subtract_free_scatterers {
                    Complex64::ZERO
                } else {
                    foldylax::farfield(&sol.harmonics[h], &prep_positions(prep), observation.angles[i])
                };
                data[(i, j)] = v;
            }
        }
        return Ok(ResponseMatrix {
            kappa: kappa_h,
            observation: observation.clone(),
            incidence: incidence.clone(),
            data,
        });
    }

    let system = CoupledSystem::new(obstacles, kappa, indices, nodes_per_curve)?;
    match motion {
        ScattererMotion::Fixed => {
            let prep = system.prepare(scatterers)?;
            let free = if opts.subtract_free_scatterers {
                Some(foldylax::prepare(scatterers, kappa)?)
            } else {
                None
            };
            for j in 0..ninc {
                let inc = IncidentWave::new(kappa, incidence.direction(j))?;
                let sol = prep.solve(&inc).map_err(|e| e.at_column(j))?;
                let free_sol = match &free {
                    Some(f) => Some(f.solve(&inc).map_err(|e| e.at_column(j))?),
                    None => None,
                };
                for i in 0..nobs {
                    let theta = observation.angles[i];
                    let mut v = prep.farfield(&sol, h, theta);
                    if let Some(fs) = &free_sol {
                        v -= foldylax::farfield(&fs.harmonics[h], &scatterers.positions, theta);
                    }
                    data[(i, j)] = v;
                }
            }
        }
        ScattererMotion::AlignedWithIncidence { radii } => {
            for j in 0..ninc {
                let beta = incidence.angles[j];
                let pos =
                    place_aligned_point_scatterers(radii, beta).map_err(|e| e.at_column(j))?;
                let set = scatterers.at_positions(pos).map_err(|e| e.at_column(j))?;
                let prep = system.prepare(&set).map_err(|e| e.at_column(j))?;
                let inc = IncidentWave::new(kappa, incidence.direction(j))?;
                let sol = prep.solve(&inc).map_err(|e| e.at_column(j))?;
                let free_sol = if opts.subtract_free_scatterers {
                    Some(
                        foldylax::solve(&set, &inc).map_err(|e| e.at_column(j))?,
                    )
                } else {
                    None
                };
                for i in 0..nobs {
                    let theta = observation.angles[i];
                    let mut v = prep.farfield(&sol, h, theta);
                    if let Some(fs) = &free_sol {
                        v -= foldylax::farfield(&fs.harmonics[h], &set.positions, theta);
                    }
                    data[(i, j)] = v;
                }
            }
        }
    }
    Ok(ResponseMatrix {
        kappa: kappa_h,
        observation: observation.clone(),
        incidence: incidence.clone(),
        data,
    })
}

fn prep_positions(prep: &foldylax::PreparedFoldyLax) -> Vec<Vec2> {
    prep.positions().to_vec()
}
