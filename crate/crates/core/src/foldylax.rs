//! Foldy-Lax solver for point scatterers in free space.
//!
//! The external field phi_j at each scatterer satisfies
//!   phi_j = Ghat_j s_j(phi) + b_j
//! with Ghat_j the zero-diagonal Green matrix at the j-th harmonic
//! wavenumber, s_j the source strengths and b_1 the incident field
//! (higher harmonics have no incident forcing).

use num_complex::Complex64;

use crate::error::Result;
use crate::kernels;
use crate::linalg::CMat;
use crate::nlsolve::ReducedSystem;
use crate::scene::{IncidentWave, PointScattererSet, Vec2};

#[derive(Debug, Clone)]
pub struct HarmonicField {
    /// Harmonic index (1 = fundamental).
    pub harmonic: usize,
    pub kappa: f64,
    /// External field at the scatterers.
    pub phi: Vec<Complex64>,
    /// Source strengths s_k radiating G_kappa(., r_k) s_k.
    pub strengths: Vec<Complex64>,
}

#[derive(Debug, Clone)]
pub struct FoldyLaxSolution {
    pub harmonics: Vec<HarmonicField>,
    pub newton_iterations: usize,
}

/// Zero-diagonal mutual Green matrix Ghat[i][k] = G_kappa(r_i, r_k), i != k.
pub fn green_matrix(kappa: f64, positions: &[Vec2]) -> Result<CMat> {
    let m = positions.len();
    let mut g = CMat::zeros(m, m);
    for i in 0..m {
        for k in 0..m {
            if i != k {
                g[(i, k)] = kernels::green(kappa, positions[i], positions[k])?;
            }
        }
    }
    Ok(g)
}

/// Scatterer-dependent data reusable across incidence directions.
pub struct PreparedFoldyLax {
    scatterers: PointScattererSet,
    base_kappa: f64,
    kappas: Vec<f64>,
    e: Vec<CMat>,
    linear_lu: Option<crate::linalg::DenseLu>,
}

/// Precomputes the Green matrices (and the linear operator factorization)
/// for a fixed scatterer configuration at the fundamental wavenumber `kappa`.
pub fn prepare(scatterers: &PointScattererSet, kappa: f64) -> Result<PreparedFoldyLax> {
    scatterers.validate()?;
    let indices = scatterers.nonlinearity.harmonic_indices();
    let kappas: Vec<f64> = indices.iter().map(|&j| j as f64 * kappa).collect();
    let e: Vec<CMat> = kappas
        .iter()
        .map(|&k| green_matrix(k, &scatterers.positions))
        .collect::<Result<_>>()?;
    let linear_lu = match &scatterers.nonlinearity {
        crate::scene::Nonlinearity::Linear { sigma } if !sigma.is_empty() => {
            Some(crate::nlsolve::linear_operator_lu(&e[0], sigma)?)
        }
        _ => None,
    };
    Ok(PreparedFoldyLax {
        scatterers: scatterers.clone(),
        base_kappa: kappa,
        kappas,
        e,
        linear_lu,
    })
}

impl PreparedFoldyLax {
    pub fn positions(&self) -> &[Vec2] {
        &self.scatterers.positions
    }

    pub fn solve(&self, inc: &IncidentWave) -> Result<FoldyLaxSolution> {
        if (inc.kappa - self.base_kappa).abs() > 1e-12 * self.base_kappa.max(1.0) {
            return Err(crate::error::Error::Config(format!(
                "incident wavenumber {} does not match prepared wavenumber {}",
                inc.kappa, self.base_kappa
            )));
        }
        let indices = self.scatterers.nonlinearity.harmonic_indices();
        let m = self.scatterers.positions.len();
        let mut b = vec![vec![Complex64::ZERO; m]; indices.len()];
        b[0] = self
            .scatterers
            .positions
            .iter()
            .map(|&r| inc.field_at(r))
            .collect();

        let sys = ReducedSystem::new(&self.e, &b, &self.scatterers.nonlinearity);
        let sol = sys.solve_cached(self.linear_lu.as_ref())?;

        let harmonics = indices
            .iter()
            .enumerate()
            .map(|(j, &idx)| HarmonicField {
                harmonic: idx as usize,
                kappa: self.kappas[j],
                phi: sol.phi[j].clone(),
                strengths: sol.strengths[j].clone(),
            })
            .collect();
        Ok(FoldyLaxSolution {
            harmonics,
            newton_iterations: sol.newton_iterations,
        })
    }
}

pub fn solve(scatterers: &PointScattererSet, inc: &IncidentWave) -> Result<FoldyLaxSolution> {
    prepare(scatterers, inc.kappa)?.solve(inc)
}

/// Far-field pattern of the point sources at observation angle theta, in the
/// e^{i kappa r}/sqrt(r) convention:
/// psi_inf = gamma sum_k s_k e^{-i kappa rhat . r_k},
/// gamma = e^{i pi/4} / sqrt(8 pi kappa).
pub fn farfield(field: &HarmonicField, positions: &[Vec2], theta: f64) -> Complex64 {
    let rhat = Vec2::from_angle(theta);
    let gamma = Complex64::from_polar(
        1.0 / (8.0 * std::f64::consts::PI * field.kappa).sqrt(),
        std::f64::consts::FRAC_PI_4,
    );
    let mut s = Complex64::ZERO;
    for (k, &rk) in positions.iter().enumerate() {
        s += field.strengths[k] * Complex64::from_polar(1.0, -field.kappa * rhat.dot(rk));
    }
    gamma * s
}

/// Total field at an exterior point (fundamental harmonic includes the
/// incident wave; higher harmonics are purely scattered).
pub fn field_at(
    field: &HarmonicField,
    positions: &[Vec2],
    inc: Option<&IncidentWave>,
    p: Vec2,
) -> Result<Complex64> {
    let mut u = match inc {
        Some(w) => w.field_at(p),
        None => Complex64::ZERO,
    };
    for (k, &rk) in positions.iter().enumerate() {
        u += field.strengths[k] * kernels::green(field.kappa, p, rk)?;
    }
    Ok(u)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scene::Nonlinearity;

    #[test]
    fn two_scatterer_closed_form() {
        // For two linear scatterers the 2x2 system has an explicit solution.
        let kappa = 2.0;
        let sigma = 0.5;
        let r1 = Vec2::new(-1.0, 0.0);
        let r2 = Vec2::new(1.5, 0.5);
        let set = PointScattererSet::uniform_linear(vec![r1, r2], sigma).unwrap();
        let inc = IncidentWave::new(kappa, Vec2::from_angle(0.4)).unwrap();
        let sol = solve(&set, &inc).unwrap();
        let g = kernels::green(kappa, r1, r2).unwrap();
        let f1 = inc.field_at(r1);
        let f2 = inc.field_at(r2);
        let det = Complex64::ONE - sigma * sigma * g * g;
        let phi1 = (f1 + sigma * g * f2) / det;
        let phi2 = (f2 + sigma * g * f1) / det;
        assert!((sol.harmonics[0].phi[0] - phi1).norm() < 1e-13);
        assert!((sol.harmonics[0].phi[1] - phi2).norm() < 1e-13);
        assert!((sol.harmonics[0].strengths[0] - sigma * phi1).norm() < 1e-13);
    }

    #[test]
    fn born_limit_for_weak_scatterers() {
        let kappa = 3.0;
        let sigma = 1e-6;
        let pos = vec![Vec2::new(0.0, 0.0), Vec2::new(2.0, 1.0), Vec2::new(-1.0, 3.0)];
        let set = PointScattererSet::uniform_linear(pos.clone(), sigma).unwrap();
        let inc = IncidentWave::new(kappa, Vec2::new(1.0, 0.0)).unwrap();
        let sol = solve(&set, &inc).unwrap();
        for (k, &r) in pos.iter().enumerate() {
            assert!((sol.harmonics[0].phi[k] - inc.field_at(r)).norm() < 1e-6);
        }
    }

    /// Picard iteration on the same reduced equations, an independent check
    /// of the Newton solution in the contractive regime.
    fn picard(
        set: &PointScattererSet,
        inc: &IncidentWave,
    ) -> Vec<Vec<Complex64>> {
        use crate::linalg::matvec;
        let indices = set.nonlinearity.harmonic_indices();
        let m = set.positions.len();
        let e: Vec<CMat> = indices
            .iter()
            .map(|&j| green_matrix(j as f64 * inc.kappa, &set.positions).unwrap())
            .collect();
        let b1: Vec<Complex64> = set.positions.iter().map(|&r| inc.field_at(r)).collect();
        let mut phi = vec![b1.clone(), vec![Complex64::ZERO; m]];
        for _ in 0..4000 {
            let mut s = vec![vec![Complex64::ZERO; m]; 2];
            for k in 0..m {
                let local = [phi[0][k], phi[1][k]];
                let sk = crate::nlsolve::strengths_at(&set.nonlinearity, k, &local);
                s[0][k] = sk[0];
                s[1][k] = sk[1];
            }
            let mut next = vec![vec![Complex64::ZERO; m]; 2];
            let mut delta = 0.0_f64;
            for j in 0..2 {
                let es = matvec(&e[j], &s[j]);
                for i in 0..m {
                    let v = es[i] + if j == 0 { b1[i] } else { Complex64::ZERO };
                    delta = delta.max((v - phi[j][i]).norm());
                    next[j][i] = v;
                }
            }
            phi = next;
            if delta < 1e-13 {
                break;
            }
        }
        phi
    }

    #[test]
    fn quadratic_matches_picard_oracle() {
        let kappa = 2.0;
        let pos = vec![Vec2::new(-13.0, 0.0), Vec2::new(-14.0, 0.0)];
        let set = PointScattererSet::uniform_quadratic(pos, 0.5, 0.4).unwrap();
        let inc = IncidentWave::new(kappa, Vec2::new(1.0, 0.0)).unwrap();
        let sol = solve(&set, &inc).unwrap();
        let oracle = picard(&set, &inc);
        for j in 0..2 {
            for k in 0..2 {
                assert!(
                    (sol.harmonics[j].phi[k] - oracle[j][k]).norm() < 1e-10,
                    "harmonic {j} scatterer {k}"
                );
            }
        }
        assert_eq!(sol.harmonics[1].harmonic, 2);
        assert!((sol.harmonics[1].kappa - 2.0 * kappa).abs() < 1e-14);
    }

    #[test]
    fn cubic_matches_picard_oracle() {
        let kappa = 2.0;
        let pos = vec![Vec2::new(-13.0, 0.0), Vec2::new(-14.0, 0.0)];
        let set = PointScattererSet::uniform_cubic(pos, 0.5, 0.4).unwrap();
        let inc = IncidentWave::new(kappa, Vec2::new(1.0, 0.0)).unwrap();
        let sol = solve(&set, &inc).unwrap();
        let oracle = picard(&set, &inc);
        for j in 0..2 {
            for k in 0..2 {
                assert!(
                    (sol.harmonics[j].phi[k] - oracle[j][k]).norm() < 1e-10,
                    "harmonic {j} scatterer {k}"
                );
            }
        }
        assert_eq!(sol.harmonics[1].harmonic, 3);
    }

    #[test]
    fn vanishing_nonlinear_coefficients_reduce_to_linear() {
        let kappa = 2.0;
        let pos = vec![Vec2::new(0.0, 0.0), Vec2::new(1.0, 1.0)];
        let quad = PointScattererSet::new(
            pos.clone(),
            Nonlinearity::Quadratic {
                sig1_1: vec![0.5; 2],
                sig1_2: vec![0.5; 2],
                sig2_1: vec![0.0; 2],
                sig2_2: vec![0.0; 2],
            },
        )
        .unwrap();
        let lin = PointScattererSet::uniform_linear(pos, 0.5).unwrap();
        let inc = IncidentWave::new(kappa, Vec2::new(0.0, 1.0)).unwrap();
        let sq = solve(&quad, &inc).unwrap();
        let sl = solve(&lin, &inc).unwrap();
        for k in 0..2 {
            assert!((sq.harmonics[0].phi[k] - sl.harmonics[0].phi[k]).norm() < 1e-12);
            assert!(sq.harmonics[1].phi[k].norm() < 1e-12);
        }
    }

    #[test]
    fn linear_farfield_reciprocity() {
        let kappa = 1.7;
        let pos = vec![Vec2::new(0.0, 0.0), Vec2::new(2.0, -1.0), Vec2::new(-1.5, 2.5)];
        let set = PointScattererSet::uniform_linear(pos.clone(), 0.8).unwrap();
        let alpha = 0.6;
        let theta = 2.1;
        let fwd = solve(&set, &IncidentWave::new(kappa, Vec2::from_angle(alpha)).unwrap()).unwrap();
        let rev = solve(
            &set,
            &IncidentWave::new(kappa, Vec2::from_angle(theta + std::f64::consts::PI)).unwrap(),
        )
        .unwrap();
        let f1 = farfield(&fwd.harmonics[0], &pos, theta);
        let f2 = farfield(&rev.harmonics[0], &pos, alpha + std::f64::consts::PI);
        assert!((f1 - f2).norm() < 1e-13, "{f1} vs {f2}");
    }

    #[test]
    fn empty_set_yields_empty_solution() {
        let set = PointScattererSet::empty();
        let inc = IncidentWave::new(1.0, Vec2::new(1.0, 0.0)).unwrap();
        let sol = solve(&set, &inc).unwrap();
        assert!(sol.harmonics[0].phi.is_empty());
    }
}
