//! Coupled solver for scenes with sound-soft obstacles and point
//! scatterers (generalized Foldy-Lax).
//!
//! Per harmonic j the unknowns are the external fields phi_j at the points
//! and the boundary density psi_j. With K_j the CFIE operator, B_j the
//! point-to-boundary traces, Ghat_j the mutual Green matrix and M_j the
//! boundary-to-point single-layer map (including its minus sign),
//!   phi_j = b_j + Ghat_j s_j + M_j psi_j,
//!   K_j psi_j = rhs_j + B_j s_j,
//! which reduces by a Schur complement to the point-only fixed point
//!   phi_j = (Ghat_j + M_j K_j^{-1} B_j) s_j + (b_j + M_j K_j^{-1} rhs_j).
//! The boundary factorization is shared across incidence directions; the
//! scatterer-dependent blocks are cached per scatterer configuration.

use num_complex::Complex64;

use crate::bie::{BoundaryOperator, FactoredBoundary};
use crate::error::{Error, Result};
use crate::foldylax::{green_matrix, HarmonicField};
use crate::kernels;
use crate::linalg::{matvec, CMat};
use crate::nlsolve::ReducedSystem;
use crate::scene::{IncidentWave, ParametricCurve, PointScattererSet, Vec2};

struct HarmonicOperator {
    harmonic: usize,
    kappa: f64,
    boundary: FactoredBoundary,
}

/// Boundary operators factored at every harmonic wavenumber of a scene.
pub struct CoupledSystem {
    pub base_kappa: f64,
    ops: Vec<HarmonicOperator>,
}

impl CoupledSystem {
    /// Factors the CFIE at each harmonic `indices[j] * base_kappa` with the
    /// default coupling eta = kappa_j.
    pub fn new(
        obstacles: &[ParametricCurve],
        base_kappa: f64,
        indices: &[u32],
        nodes_per_curve: usize,
    ) -> Result<CoupledSystem> {
        if obstacles.is_empty() {
            return Err(Error::InvalidScene(
                "coupled solver requires at least one obstacle; use the Foldy-Lax solver for point scatterers alone".into(),
            ));
        }
        let ops = indices
            .iter()
            .map(|&j| {
                let kappa = j as f64 * base_kappa;
                let op = BoundaryOperator::assemble(kappa, None, obstacles, nodes_per_curve)?;
                Ok(HarmonicOperator {
                    harmonic: j as usize,
                    kappa,
                    boundary: op.factor()?,
                })
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(CoupledSystem {
            base_kappa,
            ops,
        })
    }

    pub fn boundary(&self, j: usize) -> &FactoredBoundary {
        &self.ops[j].boundary
    }

    /// Precomputes the scatterer-dependent coupling blocks. Reuse across
    /// incidence directions when the scatterer positions are fixed.
    pub fn prepare(&self, scatterers: &PointScattererSet) -> Result<PreparedCoupled<'_>> {
        scatterers.validate()?;
        let expected: Vec<usize> = scatterers
            .nonlinearity
            .harmonic_indices()
            .iter()
            .map(|&j| j as usize)
            .collect();
        let actual: Vec<usize> = self.ops.iter().map(|o| o.harmonic).collect();
        if expected != actual {
            return Err(Error::Config(format!(
                "system harmonics {actual:?} do not match scatterer harmonics {expected:?}"
            )));
        }
        let m = scatterers.len();
        let mut blocks = Vec::with_capacity(self.ops.len());
        let mut e_list = Vec::with_capacity(self.ops.len());
        for op in &self.ops {
            let nb = op.boundary.op.node_count();
            // B: boundary trace of each point source.
            let mut b_cols = CMat::zeros(nb, m);
            for (k, &rk) in scatterers.positions.iter().enumerate() {
                for (p, v) in op.boundary.op.point_source_trace(rk)?.into_iter().enumerate() {
                    b_cols[(p, k)] = v;
                }
            }
            let kinv_b = op.boundary.solve_mat(&b_cols);
            // M: psi -> scattered field at the points, u = -S[psi].
            let mut mmat = CMat::zeros(m, nb);
            for (i, &ri) in scatterers.positions.iter().enumerate() {
                for q in 0..nb {
                    mmat[(i, q)] = -op.boundary.op.weights[q]
                        * kernels::green(op.kappa, ri, op.boundary.op.positions[q])?;
                }
            }
            e_list.push(green_matrix(op.kappa, &scatterers.positions)? + &mmat * &kinv_b);
            blocks.push(HarmonicBlocks { kinv_b, mmat });
        }
        // Linear strength law: the reduced operator is incidence-independent,
        // factor it once.
        let linear_lu = match &scatterers.nonlinearity {
            crate::scene::Nonlinearity::Linear { sigma } if m > 0 => {
                Some(crate::nlsolve::linear_operator_lu(&e_list[0], sigma)?)
            }
            _ => None,
        };
        Ok(PreparedCoupled {
            system: self,
            scatterers: scatterers.clone(),
            blocks,
            e_list,
            linear_lu,
        })
    }
}

struct HarmonicBlocks {
    /// K_j^{-1} B_j, reused for the density back-substitution.
    kinv_b: CMat,
    /// Boundary-to-point map M_j.
    mmat: CMat,
}

pub struct PreparedCoupled<'a> {
    system: &'a CoupledSystem,
    scatterers: PointScattererSet,
    blocks: Vec<HarmonicBlocks>,
    /// Effective propagators E_j = Ghat_j + M_j K_j^{-1} B_j.
    e_list: Vec<CMat>,
    linear_lu: Option<crate::linalg::DenseLu>,
}

/// One harmonic of a coupled solution.
#[derive(Debug, Clone)]
pub struct CoupledHarmonic {
    pub field: HarmonicField,
    /// CFIE density at the boundary nodes.
    pub density: Vec<Complex64>,
}

#[derive(Debug, Clone)]
pub struct CoupledSolution {
    pub harmonics: Vec<CoupledHarmonic>,
    pub newton_iterations: usize,
}

impl PreparedCoupled<'_> {
    pub fn scatterers(&self) -> &PointScattererSet {
        &self.scatterers
    }

    pub fn solve(&self, inc: &IncidentWave) -> Result<CoupledSolution> {
        if (inc.kappa - self.system.base_kappa).abs() > 1e-12 * self.system.base_kappa.max(1.0) {
            return Err(Error::Config(format!(
                "incident wavenumber {} does not match system wavenumber {}",
                inc.kappa, self.system.base_kappa
            )));
        }
        let nh = self.blocks.len();
        let m = self.scatterers.len();

        // Incident forcing: boundary rhs and point field at the fundamental.
        let rhs1 = self.system.ops[0].boundary.op.plane_wave_rhs(inc);
        let kinv_rhs1 = self.system.ops[0].boundary.solve(&rhs1);
        let mut b_eff = vec![vec![Complex64::ZERO; m]; nh];
        for (i, &ri) in self.scatterers.positions.iter().enumerate() {
            b_eff[0][i] = inc.field_at(ri);
        }
        let w1 = matvec(&self.blocks[0].mmat, &kinv_rhs1);
        for i in 0..m {
            b_eff[0][i] += w1[i];
        }

        let reduced = ReducedSystem::new(&self.e_list, &b_eff, &self.scatterers.nonlinearity);
        let sol = reduced.solve_cached(self.linear_lu.as_ref())?;

        // Back-substitute densities: psi_j = K_j^{-1} rhs_j + (K_j^{-1}B_j) s_j.
        let mut harmonics = Vec::with_capacity(nh);
        for j in 0..nh {
            let op = &self.system.ops[j];
            let nb = op.boundary.op.node_count();
            let mut density = if j == 0 {
                kinv_rhs1.clone()
            } else {
                vec![Complex64::ZERO; nb]
            };
            let corr = matvec(&self.blocks[j].kinv_b, &sol.strengths[j]);
            for q in 0..nb {
                density[q] += corr[q];
            }
            harmonics.push(CoupledHarmonic {
                field: HarmonicField {
                    harmonic: op.harmonic,
                    kappa: op.kappa,
                    phi: sol.phi[j].clone(),
                    strengths: sol.strengths[j].clone(),
                },
                density,
            });
        }
        Ok(CoupledSolution {
            harmonics,
            newton_iterations: sol.newton_iterations,
        })
    }

    /// Far field of harmonic `j` at observation angle theta: point sources
    /// plus the single-layer contribution of the boundary density.
    pub fn farfield(&self, sol: &CoupledSolution, j: usize, theta: f64) -> Complex64 {
        let op = &self.system.ops[j];
        let h = &sol.harmonics[j];
        let points = crate::foldylax::farfield(&h.field, &self.scatterers.positions, theta);
        points + op.boundary.farfield(&h.density, theta)
    }

    /// Total field of harmonic `j` at an exterior point.
    pub fn field_at(
        &self,
        sol: &CoupledSolution,
        j: usize,
        inc: Option<&IncidentWave>,
        p: Vec2,
    ) -> Result<Complex64> {
        let op = &self.system.ops[j];
        let h = &sol.harmonics[j];
        let u_points =
            crate::foldylax::field_at(&h.field, &self.scatterers.positions, inc, p)?;
        let u_obs = op.boundary.scattered_at(&h.density, p)?;
        Ok(u_points + u_obs.value)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::DenseLu;
    use crate::mie::SoftCircle;

    #[test]
    fn obstacle_only_matches_separation_of_variables() {
        let kappa = 2.0;
        let circle = ParametricCurve::circle(Vec2::new(0.5, -0.3), 1.2);
        let sys = CoupledSystem::new(&[circle], kappa, &[1], 64).unwrap();
        let prep = sys.prepare(&PointScattererSet::empty()).unwrap();
        let inc = IncidentWave::new(kappa, Vec2::from_angle(0.9)).unwrap();
        let sol = prep.solve(&inc).unwrap();
        let mie = SoftCircle::new(kappa, 1.2, Vec2::new(0.5, -0.3), inc.direction).unwrap();
        for &theta in &[0.0, 1.5, -2.4] {
            let got = prep.farfield(&sol, 0, theta);
            assert!((got - mie.farfield(theta)).norm() < 1e-10);
        }
    }

    /// Monolithic oracle: assemble the full (m + nb) linear block system for
    /// linear scatterers and solve it in one shot.
    fn monolithic_linear(
        sys: &CoupledSystem,
        set: &PointScattererSet,
        inc: &IncidentWave,
    ) -> (Vec<Complex64>, Vec<Complex64>) {
        let sigma = match &set.nonlinearity {
            crate::scene::Nonlinearity::Linear { sigma } => sigma.clone(),
            _ => unreachable!(),
        };
        let op = &sys.ops[0].boundary.op;
        let m = set.len();
        let nb = op.node_count();
        let n = m + nb;
        let mut a = CMat::zeros(n, n);
        let ghat = green_matrix(inc.kappa, &set.positions).unwrap();
        // phi - Ghat D phi - M psi = phi_inc
        for i in 0..m {
            for k in 0..m {
                a[(i, k)] = -sigma[k] * ghat[(i, k)];
            }
            a[(i, i)] += Complex64::ONE;
            for q in 0..nb {
                a[(i, m + q)] =
                    op.weights[q] * kernels::green(inc.kappa, set.positions[i], op.positions[q]).unwrap();
            }
        }
        // K psi - B D phi = rhs
        for (k, &rk) in set.positions.iter().enumerate() {
            let col = op.point_source_trace(rk).unwrap();
            for p in 0..nb {
                a[(m + p, k)] = -sigma[k] * col[p];
            }
        }
        for p in 0..nb {
            for q in 0..nb {
                a[(m + p, m + q)] = op.matrix()[(p, q)];
            }
        }
        let mut rhs = vec![Complex64::ZERO; n];
        for (i, &ri) in set.positions.iter().enumerate() {
            rhs[i] = inc.field_at(ri);
        }
        for (p, v) in op.plane_wave_rhs(inc).into_iter().enumerate() {
            rhs[m + p] = v;
        }
        let lu = DenseLu::factor(&a).unwrap();
        let x = lu.solve_vec(&rhs);
        (x[..m].to_vec(), x[m..].to_vec())
    }

    #[test]
    fn schur_reduction_matches_monolithic_solve() {
        let kappa = 2.0;
        let circle = ParametricCurve::circle(Vec2::new(0.0, 0.0), 1.0);
        let set = PointScattererSet::uniform_linear(
            vec![Vec2::new(4.0, 1.0), Vec2::new(-3.0, 2.5), Vec2::new(0.5, -5.0)],
            0.7,
        )
        .unwrap();
        let sys = CoupledSystem::new(&[circle], kappa, &[1], 48).unwrap();
        let prep = sys.prepare(&set).unwrap();
        let inc = IncidentWave::new(kappa, Vec2::from_angle(-0.4)).unwrap();
        let sol = prep.solve(&inc).unwrap();
        let (phi_o, psi_o) = monolithic_linear(&sys, &set, &inc);
        for i in 0..3 {
            assert!(
                (sol.harmonics[0].field.phi[i] - phi_o[i]).norm() < 1e-11,
                "phi {i}"
            );
        }
        let mut max_err = 0.0_f64;
        for q in 0..48 {
            max_err = max_err.max((sol.harmonics[0].density[q] - psi_o[q]).norm());
        }
        assert!(max_err < 1e-10, "density err {max_err}");
    }

    #[test]
    fn extinction_of_total_field_inside_obstacle() {
        let kappa = 2.0;
        let circle = ParametricCurve::circle(Vec2::new(0.0, 0.0), 1.0);
        let set =
            PointScattererSet::uniform_linear(vec![Vec2::new(3.0, 0.5), Vec2::new(-2.5, 1.5)], 0.6)
                .unwrap();
        let sys = CoupledSystem::new(&[circle], kappa, &[1], 64).unwrap();
        let prep = sys.prepare(&set).unwrap();
        let inc = IncidentWave::new(kappa, Vec2::new(1.0, 0.0)).unwrap();
        let sol = prep.solve(&inc).unwrap();
        let p = Vec2::new(0.2, -0.1);
        let total = prep.field_at(&sol, 0, Some(&inc), p).unwrap();
        assert!(total.norm() < 1e-9, "total field inside: {total}");
    }

    #[test]
    fn farfield_reciprocity_with_coupling() {
        let kappa = 1.5;
        let circle = ParametricCurve::circle(Vec2::new(0.0, 1.0), 0.8);
        let set =
            PointScattererSet::uniform_linear(vec![Vec2::new(2.5, -0.5), Vec2::new(-2.0, -1.0)], 0.9)
                .unwrap();
        let sys = CoupledSystem::new(&[circle], kappa, &[1], 48).unwrap();
        let prep = sys.prepare(&set).unwrap();
        let alpha = 0.3;
        let theta = 1.9;
        let pi = std::f64::consts::PI;
        let s1 = prep
            .solve(&IncidentWave::new(kappa, Vec2::from_angle(alpha)).unwrap())
            .unwrap();
        let s2 = prep
            .solve(&IncidentWave::new(kappa, Vec2::from_angle(theta + pi)).unwrap())
            .unwrap();
        let f1 = prep.farfield(&s1, 0, theta);
        let f2 = prep.farfield(&s2, 0, alpha + pi);
        assert!((f1 - f2).norm() < 1e-10, "{f1} vs {f2}");
    }

    /// Picard oracle on the full coupled equations for the quadratic case,
    /// exercising the back-substitution path independently.
    #[test]
    fn quadratic_coupled_matches_full_picard() {
        let kappa = 2.0;
        let circle = ParametricCurve::circle(Vec2::new(0.0, 0.0), 1.0);
        let set = PointScattererSet::uniform_quadratic(
            vec![Vec2::new(-6.0, 0.0), Vec2::new(-7.0, 0.0)],
            0.5,
            0.4,
        )
        .unwrap();
        let sys = CoupledSystem::new(&[circle], kappa, &[1, 2], 48).unwrap();
        let prep = sys.prepare(&set).unwrap();
        let inc = IncidentWave::new(kappa, Vec2::new(1.0, 0.0)).unwrap();
        let sol = prep.solve(&inc).unwrap();

        // Picard: phi -> s -> psi -> phi on the unreduced equations.
        let m = 2;
        let ghat: Vec<CMat> = [kappa, 2.0 * kappa]
            .iter()
            .map(|&k| green_matrix(k, &set.positions).unwrap())
            .collect();
        let mut phi = vec![
            set.positions.iter().map(|&r| inc.field_at(r)).collect::<Vec<_>>(),
            vec![Complex64::ZERO; m],
        ];
        let rhs1 = sys.ops[0].boundary.op.plane_wave_rhs(&inc);
        for _ in 0..2000 {
            let mut s = vec![vec![Complex64::ZERO; m]; 2];
            for k in 0..m {
                let local = [phi[0][k], phi[1][k]];
                let sk = crate::nlsolve::strengths_at(&set.nonlinearity, k, &local);
                s[0][k] = sk[0];
                s[1][k] = sk[1];
            }
            let mut delta = 0.0_f64;
            for j in 0..2 {
                let op = &sys.ops[j];
                let nb = op.boundary.op.node_count();
                let mut rhs = if j == 0 { rhs1.clone() } else { vec![Complex64::ZERO; nb] };
                for (k, &rk) in set.positions.iter().enumerate() {
                    let col = op.boundary.op.point_source_trace(rk).unwrap();
                    for p in 0..nb {
                        rhs[p] += col[p] * s[j][k];
                    }
                }
                let psi = op.boundary.solve(&rhs);
                let gs = matvec(&ghat[j], &s[j]);
                for i in 0..m {
                    let mut u = gs[i];
                    if j == 0 {
                        u += inc.field_at(set.positions[i]);
                    }
                    for q in 0..nb {
                        u -= op.boundary.op.weights[q]
                            * kernels::green(op.kappa, set.positions[i], op.boundary.op.positions[q])
                                .unwrap()
                            * psi[q];
                    }
                    delta = delta.max((u - phi[j][i]).norm());
                    phi[j][i] = u;
                }
            }
            if delta < 1e-13 {
                break;
            }
        }
        for j in 0..2 {
            for i in 0..m {
                assert!(
                    (sol.harmonics[j].field.phi[i] - phi[j][i]).norm() < 1e-10,
                    "harmonic {j} point {i}"
                );
            }
        }
    }

    #[test]
    fn harmonic_mismatch_rejected() {
        let kappa = 2.0;
        let circle = ParametricCurve::circle(Vec2::new(0.0, 0.0), 1.0);
        let sys = CoupledSystem::new(&[circle], kappa, &[1], 32).unwrap();
        let set = PointScattererSet::uniform_quadratic(vec![Vec2::new(5.0, 0.0)], 0.5, 0.4).unwrap();
        assert!(matches!(sys.prepare(&set), Err(Error::Config(_))));
    }
}
