//! Shared nonlinear core for the reduced point-scatterer systems.
//!
//! Both the pure Foldy-Lax solver and the obstacle-coupled solver reduce to
//! the same fixed-point structure per harmonic j:
//!   phi_j = E_j s_j(phi) + b_j
//! where E_j is an effective propagator (zero-diagonal Green matrix, minus
//! the obstacle back-scattering correction when obstacles are present), s_j
//! are the nonlinear source strengths and b_j collects the incident data.
//! Nonlinear cases run Newton with a dogleg trust region on the real form of
//! the system; the Jacobian is assembled from Wirtinger derivatives.

use std::cell::Cell;

use num_complex::Complex64;

use crate::error::Result;
use crate::linalg::{matvec, CMat, DenseLu};
use crate::newton::{self, NewtonOptions};
use crate::scene::Nonlinearity;

/// Source strengths at scatterer `k` from its external fields `phi`
/// (one entry per harmonic, in the order of `Nonlinearity::harmonic_indices`).
pub(crate) fn strengths_at(nl: &Nonlinearity, k: usize, phi: &[Complex64]) -> Vec<Complex64> {
    match nl {
        Nonlinearity::Linear { sigma } => vec![sigma[k] * phi[0]],
        Nonlinearity::Quadratic {
            sig1_1,
            sig1_2,
            sig2_1,
            sig2_2,
        } => {
            let (p1, p2) = (phi[0], phi[1]);
            vec![
                sig1_1[k] * p1 + sig2_1[k] * p1.conj() * p2,
                sig1_2[k] * p2 + sig2_2[k] * p1 * p1,
            ]
        }
        Nonlinearity::Cubic {
            sig1_1,
            sig1_2,
            sig3_1,
            sig3_2,
            sig3_3,
        } => {
            let (p1, p3) = (phi[0], phi[1]);
            vec![
                sig1_1[k] * p1
                    + sig3_1[k] * p1.norm_sqr() * p1
                    + sig3_2[k] * p1.conj() * p1.conj() * p3,
                sig1_2[k] * p3 + sig3_3[k] * p1 * p1 * p1,
            ]
        }
    }
}

/// Wirtinger derivatives of the strengths at scatterer `k`.
/// Returns d[si][pj] = (d s_i / d phi_j, d s_i / d conj(phi_j)).
fn strength_derivs(
    nl: &Nonlinearity,
    k: usize,
    phi: &[Complex64],
) -> Vec<Vec<(Complex64, Complex64)>> {
    let z = Complex64::ZERO;
    let re = |v: f64| Complex64::new(v, 0.0);
    match nl {
        Nonlinearity::Linear { sigma } => vec![vec![(re(sigma[k]), z)]],
        Nonlinearity::Quadratic {
            sig1_1,
            sig1_2,
            sig2_1,
            sig2_2,
        } => {
            let (p1, p2) = (phi[0], phi[1]);
            vec![
                vec![
                    (re(sig1_1[k]), sig2_1[k] * p2),
                    (sig2_1[k] * p1.conj(), z),
                ],
                vec![(2.0 * sig2_2[k] * p1, z), (re(sig1_2[k]), z)],
            ]
        }
        Nonlinearity::Cubic {
            sig1_1,
            sig1_2,
            sig3_1,
            sig3_2,
            sig3_3,
        } => {
            let (p1, p3) = (phi[0], phi[1]);
            vec![
                vec![
                    (
                        re(sig1_1[k]) + 2.0 * sig3_1[k] * p1.norm_sqr(),
                        sig3_1[k] * p1 * p1 + 2.0 * sig3_2[k] * p1.conj() * p3,
                    ),
                    (sig3_2[k] * p1.conj() * p1.conj(), z),
                ],
                vec![(3.0 * sig3_3[k] * p1 * p1, z), (re(sig1_2[k]), z)],
            ]
        }
    }
}

/// LU of the linear Foldy-Lax operator I - E diag(sigma).
pub(crate) fn linear_operator_lu(e: &CMat, sigma: &[f64]) -> Result<DenseLu> {
    let m = sigma.len();
    let mut a = CMat::zeros(m, m);
    for col in 0..m {
        for row in 0..m {
            a[(row, col)] = -sigma[col] * e[(row, col)];
        }
        a[(col, col)] += Complex64::ONE;
    }
    DenseLu::factor(&a)
}

/// Reduced system phi_j = E_j s_j(phi) + b_j over the harmonics of the
/// nonlinearity and m scatterers.
pub(crate) struct ReducedSystem<'a> {
    pub e: &'a [CMat],
    pub b: &'a [Vec<Complex64>],
    pub nonlinearity: &'a Nonlinearity,
    last_iterations: Cell<usize>,
}

pub(crate) struct ReducedSolution {
    /// External field per harmonic per scatterer.
    pub phi: Vec<Vec<Complex64>>,
    /// Source strengths per harmonic per scatterer.
    pub strengths: Vec<Vec<Complex64>>,
    pub newton_iterations: usize,
}

impl<'a> ReducedSystem<'a> {
    pub fn new(
        e: &'a [CMat],
        b: &'a [Vec<Complex64>],
        nonlinearity: &'a Nonlinearity,
    ) -> ReducedSystem<'a> {
        ReducedSystem {
            e,
            b,
            nonlinearity,
            last_iterations: Cell::new(0),
        }
    }

    fn size(&self) -> usize {
        self.b[0].len()
    }

    /// Solves the reduced system, reusing a prefactored (I - E_1 diag sigma)
    /// when the strength law is linear. Callers that sweep many incidence
    /// directions over a fixed geometry factor once and pass it here.
    pub fn solve_cached(&self, linear_lu: Option<&DenseLu>) -> Result<ReducedSolution> {
        let m = self.size();
        let nh = self.b.len();
        debug_assert_eq!(self.e.len(), nh);
        if m == 0 {
            return Ok(ReducedSolution {
                phi: vec![Vec::new(); nh],
                strengths: vec![Vec::new(); nh],
                newton_iterations: 0,
            });
        }
        let phi = match self.nonlinearity {
            Nonlinearity::Linear { sigma } => match linear_lu {
                Some(lu) => vec![lu.solve_vec(&self.b[0])],
                None => vec![self.solve_linear_harmonic(0, sigma, &self.b[0])?],
            },
            _ => self.solve_newton()?,
        };
        let strengths = self.strengths_of(&phi);
        Ok(ReducedSolution {
            phi,
            strengths,
            newton_iterations: self.last_iterations.get(),
        })
    }

    fn strengths_of(&self, phi: &[Vec<Complex64>]) -> Vec<Vec<Complex64>> {
        let m = self.size();
        let nh = phi.len();
        let mut s = vec![vec![Complex64::ZERO; m]; nh];
        let mut local = vec![Complex64::ZERO; nh];
        for k in 0..m {
            for j in 0..nh {
                local[j] = phi[j][k];
            }
            let sk = strengths_at(self.nonlinearity, k, &local);
            for j in 0..nh {
                s[j][k] = sk[j];
            }
        }
        s
    }

    /// Solves (I - E_j diag(sigma)) phi = b for one harmonic with linear
    /// per-scatterer coefficients.
    fn solve_linear_harmonic(
        &self,
        j: usize,
        sigma: &[f64],
        b: &[Complex64],
    ) -> Result<Vec<Complex64>> {
        let m = self.size();
        let mut a = CMat::zeros(m, m);
        for col in 0..m {
            for row in 0..m {
                a[(row, col)] = -sigma[col] * self.e[j][(row, col)];
            }
            a[(col, col)] += Complex64::ONE;
        }
        let lu = DenseLu::factor(&a)?;
        Ok(lu.solve_vec(b))
    }

    /// Initial guess: fundamental from the linearized system, higher harmonic
    /// driven by the fundamental.
    fn initial_guess(&self) -> Result<Vec<Vec<Complex64>>> {
        let lin = self.nonlinearity.linear_coefficients();
        let phi1 = self.solve_linear_harmonic(0, lin[0], &self.b[0])?;
        let drive_local: Vec<Complex64> = match self.nonlinearity {
            Nonlinearity::Quadratic { sig2_2, .. } => phi1
                .iter()
                .enumerate()
                .map(|(k, p)| sig2_2[k] * p * p)
                .collect(),
            Nonlinearity::Cubic { sig3_3, .. } => phi1
                .iter()
                .enumerate()
                .map(|(k, p)| sig3_3[k] * p * p * p)
                .collect(),
            Nonlinearity::Linear { .. } => unreachable!(),
        };
        let m = self.size();
        let drive = matvec(&self.e[1], &drive_local);
        let rhs: Vec<Complex64> = (0..m).map(|i| self.b[1][i] + drive[i]).collect();
        let phi_h = self.solve_linear_harmonic(1, lin[1], &rhs)?;
        Ok(vec![phi1, phi_h])
    }

    fn residual(&self, phi: &[Vec<Complex64>]) -> Vec<Vec<Complex64>> {
        let m = self.size();
        let s = self.strengths_of(phi);
        let mut r = Vec::with_capacity(phi.len());
        for j in 0..phi.len() {
            let es = matvec(&self.e[j], &s[j]);
            r.push(
                (0..m)
                    .map(|i| phi[j][i] - es[i] - self.b[j][i])
                    .collect::<Vec<_>>(),
            );
        }
        r
    }

    fn solve_newton(&self) -> Result<Vec<Vec<Complex64>>> {
        let m = self.size();
        let guess = self.initial_guess()?;
        let x0 = pack(&guess);
        let f = |x: &[f64]| {
            let phi = unpack(x, m);
            pack(&self.residual(&phi))
        };
        let jac = |x: &[f64]| {
            let phi = unpack(x, m);
            self.real_jacobian(&phi)
        };
        let report = newton::solve(&x0, f, jac, &NewtonOptions::default())?;
        self.last_iterations.set(report.iterations);
        Ok(unpack(&report.x, m))
    }

    /// Dense real Jacobian of the packed residual, row-major 4m x 4m.
    fn real_jacobian(&self, phi: &[Vec<Complex64>]) -> Vec<f64> {
        let m = self.size();
        let nh = 2;
        let n = 4 * m;
        let mut jac = vec![0.0; n * n];
        let mut local = vec![Complex64::ZERO; nh];
        // R_j[i] = phi_j[i] - sum_k E_j[i,k] s_j(phi[., k]) - b_j[i], so
        // d R_j[i] / d phi_l[k]        = delta_jl delta_ik - E_j[i,k] ds_j/dphi_l
        // d R_j[i] / d conj(phi_l[k])  = -E_j[i,k] ds_j/dconj(phi_l)
        for k in 0..m {
            for j in 0..nh {
                local[j] = phi[j][k];
            }
            let d = strength_derivs(self.nonlinearity, k, &local);
            for i in 0..m {
                for rj in 0..nh {
                    let eik = self.e[rj][(i, k)];
                    for cl in 0..nh {
                        let (ds, dsc) = d[rj][cl];
                        let mut a = -eik * ds;
                        let bb = -eik * dsc;
                        if rj == cl && i == k {
                            a += Complex64::ONE;
                        }
                        // Real 2x2 block from the Wirtinger pair (a, b):
                        // [Re(a+b)  -Im(a-b); Im(a+b)  Re(a-b)]
                        let row_re = 2 * rj * m + i;
                        let row_im = (2 * rj + 1) * m + i;
                        let col_re = 2 * cl * m + k;
                        let col_im = (2 * cl + 1) * m + k;
                        jac[row_re * n + col_re] += (a + bb).re;
                        jac[row_re * n + col_im] += -(a - bb).im;
                        jac[row_im * n + col_re] += (a + bb).im;
                        jac[row_im * n + col_im] += (a - bb).re;
                    }
                }
            }
        }
        jac
    }
}

/// Pack harmonics into [Re phi_1, Im phi_1, Re phi_h, Im phi_h].
fn pack(phi: &[Vec<Complex64>]) -> Vec<f64> {
    let mut x = Vec::with_capacity(2 * phi.len() * phi[0].len());
    for p in phi {
        x.extend(p.iter().map(|z| z.re));
        x.extend(p.iter().map(|z| z.im));
    }
    x
}

fn unpack(x: &[f64], m: usize) -> Vec<Vec<Complex64>> {
    let nh = x.len() / (2 * m);
    (0..nh)
        .map(|j| {
            (0..m)
                .map(|i| Complex64::new(x[2 * j * m + i], x[(2 * j + 1) * m + i]))
                .collect()
        })
        .collect()
}
