//! Combined field integral equation for sound-soft obstacles, discretized
//! with the Kress spectral quadrature for periodic logarithmic kernels.
//!
//! Direct formulation with the total-field normal derivative psi as unknown:
//!   psi/2 + K' psi - i eta S psi = (dnu - i eta) u_inc on Gamma,
//! scattered field u_s = -S[psi]. Nodes on the same curve are coupled through
//! the log-split quadrature; blocks between distinct curves are smooth and
//! use the plain trapezoid rule.

use num_complex::Complex64;

use crate::bessel::{hankel1_0, hankel1_1, j0y0j1y1};
use crate::error::{Error, Result};
use crate::kernels;
use crate::linalg::{CMat, DenseLu};
use crate::scene::{sample_boundary, BoundaryDiscretization, IncidentWave, ParametricCurve, Vec2};

const EULER_GAMMA: f64 = 0.577_215_664_901_532_9;

/// Assembled CFIE operator for one or more sound-soft obstacle boundaries.
pub struct BoundaryOperator {
    pub kappa: f64,
    pub eta: f64,
    pub parts: Vec<BoundaryDiscretization>,
    /// Flattened node data across all curves.
    pub positions: Vec<Vec2>,
    pub normals: Vec<Vec2>,
    /// Trapezoid weights |x'(t_q)| h_q for smooth integrals over Gamma.
    pub weights: Vec<f64>,
    matrix: CMat,
}

/// Kress quadrature weights R_m for the kernel ln(4 sin^2((t - s)/2)) on a
/// uniform 2n-point grid, indexed by the offset |i - j|.
fn kress_weights(nodes: usize) -> Vec<f64> {
    debug_assert!(nodes % 2 == 0);
    let n = nodes / 2;
    let mut r = vec![0.0; nodes];
    for (m, rm) in r.iter_mut().enumerate() {
        let u = std::f64::consts::PI * m as f64 / n as f64;
        let mut s = 0.0;
        for q in 1..n {
            s += (q as f64 * u).cos() / q as f64;
        }
        *rm = -(2.0 * std::f64::consts::PI / n as f64) * s
            - std::f64::consts::PI / ((n * n) as f64) * (n as f64 * u).cos();
    }
    r
}

/// Smooth factor of the CFIE kernel multiplying ln(4 sin^2((t-s)/2)):
/// N1 - i eta S1 with
///   S1 = -(1/4pi) J0(kappa R) |x'(s)|,
///   N1 = (kappa/4pi) J1(kappa R) (nu(t).(x(t)-x(s))/R) |x'(s)|.
fn log_factor(
    kappa: f64,
    eta: f64,
    xt: Vec2,
    nut: Vec2,
    xs: Vec2,
    speed_s: f64,
) -> Complex64 {
    let d = xt.sub(xs);
    let dist = d.norm();
    let (j0, _, j1, _) = j0y0j1y1(kappa * dist);
    let s1 = -j0 / (4.0 * std::f64::consts::PI) * speed_s;
    let n1 = kappa / (4.0 * std::f64::consts::PI) * j1 * (nut.dot(d) / dist) * speed_s;
    Complex64::new(n1, 0.0) - Complex64::new(0.0, eta) * s1
}

/// Full CFIE kernel (K' - i eta S)(t, s) including the Jacobian |x'(s)|.
fn full_kernel(
    kappa: f64,
    eta: f64,
    xt: Vec2,
    nut: Vec2,
    xs: Vec2,
    speed_s: f64,
) -> Result<Complex64> {
    let d = xt.sub(xs);
    let dist = d.norm();
    if dist < kernels::SINGULARITY_THRESHOLD {
        return Err(Error::Singularity { dist });
    }
    let h0 = hankel1_0(kappa * dist)?;
    let h1 = hankel1_1(kappa * dist)?;
    let s = Complex64::new(0.0, 0.25) * h0 * speed_s;
    let n = Complex64::new(0.0, -0.25 * kappa) * h1 * (nut.dot(d) / dist) * speed_s;
    Ok(n - Complex64::new(0.0, eta) * s)
}

impl BoundaryOperator {
    /// Assembles the CFIE matrix with `nodes_per_curve` quadrature nodes on
    /// each curve. The coupling parameter defaults to eta = kappa when
    /// `eta` is `None`.
    pub fn assemble(
        kappa: f64,
        eta: Option<f64>,
        curves: &[ParametricCurve],
        nodes_per_curve: usize,
    ) -> Result<BoundaryOperator> {
        if curves.is_empty() {
            return Err(Error::InvalidScene("no obstacle curves given".into()));
        }
        if !(kappa > 0.0) {
            return Err(Error::Domain(format!("wavenumber must be positive: {kappa}")));
        }
        let eta = eta.unwrap_or(kappa);
        let parts: Vec<BoundaryDiscretization> = curves
            .iter()
            .map(|c| sample_boundary(c, nodes_per_curve))
            .collect::<Result<_>>()?;

        let total: usize = parts.iter().map(|p| p.len()).sum();
        let mut positions = Vec::with_capacity(total);
        let mut normals = Vec::with_capacity(total);
        let mut weights = Vec::with_capacity(total);
        for p in &parts {
            let h = p.param_step();
            for q in 0..p.len() {
                positions.push(p.positions[q]);
                normals.push(p.normals[q]);
                weights.push(p.speeds[q] * h);
            }
        }

        let mut matrix = CMat::zeros(total, total);
        let mut row0 = 0;
        for (pi, part) in parts.iter().enumerate() {
            let np = part.len();
            let h = part.param_step();
            let rw = kress_weights(np);
            // Self block: Kress log quadrature plus the identity jump term.
            for i in 0..np {
                let xt = part.positions[i];
                let nut = part.normals[i];
                for j in 0..np {
                    let entry = if i == j {
                        // Diagonal limits of the split kernel.
                        let speed = part.speeds[i];
                        let n2 = nut.dot(part.second_derivs[i])
                            / (4.0 * std::f64::consts::PI * speed);
                        let s2 = Complex64::new(
                            -(EULER_GAMMA + (0.5 * kappa * speed).ln())
                                / (2.0 * std::f64::consts::PI),
                            0.25,
                        ) * speed;
                        let a2 = Complex64::new(n2, 0.0) - Complex64::new(0.0, eta) * s2;
                        rw[0] * log_factor_diag(kappa, eta, speed) + h * a2
                            + Complex64::new(0.5, 0.0)
                    } else {
                        let xs = part.positions[j];
                        let speed_s = part.speeds[j];
                        let a1 = log_factor(kappa, eta, xt, nut, xs, speed_s);
                        let full = full_kernel(kappa, eta, xt, nut, xs, speed_s)?;
                        let u = part.nodes_t[i] - part.nodes_t[j];
                        let lg = (4.0 * (0.5 * u).sin().powi(2)).ln();
                        let a2 = full - a1 * lg;
                        rw[(i + np - j) % np] * a1 + h * a2
                    };
                    matrix[(row0 + i, row0 + j)] = entry;
                }
            }
            // Cross blocks: smooth kernels, plain trapezoid.
            let mut col0 = 0;
            for (pj, other) in parts.iter().enumerate() {
                if pj != pi {
                    let hj = other.param_step();
                    for i in 0..np {
                        for j in 0..other.len() {
                            let k = full_kernel(
                                kappa,
                                eta,
                                part.positions[i],
                                part.normals[i],
                                other.positions[j],
                                other.speeds[j],
                            )?;
                            matrix[(row0 + i, col0 + j)] = hj * k;
                        }
                    }
                }
                col0 += other.len();
            }
            row0 += np;
        }

        Ok(BoundaryOperator {
            kappa,
            eta,
            parts,
            positions,
            normals,
            weights,
            matrix,
        })
    }

    pub fn node_count(&self) -> usize {
        self.positions.len()
    }

    pub fn matrix(&self) -> &CMat {
        &self.matrix
    }

    /// Right-hand side (dnu - i eta) u_inc at the nodes for a plane wave.
    pub fn plane_wave_rhs(&self, inc: &IncidentWave) -> Vec<Complex64> {
        debug_assert!((inc.kappa - self.kappa).abs() < 1e-12 * self.kappa.max(1.0));
        self.positions
            .iter()
            .zip(&self.normals)
            .map(|(&x, &nu)| {
                let phase = inc.field_at(x);
                Complex64::new(0.0, self.kappa * inc.direction.dot(nu) - self.eta) * phase
            })
            .collect()
    }

    /// Column of traces (dnu - i eta) G_kappa(., r) for a point source at r.
    pub fn point_source_trace(&self, r: Vec2) -> Result<Vec<Complex64>> {
        self.positions
            .iter()
            .zip(&self.normals)
            .map(|(&x, &nu)| kernels::green_cfie(self.kappa, self.eta, x, nu, r))
            .collect()
    }

    pub fn factor(self) -> Result<FactoredBoundary> {
        let lu = DenseLu::factor(&self.matrix)?;
        Ok(FactoredBoundary { op: self, lu })
    }
}

/// Diagonal value of the log factor: N1(t,t) = 0, S1(t,t) = -|x'|/(4 pi).
fn log_factor_diag(_kappa: f64, eta: f64, speed: f64) -> Complex64 {
    Complex64::new(0.0, eta) * (speed / (4.0 * std::f64::consts::PI))
}

/// Value of the scattered field together with an accuracy flag: the plain
/// trapezoid evaluation degrades within a few node spacings of the boundary.
#[derive(Debug, Clone, Copy)]
pub struct FieldSample {
    pub value: Complex64,
    pub near_boundary: bool,
}

pub struct FactoredBoundary {
    pub op: BoundaryOperator,
    lu: DenseLu,
}

impl FactoredBoundary {
    pub fn solve(&self, rhs: &[Complex64]) -> Vec<Complex64> {
        self.lu.solve_vec(rhs)
    }

    pub fn solve_mat(&self, rhs: &CMat) -> CMat {
        self.lu.solve_mat(rhs)
    }

    /// Far-field pattern of u_s = -S[psi] in the e^{i kappa r}/sqrt(r)
    /// convention.
    pub fn farfield(&self, density: &[Complex64], theta: f64) -> Complex64 {
        let rhat = Vec2::from_angle(theta);
        let gamma = Complex64::from_polar(
            1.0 / (8.0 * std::f64::consts::PI * self.op.kappa).sqrt(),
            std::f64::consts::FRAC_PI_4,
        );
        let mut s = Complex64::ZERO;
        for q in 0..self.op.node_count() {
            s += self.op.weights[q]
                * Complex64::from_polar(1.0, -self.op.kappa * rhat.dot(self.op.positions[q]))
                * density[q];
        }
        -gamma * s
    }

    /// Scattered field at an exterior point.
    pub fn scattered_at(&self, density: &[Complex64], p: Vec2) -> Result<FieldSample> {
        let mut s = Complex64::ZERO;
        let mut min_dist = f64::INFINITY;
        let mut max_spacing = 0.0_f64;
        for part in &self.op.parts {
            max_spacing = max_spacing.max(part.node_spacing());
        }
        for q in 0..self.op.node_count() {
            let d = p.sub(self.op.positions[q]).norm();
            min_dist = min_dist.min(d);
            s += self.op.weights[q] * kernels::green(self.op.kappa, p, self.op.positions[q])? * density[q];
        }
        Ok(FieldSample {
            value: -s,
            near_boundary: min_dist < 5.0 * max_spacing,
        })
    }
}
