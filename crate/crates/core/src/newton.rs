//! Newton's method with a dogleg trust region for square real systems.
//!
//! The nonlinear solvers express their complex unknowns as interleaved real
//! and imaginary parts and call this on the resulting real system.

use faer::linalg::solvers::{PartialPivLu, Solve};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy)]
pub struct NewtonOptions {
    pub max_iter: usize,
    /// Convergence threshold on the residual 2-norm.
    pub tol_residual: f64,
    /// Stagnation threshold on the step 2-norm.
    pub tol_step: f64,
    pub initial_radius: f64,
}

impl Default for NewtonOptions {
    fn default() -> Self {
        NewtonOptions {
            max_iter: 50,
            tol_residual: 1e-10,
            tol_step: 1e-12,
            initial_radius: 1.0,
        }
    }
}

#[derive(Debug, Clone)]
pub struct NewtonReport {
    pub x: Vec<f64>,
    pub iterations: usize,
    pub residual_norm: f64,
}

fn norm(v: &[f64]) -> f64 {
    v.iter().map(|x| x * x).sum::<f64>().sqrt()
}

/// Finds x with f(x) = 0. `jacobian` returns the dense Jacobian row-major:
/// jac[i * n + j] = d f_i / d x_j.
pub fn solve<F, J>(
    x0: &[f64],
    mut f: F,
    mut jacobian: J,
    opts: &NewtonOptions,
) -> Result<NewtonReport>
where
    F: FnMut(&[f64]) -> Vec<f64>,
    J: FnMut(&[f64]) -> Vec<f64>,
{
    let n = x0.len();
    let mut x = x0.to_vec();
    let mut fx = f(&x);
    let mut fnorm = norm(&fx);
    let mut radius = opts.initial_radius;
    let max_radius = 1e6 * opts.initial_radius;

    for iter in 0..opts.max_iter {
        if fnorm <= opts.tol_residual {
            return Ok(NewtonReport {
                x,
                iterations: iter,
                residual_norm: fnorm,
            });
        }
        let jac = jacobian(&x);
        debug_assert_eq!(jac.len(), n * n);
        let jmat = faer::Mat::from_fn(n, n, |i, j| jac[i * n + j]);

        // Gradient of the merit 0.5 |f|^2 and its curvature along itself.
        let mut g = vec![0.0; n];
        for i in 0..n {
            for j in 0..n {
                g[j] += jac[i * n + j] * fx[i];
            }
        }
        let gnorm = norm(&g);
        let mut jg = vec![0.0; n];
        for i in 0..n {
            for j in 0..n {
                jg[i] += jac[i * n + j] * g[j];
            }
        }
        let jg_sq: f64 = jg.iter().map(|v| v * v).sum();

        // Newton point, if the Jacobian admits one.
        let lu = PartialPivLu::new(jmat.as_ref());
        let newton_step: Option<Vec<f64>> = {
            let rhs = faer::Mat::from_fn(n, 1, |i, _| -fx[i]);
            let sol = lu.solve(rhs);
            let p: Vec<f64> = (0..n).map(|i| sol[(i, 0)]).collect();
            if p.iter().all(|v| v.is_finite()) {
                Some(p)
            } else {
                None
            }
        };

        // Inner loop: shrink the radius until a step is accepted.
        let mut accepted = false;
        for _ in 0..40 {
            let p = dogleg(&newton_step, &g, gnorm, jg_sq, radius);
            let pnorm = norm(&p);
            if pnorm < opts.tol_step {
                // Cannot make progress at this scale.
                return Err(Error::Convergence {
                    iterations: iter,
                    residual: fnorm,
                });
            }
            let mut xt = x.clone();
            for i in 0..n {
                xt[i] += p[i];
            }
            let ft = f(&xt);
            let ftnorm = norm(&ft);
            // Predicted reduction of the Gauss-Newton model 0.5 |f + J p|^2.
            let mut jp = vec![0.0; n];
            for i in 0..n {
                for j in 0..n {
                    jp[i] += jac[i * n + j] * p[j];
                }
            }
            let model: f64 = fx
                .iter()
                .zip(&jp)
                .map(|(fi, ji)| (fi + ji) * (fi + ji))
                .sum::<f64>();
            let predicted = 0.5 * (fnorm * fnorm - model);
            let actual = 0.5 * (fnorm * fnorm - ftnorm * ftnorm);
            let rho = if predicted > 0.0 {
                actual / predicted
            } else if actual > 0.0 {
                1.0
            } else {
                -1.0
            };
            if rho < 0.25 {
                radius = 0.25 * pnorm;
            } else if rho > 0.75 && (pnorm - radius).abs() < 1e-12 * radius {
                radius = (2.0 * radius).min(max_radius);
            }
            if rho > 1e-4 {
                x = xt;
                fx = ft;
                fnorm = ftnorm;
                accepted = true;
                break;
            }
        }
        if !accepted {
            return Err(Error::Convergence {
                iterations: iter,
                residual: fnorm,
            });
        }
    }
    if fnorm <= opts.tol_residual {
        Ok(NewtonReport {
            x,
            iterations: opts.max_iter,
            residual_norm: fnorm,
        })
    } else {
        Err(Error::Convergence {
            iterations: opts.max_iter,
            residual: fnorm,
        })
    }
}

/// Dogleg step for the current trust radius, built from the Newton point and
/// the Cauchy (steepest descent) point.
fn dogleg(
    newton_step: &Option<Vec<f64>>,
    g: &[f64],
    gnorm: f64,
    jg_sq: f64,
    radius: f64,
) -> Vec<f64> {
    if let Some(pn) = newton_step {
        let pn_norm = norm(pn);
        if pn_norm <= radius {
            return pn.clone();
        }
        if gnorm > 0.0 && jg_sq > 0.0 {
            let alpha = gnorm * gnorm / jg_sq;
            let pu: Vec<f64> = g.iter().map(|gi| -alpha * gi).collect();
            let pu_norm = alpha * gnorm;
            if pu_norm >= radius {
                return g.iter().map(|gi| -radius * gi / gnorm).collect();
            }
            // Intersection of the segment pu -> pn with the radius.
            let d: Vec<f64> = pn.iter().zip(&pu).map(|(a, b)| a - b).collect();
            let dd: f64 = d.iter().map(|v| v * v).sum();
            let pd: f64 = pu.iter().zip(&d).map(|(a, b)| a * b).sum();
            let pp: f64 = pu.iter().map(|v| v * v).sum();
            let disc = (pd * pd + dd * (radius * radius - pp)).max(0.0);
            let tau = if dd > 0.0 {
                (-pd + disc.sqrt()) / dd
            } else {
                0.0
            };
            return pu.iter().zip(&d).map(|(a, b)| a + tau * b).collect();
        }
        // Degenerate gradient: scale the Newton direction back.
        return pn.iter().map(|v| v * radius / pn_norm).collect();
    }
    // Singular Jacobian: fall back to steepest descent within the radius.
    if gnorm > 0.0 {
        let scale = if jg_sq > 0.0 {
            (gnorm * gnorm / jg_sq).min(radius / gnorm)
        } else {
            radius / gnorm
        };
        g.iter().map(|gi| -scale * gi).collect()
    } else {
        vec![0.0; g.len()]
    }
}
