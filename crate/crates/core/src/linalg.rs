//! Thin wrappers over faer for the dense complex linear algebra used by the
//! solvers, plus an unrestarted GMRES used as an independent cross-check.

use faer::linalg::solvers::{PartialPivLu, Solve};
use num_complex::Complex64;

use crate::error::{Error, Result};

/// Dense column-major complex matrix.
pub type CMat = faer::Mat<Complex64>;

pub fn zeros(nrows: usize, ncols: usize) -> CMat {
    CMat::zeros(nrows, ncols)
}

pub fn col_from_slice(v: &[Complex64]) -> CMat {
    CMat::from_fn(v.len(), 1, |i, _| v[i])
}

pub fn col_to_vec(m: &CMat) -> Vec<Complex64> {
    debug_assert_eq!(m.ncols(), 1);
    (0..m.nrows()).map(|i| m[(i, 0)]).collect()
}

pub fn matvec(a: &CMat, x: &[Complex64]) -> Vec<Complex64> {
    debug_assert_eq!(a.ncols(), x.len());
    let mut out = vec![Complex64::ZERO; a.nrows()];
    for j in 0..a.ncols() {
        let xj = x[j];
        if xj == Complex64::ZERO {
            continue;
        }
        for i in 0..a.nrows() {
            out[i] += a[(i, j)] * xj;
        }
    }
    out
}

/// LU factorization with partial pivoting, reused across many right-hand
/// sides. Detects exactly singular or non-finite factorizations.
pub struct DenseLu {
    lu: PartialPivLu<Complex64>,
    n: usize,
}

impl DenseLu {
    pub fn factor(a: &CMat) -> Result<DenseLu> {
        if a.nrows() != a.ncols() {
            return Err(Error::Config(format!(
                "LU requires a square matrix, got {}x{}",
                a.nrows(),
                a.ncols()
            )));
        }
        let n = a.nrows();
        let lu = PartialPivLu::new(a.as_ref());
        let u = lu.U();
        for i in 0..n {
            let d: Complex64 = u[(i, i)];
            if !d.re.is_finite() || !d.im.is_finite() || d.norm() < 1e-300 {
                return Err(Error::SingularSystem);
            }
        }
        Ok(DenseLu { lu, n })
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn solve_vec(&self, b: &[Complex64]) -> Vec<Complex64> {
        debug_assert_eq!(b.len(), self.n);
        col_to_vec(&self.lu.solve(col_from_slice(b)))
    }

    pub fn solve_mat(&self, b: &CMat) -> CMat {
        debug_assert_eq!(b.nrows(), self.n);
        self.lu.solve(b)
    }

    pub fn solve_in_place(&self, b: &mut CMat) {
        use faer::linalg::solvers::SolveCore;
        self.lu
            .solve_in_place_with_conj(faer::Conj::No, b.as_mut());
    }
}

/// Unrestarted GMRES with modified Gram-Schmidt and Givens rotations.
/// `apply` computes A x. Used to cross-check direct factorizations, not for
/// production solves.
pub fn gmres<F>(
    n: usize,
    apply: F,
    b: &[Complex64],
    tol: f64,
    max_iter: usize,
) -> Result<Vec<Complex64>>
where
    F: Fn(&[Complex64]) -> Vec<Complex64>,
{
    let bnorm = b.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
    if bnorm == 0.0 {
        return Ok(vec![Complex64::ZERO; n]);
    }
    let m = max_iter.min(n);
    let mut basis: Vec<Vec<Complex64>> = Vec::with_capacity(m + 1);
    basis.push(b.iter().map(|z| z / bnorm).collect());
    let mut h = vec![vec![Complex64::ZERO; m]; m + 1];
    let mut cs = vec![Complex64::ZERO; m];
    let mut sn = vec![Complex64::ZERO; m];
    let mut g = vec![Complex64::ZERO; m + 1];
    g[0] = Complex64::new(bnorm, 0.0);
    let mut k_final = 0;
    for k in 0..m {
        let mut w = apply(&basis[k]);
        for j in 0..=k {
            let mut dot = Complex64::ZERO;
            for i in 0..n {
                dot += basis[j][i].conj() * w[i];
            }
            h[j][k] = dot;
            for i in 0..n {
                w[i] -= dot * basis[j][i];
            }
        }
        let wnorm = w.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        h[k + 1][k] = Complex64::new(wnorm, 0.0);
        // Apply accumulated rotations to the new column.
        for j in 0..k {
            let t = cs[j].conj() * h[j][k] + sn[j].conj() * h[j + 1][k];
            h[j + 1][k] = -sn[j] * h[j][k] + cs[j] * h[j + 1][k];
            h[j][k] = t;
        }
        let denom = (h[k][k].norm_sqr() + h[k + 1][k].norm_sqr()).sqrt();
        if denom == 0.0 {
            return Err(Error::SingularSystem);
        }
        cs[k] = h[k][k] / denom;
        sn[k] = h[k + 1][k] / denom;
        h[k][k] = Complex64::new(denom, 0.0);
        h[k + 1][k] = Complex64::ZERO;
        g[k + 1] = -sn[k] * g[k];
        g[k] = cs[k].conj() * g[k];
        k_final = k + 1;
        if g[k + 1].norm() / bnorm < tol {
            break;
        }
        if wnorm < 1e-300 {
            break;
        }
        basis.push(w.iter().map(|z| z / wnorm).collect());
    }
    let resid = g[k_final].norm() / bnorm;
    if resid >= tol {
        return Err(Error::Convergence {
            iterations: k_final,
            residual: resid,
        });
    }
    // Back-substitute the triangular least-squares system.
    let mut y = vec![Complex64::ZERO; k_final];
    for i in (0..k_final).rev() {
        let mut s = g[i];
        for j in i + 1..k_final {
            s -= h[i][j] * y[j];
        }
        y[i] = s / h[i][i];
    }
    let mut x = vec![Complex64::ZERO; n];
    for (j, yj) in y.iter().enumerate() {
        for i in 0..n {
            x[i] += yj * basis[j][i];
        }
    }
    Ok(x)
}
