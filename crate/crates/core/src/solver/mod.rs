//! Linear solvers: sparse direct factorization, restarted GMRES and a 1-norm
//! condition estimate.

mod gmres;
mod sparse;

pub use gmres::{gmres, GmresOutcome};
pub use sparse::{dot, norm, CsrMatrix, TripletBuilder};

use faer::linalg::solvers::{Solve, SolveCore};
use faer::sparse::linalg::solvers::Lu;
use faer::{Conj, Mat};

use crate::error::{FlowError, Result};

/// Sparse LU factorization with partial pivoting.
pub struct DirectLu {
    lu: Lu<usize, f64>,
    n: usize,
}

impl std::fmt::Debug for DirectLu {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("DirectLu").field("n", &self.n).finish()
    }
}

impl DirectLu {
    pub fn factor(a: &CsrMatrix) -> Result<Self> {
        if a.nrows() != a.ncols() {
            return Err(FlowError::Solver("matrix is not square".into()));
        }
        let m = a.to_faer()?;
        let lu = m.sp_lu().map_err(|e| FlowError::Solver(format!("factorization failed: {e:?}")))?;
        Ok(Self { lu, n: a.nrows() })
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn solve(&self, b: &[f64]) -> Result<Vec<f64>> {
        self.solve_with(b, false)
    }

    pub fn solve_t(&self, b: &[f64]) -> Result<Vec<f64>> {
        self.solve_with(b, true)
    }

    fn solve_with(&self, b: &[f64], transpose: bool) -> Result<Vec<f64>> {
        let mut x = Mat::<f64>::from_fn(self.n, 1, |i, _| b[i]);
        if transpose {
            self.lu.solve_transpose_in_place_with_conj(Conj::No, x.as_mut());
        } else {
            self.lu.solve_in_place(x.as_mut());
        }
        let out: Vec<f64> = (0..self.n).map(|i| x[(i, 0)]).collect();
        if out.iter().any(|v| !v.is_finite()) {
            return Err(FlowError::Solver("factorization is singular".into()));
        }
        Ok(out)
    }
}

/// Factors `a`, solves, and checks the relative residual against `check_tol`.
pub fn solve_direct(a: &CsrMatrix, b: &[f64], check_tol: f64) -> Result<Vec<f64>> {
    let lu = DirectLu::factor(a)?;
    let x = lu.solve(b)?;
    let r = residual(a, &x, b);
    let nb = norm(b).max(f64::MIN_POSITIVE);
    if r > check_tol * nb {
        return Err(FlowError::Solver(format!("direct solve residual {r:e} exceeds {:e}", check_tol * nb)));
    }
    Ok(x)
}

pub fn residual(a: &CsrMatrix, x: &[f64], b: &[f64]) -> f64 {
    let ax = a.matvec(x);
    norm(&ax.iter().zip(b).map(|(p, q)| p - q).collect::<Vec<_>>())
}

/// Estimate of the 1-norm condition number (Hager's method on the factors).
pub fn condition_estimate(a: &CsrMatrix, lu: &DirectLu) -> Result<f64> {
    let n = a.nrows();
    if n == 0 {
        return Ok(0.0);
    }
    let mut x = vec![1.0 / n as f64; n];
    let mut est = 0.0;
    for _ in 0..5 {
        let y = lu.solve(&x)?;
        let y1: f64 = y.iter().map(|v| v.abs()).sum();
        let xi: Vec<f64> = y.iter().map(|&v| if v >= 0.0 { 1.0 } else { -1.0 }).collect();
        let z = lu.solve_t(&xi)?;
        let (j, zmax) = z.iter().enumerate().fold((0, 0.0f64), |b, (i, &v)| if v.abs() > b.1 { (i, v.abs()) } else { b });
        let zx = dot(&z, &x);
        est = y1;
        if zmax <= zx {
            break;
        }
        x = vec![0.0; n];
        x[j] = 1.0;
    }
    Ok(est * a.norm_1())
}
