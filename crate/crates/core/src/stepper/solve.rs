//! Solution of the assembled step system: sparse direct factorization, or
//! restarted GMRES with a block-diagonal preconditioner falling back to the
//! direct solve.

use crate::assembly::SaddleSystem;
use crate::error::{FlowError, Result};
use crate::solver::{condition_estimate, gmres, norm, residual, DirectLu, TripletBuilder};

/// Linear solver used for each step system.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum LinearSolver {
    Direct,
    Gmres,
}

impl LinearSolver {
    pub fn keyword(self) -> &'static str {
        match self {
            Self::Direct => "direct",
            Self::Gmres => "gmres",
        }
    }

    pub fn from_keyword(s: &str) -> Option<Self> {
        match s {
            "direct" => Some(Self::Direct),
            "gmres" => Some(Self::Gmres),
            _ => None,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SolverSettings {
    pub kind: LinearSolver,
    /// Relative residual target of the Krylov method.
    pub tol: f64,
    pub restart: usize,
    pub max_iter: usize,
}

impl Default for SolverSettings {
    fn default() -> Self {
        Self { kind: LinearSolver::Direct, tol: 1e-12, restart: 100, max_iter: 1000 }
    }
}

/// Iteration cap of GMRES preconditioned by a nearby factorization; slower
/// convergence means the factorization is stale.
const WARM_MAX_ITER: usize = 60;

/// Relative residual above which a direct solution is rejected.
const DIRECT_CHECK: f64 = 1e-8;

#[derive(Debug)]
pub struct SaddleSolution {
    pub x: Vec<f64>,
    pub krylov_iters: usize,
}

/// Factors and solves the full system.
pub fn solve_direct_system(sys: &SaddleSystem) -> Result<(SaddleSolution, DirectLu)> {
    let m = sys.matrix();
    let b = sys.rhs();
    let lu = DirectLu::factor(&m)?;
    let x = lu.solve(&b)?;
    check_residual(&m, &x, &b, DIRECT_CHECK)?;
    Ok((SaddleSolution { x, krylov_iters: 0 }, lu))
}

fn check_residual(m: &crate::solver::CsrMatrix, x: &[f64], b: &[f64], tol: f64) -> Result<()> {
    let r = residual(m, x, b);
    let nb = norm(b).max(f64::MIN_POSITIVE);
    if !(r <= tol * nb) {
        return Err(FlowError::Solver(format!("relative residual {:e} exceeds {tol:e}", r / nb)));
    }
    Ok(())
}

/// Block-diagonal preconditioner: direct velocity block, lumped pressure mass
/// scaled by the inverse viscosity, direct interface block.
struct BlockPreconditioner {
    a: DirectLu,
    pressure_diag: Vec<f64>,
    surface: DirectLu,
    offsets: [usize; 4],
}

impl BlockPreconditioner {
    fn new(sys: &SaddleSystem, pressure_diag: Vec<f64>) -> Result<Self> {
        let l = sys.layout();
        let a = DirectLu::factor(&sys.a)?;
        let (nk, ny) = (l.curvature, l.displacement);
        let mut b = TripletBuilder::new(nk + ny, nk + ny);
        b.add_block(0, nk, &sys.n, 1.0);
        b.add_block_t(nk, 0, &sys.n, 1.0);
        b.add_block(nk, nk, &sys.s, sys.dt);
        let surface = DirectLu::factor(&b.build())?;
        Ok(Self { a, pressure_diag, surface, offsets: l.offsets() })
    }

    fn apply(&self, r: &[f64]) -> Result<Vec<f64>> {
        let [_, op, ok, _] = self.offsets;
        let mut z = self.a.solve(&r[..op])?;
        z.extend(r[op..ok].iter().zip(&self.pressure_diag).map(|(v, d)| v / d));
        z.extend(self.surface.solve(&r[ok..])?);
        Ok(z)
    }
}

/// Factorization of a nearby system with its solution, used to precondition
/// and start GMRES on a slightly modified system.
#[derive(Clone, Copy)]
pub struct WarmStart<'a> {
    pub lu: &'a DirectLu,
    pub x: &'a [f64],
}

/// Solves with the configured method. `pressure_diag` is the lumped pressure
/// mass over the viscosity per pressure unknown. With `warm`, GMRES
/// preconditioned by the nearby factorization is tried first for either
/// method. A new factorization is returned whenever one was computed.
pub fn solve_system(
    sys: &SaddleSystem,
    settings: &SolverSettings,
    pressure_diag: &[f64],
    warm: Option<WarmStart<'_>>,
) -> Result<(SaddleSolution, Option<DirectLu>)> {
    let m = sys.matrix();
    let b = sys.rhs();
    let mut spent = 0;
    if let Some(w) = warm {
        let o = gmres(|x| m.matvec(x), |v| w.lu.solve(v), &b, Some(w.x), settings.tol, settings.restart, settings.max_iter.min(WARM_MAX_ITER))?;
        if o.converged && o.x.iter().all(|v| v.is_finite()) {
            return Ok((SaddleSolution { x: o.x, krylov_iters: o.iterations }, None));
        }
        log::warn!("warm-started gmres stopped at residual {:e}, solving afresh", o.residual);
        spent = o.iterations;
    }
    if settings.kind == LinearSolver::Direct {
        let (s, lu) = solve_direct_system(sys)?;
        return Ok((SaddleSolution { krylov_iters: spent, ..s }, Some(lu)));
    }
    let outcome = BlockPreconditioner::new(sys, pressure_diag.to_vec()).and_then(|p| {
        gmres(|x| m.matvec(x), |v| p.apply(v), &b, None, settings.tol, settings.restart, settings.max_iter)
    });
    match outcome {
        Ok(o) if o.converged && o.x.iter().all(|v| v.is_finite()) => {
            Ok((SaddleSolution { x: o.x, krylov_iters: spent + o.iterations }, None))
        }
        Ok(o) => {
            log::warn!("gmres stopped at residual {:e} after {} iterations, using the direct solver", o.residual, o.iterations);
            let (s, lu) = solve_direct_system(sys)?;
            Ok((SaddleSolution { krylov_iters: spent + o.iterations, ..s }, Some(lu)))
        }
        Err(e) => {
            log::warn!("gmres preconditioner failed ({e}), using the direct solver");
            let (s, lu) = solve_direct_system(sys)?;
            Ok((SaddleSolution { krylov_iters: spent, ..s }, Some(lu)))
        }
    }
}

/// 1-norm condition estimate of the full step matrix.
pub fn system_condition(sys: &SaddleSystem) -> Result<f64> {
    let m = sys.matrix();
    let lu = DirectLu::factor(&m)?;
    condition_estimate(&m, &lu)
}
