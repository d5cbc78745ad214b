//! Restarted GMRES with right preconditioning.

use super::sparse::{dot, norm};
use crate::error::Result;

#[derive(Clone, Debug)]
pub struct GmresOutcome {
    pub x: Vec<f64>,
    pub iterations: usize,
    /// Final relative residual `|b - A x| / |b|`.
    pub residual: f64,
    pub converged: bool,
}

/// Solves `A x = b` to relative residual `tol`, applying `prec` as a right
/// preconditioner. Breakdown or stagnation is reported through `converged`.
pub fn gmres(
    apply: impl Fn(&[f64]) -> Vec<f64>,
    prec: impl Fn(&[f64]) -> Result<Vec<f64>>,
    b: &[f64],
    x0: Option<&[f64]>,
    tol: f64,
    restart: usize,
    max_iter: usize,
) -> Result<GmresOutcome> {
    let n = b.len();
    let nb = norm(b);
    let mut x = x0.map_or_else(|| vec![0.0; n], <[f64]>::to_vec);
    if nb == 0.0 {
        return Ok(GmresOutcome { x: vec![0.0; n], iterations: 0, residual: 0.0, converged: true });
    }
    let m = restart.max(1);
    let mut total = 0usize;
    loop {
        let ax = apply(&x);
        let r: Vec<f64> = b.iter().zip(&ax).map(|(p, q)| p - q).collect();
        let beta = norm(&r);
        let rel = beta / nb;
        if rel <= tol {
            return Ok(GmresOutcome { x, iterations: total, residual: rel, converged: true });
        }
        if total >= max_iter {
            return Ok(GmresOutcome { x, iterations: total, residual: rel, converged: false });
        }
        let mut v: Vec<Vec<f64>> = vec![r.iter().map(|&ri| ri / beta).collect()];
        let mut z: Vec<Vec<f64>> = Vec::with_capacity(m);
        let mut h = vec![vec![0.0; m]; m + 1];
        let mut cs = vec![0.0; m];
        let mut sn = vec![0.0; m];
        let mut g = vec![0.0; m + 1];
        g[0] = beta;
        let mut k_used = 0;
        let mut breakdown = false;
        for k in 0..m {
            if total >= max_iter {
                break;
            }
            let zk = prec(&v[k])?;
            let mut w = apply(&zk);
            z.push(zk);
            for (i, vi) in v.iter().enumerate() {
                h[i][k] = dot(&w, vi);
                for (wj, &vij) in w.iter_mut().zip(vi) {
                    *wj -= h[i][k] * vij;
                }
            }
            // second pass for orthogonality
            for (i, vi) in v.iter().enumerate() {
                let c = dot(&w, vi);
                h[i][k] += c;
                for (wj, &vij) in w.iter_mut().zip(vi) {
                    *wj -= c * vij;
                }
            }
            let hn = norm(&w);
            h[k + 1][k] = hn;
            for i in 0..k {
                let t = cs[i] * h[i][k] + sn[i] * h[i + 1][k];
                h[i + 1][k] = -sn[i] * h[i][k] + cs[i] * h[i + 1][k];
                h[i][k] = t;
            }
            let d = h[k][k].hypot(h[k + 1][k]);
            if d == 0.0 {
                breakdown = true;
                break;
            }
            cs[k] = h[k][k] / d;
            sn[k] = h[k + 1][k] / d;
            h[k][k] = d;
            h[k + 1][k] = 0.0;
            g[k + 1] = -sn[k] * g[k];
            g[k] *= cs[k];
            total += 1;
            k_used = k + 1;
            if g[k + 1].abs() / nb <= tol * 0.5 || hn <= 1e-300 {
                break;
            }
            v.push(w.iter().map(|&wi| wi / hn).collect());
        }
        if k_used == 0 {
            let rel = beta / nb;
            return Ok(GmresOutcome { x, iterations: total, residual: rel, converged: !breakdown && rel <= tol });
        }
        let mut y = vec![0.0; k_used];
        for i in (0..k_used).rev() {
            let s: f64 = (i + 1..k_used).map(|j| h[i][j] * y[j]).sum();
            y[i] = (g[i] - s) / h[i][i];
        }
        for (yi, zi) in y.iter().zip(&z) {
            for (xj, &zij) in x.iter_mut().zip(zi) {
                *xj += yi * zij;
            }
        }
        if breakdown {
            let ax = apply(&x);
            let rel = norm(&b.iter().zip(&ax).map(|(p, q)| p - q).collect::<Vec<_>>()) / nb;
            return Ok(GmresOutcome { x, iterations: total, residual: rel, converged: rel <= tol });
        }
    }
}
