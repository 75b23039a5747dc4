use nalgebra::{DMatrix, DVector};
use rand::Rng;
use rand_distr::{Distribution, Exp1};

use crate::error::{Error, Result};
use crate::matrix::SquareMatrix;

pub const SINKHORN_TOL: f64 = 1e-12;
pub const SINKHORN_MAX_ITERS: usize = 10_000;
/// Plain alternating sweeps before switching to Newton's method, which
/// handles nearly permutation-shaped inputs where sweeps crawl.
const SWEEPS: usize = 200;
const NEWTON_ITERS: usize = SINKHORN_MAX_ITERS - SWEEPS;

/// `exp(ln K_rs + x_r + y_s)`.
fn scaled(lnk: &SquareMatrix, x: &[f64], y: &[f64]) -> SquareMatrix {
    SquareMatrix::from_fn(lnk.dim(), |r, s| (lnk[(r, s)] + x[r] + y[s]).exp())
}

fn log_sum_exp(it: impl Iterator<Item = f64> + Clone) -> f64 {
    let top = it.clone().fold(f64::NEG_INFINITY, f64::max);
    top + it.map(|v| (v - top).exp()).sum::<f64>().ln()
}

/// Convex dual whose minimizer gives the scalings: `Σ P - Σ x - Σ y`.
fn dual(lnk: &SquareMatrix, x: &[f64], y: &[f64]) -> f64 {
    scaled(lnk, x, y).as_slice().iter().sum::<f64>() - x.iter().sum::<f64>() - y.iter().sum::<f64>()
}

/// Projects a positive matrix onto the doubly stochastic matrices by
/// diagonal scaling `diag(e^x) M diag(e^y)`.
pub fn sinkhorn(m: SquareMatrix) -> Result<SquareMatrix> {
    let k = m.dim();
    if m.as_slice().iter().any(|&v| !(v > 0.0) || !v.is_finite()) {
        return Err(Error::domain("Sinkhorn projection needs a finite positive matrix"));
    }
    let lnk = m.map(f64::ln);
    let (mut x, mut y) = (vec![0.0; k], vec![0.0; k]);
    let mut iters = 0;
    for _ in 0..SWEEPS {
        iters += 1;
        for r in 0..k {
            x[r] = -log_sum_exp((0..k).map(|s| lnk[(r, s)] + y[s]));
        }
        for s in 0..k {
            y[s] = -log_sum_exp((0..k).map(|r| lnk[(r, s)] + x[r]));
        }
        let p = scaled(&lnk, &x, &y);
        if p.stochastic_residual() <= SINKHORN_TOL {
            return Ok(p);
        }
    }

    // Newton on the dual with y_{k-1} pinned to remove the shift symmetry
    let vars = 2 * k - 1;
    for _ in 0..NEWTON_ITERS {
        iters += 1;
        let p = scaled(&lnk, &x, &y);
        if p.stochastic_residual() <= SINKHORN_TOL {
            return Ok(p);
        }
        let (rows, cols) = (p.row_sums(), p.col_sums());
        let mut grad = DVector::zeros(vars);
        let mut hess = DMatrix::zeros(vars, vars);
        for r in 0..k {
            grad[r] = rows[r] - 1.0;
            hess[(r, r)] = rows[r];
        }
        for s in 0..k - 1 {
            grad[k + s] = cols[s] - 1.0;
            hess[(k + s, k + s)] = cols[s];
            for r in 0..k {
                hess[(r, k + s)] = p[(r, s)];
                hess[(k + s, r)] = p[(r, s)];
            }
        }
        let Some(chol) = hess.cholesky() else { break };
        let dir = chol.solve(&(-&grad));
        let slope = grad.dot(&dir);
        let base = dual(&lnk, &x, &y);
        let base_residual = p.stochastic_residual();
        let mut t = 1.0;
        loop {
            let nx: Vec<f64> = (0..k).map(|r| x[r] + t * dir[r]).collect();
            let ny: Vec<f64> = (0..k).map(|s| if s < k - 1 { y[s] + t * dir[k + s] } else { y[s] }).collect();
            // near the solution the dual is flat to rounding, so a drop in
            // the residual also counts as progress
            let armijo = dual(&lnk, &nx, &ny) <= base + 1e-4 * t * slope;
            if armijo || scaled(&lnk, &nx, &ny).stochastic_residual() < base_residual || t < 1e-10 {
                x = nx;
                y = ny;
                break;
            }
            t *= 0.5;
        }
    }
    let p = scaled(&lnk, &x, &y);
    if p.stochastic_residual() <= SINKHORN_TOL {
        return Ok(p);
    }
    Err(Error::Projection(iters))
}

/// Sinkhorn-normalized matrix of i.i.d. `Exp(1)^sharpness` entries. Larger
/// `sharpness` concentrates the mass and pushes `|α|²` toward `k`.
pub fn random_doubly_stochastic<R: Rng + ?Sized>(k: usize, sharpness: f64, rng: &mut R) -> Result<SquareMatrix> {
    let raw = SquareMatrix::from_fn(k, |_, _| {
        let e: f64 = Exp1.sample(rng);
        e.max(1e-300).powf(sharpness).max(1e-300)
    });
    sinkhorn(raw)
}
