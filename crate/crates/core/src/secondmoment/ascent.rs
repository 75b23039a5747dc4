//! Projected ascent of `Φ` over the Birkhoff polytope.
//!
//! Each step multiplies the entries by `exp(η ∇Φ)` and re-projects with
//! Sinkhorn. The first trial step is `η = k`: there the entropy part of the
//! gradient cancels the current entries and the step becomes the Sinkhorn
//! projection of `exp(k dλ² α)`, which maximizes `Φ` with its convex part
//! linearized and so never lowers it. Steps that Sinkhorn cannot project,
//! or that lower `Φ` through rounding, are retried with `η` halved.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::an::certificate;
use super::sinkhorn::{random_doubly_stochastic, sinkhorn};
use super::{phi, phi_gradient, BirkhoffPoint, ENTRY_FLOOR};
use crate::error::{Error, Result};
use crate::matrix::SquareMatrix;
use crate::params::{check_k, check_lambda};
use crate::rng::RandomStream;

const MAX_STEPS: usize = 20_000;
/// Ascent stops once a step moves no entry by more than this.
const STALL: f64 = 1e-12;
/// or once this many steps in a row each gain less than `FLAT_GAIN · (1 + |Φ|)`.
const FLAT_STEPS: usize = 5;
const FLAT_GAIN: f64 = 1e-13;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PhiReport {
    pub k: usize,
    pub d: f64,
    pub lambda: f64,
    pub best_alpha: BirkhoffPoint,
    pub phi_value: f64,
    /// `(ρ, bound on max Φ over |α|² = ρ)`.
    pub certificate: Vec<(f64, f64)>,
    /// Every certificate value is at most `1e-8`.
    pub negative_certified: bool,
    /// `dλ² < 1`: the Hessian of `Φ` at `J/k` is negative definite on the
    /// tangent space of the polytope, so the flat point is a quadratic
    /// local maximum.
    pub flat_is_quadratic_max: bool,
}

/// Result of one ascent run.
#[derive(Debug, Clone)]
pub struct Ascent {
    pub alpha: SquareMatrix,
    pub phi: f64,
    /// `Φ` after each accepted step, starting with the initial value.
    pub history: Vec<f64>,
}

const MIN_STEP: f64 = 1e-8;

fn step(alpha: &SquareMatrix, grad: &SquareMatrix, eta: f64) -> Result<SquareMatrix> {
    // work with logs so the largest entry is exactly 1 before projecting
    let logs: Vec<f64> = alpha.as_slice().iter().zip(grad.as_slice()).map(|(x, g)| x.max(ENTRY_FLOOR).ln() + eta * g).collect();
    let top = logs.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let mut next = alpha.clone();
    for (x, l) in next.as_mut_slice().iter_mut().zip(&logs) {
        *x = (l - top).exp().max(ENTRY_FLOOR);
    }
    sinkhorn(next)
}

pub fn ascend(start: SquareMatrix, d: f64, lambda: f64) -> Result<Ascent> {
    let full = start.dim() as f64;
    let mut alpha = start;
    let mut value = phi(&alpha, d, lambda);
    let mut history = vec![value];
    let mut flat_run = 0;
    'outer: for _ in 0..MAX_STEPS {
        let grad = phi_gradient(&alpha, d, lambda);
        let mut eta = full;
        let (cand, cand_value) = loop {
            match step(&alpha, &grad, eta) {
                Ok(c) => {
                    let v = phi(&c, d, lambda);
                    if v >= value {
                        break (c, v);
                    }
                }
                Err(Error::Projection(_)) => {}
                Err(e) => return Err(e),
            }
            eta *= 0.5;
            if eta < MIN_STEP {
                break 'outer;
            }
        };
        let moved = cand.max_abs_diff(&alpha);
        if cand_value - value < FLAT_GAIN * (1.0 + value.abs()) {
            flat_run += 1;
        } else {
            flat_run = 0;
        }
        alpha = cand;
        value = cand_value;
        history.push(value);
        if moved < STALL || flat_run >= FLAT_STEPS {
            break;
        }
    }
    Ok(Ascent { alpha, phi: value, history })
}

fn cyclic_shift(k: usize, j: usize) -> SquareMatrix {
    SquareMatrix::from_fn(k, |r, s| if (r + j) % k == s { 1.0 } else { 0.0 })
}

fn mix(a: &SquareMatrix, b: &SquareMatrix, t: f64) -> SquareMatrix {
    SquareMatrix::from_fn(a.dim(), |r, s| (1.0 - t) * a[(r, s)] + t * b[(r, s)])
}

/// Deterministic starting points: the flat matrix, each cyclic shift
/// permutation (the identity first) and each mixture of neighbouring shifts,
/// all nudged into the interior.
fn structured_starts(k: usize) -> Vec<SquareMatrix> {
    let flat = SquareMatrix::flat(k);
    let mut starts = vec![flat.clone()];
    for j in 0..k {
        let p = cyclic_shift(k, j);
        starts.push(mix(&p, &flat, 1e-3));
        let pair = mix(&p, &cyclic_shift(k, (j + 1) % k), 0.5);
        starts.push(mix(&pair, &flat, 1e-3));
    }
    starts
}

pub fn max_phi(k: usize, d: f64, lambda: f64, restarts: usize) -> Result<PhiReport> {
    max_phi_with(k, d, lambda, restarts, RandomStream::from_seed(0))
}

/// Maximizes `Φ` from structured and `restarts` random starts (random start
/// `i` uses `stream.child(i)`), and attaches the `ρ`-sliced certificate.
pub fn max_phi_with(k: usize, d: f64, lambda: f64, restarts: usize, stream: RandomStream) -> Result<PhiReport> {
    check_k(k)?;
    if !(d >= 0.0) || !d.is_finite() {
        return Err(Error::domain(format!("d = {d} must be a nonnegative real")));
    }
    let lambda = check_lambda(k, lambda)?;

    let mut starts = structured_starts(k);
    for i in 0..restarts {
        let mut rng = stream.child(i as u64).rng();
        let sharpness = 0.5 + 4.0 * (i % 8) as f64 / 7.0;
        starts.push(random_doubly_stochastic(k, sharpness, &mut rng)?);
    }
    let runs = starts
        .into_par_iter()
        .map(|s| ascend(s, d, lambda))
        .collect::<Result<Vec<_>>>()?;

    // exact vertices are evaluated as candidates too
    let mut best = (phi(&SquareMatrix::identity(k), d, lambda), SquareMatrix::identity(k));
    for run in runs {
        if run.phi > best.0 {
            best = (run.phi, run.alpha);
        }
    }

    let certificate = certificate(k, d, lambda)?;
    let negative_certified = certificate.iter().all(|&(_, b)| b <= 1e-8);
    let (phi_value, alpha) = best;
    Ok(PhiReport {
        k,
        d,
        lambda,
        best_alpha: BirkhoffPoint::new(alpha)?,
        phi_value,
        certificate,
        negative_certified,
        flat_is_quadratic_max: d * lambda * lambda < 1.0,
    })
}
