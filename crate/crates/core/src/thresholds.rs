//! Threshold formulas for the symmetric block model.
//!
//! Upper bound from the first moment of good partitions, lower bound from
//! the second moment, the Kesten-Stigum line `1/λ²`, and the derived
//! quantities built on them. Infinite thresholds are ordinary return
//! values; every root is found by bisection.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::matrix::xlogx;
use crate::params::{check_k, check_lambda, lambda_min};
use crate::serde_ext::extended_f64;

/// Bisection stops once the bracket is narrower than this.
pub const BISECTION_TOL: f64 = 1e-10;

pub fn kesten_stigum(lambda: f64) -> f64 {
    1.0 / (lambda * lambda)
}

/// `(1+(k-1)λ) ln(1+(k-1)λ) + (k-1)(1-λ) ln(1-λ)`, with `0 ln 0 = 0`.
fn upper_denominator(k: usize, lambda: f64) -> f64 {
    let km1 = k as f64 - 1.0;
    let a = km1 * lambda;
    // λ = -1/(k-1) is not representable; a residual at rounding level means
    // the caller meant the boundary, where x ln x has unbounded slope.
    let first = if 1.0 + a <= 2.0 * f64::EPSILON { 0.0 } else { (1.0 + a) * a.ln_1p() };
    let second = if lambda >= 1.0 { 0.0 } else { km1 * (1.0 - lambda) * (-lambda).ln_1p() };
    first + second
}

/// `d_c^upper = 2 k ln k / [(1+(k-1)λ) ln(1+(k-1)λ) + (k-1)(1-λ) ln(1-λ)]`.
pub fn dc_upper(k: usize, lambda: f64) -> Result<f64> {
    check_k(k)?;
    let lambda = check_lambda(k, lambda)?;
    let den = upper_denominator(k, lambda);
    if lambda == 0.0 || den <= 0.0 {
        return Ok(f64::INFINITY);
    }
    let kf = k as f64;
    Ok(2.0 * kf * kf.ln() / den)
}

/// First-moment bound on `k`-colorability, `2 ln k / (-ln(1 - 1/k))`.
pub fn coloring_dc_upper(k: usize) -> Result<f64> {
    check_k(k)?;
    let kf = k as f64;
    Ok(2.0 * kf.ln() / -(-1.0 / kf).ln_1p())
}

/// `d_c^lower = (2 ln(k-1) / (k-1)) / λ²`; zero (vacuous) for `k = 2`.
pub fn dc_lower(k: usize, lambda: f64) -> Result<f64> {
    check_k(k)?;
    let lambda = check_lambda(k, lambda)?;
    if k == 2 {
        return Ok(0.0);
    }
    let km1 = k as f64 - 1.0;
    Ok(2.0 * km1.ln() / km1 * kesten_stigum(lambda))
}

/// `d_c^upper · λ²`, the upper bound in units of the Kesten-Stigum
/// threshold. Continuous at `λ = 0`, where it equals `4 ln k / (k-1)`.
pub fn ks_ratio(k: usize, lambda: f64) -> Result<f64> {
    let upper = dc_upper(k, lambda)?;
    if lambda == 0.0 {
        return Ok(4.0 * (k as f64).ln() / (k as f64 - 1.0));
    }
    Ok(upper * lambda * lambda)
}

/// The crossing `λ*` of `d_c^upper(k, λ) = 1/λ²`, below which the upper
/// bound is under the Kesten-Stigum line.
pub fn lambda_star(k: usize) -> Result<f64> {
    check_k(k)?;
    let mut lo = lambda_min(k) + 1e-12;
    let mut hi = 1.0 - 1e-12;
    let excess = |l: f64| ks_ratio(k, l).map(|r| r - 1.0);
    if !(excess(lo)? < 0.0 && excess(hi)? > 0.0) {
        return Err(Error::NoCrossing(k));
    }
    while hi - lo > BISECTION_TOL {
        let mid = 0.5 * (lo + hi);
        if excess(mid)? < 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}

/// `x ln(x / y)` with `0 ln(0 / y) = 0`.
fn rel(x: f64, y: f64) -> f64 {
    if x <= 0.0 {
        0.0
    } else {
        x * (x / y).ln()
    }
}

/// Degree at which good partitions with overlap `β` stop existing: the
/// entropy of the best overlap matrix with that overlap, divided by the
/// large-deviation rate of matching the planted edge counts.
///
/// Increasing in `β` on `[1/k, 1)`, equal to `d_c^upper` at `β = 1/k` and
/// unbounded as `β → 1`.
pub fn overlap_degree(k: usize, lambda: f64, beta: f64) -> Result<f64> {
    check_k(k)?;
    let lambda = check_lambda(k, lambda)?;
    let kf = k as f64;
    if !(beta >= 1.0 / kf - 1e-15 && beta <= 1.0) {
        return Err(Error::domain(format!("overlap {beta} outside [1/k, 1]")));
    }
    if beta >= 1.0 {
        return Ok(f64::INFINITY);
    }
    let km1 = kf - 1.0;
    let entropy = -xlogx(beta) - xlogx(1.0 - beta) + (1.0 - beta) * km1.ln();
    let shift = (kf * beta - 1.0) * lambda;
    let den = rel(1.0 + km1 * lambda, 1.0 + shift) + rel(km1 * (1.0 - lambda), km1 - shift);
    if den <= 0.0 {
        return Ok(f64::INFINITY);
    }
    Ok(2.0 * kf * entropy / den)
}

/// Smallest `β` with `overlap_degree(k, λ, β) = d`: every good partition
/// has at least this overlap with the planted one when `d > d_c^upper`.
pub fn min_overlap_beta(k: usize, lambda: f64, d: f64) -> Result<f64> {
    let upper = dc_upper(k, lambda)?;
    if !(d > upper) {
        return Err(Error::domain(format!("d = {d} is not above d_c^upper = {upper}")));
    }
    let mut lo = 1.0 / k as f64;
    let mut hi = 1.0;
    while hi - lo > 1e-13 {
        let mid = 0.5 * (lo + hi);
        if overlap_degree(k, lambda, mid)? < d {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}

/// `d' = d λ² (k-1)²`, the coloring degree with the same edge correlation.
pub fn effective_coloring_degree(k: usize, lambda: f64, d: f64) -> f64 {
    let km1 = k as f64 - 1.0;
    d * lambda * lambda * km1 * km1
}

/// Large-`k` limit of `d_c^upper / d_c^lower` at fixed
/// `μ = (c_in - c_out) / d`: `μ² / ((1+μ) ln(1+μ) - μ)`.
pub fn bound_ratio_mu(mu: f64) -> Result<f64> {
    if !(mu >= -1.0) || !mu.is_finite() {
        return Err(Error::domain(format!("mu = {mu} must lie in [-1, inf)")));
    }
    if mu.abs() < 1e-3 {
        // (1+μ) ln(1+μ) - μ = μ²/2 - μ³/6 + μ⁴/12 - μ⁵/20 + ...
        return Ok(1.0 / (0.5 - mu / 6.0 + mu * mu / 12.0 - mu * mu * mu / 20.0));
    }
    Ok(mu * mu / (xlogx(1.0 + mu) - mu))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ThresholdReport {
    pub k: usize,
    pub lambda: f64,
    #[serde(with = "extended_f64")]
    pub d_upper: f64,
    #[serde(with = "extended_f64")]
    pub d_lower: f64,
    #[serde(with = "extended_f64")]
    pub d_ks: f64,
    /// The upper bound lies strictly below the Kesten-Stigum line.
    pub below_ks_detectable: bool,
    /// `k = 2`, where the lower bound degenerates to zero.
    pub lower_bound_vacuous: bool,
}

pub fn threshold_report(k: usize, lambda: f64) -> Result<ThresholdReport> {
    let d_upper = dc_upper(k, lambda)?;
    let d_lower = dc_lower(k, lambda)?;
    let d_ks = kesten_stigum(lambda);
    Ok(ThresholdReport {
        k,
        lambda,
        d_upper,
        d_lower,
        d_ks,
        below_ks_detectable: d_upper < d_ks,
        lower_bound_vacuous: k == 2,
    })
}
