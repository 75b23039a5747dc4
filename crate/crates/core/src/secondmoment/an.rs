//! Entropy bound for doubly stochastic matrices of given Frobenius norm, via
//! the row-stochastic relaxation whose maximizers mix uniform rows with
//! rows that have all but one entry equal, and the resulting 1-D
//! certificate that `Φ ≤ 0` on the whole polytope.

use crate::error::{Error, Result};
use crate::matrix::xlogx;
use crate::params::check_k;

/// Number of `ρ` values on the certificate grid over `[1, k]`.
pub const CERTIFICATE_POINTS: usize = 200;
const M_GRID: usize = 10_000;
const GOLDEN_TOL: f64 = 1e-10;

fn h(x: f64) -> f64 {
    -xlogx(x)
}

/// Entropy of a row with one entry `s = (1 + √((k-1)(kr-1)))/k` and the rest
/// equal, which is the row of squared norm `r` with the most entropy among
/// such rows.
pub fn an_f(r: f64, k: usize) -> Result<f64> {
    check_k(k)?;
    let kf = k as f64;
    if !(r >= 1.0 / kf - 1e-12 && r <= 1.0 + 1e-12) {
        return Err(Error::domain(format!("r = {r} outside [1/k, 1]")));
    }
    Ok(f_unchecked(r.clamp(1.0 / kf, 1.0), kf))
}

fn f_unchecked(r: f64, kf: f64) -> f64 {
    let km1 = kf - 1.0;
    let s = (1.0 + (km1 * (kf * r - 1.0)).max(0.0).sqrt()) / kf;
    h(s) + km1 * h((1.0 - s) / km1)
}

/// Objective of the inner maximization at mixture weight `m`.
fn mixture_entropy(m: f64, rho: f64, kf: f64) -> f64 {
    let free = kf - m;
    if free <= 1e-12 * kf {
        return kf.ln();
    }
    let r = ((kf * rho - m) / (kf * free)).clamp(1.0 / kf, 1.0);
    (m / kf) * kf.ln() + (free / kf) * f_unchecked(r, kf)
}

fn golden_max(mut a: f64, mut b: f64, f: impl Fn(f64) -> f64) -> (f64, f64) {
    let inv_phi = (5f64.sqrt() - 1.0) / 2.0;
    let mut x1 = b - inv_phi * (b - a);
    let mut x2 = a + inv_phi * (b - a);
    let (mut f1, mut f2) = (f(x1), f(x2));
    while b - a > GOLDEN_TOL {
        if f1 < f2 {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + inv_phi * (b - a);
            f2 = f(x2);
        } else {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - inv_phi * (b - a);
            f1 = f(x1);
        }
    }
    if f1 >= f2 {
        (x1, f1)
    } else {
        (x2, f2)
    }
}

/// Upper bound on `H(α)` over doubly stochastic `α` with `|α|² = ρ`:
/// `max_m (m/k) ln k + (1 - m/k) f((kρ - m) / (k(k - m)))` for
/// `m ∈ [0, k(k-ρ)/(k-1)]`, by a dense grid plus golden-section refinement
/// around the best grid point.
pub fn an_entropy_bound(rho: f64, k: usize) -> Result<f64> {
    check_k(k)?;
    let kf = k as f64;
    if !(rho >= 1.0 - 1e-12 && rho <= kf + 1e-12) {
        return Err(Error::domain(format!("rho = {rho} outside [1, {k}]")));
    }
    let rho = rho.clamp(1.0, kf);
    let m_max = kf * (kf - rho) / (kf - 1.0);
    if m_max <= 0.0 {
        return Ok(mixture_entropy(0.0, rho, kf));
    }
    let g = |m: f64| mixture_entropy(m, rho, kf);
    let step = m_max / M_GRID as f64;
    let (mut best_i, mut best) = (0, g(0.0));
    for i in 1..=M_GRID {
        let v = g(step * i as f64);
        if v > best {
            best = v;
            best_i = i;
        }
    }
    let lo = step * best_i.saturating_sub(1) as f64;
    let hi = (step * (best_i + 1) as f64).min(m_max);
    let (_, refined) = golden_max(lo, hi, g);
    Ok(best.max(refined))
}

/// Checks `δ(ρ-1)/(k-1)² ≤ (1 - m/k)(f(1/k) - f((kρ - m)/(k(k - m))))`
/// with `1e-9` slack.
pub fn an_lemma_check(delta: f64, rho: f64, m: f64, k: usize) -> Result<bool> {
    check_k(k)?;
    let kf = k as f64;
    let km1 = kf - 1.0;
    if !(rho >= 1.0 - 1e-12 && rho <= kf + 1e-12) {
        return Err(Error::domain(format!("rho = {rho} outside [1, {k}]")));
    }
    let rho = rho.clamp(1.0, kf);
    let m_max = kf * (kf - rho) / km1;
    if !(m >= 0.0 && m <= m_max + 1e-12) {
        return Err(Error::domain(format!("m = {m} outside [0, {m_max}]")));
    }
    if !(delta < km1 * km1.ln()) {
        return Err(Error::domain(format!("delta = {delta} is not below (k-1) ln(k-1)")));
    }
    let lhs = delta * (rho - 1.0) / (km1 * km1);
    let free = kf - m;
    let rhs = if free <= 1e-12 * kf {
        0.0
    } else {
        let r = ((kf * rho - m) / (kf * free)).clamp(1.0 / kf, 1.0);
        (free / kf) * (f_unchecked(1.0 / kf, kf) - f_unchecked(r, kf))
    };
    Ok(lhs <= rhs + 1e-9)
}

/// Bound on `max Φ` over the slice `|α|² = ρ`.
pub fn one_d_bound(rho: f64, k: usize, d: f64, lambda: f64) -> Result<f64> {
    Ok(an_entropy_bound(rho, k)? - (k as f64).ln() + 0.5 * d * lambda * lambda * (rho - 1.0))
}

/// `(ρ, one_d_bound(ρ))` on [`CERTIFICATE_POINTS`] equally spaced `ρ ∈ [1, k]`.
pub fn certificate(k: usize, d: f64, lambda: f64) -> Result<Vec<(f64, f64)>> {
    let kf = k as f64;
    (0..CERTIFICATE_POINTS)
        .map(|i| {
            let rho = 1.0 + (kf - 1.0) * i as f64 / (CERTIFICATE_POINTS - 1) as f64;
            Ok((rho, one_d_bound(rho, k, d, lambda)?))
        })
        .collect()
}
