//! Two-rate block model parametrization.
//!
//! A model is stored as `(k, n, c_in, c_out)`; the average degree `d`, the
//! eigenvalue `λ` and the connectivity matrix `γ = c / (k d)` are derived.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::matrix::SquareMatrix;

/// Slack allowed when checking `λ` against the endpoints of its range, so
/// that values such as `-1.0 / (k - 1) as f64` are accepted.
const LAMBDA_SLACK: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawParams")]
pub struct ModelParams {
    pub k: usize,
    pub n: usize,
    pub c_in: f64,
    pub c_out: f64,
}

/// Either JSON form of [`ModelParams`]: rates, or `(d, lambda)`.
#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawParams {
    k: usize,
    n: usize,
    c_in: Option<f64>,
    c_out: Option<f64>,
    d: Option<f64>,
    lambda: Option<f64>,
}

impl TryFrom<RawParams> for ModelParams {
    type Error = Error;

    fn try_from(raw: RawParams) -> Result<Self> {
        match (raw.c_in, raw.c_out, raw.d, raw.lambda) {
            (Some(c_in), Some(c_out), None, None) => ModelParams::new(raw.k, raw.n, c_in, c_out),
            (None, None, Some(d), Some(lambda)) => ModelParams::from_d_lambda(raw.k, raw.n, d, lambda),
            _ => Err(Error::Parse(
                "model parameters need exactly one of {c_in, c_out} or {d, lambda}".into(),
            )),
        }
    }
}

/// Lower end of the admissible range of `λ` for `k` groups.
pub fn lambda_min(k: usize) -> f64 {
    -1.0 / (k as f64 - 1.0)
}

pub(crate) fn check_k(k: usize) -> Result<()> {
    if k < 2 {
        return Err(Error::domain(format!("need at least 2 groups, got {k}")));
    }
    Ok(())
}

/// Checks `λ ∈ [-1/(k-1), 1]` and snaps values within rounding of an
/// endpoint onto it.
pub(crate) fn check_lambda(k: usize, lambda: f64) -> Result<f64> {
    let lo = lambda_min(k);
    if !lambda.is_finite() || lambda < lo - LAMBDA_SLACK || lambda > 1.0 + LAMBDA_SLACK {
        return Err(Error::domain(format!(
            "lambda = {lambda} outside [{lo}, 1] for k = {k}"
        )));
    }
    Ok(lambda.clamp(lo, 1.0))
}

impl ModelParams {
    pub fn new(k: usize, n: usize, c_in: f64, c_out: f64) -> Result<Self> {
        check_k(k)?;
        if n == 0 {
            return Err(Error::domain("vertex count must be positive"));
        }
        for (name, c) in [("c_in", c_in), ("c_out", c_out)] {
            if !c.is_finite() || c < 0.0 {
                return Err(Error::domain(format!("{name} = {c} must be a nonnegative real")));
            }
        }
        Ok(Self { k, n, c_in, c_out })
    }

    /// `c_in = d (1 + (k-1) λ)`, `c_out = d (1 - λ)`.
    pub fn from_d_lambda(k: usize, n: usize, d: f64, lambda: f64) -> Result<Self> {
        check_k(k)?;
        if !(d > 0.0) || !d.is_finite() {
            return Err(Error::domain(format!("average degree must be positive, got {d}")));
        }
        let lambda = check_lambda(k, lambda)?;
        let c_in = (d * (1.0 + (k as f64 - 1.0) * lambda)).max(0.0);
        let c_out = (d * (1.0 - lambda)).max(0.0);
        Self::new(k, n, c_in, c_out)
    }

    pub fn average_degree(&self) -> f64 {
        (self.c_in + (self.k as f64 - 1.0) * self.c_out) / self.k as f64
    }

    /// `λ = (c_in - c_out) / (k d)`, the second eigenvalue of `γ`.
    pub fn second_eigenvalue(&self) -> Result<f64> {
        let d = self.average_degree();
        if d <= 0.0 {
            return Err(Error::Degenerate);
        }
        Ok((self.c_in - self.c_out) / (self.k as f64 * d))
    }

    pub fn connectivity_matrix(&self) -> Result<ConnectivityMatrix> {
        let d = self.average_degree();
        if d <= 0.0 {
            return Err(Error::Degenerate);
        }
        let kd = self.k as f64 * d;
        let (diag, off) = (self.c_in / kd, self.c_out / kd);
        Ok(ConnectivityMatrix(SquareMatrix::from_fn(self.k, |r, s| {
            if r == s {
                diag
            } else {
                off
            }
        })))
    }

    /// Edge probability between groups `r` and `s`.
    #[inline]
    pub fn pair_probability(&self, r: usize, s: usize) -> f64 {
        let c = if r == s { self.c_in } else { self.c_out };
        c / self.n as f64
    }

    /// Fails with [`Error::ProbabilityOverflow`] when a rate exceeds `n`.
    pub fn check_probabilities(&self) -> Result<()> {
        let n = self.n as f64;
        for c in [self.c_in, self.c_out] {
            if c > n {
                return Err(Error::ProbabilityOverflow(c / n));
            }
        }
        Ok(())
    }
}

/// The doubly stochastic matrix `γ = λ I + (1 - λ) J / k`.
#[derive(Debug, Clone, PartialEq)]
pub struct ConnectivityMatrix(pub SquareMatrix);

impl ConnectivityMatrix {
    pub fn from_lambda(k: usize, lambda: f64) -> Self {
        let kf = k as f64;
        ConnectivityMatrix(SquareMatrix::from_fn(k, |r, s| {
            let id = if r == s { 1.0 } else { 0.0 };
            lambda * id + (1.0 - lambda) / kf
        }))
    }

    pub fn matrix(&self) -> &SquareMatrix {
        &self.0
    }
}

impl std::ops::Deref for ConnectivityMatrix {
    type Target = SquareMatrix;

    fn deref(&self) -> &SquareMatrix {
        &self.0
    }
}
