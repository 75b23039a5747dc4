//! The second-moment functional `Φ(α) = H(α) - ln k + (dλ²/2)(|α|² - 1)`
//! over doubly stochastic matrices, its entropy-bound certificate, its
//! numerical maximization, and a direct Monte Carlo estimate of the second
//! moment of the likelihood ratio.

mod an;
mod ascent;
mod estimate;
mod sinkhorn;

pub use an::{an_entropy_bound, an_f, an_lemma_check, certificate, one_d_bound, CERTIFICATE_POINTS};
pub use ascent::{max_phi, max_phi_with, ascend, Ascent, PhiReport};
pub use estimate::{likelihood_ratio, second_moment_estimate, SecondMomentEstimate, LABELING_BUDGET};
pub use sinkhorn::{random_doubly_stochastic, sinkhorn, SINKHORN_MAX_ITERS, SINKHORN_TOL};

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};
use crate::matrix::{xlogx, SquareMatrix};
use crate::params::ConnectivityMatrix;
use crate::partition::OverlapMatrix;

/// Entries are floored here before taking logarithms.
pub const ENTRY_FLOOR: f64 = 1e-300;

/// A doubly stochastic matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct BirkhoffPoint(SquareMatrix);

impl BirkhoffPoint {
    pub fn new(m: SquareMatrix) -> Result<Self> {
        if !m.is_doubly_stochastic(1e-9) {
            return Err(Error::domain("matrix is not doubly stochastic"));
        }
        Ok(Self(m))
    }

    pub fn flat(k: usize) -> Self {
        Self(SquareMatrix::flat(k))
    }

    pub fn identity(k: usize) -> Self {
        Self(SquareMatrix::identity(k))
    }

    pub fn matrix(&self) -> &SquareMatrix {
        &self.0
    }

    pub fn into_matrix(self) -> SquareMatrix {
        self.0
    }
}

impl std::ops::Deref for BirkhoffPoint {
    type Target = SquareMatrix;

    fn deref(&self) -> &SquareMatrix {
        &self.0
    }
}

impl TryFrom<OverlapMatrix> for BirkhoffPoint {
    type Error = Error;

    fn try_from(alpha: OverlapMatrix) -> Result<Self> {
        Self::new(alpha.0)
    }
}

impl Serialize for BirkhoffPoint {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        self.0.to_rows().serialize(s)
    }
}

impl<'de> Deserialize<'de> for BirkhoffPoint {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let rows = Vec::<Vec<f64>>::deserialize(d)?;
        if rows.iter().any(|r| r.len() != rows.len()) {
            return Err(serde::de::Error::custom("matrix rows must form a square"));
        }
        BirkhoffPoint::new(SquareMatrix::from_rows(&rows)).map_err(serde::de::Error::custom)
    }
}

/// Average row entropy `H(α) = -(1/k) Σ α_rs ln α_rs`.
pub fn row_entropy(alpha: &SquareMatrix) -> f64 {
    -alpha.as_slice().iter().map(|&x| xlogx(x)).sum::<f64>() / alpha.dim() as f64
}

pub fn phi(alpha: &SquareMatrix, d: f64, lambda: f64) -> f64 {
    let k = alpha.dim() as f64;
    row_entropy(alpha) - k.ln() + 0.5 * d * lambda * lambda * (alpha.frobenius_sq() - 1.0)
}

/// `∂Φ/∂α_rs = -(1/k)(1 + ln α_rs) + dλ² α_rs`, treating the entries as
/// free coordinates.
pub fn phi_gradient(alpha: &SquareMatrix, d: f64, lambda: f64) -> SquareMatrix {
    let k = alpha.dim() as f64;
    let energy = d * lambda * lambda;
    alpha.map(|x| -(1.0 + x.max(ENTRY_FLOOR).ln()) / k + energy * x)
}

/// `Tr[αᵀ (γ - J/k) α (γ - J/k)]`, the exponent of the second-moment sum.
pub fn quadratic_form(alpha: &SquareMatrix, gamma: &ConnectivityMatrix) -> Result<f64> {
    let k = alpha.dim();
    if gamma.dim() != k {
        return Err(Error::Dimension(format!("alpha is {k}x{k}, gamma is {0}x{0}", gamma.dim())));
    }
    let centered = gamma.sub(&SquareMatrix::flat(k));
    Ok(alpha.transpose().matmul(&centered).matmul(alpha).matmul(&centered).trace())
}
