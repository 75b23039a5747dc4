use serde::{Deserialize, Serialize};

use super::Partition;
use crate::error::{Error, Result};
use crate::graph::Graph;
use crate::params::ModelParams;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct EdgeCounts {
    pub m: usize,
    pub m_in: usize,
    pub m_out: usize,
}

pub fn edge_counts(g: &Graph, tau: &Partition) -> Result<EdgeCounts> {
    if tau.n() != g.n() {
        return Err(Error::Dimension(format!("partition of {} vertices for a graph on {}", tau.n(), g.n())));
    }
    let m_in = g
        .edges()
        .iter()
        .filter(|&&(u, v)| tau.label(u) == tau.label(v))
        .count();
    let m = g.edge_count();
    Ok(EdgeCounts { m, m_in, m_out: m - m_in })
}

/// Planted-model expectations `(m̄_in, m̄_out) = (c_in n / 2k, (k-1) c_out n / 2k)`.
pub fn expected_counts(p: &ModelParams) -> (f64, f64) {
    let (n, k) = (p.n as f64, p.k as f64);
    (p.c_in * n / (2.0 * k), (k - 1.0) * p.c_out * n / (2.0 * k))
}

/// The tolerance `n^{2/3}` of the good-partition test.
pub fn good_threshold(n: usize) -> f64 {
    let c = (n as f64).cbrt();
    c * c
}

/// The good-partition test with its constants precomputed.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GoodTest {
    pub mbar_in: f64,
    pub mbar_out: f64,
    pub threshold: f64,
}

impl GoodTest {
    pub fn new(p: &ModelParams) -> Self {
        let (mbar_in, mbar_out) = expected_counts(p);
        Self {
            mbar_in,
            mbar_out,
            threshold: good_threshold(p.n),
        }
    }

    #[inline]
    pub fn accepts(&self, m_in: usize, m_out: usize) -> bool {
        (m_in as f64 - self.mbar_in).abs() < self.threshold
            && (m_out as f64 - self.mbar_out).abs() < self.threshold
    }
}

/// Whether balanced `tau` has within/between edge counts strictly within
/// `n^{2/3}` of their planted expectations.
pub fn is_good(g: &Graph, tau: &Partition, p: &ModelParams) -> Result<bool> {
    if !tau.is_balanced() {
        return Err(Error::Precondition("good-partition test needs a balanced partition".into()));
    }
    let counts = edge_counts(g, tau)?;
    Ok(GoodTest::new(p).accepts(counts.m_in, counts.m_out))
}
