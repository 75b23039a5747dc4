//! Partitions of the vertex set, overlap statistics and the good-partition
//! detector.

mod detect;
mod good;
mod overlap;

pub use detect::{exhaustive_detect, DetectOptions, DEFAULT_SEARCH_BUDGET};
pub use good::{edge_counts, expected_counts, good_threshold, is_good, EdgeCounts, GoodTest};
pub use overlap::{
    count_with_overlap, frobenius_sq, overlap, overlap_counts, overlap_matrix, within_prob,
    OverlapMatrix,
};

use std::fmt::Write as _;

use rand::seq::SliceRandom;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// A labeling `[n] -> [k]`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Partition {
    k: usize,
    labels: Vec<usize>,
}

impl Partition {
    pub fn new(k: usize, labels: Vec<usize>) -> Result<Self> {
        if k == 0 {
            return Err(Error::Partition("group count must be positive".into()));
        }
        if let Some((v, &l)) = labels.iter().enumerate().find(|(_, &l)| l >= k) {
            return Err(Error::Partition(format!("vertex {v} has label {l}, outside [0, {k})")));
        }
        Ok(Self { k, labels })
    }

    /// Uniform over all `k^n` labelings.
    pub fn uniform<R: Rng + ?Sized>(n: usize, k: usize, rng: &mut R) -> Self {
        let labels = (0..n).map(|_| rng.random_range(0..k)).collect();
        Self { k, labels }
    }

    /// Uniform over balanced labelings.
    pub fn random_balanced<R: Rng + ?Sized>(n: usize, k: usize, rng: &mut R) -> Result<Self> {
        if k == 0 || n % k != 0 {
            return Err(Error::Divisibility { n, k });
        }
        let mut labels: Vec<usize> = (0..n).map(|v| v / (n / k)).collect();
        labels.shuffle(rng);
        Ok(Self { k, labels })
    }

    #[inline]
    pub fn k(&self) -> usize {
        self.k
    }

    #[inline]
    pub fn n(&self) -> usize {
        self.labels.len()
    }

    pub fn labels(&self) -> &[usize] {
        &self.labels
    }

    #[inline]
    pub fn label(&self, v: usize) -> usize {
        self.labels[v]
    }

    pub fn group_sizes(&self) -> Vec<usize> {
        let mut sizes = vec![0; self.k];
        for &l in &self.labels {
            sizes[l] += 1;
        }
        sizes
    }

    /// Every group has exactly `n / k` vertices.
    pub fn is_balanced(&self) -> bool {
        let n = self.n();
        n % self.k == 0 && self.group_sizes().iter().all(|&s| s == n / self.k)
    }

    /// Relabels through `perm`, so group `r` becomes group `perm[r]`.
    pub fn relabel(&self, perm: &[usize]) -> Result<Self> {
        if perm.len() != self.k {
            return Err(Error::Dimension(format!("permutation of length {} for k = {}", perm.len(), self.k)));
        }
        Self::new(self.k, self.labels.iter().map(|&l| perm[l]).collect())
    }

    /// Moves the fewest vertices needed to balance the partition.
    ///
    /// While some group is over-full, the highest-index vertex of the
    /// smallest-index over-full group moves to the smallest-index under-full
    /// group.
    pub fn balance(&self) -> Result<Self> {
        let (n, k) = (self.n(), self.k);
        if n % k != 0 {
            return Err(Error::Divisibility { n, k });
        }
        let target = n / k;
        let mut labels = self.labels.clone();
        let mut sizes = self.group_sizes();
        while let Some(from) = sizes.iter().position(|&s| s > target) {
            let to = sizes
                .iter()
                .position(|&s| s < target)
                .expect("an over-full group implies an under-full one");
            let v = labels
                .iter()
                .rposition(|&l| l == from)
                .expect("over-full group is non-empty");
            labels[v] = to;
            sizes[from] -= 1;
            sizes[to] += 1;
        }
        Ok(Self { k, labels })
    }

    /// Sidecar format: one label per line.
    pub fn to_text(&self) -> String {
        let mut out = String::with_capacity(3 * self.n());
        for &l in &self.labels {
            writeln!(out, "{l}").unwrap();
        }
        out
    }

    pub fn parse(text: &str, k: usize) -> Result<Self> {
        let labels = text
            .lines()
            .filter(|l| !l.trim().is_empty())
            .map(|l| {
                l.trim()
                    .parse::<usize>()
                    .map_err(|e| Error::Parse(format!("label \"{l}\": {e}")))
            })
            .collect::<Result<Vec<_>>>()?;
        Self::new(k, labels)
    }
}
