//! Samplers for the planted model, the null model, and their fixed-edge-count
//! variants.
//!
//! Independent-pair samplers walk pairs `(u, v)`, `u < v`, in row-major
//! order with one Bernoulli draw each. Fixed-edge-count samplers draw `m`
//! ordered pairs with replacement and reject the whole draw unless the
//! result is simple, which makes the accepted graph uniform over simple
//! graphs with `m` edges (respectively, proportional to the planted law).

use rand::distr::weighted::WeightedIndex;
use rand::distr::{Bernoulli, Distribution};
use rand::Rng;

use crate::error::{Error, Result};
use crate::graph::Graph;
use crate::params::ModelParams;
use crate::partition::Partition;
use crate::rng::RandomStream;

/// Whole-graph attempts before a fixed-edge-count sampler gives up.
pub const REJECTION_BUDGET: u64 = 1_000_000;

fn bernoulli(prob: f64) -> Result<Bernoulli> {
    if prob > 1.0 {
        return Err(Error::ProbabilityOverflow(prob));
    }
    Bernoulli::new(prob).map_err(|_| Error::domain(format!("invalid edge probability {prob}")))
}

/// Draws `σ` uniformly from all `k^n` labelings, then the graph given `σ`.
pub fn sample_planted(p: &ModelParams, stream: RandomStream) -> Result<(Partition, Graph)> {
    p.check_probabilities()?;
    let sigma = Partition::uniform(p.n, p.k, &mut stream.child(0).rng());
    let g = sample_sbm(p, &sigma, stream.child(1))?;
    Ok((sigma, g))
}

fn check_labels(p: &ModelParams, sigma: &Partition) -> Result<()> {
    if sigma.k() != p.k {
        return Err(Error::Partition(format!("partition has k = {}, model k = {}", sigma.k(), p.k)));
    }
    if sigma.n() != p.n {
        return Err(Error::Partition(format!("partition has {} labels, model n = {}", sigma.n(), p.n)));
    }
    Ok(())
}

/// Includes each pair independently with probability `c_{σ(u)σ(v)} / n`.
pub fn sample_sbm(p: &ModelParams, sigma: &Partition, stream: RandomStream) -> Result<Graph> {
    sample_sbm_with(p, sigma, &mut stream.rng())
}

pub fn sample_sbm_with<R: Rng + ?Sized>(p: &ModelParams, sigma: &Partition, rng: &mut R) -> Result<Graph> {
    check_labels(p, sigma)?;
    let within = bernoulli(p.pair_probability(0, 0))?;
    let between = bernoulli(p.pair_probability(0, 1))?;
    let labels = sigma.labels();
    let mut edges = Vec::new();
    for u in 0..p.n {
        for v in u + 1..p.n {
            let coin = if labels[u] == labels[v] { &within } else { &between };
            if coin.sample(rng) {
                edges.push((u, v));
            }
        }
    }
    Ok(Graph::from_sorted_unchecked(p.n, edges))
}

/// `G(n, d/n)`.
pub fn sample_er(n: usize, d: f64, stream: RandomStream) -> Result<Graph> {
    sample_er_with(n, d, &mut stream.rng())
}

pub fn sample_er_with<R: Rng + ?Sized>(n: usize, d: f64, rng: &mut R) -> Result<Graph> {
    if !(d >= 0.0) {
        return Err(Error::domain(format!("average degree {d} must be nonnegative")));
    }
    let coin = bernoulli(d / n.max(1) as f64)?;
    let mut edges = Vec::new();
    for u in 0..n {
        for v in u + 1..n {
            if coin.sample(rng) {
                edges.push((u, v));
            }
        }
    }
    Ok(Graph::from_sorted_unchecked(n, edges))
}

/// Sorts normalized pairs and returns the graph if it is simple.
fn simple_or_none(n: usize, mut pairs: Vec<(usize, usize)>) -> Option<Graph> {
    pairs.sort_unstable();
    if pairs.windows(2).any(|w| w[0] == w[1]) {
        return None;
    }
    Some(Graph::from_sorted_unchecked(n, pairs))
}

/// One draw of `m` uniform ordered pairs; `None` if the multigraph is not
/// simple.
pub fn er_fixed_m_attempt<R: Rng + ?Sized>(n: usize, m: usize, rng: &mut R) -> Option<Graph> {
    let mut pairs = Vec::with_capacity(m);
    for _ in 0..m {
        let u = rng.random_range(0..n);
        let v = rng.random_range(0..n);
        if u == v {
            return None;
        }
        pairs.push((u.min(v), u.max(v)));
    }
    simple_or_none(n, pairs)
}

fn max_simple_edges(n: usize) -> usize {
    n * n.saturating_sub(1) / 2
}

/// `G'(n, m)`: uniform over simple graphs with `m` edges, by rejection.
pub fn sample_er_fixed_m(n: usize, m: usize, stream: RandomStream) -> Result<Graph> {
    if m == 0 {
        return Ok(Graph::empty(n));
    }
    if m > max_simple_edges(n) {
        return Err(Error::SamplingFailure(0));
    }
    let mut rng = stream.rng();
    for _ in 0..REJECTION_BUDGET {
        if let Some(g) = er_fixed_m_attempt(n, m, &mut rng) {
            return Ok(g);
        }
    }
    Err(Error::SamplingFailure(REJECTION_BUDGET))
}

/// Edge-by-edge sampler for the planted model with a fixed edge count.
pub struct SbmFixedM {
    n: usize,
    m: usize,
    k: usize,
    cells: WeightedIndex<f64>,
    members: Vec<Vec<usize>>,
}

impl SbmFixedM {
    pub fn new(p: &ModelParams, sigma: &Partition, m: usize) -> Result<Self> {
        check_labels(p, sigma)?;
        if !sigma.is_balanced() {
            return Err(Error::Precondition("fixed-edge-count planted sampler needs a balanced partition".into()));
        }
        let gamma = p.connectivity_matrix()?;
        let cells = WeightedIndex::new(gamma.as_slice().iter().map(|g| g / p.k as f64))
            .map_err(|e| Error::domain(format!("group-pair weights: {e}")))?;
        let mut members = vec![Vec::with_capacity(p.n / p.k); p.k];
        for (v, &l) in sigma.labels().iter().enumerate() {
            members[l].push(v);
        }
        Ok(Self { n: p.n, m, k: p.k, cells, members })
    }

    /// One draw of `m` edges; `None` if the result is not simple.
    pub fn attempt<R: Rng + ?Sized>(&self, rng: &mut R) -> Option<Graph> {
        let mut pairs = Vec::with_capacity(self.m);
        for _ in 0..self.m {
            let cell = self.cells.sample(rng);
            let (r, s) = (cell / self.k, cell % self.k);
            let u = self.members[r][rng.random_range(0..self.members[r].len())];
            let v = self.members[s][rng.random_range(0..self.members[s].len())];
            if u == v {
                return None;
            }
            pairs.push((u.min(v), u.max(v)));
        }
        simple_or_none(self.n, pairs)
    }

    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> Result<Graph> {
        if self.m == 0 {
            return Ok(Graph::empty(self.n));
        }
        if self.m > max_simple_edges(self.n) {
            return Err(Error::SamplingFailure(0));
        }
        for _ in 0..REJECTION_BUDGET {
            if let Some(g) = self.attempt(rng) {
                return Ok(g);
            }
        }
        Err(Error::SamplingFailure(REJECTION_BUDGET))
    }
}

/// `G'_SBM(n, m)`: each edge picks an ordered group pair `(r, s)` with
/// probability `γ_rs / k`, then endpoints uniformly from `σ⁻¹(r) × σ⁻¹(s)`.
pub fn sample_sbm_fixed_m(p: &ModelParams, sigma: &Partition, m: usize, stream: RandomStream) -> Result<Graph> {
    SbmFixedM::new(p, sigma, m)?.sample(&mut stream.rng())
}
