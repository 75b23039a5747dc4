//! Exact likelihood ratio `P(G)/Q(G)` between the planted model (uniform
//! `σ` over all `k^n` labelings) and `G(n, d/n)`, and a Monte Carlo
//! estimate of its second moment under `Q`.
//!
//! `P(G|σ)/Q(G)` depends on `σ` only through the group sizes and the number
//! of within-group edges. The sum over labelings is therefore carried out
//! by enumerating labelings of each connected component separately,
//! convolving the per-component tallies of `(group sizes, within edges)`,
//! and placing isolated vertices by multinomial counting. Every tally is an
//! exact integer count of labelings, so the result equals the direct
//! `k^n`-term sum.

use std::collections::BTreeMap;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::Graph;
use crate::graphgen::sample_er;
use crate::params::{check_k, check_lambda, ModelParams};
use crate::rng::RandomStream;

/// Cap on `k^n` for exact likelihood ratios.
pub const LABELING_BUDGET: f64 = 1e8;
/// Cap on `n · trials` for one estimate.
pub const WORK_BUDGET: f64 = 1e9;

/// `(group sizes, within-group edges)` mapped to the number of labelings.
type Tally = BTreeMap<(Vec<usize>, usize), f64>;

fn components(g: &Graph) -> Vec<Vec<usize>> {
    let adj = g.adjacency();
    let mut seen = vec![false; g.n()];
    let mut out = Vec::new();
    for s in 0..g.n() {
        if seen[s] || adj[s].is_empty() {
            continue;
        }
        seen[s] = true;
        let mut comp = vec![s];
        let mut i = 0;
        while i < comp.len() {
            for &w in &adj[comp[i]] {
                if !seen[w] {
                    seen[w] = true;
                    comp.push(w);
                }
            }
            i += 1;
        }
        comp.sort_unstable();
        out.push(comp);
    }
    out
}

fn component_tally(comp: &[usize], g: &Graph, k: usize) -> Tally {
    let index: BTreeMap<usize, usize> = comp.iter().enumerate().map(|(i, &v)| (v, i)).collect();
    let local_edges: Vec<(usize, usize)> = g
        .edges()
        .iter()
        .filter_map(|(u, v)| Some((*index.get(u)?, *index.get(v)?)))
        .collect();
    let s = comp.len();
    let mut labels = vec![0usize; s];
    let mut tally = Tally::new();
    loop {
        let mut sizes = vec![0; k];
        for &l in &labels {
            sizes[l] += 1;
        }
        let within = local_edges.iter().filter(|&&(a, b)| labels[a] == labels[b]).count();
        *tally.entry((sizes, within)).or_insert(0.0) += 1.0;
        // next labeling in odometer order
        let mut i = 0;
        loop {
            if i == s {
                return tally;
            }
            labels[i] += 1;
            if labels[i] < k {
                break;
            }
            labels[i] = 0;
            i += 1;
        }
    }
}

fn convolve(a: &Tally, b: &Tally) -> Tally {
    let mut out = Tally::new();
    for ((sa, wa), ca) in a {
        for ((sb, wb), cb) in b {
            let sizes: Vec<usize> = sa.iter().zip(sb).map(|(x, y)| x + y).collect();
            *out.entry((sizes, wa + wb)).or_insert(0.0) += ca * cb;
        }
    }
    out
}

/// Tally for `free` vertices without edges: multinomial counts per size vector.
fn isolated_tally(free: usize, k: usize) -> Tally {
    fn rec(part: &mut Vec<usize>, left: usize, k: usize, coef: f64, out: &mut Tally) {
        if part.len() == k - 1 {
            part.push(left);
            out.insert((part.clone(), 0), coef);
            part.pop();
            return;
        }
        let mut c = coef;
        for take in 0..=left {
            if take > 0 {
                // C(left, take) built incrementally
                c *= (left - take + 1) as f64 / take as f64;
            }
            part.push(take);
            rec(part, left - take, k, c.round(), out);
            part.pop();
        }
    }
    let mut out = Tally::new();
    rec(&mut Vec::with_capacity(k), free, k, 1.0, &mut out);
    out
}

fn check_ratio_domain(p: &ModelParams) -> Result<()> {
    p.check_probabilities()?;
    let d = p.average_degree();
    if d >= p.n as f64 {
        return Err(Error::domain(format!("null-model edge probability d/n = {} must be below 1", d / p.n as f64)));
    }
    let space = (p.k as f64).powi(p.n as i32);
    if space > LABELING_BUDGET {
        return Err(Error::Budget(format!("{}^{} labelings exceeds {LABELING_BUDGET:e}", p.k, p.n)));
    }
    Ok(())
}

/// `P(G) / Q(G)` with `P(G) = k^{-n} Σ_σ P(G|σ)` summed exactly.
pub fn likelihood_ratio(g: &Graph, p: &ModelParams) -> Result<f64> {
    if g.n() != p.n {
        return Err(Error::Dimension(format!("graph on {} vertices, model with n = {}", g.n(), p.n)));
    }
    check_ratio_domain(p)?;
    let (n, k) = (p.n, p.k);
    let d = p.average_degree();
    if d == 0.0 {
        // both models put all mass on the empty graph
        return Ok(if g.edge_count() == 0 { 1.0 } else { f64::NAN });
    }

    let comps = components(g);
    let covered: usize = comps.iter().map(Vec::len).sum();
    let mut tally = isolated_tally(n - covered, k);
    for comp in &comps {
        tally = convolve(&tally, &component_tally(comp, g, k));
    }

    let nf = n as f64;
    let null_miss = 1.0 - d / nf;
    let (edge_in, edge_out) = (p.c_in / d, p.c_out / d);
    let (miss_in, miss_out) = ((1.0 - p.c_in / nf) / null_miss, (1.0 - p.c_out / nf) / null_miss);
    let m = g.edge_count();
    let all_pairs = n * (n - 1) / 2;
    let mut total = 0.0;
    for ((sizes, within), count) in &tally {
        let pairs_in: usize = sizes.iter().map(|&s| s * s.saturating_sub(1) / 2).sum();
        let between = m - within;
        let weight = edge_in.powi(*within as i32)
            * edge_out.powi(between as i32)
            * miss_in.powi((pairs_in - within) as i32)
            * miss_out.powi((all_pairs - pairs_in - between) as i32);
        total += count * weight;
    }
    Ok(total / (k as f64).powi(n as i32))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SecondMomentEstimate {
    /// Empirical mean of `(P/Q)²` over graphs drawn from `Q`.
    pub mean: f64,
    pub std_error: f64,
    pub trials: usize,
}

/// Monte Carlo estimate of `E_Q[(P/Q)²]`. Trial `t` draws its graph from
/// `stream.child(t)`; the reduction runs in trial order.
pub fn second_moment_estimate(
    k: usize,
    d: f64,
    lambda: f64,
    n: usize,
    trials: usize,
    stream: RandomStream,
) -> Result<SecondMomentEstimate> {
    check_k(k)?;
    let lambda = check_lambda(k, lambda)?;
    if !(d >= 0.0) || !d.is_finite() {
        return Err(Error::domain(format!("d = {d} must be a nonnegative real")));
    }
    if trials == 0 {
        return Err(Error::domain("need at least one trial"));
    }
    if n as f64 * trials as f64 > WORK_BUDGET {
        return Err(Error::Budget(format!("n * trials = {} exceeds {WORK_BUDGET:e}", n * trials)));
    }
    let kf = k as f64;
    let p = ModelParams::new(k, n, (d * (1.0 + (kf - 1.0) * lambda)).max(0.0), (d * (1.0 - lambda)).max(0.0))?;
    check_ratio_domain(&p)?;

    let squares = (0..trials)
        .into_par_iter()
        .map(|t| {
            let g = sample_er(n, d, stream.child(t as u64))?;
            let r = likelihood_ratio(&g, &p)?;
            Ok(r * r)
        })
        .collect::<Result<Vec<f64>>>()?;
    let tf = trials as f64;
    let mean = squares.iter().sum::<f64>() / tf;
    let var = if trials > 1 {
        squares.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (tf - 1.0)
    } else {
        0.0
    };
    Ok(SecondMomentEstimate {
        mean,
        std_error: (var / tf).sqrt(),
        trials,
    })
}
