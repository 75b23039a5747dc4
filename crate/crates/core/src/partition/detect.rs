//! Exhaustive search for a good balanced partition.
//!
//! Balanced labelings are visited in lexicographic order of the label
//! vector and the first good one is returned. Partial labelings are pruned
//! once their edge counts can no longer land inside the acceptance window;
//! pruning removes only subtrees without good leaves, so the answer is the
//! same as a plain scan.

use rayon::prelude::*;

use super::good::GoodTest;
use super::Partition;
use crate::error::{Error, Result};
use crate::graph::Graph;
use crate::params::ModelParams;

/// Default cap on `k^n`, the size of the labeling space.
pub const DEFAULT_SEARCH_BUDGET: f64 = 1e9;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DetectOptions {
    /// Largest admissible `k^n`.
    pub budget: f64,
    /// Split the search over rayon workers. The result does not depend on it.
    pub parallel: bool,
}

impl Default for DetectOptions {
    fn default() -> Self {
        Self {
            budget: DEFAULT_SEARCH_BUDGET,
            parallel: false,
        }
    }
}

struct Search<'a> {
    k: usize,
    capacity: usize,
    lower: &'a [Vec<usize>],
    /// `edges_from[i]`: number of edges whose larger endpoint is `>= i`.
    edges_from: Vec<usize>,
    test: GoodTest,
}

#[derive(Clone)]
struct State {
    labels: Vec<usize>,
    sizes: Vec<usize>,
    m_in: usize,
    m_out: usize,
}

impl Search<'_> {
    /// Whether the counts after assigning vertices `< next` can still end
    /// inside the window.
    fn viable(&self, next: usize, m_in: usize, m_out: usize) -> bool {
        let t = &self.test;
        let rest = self.edges_from[next] as f64;
        let (m_in, m_out) = (m_in as f64, m_out as f64);
        m_in - t.mbar_in < t.threshold
            && m_out - t.mbar_out < t.threshold
            && t.mbar_in - (m_in + rest) < t.threshold
            && t.mbar_out - (m_out + rest) < t.threshold
    }

    /// Counts gained by giving vertex `v` the label `l`.
    fn gain(&self, state: &State, v: usize, l: usize) -> (usize, usize) {
        let same = self.lower[v].iter().filter(|&&u| state.labels[u] == l).count();
        (same, self.lower[v].len() - same)
    }

    fn dfs(&self, state: &mut State, v: usize) -> bool {
        let n = state.labels.len();
        if v == n {
            return self.test.accepts(state.m_in, state.m_out);
        }
        for l in 0..self.k {
            if state.sizes[l] == self.capacity {
                continue;
            }
            let (add_in, add_out) = self.gain(state, v, l);
            let (m_in, m_out) = (state.m_in + add_in, state.m_out + add_out);
            if !self.viable(v + 1, m_in, m_out) {
                continue;
            }
            state.labels[v] = l;
            state.sizes[l] += 1;
            let (saved_in, saved_out) = (state.m_in, state.m_out);
            state.m_in = m_in;
            state.m_out = m_out;
            if self.dfs(state, v + 1) {
                return true;
            }
            state.m_in = saved_in;
            state.m_out = saved_out;
            state.sizes[l] -= 1;
        }
        false
    }

    /// All viable states with the first `depth` vertices labeled, in
    /// lexicographic order.
    fn prefixes(&self, root: State, depth: usize) -> Vec<State> {
        let mut level = vec![root];
        for v in 0..depth {
            let mut next = Vec::new();
            for state in &level {
                for l in 0..self.k {
                    if state.sizes[l] == self.capacity {
                        continue;
                    }
                    let (add_in, add_out) = self.gain(state, v, l);
                    let (m_in, m_out) = (state.m_in + add_in, state.m_out + add_out);
                    if !self.viable(v + 1, m_in, m_out) {
                        continue;
                    }
                    let mut child = state.clone();
                    child.labels[v] = l;
                    child.sizes[l] += 1;
                    child.m_in = m_in;
                    child.m_out = m_out;
                    next.push(child);
                }
            }
            level = next;
        }
        level
    }
}

/// Returns the lexicographically first good balanced partition of `g`, or
/// `None` if there is none.
pub fn exhaustive_detect(g: &Graph, p: &ModelParams, options: DetectOptions) -> Result<Option<Partition>> {
    let (n, k) = (p.n, p.k);
    if g.n() != n {
        return Err(Error::Dimension(format!("graph on {} vertices, model with n = {n}", g.n())));
    }
    if n % k != 0 {
        return Err(Error::Divisibility { n, k });
    }
    let space = (k as f64).powi(n as i32);
    if space > options.budget {
        return Err(Error::Budget(format!(
            "{k}^{n} = {space:.3e} labelings exceeds the search budget {:.3e}",
            options.budget
        )));
    }

    let lower = g.lower_neighbours();
    let mut edges_from = vec![0; n + 1];
    for v in (0..n).rev() {
        edges_from[v] = edges_from[v + 1] + lower[v].len();
    }
    let search = Search {
        k,
        capacity: n / k,
        lower: &lower,
        edges_from,
        test: GoodTest::new(p),
    };
    let root = State {
        labels: vec![0; n],
        sizes: vec![0; k],
        m_in: 0,
        m_out: 0,
    };
    if !search.viable(0, 0, 0) {
        return Ok(None);
    }

    let found = if options.parallel && n > 4 {
        let depth = prefix_depth(n, k);
        search
            .prefixes(root, depth)
            .into_par_iter()
            .find_map_first(|mut state| search.dfs(&mut state, depth).then_some(state.labels))
    } else {
        let mut state = root;
        search.dfs(&mut state, 0).then_some(state.labels)
    };
    found.map(|labels| Partition::new(k, labels)).transpose()
}

/// Enough leading vertices to give a few hundred independent subtrees.
fn prefix_depth(n: usize, k: usize) -> usize {
    let mut depth = 0;
    let mut count = 1usize;
    while depth < n.saturating_sub(2) && count < 256 {
        depth += 1;
        count = count.saturating_mul(k);
    }
    depth
}
