//! Exact maximum-weight perfect assignment on a square matrix.
//!
//! Shortest augmenting path formulation of the Hungarian method with dual
//! potentials; `O(k^3)`.

use num_traits::{Bounded, Signed};

/// Returns `perm` with `perm[r]` the column assigned to row `r`, maximizing
/// `sum_r weights[r * dim + perm[r]]`.
pub fn max_weight_assignment<T>(weights: &[T], dim: usize) -> Vec<usize>
where
    T: Signed + Bounded + Copy + PartialOrd,
{
    assert_eq!(weights.len(), dim * dim, "weights must be a dim x dim matrix");
    if dim == 0 {
        return Vec::new();
    }
    let cost = |i: usize, j: usize| -weights[(i - 1) * dim + (j - 1)];
    let inf = T::max_value();

    // 1-indexed; row 0 / column 0 are sentinels.
    let mut u = vec![T::zero(); dim + 1];
    let mut v = vec![T::zero(); dim + 1];
    let mut owner = vec![0usize; dim + 1];
    let mut way = vec![0usize; dim + 1];

    for i in 1..=dim {
        owner[0] = i;
        let mut j0 = 0;
        let mut minv = vec![inf; dim + 1];
        let mut used = vec![false; dim + 1];
        loop {
            used[j0] = true;
            let i0 = owner[j0];
            let mut delta = inf;
            let mut j1 = 0;
            for j in 1..=dim {
                if used[j] {
                    continue;
                }
                let cur = cost(i0, j) - u[i0] - v[j];
                if cur < minv[j] {
                    minv[j] = cur;
                    way[j] = j0;
                }
                if minv[j] < delta {
                    delta = minv[j];
                    j1 = j;
                }
            }
            for j in 0..=dim {
                if used[j] {
                    u[owner[j]] = u[owner[j]] + delta;
                    v[j] = v[j] - delta;
                } else {
                    minv[j] = minv[j] - delta;
                }
            }
            j0 = j1;
            if owner[j0] == 0 {
                break;
            }
        }
        loop {
            let j1 = way[j0];
            owner[j0] = owner[j1];
            j0 = j1;
            if j0 == 0 {
                break;
            }
        }
    }

    let mut perm = vec![0; dim];
    for j in 1..=dim {
        perm[owner[j] - 1] = j - 1;
    }
    perm
}
