//! Fuzzy neighborhood graph in the style of UMAP.
//!
//! `n_neighbors` counts the item itself, so each item contributes
//! memberships to its `n_neighbors - 1` nearest other items. Local
//! connectivity is fixed at one neighbor.

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::relate::knn::{nearest_neighbors, NeighborLists};
use crate::types::{DataMatrix, Metric, RelationGraph, Semantics};

const BANDWIDTH_STEPS: usize = 64;
const BANDWIDTH_TOLERANCE: f64 = 1e-5;

/// Per-item offset and bandwidth of the membership kernel.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LocalScale {
    /// Distance to the nearest non-identical neighbor.
    pub rho: f64,
    pub sigma: f64,
    /// False when the bandwidth search failed and `sigma` fell back to the
    /// mean neighbor distance.
    pub converged: bool,
}

fn membership_sum(dists: &[f64], rho: f64, sigma: f64) -> f64 {
    dists.iter().map(|&d| (-(d - rho).max(0.0) / sigma).exp()).sum()
}

/// Solves `sum_j exp(-max(0, d_j - rho) / sigma) = log2(n_neighbors)`.
pub fn local_scale(neighbor_dists: &[f64], n_neighbors: usize) -> LocalScale {
    let rho = neighbor_dists
        .iter()
        .copied()
        .find(|&d| d > 0.0)
        .unwrap_or(0.0);
    let target = (n_neighbors as f64).log2();
    let (mut lo, mut hi, mut mid) = (0.0f64, f64::INFINITY, 1.0f64);
    let mut converged = false;
    for _ in 0..BANDWIDTH_STEPS {
        let s = membership_sum(neighbor_dists, rho, mid);
        if (s - target).abs() < BANDWIDTH_TOLERANCE {
            converged = true;
            break;
        }
        if s > target {
            hi = mid;
            mid = 0.5 * (lo + hi);
        } else {
            lo = mid;
            mid = if hi.is_infinite() { mid * 2.0 } else { 0.5 * (lo + hi) };
        }
    }
    if converged && mid > 0.0 && mid.is_finite() {
        return LocalScale {
            rho,
            sigma: mid,
            converged,
        };
    }
    let mean = neighbor_dists.iter().sum::<f64>() / neighbor_dists.len().max(1) as f64;
    LocalScale {
        rho,
        sigma: if mean > 0.0 { mean } else { 1.0 },
        converged: false,
    }
}

/// Directed membership of a neighbor at distance `d`.
#[inline]
pub fn membership(d: f64, scale: &LocalScale) -> f64 {
    (-(d - scale.rho).max(0.0) / scale.sigma).exp()
}

/// Probabilistic t-conorm used to merge the two directed memberships.
#[inline]
pub fn fuzzy_union(a: f64, b: f64) -> f64 {
    a + b - a * b
}

pub fn umap_fuzzy_graph(data: &DataMatrix, n_neighbors: usize, metric: Metric) -> Result<RelationGraph> {
    let n = data.n_rows();
    if n_neighbors < 2 || n_neighbors >= n {
        return Err(Error::invalid(format!(
            "n_neighbors must satisfy 2 <= n_neighbors < N (got {n_neighbors}, N={n})"
        )));
    }
    let nn = nearest_neighbors(data, n_neighbors - 1, metric)?;
    let (graph, scales) = fuzzy_graph_from_neighbors(&nn, n_neighbors)?;
    let fallbacks = scales.iter().filter(|s| !s.converged).count();
    if fallbacks > 0 {
        log::warn!("bandwidth search fell back to mean neighbor distance for {fallbacks} items");
    }
    Ok(graph)
}

pub fn fuzzy_graph_from_neighbors(
    nn: &NeighborLists,
    n_neighbors: usize,
) -> Result<(RelationGraph, Vec<LocalScale>)> {
    let n = nn.len();
    let scales: Vec<LocalScale> = (0..n)
        .into_par_iter()
        .map(|i| {
            let d: Vec<f64> = nn.of(i).iter().map(|p| p.1).collect();
            local_scale(&d, n_neighbors)
        })
        .collect();
    let mut directed: Vec<((usize, usize), f64)> = Vec::with_capacity(n * nn.k());
    for (i, scale) in scales.iter().enumerate() {
        for &(j, d) in nn.of(i) {
            directed.push(((i, j), membership(d, scale)));
        }
    }
    let mut merged: std::collections::BTreeMap<(usize, usize), (f64, f64)> = Default::default();
    for ((i, j), w) in directed {
        let entry = merged.entry((i.min(j), i.max(j))).or_insert((0.0, 0.0));
        if i < j {
            entry.0 = w;
        } else {
            entry.1 = w;
        }
    }
    let edges = merged
        .into_iter()
        .map(|((i, j), (a, b))| (i, j, fuzzy_union(a, b).min(1.0)))
        .filter(|e| e.2 > 0.0);
    Ok((RelationGraph::new(n, Semantics::Probability, edges)?, scales))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn nearest_neighbor_has_full_membership() {
        let d = [0.7, 1.1, 1.5, 2.5];
        let s = local_scale(&d, 5);
        assert!(s.converged);
        assert_eq!(membership(d[0], &s), 1.0);
        let total: f64 = d.iter().map(|&x| membership(x, &s)).sum();
        assert!((total - 5f64.log2()).abs() < 1e-5);
    }

    #[test]
    fn union_absorbs_one() {
        for x in [0.0, 0.3, 0.99, 1.0] {
            assert_eq!(fuzzy_union(1.0, x), 1.0);
            assert_eq!(fuzzy_union(x, 0.0), x);
        }
    }

    #[test]
    fn duplicate_neighborhood_falls_back() {
        let d = [0.5, 0.5, 0.5, 0.5];
        // sum is 4 for every sigma, target log2(5) < 4
        let s = local_scale(&d, 5);
        assert!(!s.converged);
        assert_eq!(s.sigma, 0.5);
    }

    #[test]
    fn graph_weights_in_unit_interval() {
        let rows: Vec<[f64; 2]> = (0..20).map(|i| [(i as f64 * 0.7).sin(), (i as f64 * 1.3).cos()]).collect();
        let data = DataMatrix::from_rows(&rows).unwrap();
        let g = umap_fuzzy_graph(&data, 4, Metric::Euclidean).unwrap();
        assert!(g.edges().iter().all(|e| e.w > 0.0 && e.w <= 1.0));
        assert!(umap_fuzzy_graph(&data, 1, Metric::Euclidean).is_err());
        assert!(umap_fuzzy_graph(&data, 20, Metric::Euclidean).is_err());
    }
}
