use std::cmp::Ordering;

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::types::{euclidean, DataMatrix, Metric};

/// The `k` nearest other items of every row, ordered by `(distance, index)`.
#[derive(Debug, Clone, PartialEq)]
pub struct NeighborLists {
    k: usize,
    lists: Vec<Vec<(usize, f64)>>,
}

impl NeighborLists {
    pub fn k(&self) -> usize {
        self.k
    }

    pub fn len(&self) -> usize {
        self.lists.len()
    }

    pub fn is_empty(&self) -> bool {
        self.lists.is_empty()
    }

    /// `(neighbor, distance)` pairs of item `i`, nearest first.
    pub fn of(&self, i: usize) -> &[(usize, f64)] {
        &self.lists[i]
    }

    pub fn ids(&self, i: usize) -> impl Iterator<Item = usize> + '_ {
        self.lists[i].iter().map(|p| p.0)
    }

    /// Neighbor ids of `i` in ascending id order.
    pub fn sorted_ids(&self, i: usize) -> Vec<usize> {
        let mut v: Vec<usize> = self.ids(i).collect();
        v.sort_unstable();
        v
    }
}

#[inline]
pub(crate) fn by_distance_then_index(a: &(usize, f64), b: &(usize, f64)) -> Ordering {
    a.1.total_cmp(&b.1).then_with(|| a.0.cmp(&b.0))
}

pub(crate) fn check_k(k: usize, n: usize) -> Result<()> {
    if k == 0 || k >= n {
        return Err(Error::invalid(format!("k must satisfy 1 <= k < N (k={k}, N={n})")));
    }
    Ok(())
}

/// Exact k-nearest-neighbor search. Ties are resolved towards the smaller
/// index.
pub fn nearest_neighbors(data: &DataMatrix, k: usize, metric: Metric) -> Result<NeighborLists> {
    let n = data.n_rows();
    check_k(k, n)?;
    let norms: Vec<f64> = match metric {
        Metric::Euclidean => Vec::new(),
        Metric::Cosine => {
            let norms: Vec<f64> = (0..n)
                .map(|i| data.row(i).iter().map(|v| v * v).sum::<f64>().sqrt())
                .collect();
            if let Some(i) = norms.iter().position(|&v| v == 0.0) {
                return Err(Error::invalid(format!(
                    "cosine distance undefined for zero vector at row {i}"
                )));
            }
            norms
        }
    };
    let lists = (0..n)
        .into_par_iter()
        .map(|i| {
            let xi = data.row(i);
            let mut cand: Vec<(usize, f64)> = (0..n)
                .filter(|&j| j != i)
                .map(|j| {
                    let xj = data.row(j);
                    let d = match metric {
                        Metric::Euclidean => euclidean(xi, xj),
                        Metric::Cosine => {
                            let dot: f64 = xi.iter().zip(xj).map(|(a, b)| a * b).sum();
                            (1.0 - dot / (norms[i] * norms[j])).max(0.0)
                        }
                    };
                    (j, d)
                })
                .collect();
            if k < cand.len() {
                cand.select_nth_unstable_by(k - 1, by_distance_then_index);
                cand.truncate(k);
            }
            cand.sort_unstable_by(by_distance_then_index);
            cand
        })
        .collect();
    Ok(NeighborLists { k, lists })
}
