//! Quality analysis: agreement between graphs, and how well a layout keeps
//! the distances, neighborhoods and labels of its source.

use std::collections::HashSet;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graphalg::{betweenness_centrality, closeness_centrality, CentralityKind, PathCost};
use crate::relate::{by_distance_then_index, check_k, graph_from_neighbors, nearest_neighbors, NeighborLists};
use crate::types::{euclidean, DataMatrix, DistanceMatrix, Layout, Metric, QualityReport, RelationGraph};

/// How a shape graph is extracted from a layout. Only k-NN is supported.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ShapeGraphSpec {
    Knn { k: usize },
}

impl Default for ShapeGraphSpec {
    fn default() -> Self {
        ShapeGraphSpec::Knn { k: 10 }
    }
}

impl ShapeGraphSpec {
    pub fn build(&self, layout: &Layout) -> Result<RelationGraph> {
        match *self {
            ShapeGraphSpec::Knn { k } => shape_graph(layout, k),
        }
    }
}

fn layout_neighbors(layout: &Layout, k: usize) -> Result<NeighborLists> {
    nearest_neighbors(&layout.to_data()?, k, Metric::Euclidean)
}

/// Union-symmetrized Euclidean k-NN graph over the layout coordinates.
pub fn shape_graph(layout: &Layout, k: usize) -> Result<RelationGraph> {
    graph_from_neighbors(&layout_neighbors(layout, k)?)
}

/// Jaccard index of the two edge sets, ignoring weights.
pub fn faithfulness(g1: &RelationGraph, g2: &RelationGraph) -> Result<f64> {
    if g1.n_vertices() != g2.n_vertices() {
        return Err(Error::invalid(format!(
            "graphs have {} and {} vertices",
            g1.n_vertices(),
            g2.n_vertices()
        )));
    }
    // both edge lists are sorted by key, so a merge counts the intersection
    let (a, b) = (g1.edges(), g2.edges());
    let (mut i, mut j, mut common) = (0, 0, 0usize);
    while i < a.len() && j < b.len() {
        match a[i].key().cmp(&b[j].key()) {
            std::cmp::Ordering::Less => i += 1,
            std::cmp::Ordering::Greater => j += 1,
            std::cmp::Ordering::Equal => {
                common += 1;
                i += 1;
                j += 1;
            }
        }
    }
    let union = a.len() + b.len() - common;
    Ok(if union == 0 { 1.0 } else { common as f64 / union as f64 })
}

/// Kruskal stress-1 of layout distances against `d`.
pub fn stress(layout: &Layout, d: &DistanceMatrix) -> Result<f64> {
    let n = d.len();
    if layout.n_points() != n {
        return Err(Error::invalid("layout and distance matrix differ in size"));
    }
    let (num, den) = (0..n)
        .into_par_iter()
        .map(|i| {
            ((i + 1)..n).fold((0.0, 0.0), |(num, den), j| {
                let w = d.get(i, j);
                let diff = layout.distance(i, j) - w;
                (num + diff * diff, den + w * w)
            })
        })
        .collect::<Vec<(f64, f64)>>()
        .into_iter()
        .fold((0.0, 0.0), |a, b| (a.0 + b.0, a.1 + b.1));
    if den == 0.0 {
        return Err(Error::invalid("all source distances are zero"));
    }
    Ok((num / den).sqrt())
}

fn check_sizes(data: &DataMatrix, layout: &Layout) -> Result<()> {
    if data.n_rows() != layout.n_points() {
        return Err(Error::invalid("data and layout differ in size"));
    }
    Ok(())
}

/// Mean fraction of each item's `k` data-space neighbors that are also
/// among its `k` layout neighbors.
pub fn neighborhood_preservation(data: &DataMatrix, layout: &Layout, k: usize) -> Result<f64> {
    check_sizes(data, layout)?;
    let high = nearest_neighbors(data, k, Metric::Euclidean)?;
    let low = layout_neighbors(layout, k)?;
    let n = data.n_rows();
    let total: f64 = (0..n)
        .map(|i| {
            let h: HashSet<usize> = high.ids(i).collect();
            low.ids(i).filter(|j| h.contains(j)).count() as f64 / k as f64
        })
        .sum();
    Ok(total / n as f64)
}

/// Trustworthiness with the Venna-Kaski normalization. Ranks are 1-based
/// positions in the data-space `(distance, index)` order.
pub fn trustworthiness(data: &DataMatrix, layout: &Layout, k: usize) -> Result<f64> {
    check_sizes(data, layout)?;
    let n = data.n_rows();
    check_k(k, n)?;
    if 2 * k >= n {
        return Err(Error::invalid(format!("trustworthiness needs k < N/2 (k={k}, N={n})")));
    }
    let low = layout_neighbors(layout, k)?;
    let penalty: f64 = (0..n)
        .into_par_iter()
        .map(|i| {
            let mut order: Vec<(usize, f64)> = (0..n)
                .filter(|&j| j != i)
                .map(|j| (j, euclidean(data.row(i), data.row(j))))
                .collect();
            order.sort_by(by_distance_then_index);
            let mut rank = vec![0usize; n];
            for (r, &(j, _)) in order.iter().enumerate() {
                rank[j] = r + 1;
            }
            low.ids(i)
                .filter(|&j| rank[j] > k)
                .map(|j| (rank[j] - k) as f64)
                .sum::<f64>()
        })
        .collect::<Vec<f64>>()
        .iter()
        .sum();
    let (nf, kf) = (n as f64, k as f64);
    Ok(1.0 - 2.0 / (nf * kf * (2.0 * nf - 3.0 * kf - 1.0)) * penalty)
}

/// Per-item fraction of the `k` layout neighbors that share its label.
pub fn neighbor_hit_per_node(layout: &Layout, labels: Option<&[i64]>, k: usize) -> Result<Vec<f64>> {
    let labels = labels.ok_or_else(|| Error::invalid("neighbor hit needs labels"))?;
    if labels.len() != layout.n_points() {
        return Err(Error::invalid("label count differs from layout size"));
    }
    let nn = layout_neighbors(layout, k)?;
    Ok((0..labels.len())
        .map(|i| nn.ids(i).filter(|&j| labels[j] == labels[i]).count() as f64 / k as f64)
        .collect())
}

pub fn neighbor_hit(layout: &Layout, labels: Option<&[i64]>, k: usize) -> Result<f64> {
    let per = neighbor_hit_per_node(layout, labels, k)?;
    Ok(per.iter().sum::<f64>() / per.len() as f64)
}

/// Computes a centrality and stores it in `report.per_node` under its kind
/// name (`closeness` or `betweenness`).
pub fn centrality_overlay(
    g: &RelationGraph,
    kind: CentralityKind,
    cost: PathCost,
    report: &mut QualityReport,
) -> Result<Vec<f64>> {
    let (name, c) = match kind {
        CentralityKind::Closeness => ("closeness", closeness_centrality(g, cost)?),
        CentralityKind::Betweenness => ("betweenness", betweenness_centrality(g, cost, true)?),
    };
    report.insert_per_node(name, g.n_vertices(), c.values.clone())?;
    Ok(c.values)
}
