//! Topology extraction: relationship graphs built from data, and transforms
//! between them.

mod knn;
mod perplexity;
mod umap;

pub use knn::{nearest_neighbors, NeighborLists};
pub use perplexity::{
    conditional_probabilities, conditional_row, perplexity_calibrate, PerplexityCalibration,
    RowCalibration, ENTROPY_TOLERANCE, MAX_STEPS, SIGMA_MAX, SIGMA_MIN,
};
pub use umap::{fuzzy_graph_from_neighbors, fuzzy_union, local_scale, membership, umap_fuzzy_graph, LocalScale};

pub(crate) use knn::{by_distance_then_index, check_k};

use crate::error::{Error, Result};
use crate::graphalg::{all_pairs_shortest_paths, minimum_spanning_tree, require_connected, PathCost};
use crate::types::{distance_matrix, graph_from_matrix, DataMatrix, DistanceMatrix, Metric, RelationGraph, Semantics};

/// Threshold below which symmetrized t-SNE probabilities are dropped.
pub const DEFAULT_PRUNE_EPSILON: f64 = 1e-8;

/// Complete graph of pairwise dissimilarities.
pub fn pairwise_distance_graph(data: &DataMatrix, metric: Metric) -> Result<RelationGraph> {
    graph_from_matrix(&distance_matrix(data, metric)?, Semantics::Dissimilarity)
}

/// Edges from each item to its `k` nearest items, symmetrized by union and
/// weighted by distance.
pub fn knn_graph(data: &DataMatrix, k: usize, metric: Metric) -> Result<RelationGraph> {
    let nn = nearest_neighbors(data, k, metric)?;
    graph_from_neighbors(&nn)
}

pub fn graph_from_neighbors(nn: &NeighborLists) -> Result<RelationGraph> {
    let mut edges: Vec<(usize, usize, f64)> = Vec::with_capacity(nn.len() * nn.k());
    for i in 0..nn.len() {
        for &(j, d) in nn.of(i) {
            edges.push((i.min(j), i.max(j), d));
        }
    }
    edges.sort_by_key(|e| (e.0, e.1));
    edges.dedup_by(|a, b| a.0 == b.0 && a.1 == b.1);
    RelationGraph::new(nn.len(), Semantics::Dissimilarity, edges)
}

/// `w' = 1 - w / w_max`, turning distances into similarities in `[0, 1]`.
pub fn similarity_flip(g: &RelationGraph) -> Result<RelationGraph> {
    if g.n_edges() == 0 {
        return Err(Error::invalid("similarity flip needs at least one edge"));
    }
    if g.edges().iter().any(|e| e.w < 0.0) {
        return Err(Error::invalid("similarity flip needs nonnegative weights"));
    }
    let w_max = g.max_weight().unwrap_or(0.0);
    if w_max <= 0.0 {
        return Err(Error::invalid("all edge weights are zero; cannot normalize by w_max"));
    }
    g.map_weights(Semantics::Similarity, |e| (1.0 - e.w / w_max).clamp(0.0, 1.0))
}

/// Shared-nearest-neighbor count `|kNN(i) ∩ kNN(j)|` of two items.
pub fn shared_neighbor_count(nn: &NeighborLists, i: usize, j: usize) -> usize {
    let a = nn.sorted_ids(i);
    let b = nn.sorted_ids(j);
    let (mut x, mut y, mut count) = (0, 0, 0);
    while x < a.len() && y < b.len() {
        match a[x].cmp(&b[y]) {
            std::cmp::Ordering::Less => x += 1,
            std::cmp::Ordering::Greater => y += 1,
            std::cmp::Ordering::Equal => {
                count += 1;
                x += 1;
                y += 1;
            }
        }
    }
    count
}

/// k-NN graph edges reweighted by shared-neighbor counts. Neighbor sets
/// exclude the item itself.
pub fn snn_reweight(data: &DataMatrix, k: usize, metric: Metric) -> Result<RelationGraph> {
    let nn = nearest_neighbors(data, k, metric)?;
    let knn = graph_from_neighbors(&nn)?;
    knn.map_weights(Semantics::Similarity, |e| {
        shared_neighbor_count(&nn, e.i as usize, e.j as usize) as f64
    })
}

/// Symmetrized joint probabilities `(p_{j|i} + p_{i|j}) / 2` over a dense
/// distance matrix, keeping pairs with `p >= prune_epsilon` and `p > 0`.
pub fn tsne_probability_graph_from_distances(
    d: &DistanceMatrix,
    perplexity: f64,
    prune_epsilon: f64,
) -> Result<(RelationGraph, PerplexityCalibration)> {
    if prune_epsilon.is_nan() || prune_epsilon < 0.0 {
        return Err(Error::invalid("prune_epsilon must be >= 0"));
    }
    let n = d.len();
    let (p, calibration) = conditional_probabilities(d, perplexity)?;
    let mut edges = Vec::new();
    for i in 0..n {
        for j in (i + 1)..n {
            let w = 0.5 * (p[i * n + j] + p[j * n + i]);
            if w > 0.0 && w >= prune_epsilon {
                edges.push((i, j, w.min(1.0)));
            }
        }
    }
    Ok((RelationGraph::new(n, Semantics::Probability, edges)?, calibration))
}

pub fn tsne_probability_graph(
    data: &DataMatrix,
    perplexity: f64,
    prune_epsilon: f64,
    metric: Metric,
) -> Result<RelationGraph> {
    let d = distance_matrix(data, metric)?;
    tsne_probability_graph_from_distances(&d, perplexity, prune_epsilon).map(|r| r.0)
}

/// Complete graph of shortest-path lengths through `knn`.
pub fn geodesic_complete_graph(knn: &RelationGraph) -> Result<RelationGraph> {
    if knn.semantics() != Semantics::Dissimilarity {
        return Err(Error::invalid("geodesic transform needs a dissimilarity graph"));
    }
    require_connected(knn)?;
    let dist = all_pairs_shortest_paths(knn, PathCost::Weight)?;
    // the two search directions can differ in the last bit; keep the shorter
    RelationGraph::complete(knn.n_vertices(), Semantics::Dissimilarity, |i, j| {
        dist[i][j].min(dist[j][i])
    })
}

/// Minimum spanning tree of a dissimilarity graph, as a graph.
pub fn mst_backbone(g: &RelationGraph) -> Result<RelationGraph> {
    if g.semantics() != Semantics::Dissimilarity {
        return Err(Error::invalid("MST backbone needs a dissimilarity graph"));
    }
    let tree = minimum_spanning_tree(g)?;
    RelationGraph::new(
        g.n_vertices(),
        g.semantics(),
        tree.into_iter().map(|e| (e.i as usize, e.j as usize, e.w)),
    )
}

/// Strengthens the backbone edges of `g` by `factor`: dissimilarities are
/// divided by it, similarities multiplied (probabilities capped at 1).
pub fn backbone_strengthen(g: &RelationGraph, backbone: &RelationGraph, factor: f64) -> Result<RelationGraph> {
    if !(factor > 0.0 && factor.is_finite()) {
        return Err(Error::invalid("strengthening factor must be positive"));
    }
    if backbone.n_vertices() != g.n_vertices() {
        return Err(Error::invalid("backbone and graph have different vertex counts"));
    }
    if let Some(e) = backbone.edges().iter().find(|e| !g.has_edge(e.i as usize, e.j as usize)) {
        return Err(Error::invalid(format!(
            "backbone edge ({}, {}) missing from graph",
            e.i, e.j
        )));
    }
    let semantics = g.semantics();
    g.map_weights(semantics, |e| {
        if !backbone.has_edge(e.i as usize, e.j as usize) {
            return e.w;
        }
        match semantics {
            Semantics::Dissimilarity => e.w / factor,
            Semantics::Similarity => e.w * factor,
            Semantics::Probability => (e.w * factor).min(1.0),
        }
    })
}
