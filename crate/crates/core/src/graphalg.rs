//! Shortest paths, components, spanning trees and centralities.
//!
//! Similarity and probability graphs do not carry path lengths directly;
//! every routine that walks paths takes an explicit [`PathCost`].

use std::cmp::Ordering;
use std::collections::{BinaryHeap, VecDeque};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::types::{Adjacency, Edge, RelationGraph};

/// How an edge weight is turned into a traversal cost.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PathCost {
    /// The weight itself (dissimilarity graphs).
    Weight,
    /// Every edge costs 1.
    #[default]
    Hops,
    /// `1 - w`, for similarities and probabilities in `[0, 1]`.
    OneMinusWeight,
}

impl PathCost {
    #[inline]
    fn apply(self, w: f64) -> f64 {
        match self {
            PathCost::Weight => w,
            PathCost::Hops => 1.0,
            PathCost::OneMinusWeight => 1.0 - w,
        }
    }
}

/// Per-vertex cost lists aligned with an [`Adjacency`].
struct CostGraph {
    adj: Adjacency,
    costs: Vec<Vec<f64>>,
}

impl CostGraph {
    fn new(g: &RelationGraph, cost: PathCost) -> Result<Self> {
        let adj = g.adjacency();
        let mut costs = Vec::with_capacity(g.n_vertices());
        for v in 0..g.n_vertices() {
            let row: Vec<f64> = adj.weights(v).iter().map(|&w| cost.apply(w)).collect();
            if let Some(c) = row.iter().find(|c| **c < 0.0) {
                return Err(Error::invalid(format!(
                    "negative path cost {c} at vertex {v} (cost mode {cost:?})"
                )));
            }
            costs.push(row);
        }
        Ok(Self { adj, costs })
    }

    fn iter(&self, v: usize) -> impl Iterator<Item = (usize, f64)> + '_ {
        self.adj
            .neighbors(v)
            .iter()
            .zip(&self.costs[v])
            .map(|(&u, &c)| (u as usize, c))
    }
}

#[derive(Clone, Copy, PartialEq)]
struct HeapItem {
    dist: f64,
    vertex: usize,
}

impl Eq for HeapItem {}

impl Ord for HeapItem {
    fn cmp(&self, other: &Self) -> Ordering {
        // min-heap on distance, ties by vertex id
        other
            .dist
            .total_cmp(&self.dist)
            .then_with(|| other.vertex.cmp(&self.vertex))
    }
}

impl PartialOrd for HeapItem {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// Dijkstra distances from `source` using raw edge weights; unreachable
/// vertices get `f64::INFINITY`.
pub fn single_source_shortest_paths(g: &RelationGraph, source: usize) -> Result<Vec<f64>> {
    shortest_paths_with(g, source, PathCost::Weight)
}

pub fn shortest_paths_with(g: &RelationGraph, source: usize, cost: PathCost) -> Result<Vec<f64>> {
    if source >= g.n_vertices() {
        return Err(Error::invalid(format!("source {source} out of range")));
    }
    let cg = CostGraph::new(g, cost)?;
    Ok(dijkstra(&cg, source))
}

fn dijkstra(cg: &CostGraph, source: usize) -> Vec<f64> {
    let n = cg.adj.n_vertices();
    let mut dist = vec![f64::INFINITY; n];
    let mut heap = BinaryHeap::new();
    dist[source] = 0.0;
    heap.push(HeapItem {
        dist: 0.0,
        vertex: source,
    });
    while let Some(HeapItem { dist: d, vertex: v }) = heap.pop() {
        if d > dist[v] {
            continue;
        }
        for (u, c) in cg.iter(v) {
            let nd = d + c;
            if nd < dist[u] {
                dist[u] = nd;
                heap.push(HeapItem { dist: nd, vertex: u });
            }
        }
    }
    dist
}

fn bfs(adj: &Adjacency, source: usize) -> Vec<f64> {
    let n = adj.n_vertices();
    let mut dist = vec![f64::INFINITY; n];
    let mut queue = VecDeque::new();
    dist[source] = 0.0;
    queue.push_back(source);
    while let Some(v) = queue.pop_front() {
        let next = dist[v] + 1.0;
        for &u in adj.neighbors(v) {
            let u = u as usize;
            if dist[u].is_infinite() {
                dist[u] = next;
                queue.push_back(u);
            }
        }
    }
    dist
}

/// Row `s` holds the distances from vertex `s`.
pub fn all_pairs_shortest_paths(g: &RelationGraph, cost: PathCost) -> Result<Vec<Vec<f64>>> {
    let cg = CostGraph::new(g, cost)?;
    let n = g.n_vertices();
    Ok((0..n)
        .into_par_iter()
        .map(|s| {
            if cost == PathCost::Hops {
                bfs(&cg.adj, s)
            } else {
                dijkstra(&cg, s)
            }
        })
        .collect())
}

/// Component id per vertex, numbered from 0 in order of each component's
/// smallest vertex.
pub fn connected_components(g: &RelationGraph) -> Vec<usize> {
    let n = g.n_vertices();
    let adj = g.adjacency();
    let mut comp = vec![usize::MAX; n];
    let mut next = 0;
    let mut stack = Vec::new();
    for start in 0..n {
        if comp[start] != usize::MAX {
            continue;
        }
        comp[start] = next;
        stack.push(start);
        while let Some(v) = stack.pop() {
            for &u in adj.neighbors(v) {
                let u = u as usize;
                if comp[u] == usize::MAX {
                    comp[u] = next;
                    stack.push(u);
                }
            }
        }
        next += 1;
    }
    comp
}

pub fn n_components(g: &RelationGraph) -> usize {
    connected_components(g).into_iter().max().map_or(0, |m| m + 1)
}

pub(crate) fn require_connected(g: &RelationGraph) -> Result<()> {
    let c = n_components(g);
    if c > 1 {
        Err(Error::Disconnected { components: c })
    } else {
        Ok(())
    }
}

struct DisjointSet {
    parent: Vec<usize>,
    rank: Vec<u8>,
}

impl DisjointSet {
    fn new(n: usize) -> Self {
        Self {
            parent: (0..n).collect(),
            rank: vec![0; n],
        }
    }

    fn find(&mut self, mut x: usize) -> usize {
        while self.parent[x] != x {
            self.parent[x] = self.parent[self.parent[x]];
            x = self.parent[x];
        }
        x
    }

    fn union(&mut self, a: usize, b: usize) -> bool {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra == rb {
            return false;
        }
        match self.rank[ra].cmp(&self.rank[rb]) {
            Ordering::Less => self.parent[ra] = rb,
            Ordering::Greater => self.parent[rb] = ra,
            Ordering::Equal => {
                self.parent[rb] = ra;
                self.rank[ra] += 1;
            }
        }
        true
    }
}

/// Kruskal's algorithm. Ties are broken by `(weight, i, j)`, so the result
/// does not depend on how the edges were inserted.
pub fn minimum_spanning_tree(g: &RelationGraph) -> Result<Vec<Edge>> {
    let n = g.n_vertices();
    let mut order: Vec<&Edge> = g.edges().iter().collect();
    order.sort_by(|a, b| a.w.total_cmp(&b.w).then_with(|| a.key().cmp(&b.key())));
    let mut ds = DisjointSet::new(n);
    let mut tree = Vec::with_capacity(n.saturating_sub(1));
    for e in order {
        if ds.union(e.i as usize, e.j as usize) {
            tree.push(*e);
            if tree.len() + 1 == n {
                break;
            }
        }
    }
    if tree.len() + 1 != n && n > 0 {
        return Err(Error::Disconnected {
            components: n - tree.len(),
        });
    }
    tree.sort_by_key(Edge::key);
    Ok(tree)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CentralityKind {
    Closeness,
    Betweenness,
}

#[derive(Debug, Clone, PartialEq)]
pub struct CentralityVector {
    pub values: Vec<f64>,
    pub kind: CentralityKind,
}

/// `(reachable - 1) / sum of distances to reachable vertices`, computed per
/// component. Isolated vertices score 0.
pub fn closeness_centrality(g: &RelationGraph, cost: PathCost) -> Result<CentralityVector> {
    let dists = all_pairs_shortest_paths(g, cost)?;
    let values = dists
        .par_iter()
        .map(|row| {
            let (mut reach, mut total) = (0usize, 0.0);
            for &d in row {
                if d.is_finite() {
                    reach += 1;
                    total += d;
                }
            }
            if reach <= 1 || total <= 0.0 {
                0.0
            } else {
                (reach - 1) as f64 / total
            }
        })
        .collect();
    Ok(CentralityVector {
        values,
        kind: CentralityKind::Closeness,
    })
}

/// Brandes accumulation over every source. Values count unordered pairs
/// `{s, t}`; with `normalized` they are divided by `(n-1)(n-2)/2`.
pub fn betweenness_centrality(
    g: &RelationGraph,
    cost: PathCost,
    normalized: bool,
) -> Result<CentralityVector> {
    let n = g.n_vertices();
    let cg = CostGraph::new(g, cost)?;
    let partials: Vec<Vec<f64>> = (0..n)
        .into_par_iter()
        .map(|s| brandes_source(&cg, s, cost == PathCost::Hops))
        .collect();
    let mut values = vec![0.0; n];
    // fixed-order reduction keeps results independent of scheduling
    for p in &partials {
        for (v, d) in values.iter_mut().zip(p) {
            *v += d;
        }
    }
    let scale = if normalized && n > 2 {
        0.5 / (((n - 1) * (n - 2)) as f64 / 2.0)
    } else {
        0.5
    };
    for v in &mut values {
        *v *= scale;
    }
    Ok(CentralityVector {
        values,
        kind: CentralityKind::Betweenness,
    })
}

fn brandes_source(cg: &CostGraph, s: usize, unit: bool) -> Vec<f64> {
    let n = cg.adj.n_vertices();
    let mut order = Vec::with_capacity(n);
    let mut preds: Vec<Vec<usize>> = vec![Vec::new(); n];
    let mut sigma = vec![0.0f64; n];
    let mut dist = vec![f64::INFINITY; n];
    sigma[s] = 1.0;
    dist[s] = 0.0;
    if unit {
        let mut queue = VecDeque::from([s]);
        while let Some(v) = queue.pop_front() {
            order.push(v);
            for &u in cg.adj.neighbors(v) {
                let u = u as usize;
                if dist[u].is_infinite() {
                    dist[u] = dist[v] + 1.0;
                    queue.push_back(u);
                }
                if dist[u] == dist[v] + 1.0 {
                    sigma[u] += sigma[v];
                    preds[u].push(v);
                }
            }
        }
    } else {
        let mut settled = vec![false; n];
        let mut heap = BinaryHeap::from([HeapItem { dist: 0.0, vertex: s }]);
        while let Some(HeapItem { dist: d, vertex: v }) = heap.pop() {
            if settled[v] || d > dist[v] {
                continue;
            }
            settled[v] = true;
            order.push(v);
            for (u, c) in cg.iter(v) {
                let nd = d + c;
                if nd < dist[u] {
                    dist[u] = nd;
                    sigma[u] = sigma[v];
                    preds[u].clear();
                    preds[u].push(v);
                    heap.push(HeapItem { dist: nd, vertex: u });
                } else if nd == dist[u] && !settled[u] {
                    sigma[u] += sigma[v];
                    preds[u].push(v);
                }
            }
        }
    }
    let mut delta = vec![0.0; n];
    for &w in order.iter().rev() {
        for &v in &preds[w] {
            delta[v] += sigma[v] / sigma[w] * (1.0 + delta[w]);
        }
    }
    delta[s] = 0.0;
    delta
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::types::Semantics;

    fn path3() -> RelationGraph {
        RelationGraph::new(3, Semantics::Dissimilarity, [(0, 1, 1.0), (1, 2, 1.0)]).unwrap()
    }

    fn complete(n: usize) -> RelationGraph {
        RelationGraph::complete(n, Semantics::Dissimilarity, |_, _| 1.0).unwrap()
    }

    #[test]
    fn single_edge_distances() {
        let g = RelationGraph::new(2, Semantics::Dissimilarity, [(0, 1, 3.0)]).unwrap();
        assert_eq!(single_source_shortest_paths(&g, 0).unwrap(), vec![0.0, 3.0]);
    }

    #[test]
    fn unreachable_is_infinite() {
        let g = RelationGraph::new(3, Semantics::Dissimilarity, [(0, 1, 3.0)]).unwrap();
        assert!(single_source_shortest_paths(&g, 0).unwrap()[2].is_infinite());
    }

    #[test]
    fn negative_weight_rejected() {
        let g = RelationGraph::new(2, Semantics::Dissimilarity, [(0, 1, -1.0)]).unwrap();
        assert!(single_source_shortest_paths(&g, 0).is_err());
        let g = RelationGraph::new(2, Semantics::Similarity, [(0, 1, 3.0)]).unwrap();
        assert!(shortest_paths_with(&g, 0, PathCost::OneMinusWeight).is_err());
    }

    #[test]
    fn component_counts() {
        let g = RelationGraph::new(4, Semantics::Similarity, std::iter::empty()).unwrap();
        assert_eq!(connected_components(&g), vec![0, 1, 2, 3]);
        assert_eq!(n_components(&complete(5)), 1);
        let g = RelationGraph::new(5, Semantics::Similarity, [(3, 4, 1.0), (0, 2, 1.0)]).unwrap();
        assert_eq!(connected_components(&g), vec![0, 1, 0, 2, 2]);
    }

    #[test]
    fn mst_triangle() {
        let g = RelationGraph::new(3, Semantics::Dissimilarity, [(0, 1, 1.0), (1, 2, 2.0), (0, 2, 3.0)])
            .unwrap();
        let t = minimum_spanning_tree(&g).unwrap();
        assert_eq!(t.iter().map(|e| e.w).sum::<f64>(), 3.0);
        assert_eq!(t.len(), 2);
    }

    #[test]
    fn mst_disconnected_rejected() {
        let g = RelationGraph::new(4, Semantics::Dissimilarity, [(0, 1, 1.0), (2, 3, 1.0)]).unwrap();
        assert!(matches!(
            minimum_spanning_tree(&g),
            Err(Error::Disconnected { components: 2 })
        ));
    }

    #[test]
    fn closeness_on_path_and_complete() {
        let c = closeness_centrality(&path3(), PathCost::Hops).unwrap().values;
        assert_eq!(c, vec![2.0 / 3.0, 1.0, 2.0 / 3.0]);
        let c = closeness_centrality(&complete(6), PathCost::Weight).unwrap().values;
        assert!(c.iter().all(|&v| v == 1.0));
    }

    #[test]
    fn isolated_vertex_closeness_zero() {
        let g = RelationGraph::new(3, Semantics::Dissimilarity, [(0, 1, 1.0)]).unwrap();
        let c = closeness_centrality(&g, PathCost::Hops).unwrap().values;
        assert_eq!(c, vec![1.0, 1.0, 0.0]);
    }

    #[test]
    fn betweenness_on_path_and_complete() {
        let b = betweenness_centrality(&path3(), PathCost::Hops, false).unwrap().values;
        assert_eq!(b, vec![0.0, 1.0, 0.0]);
        let b = betweenness_centrality(&path3(), PathCost::Weight, false).unwrap().values;
        assert_eq!(b, vec![0.0, 1.0, 0.0]);
        let b = betweenness_centrality(&complete(5), PathCost::Weight, false).unwrap().values;
        assert!(b.iter().all(|&v| v == 0.0));
    }

    #[test]
    fn betweenness_splits_over_equal_paths() {
        // square 0-1-2-3-0: each vertex carries half of one opposite pair
        let g = RelationGraph::new(
            4,
            Semantics::Dissimilarity,
            [(0, 1, 1.0), (1, 2, 1.0), (2, 3, 1.0), (0, 3, 1.0)],
        )
        .unwrap();
        for cost in [PathCost::Hops, PathCost::Weight] {
            let b = betweenness_centrality(&g, cost, false).unwrap().values;
            assert_eq!(b, vec![0.5; 4]);
        }
    }
}
