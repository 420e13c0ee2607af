//! Domain types shared by every stage plus conversions between the matrix
//! and graph views of pairwise relationships.
//!
//! Vertex ids are row indices of the originating [`DataMatrix`] throughout,
//! so labels and per-node scores can be joined across stages.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// N items in an m-dimensional feature space, row-major, with optional
/// integer class labels.
#[derive(Debug, Clone, PartialEq)]
pub struct DataMatrix {
    rows: usize,
    cols: usize,
    values: Vec<f64>,
    labels: Option<Vec<i64>>,
}

impl DataMatrix {
    pub fn new(rows: usize, cols: usize, values: Vec<f64>) -> Result<Self> {
        if rows < 2 {
            return Err(Error::invalid(format!("need at least 2 rows, got {rows}")));
        }
        if cols < 1 {
            return Err(Error::invalid("need at least 1 column"));
        }
        if values.len() != rows * cols {
            return Err(Error::invalid(format!(
                "expected {} values for {rows}x{cols}, got {}",
                rows * cols,
                values.len()
            )));
        }
        if let Some(pos) = values.iter().position(|v| !v.is_finite()) {
            return Err(Error::invalid(format!(
                "non-finite value at row {}, column {}",
                pos / cols,
                pos % cols
            )));
        }
        Ok(Self {
            rows,
            cols,
            values,
            labels: None,
        })
    }

    pub fn from_rows<R: AsRef<[f64]>>(rows: &[R]) -> Result<Self> {
        let cols = rows.first().map_or(0, |r| r.as_ref().len());
        let mut values = Vec::with_capacity(rows.len() * cols);
        for (i, r) in rows.iter().enumerate() {
            let r = r.as_ref();
            if r.len() != cols {
                return Err(Error::invalid(format!(
                    "row {i} has {} columns, expected {cols}",
                    r.len()
                )));
            }
            values.extend_from_slice(r);
        }
        Self::new(rows.len(), cols, values)
    }

    pub fn with_labels(mut self, labels: Vec<i64>) -> Result<Self> {
        if labels.len() != self.rows {
            return Err(Error::invalid(format!(
                "{} labels for {} rows",
                labels.len(),
                self.rows
            )));
        }
        self.labels = Some(labels);
        Ok(self)
    }

    pub fn n_rows(&self) -> usize {
        self.rows
    }

    pub fn n_cols(&self) -> usize {
        self.cols
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.values[i * self.cols..(i + 1) * self.cols]
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn labels(&self) -> Option<&[i64]> {
        self.labels.as_deref()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Metric {
    #[default]
    Euclidean,
    /// `1 - cos(x, y)`; zero vectors are rejected.
    Cosine,
}

impl fmt::Display for Metric {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Metric::Euclidean => "euclidean",
            Metric::Cosine => "cosine",
        })
    }
}

impl FromStr for Metric {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "euclidean" => Ok(Metric::Euclidean),
            "cosine" => Ok(Metric::Cosine),
            other => Err(Error::Config(format!("unknown metric '{other}'"))),
        }
    }
}

/// Dense symmetric N x N matrix of dissimilarities with a zero diagonal.
#[derive(Debug, Clone, PartialEq)]
pub struct DistanceMatrix {
    n: usize,
    values: Vec<f64>,
}

impl DistanceMatrix {
    /// Validates squareness, finiteness, exact symmetry and a zero diagonal.
    pub fn new(n: usize, values: Vec<f64>) -> Result<Self> {
        if values.len() != n * n {
            return Err(Error::invalid(format!(
                "distance matrix needs {} entries, got {}",
                n * n,
                values.len()
            )));
        }
        for i in 0..n {
            if values[i * n + i] != 0.0 {
                return Err(Error::invalid(format!("non-zero diagonal at {i}")));
            }
            for j in (i + 1)..n {
                let a = values[i * n + j];
                if !a.is_finite() {
                    return Err(Error::invalid(format!("non-finite entry at ({i}, {j})")));
                }
                if a != values[j * n + i] {
                    return Err(Error::invalid(format!("asymmetric entry at ({i}, {j})")));
                }
            }
        }
        Ok(Self { n, values })
    }

    pub fn from_rows<R: AsRef<[f64]>>(rows: &[R]) -> Result<Self> {
        let n = rows.len();
        let mut values = Vec::with_capacity(n * n);
        for r in rows {
            if r.as_ref().len() != n {
                return Err(Error::invalid("distance matrix must be square"));
            }
            values.extend_from_slice(r.as_ref());
        }
        Self::new(n, values)
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.values[i * self.n + j]
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.values[i * self.n..(i + 1) * self.n]
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }
}

/// Pairwise dissimilarities between the rows of `data`.
///
/// Rows are computed in parallel; each entry is evaluated once for `i < j`
/// and mirrored, so the result is exactly symmetric and independent of
/// scheduling.
pub fn distance_matrix(data: &DataMatrix, metric: Metric) -> Result<DistanceMatrix> {
    let n = data.n_rows();
    let norms: Vec<f64> = (0..n)
        .map(|i| data.row(i).iter().map(|v| v * v).sum::<f64>().sqrt())
        .collect();
    if metric == Metric::Cosine {
        if let Some(i) = norms.iter().position(|&v| v == 0.0) {
            return Err(Error::invalid(format!(
                "cosine distance undefined for zero vector at row {i}"
            )));
        }
    }
    let upper: Vec<Vec<f64>> = (0..n)
        .into_par_iter()
        .map(|i| {
            let xi = data.row(i);
            ((i + 1)..n)
                .map(|j| {
                    let xj = data.row(j);
                    match metric {
                        Metric::Euclidean => euclidean(xi, xj),
                        Metric::Cosine => {
                            let dot: f64 = xi.iter().zip(xj).map(|(a, b)| a * b).sum();
                            (1.0 - dot / (norms[i] * norms[j])).max(0.0)
                        }
                    }
                })
                .collect()
        })
        .collect();
    let mut values = vec![0.0; n * n];
    for (i, row) in upper.iter().enumerate() {
        for (off, &d) in row.iter().enumerate() {
            let j = i + 1 + off;
            values[i * n + j] = d;
            values[j * n + i] = d;
        }
    }
    Ok(DistanceMatrix { n, values })
}

#[inline]
pub(crate) fn euclidean(a: &[f64], b: &[f64]) -> f64 {
    squared_euclidean(a, b).sqrt()
}

#[inline]
pub(crate) fn squared_euclidean(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum()
}

/// How edge weights of a [`RelationGraph`] are to be read.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Semantics {
    Dissimilarity,
    Similarity,
    Probability,
}

impl fmt::Display for Semantics {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Semantics::Dissimilarity => "dissimilarity",
            Semantics::Similarity => "similarity",
            Semantics::Probability => "probability",
        })
    }
}

impl FromStr for Semantics {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "dissimilarity" => Ok(Semantics::Dissimilarity),
            "similarity" => Ok(Semantics::Similarity),
            "probability" => Ok(Semantics::Probability),
            other => Err(Error::invalid(format!("unknown semantics '{other}'"))),
        }
    }
}

/// An undirected edge stored with `i < j`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Edge {
    pub i: u32,
    pub j: u32,
    pub w: f64,
}

impl Edge {
    pub fn key(&self) -> (u32, u32) {
        (self.i, self.j)
    }
}

/// Undirected weighted graph over item indices `0..n`.
///
/// Edges are kept sorted by `(i, j)` with `i < j`; there is at most one edge
/// per unordered pair and no self-loops.
#[derive(Debug, Clone, PartialEq)]
pub struct RelationGraph {
    n: usize,
    semantics: Semantics,
    edges: Vec<Edge>,
}

impl RelationGraph {
    /// Builds a graph, normalizing each pair to `i < j`. Duplicate pairs
    /// (in either orientation), self-loops, out-of-range ids, non-finite
    /// weights and probabilities outside `[0, 1]` are rejected.
    pub fn new<I>(n: usize, semantics: Semantics, edges: I) -> Result<Self>
    where
        I: IntoIterator<Item = (usize, usize, f64)>,
    {
        if n > u32::MAX as usize {
            return Err(Error::invalid("too many vertices"));
        }
        let mut out = Vec::new();
        for (a, b, w) in edges {
            if a == b {
                return Err(Error::invalid(format!("self-loop at vertex {a}")));
            }
            if a >= n || b >= n {
                return Err(Error::invalid(format!(
                    "edge ({a}, {b}) out of range for {n} vertices"
                )));
            }
            if !w.is_finite() {
                return Err(Error::invalid(format!("non-finite weight on edge ({a}, {b})")));
            }
            if semantics == Semantics::Probability && !(0.0..=1.0).contains(&w) {
                return Err(Error::invalid(format!(
                    "probability {w} on edge ({a}, {b}) outside [0, 1]"
                )));
            }
            let (i, j) = if a < b { (a, b) } else { (b, a) };
            out.push(Edge {
                i: i as u32,
                j: j as u32,
                w,
            });
        }
        out.sort_unstable_by_key(Edge::key);
        if let Some(pair) = out.windows(2).find(|p| p[0].key() == p[1].key()) {
            return Err(Error::invalid(format!(
                "duplicate edge ({}, {})",
                pair[0].i, pair[0].j
            )));
        }
        Ok(Self {
            n,
            semantics,
            edges: out,
        })
    }

    /// All `n(n-1)/2` pairs, weighted by `weight(i, j)`.
    pub fn complete<F>(n: usize, semantics: Semantics, mut weight: F) -> Result<Self>
    where
        F: FnMut(usize, usize) -> f64,
    {
        let mut edges = Vec::with_capacity(n * n.saturating_sub(1) / 2);
        for i in 0..n {
            for j in (i + 1)..n {
                edges.push((i, j, weight(i, j)));
            }
        }
        Self::new(n, semantics, edges)
    }

    pub fn n_vertices(&self) -> usize {
        self.n
    }

    pub fn n_edges(&self) -> usize {
        self.edges.len()
    }

    pub fn semantics(&self) -> Semantics {
        self.semantics
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    pub fn is_complete(&self) -> bool {
        self.edges.len() == self.n * self.n.saturating_sub(1) / 2
    }

    /// Weight of the edge between `a` and `b`, in either order.
    pub fn weight(&self, a: usize, b: usize) -> Option<f64> {
        if a == b || a >= self.n || b >= self.n {
            return None;
        }
        let key = if a < b {
            (a as u32, b as u32)
        } else {
            (b as u32, a as u32)
        };
        self.edges
            .binary_search_by_key(&key, Edge::key)
            .ok()
            .map(|idx| self.edges[idx].w)
    }

    pub fn has_edge(&self, a: usize, b: usize) -> bool {
        self.weight(a, b).is_some()
    }

    pub fn max_weight(&self) -> Option<f64> {
        self.edges.iter().map(|e| e.w).reduce(f64::max)
    }

    pub fn total_weight(&self) -> f64 {
        self.edges.iter().map(|e| e.w).sum()
    }

    pub fn degrees(&self) -> Vec<usize> {
        let mut deg = vec![0; self.n];
        for e in &self.edges {
            deg[e.i as usize] += 1;
            deg[e.j as usize] += 1;
        }
        deg
    }

    /// Applies `f` to every weight and re-tags the semantics, revalidating.
    pub fn map_weights<F>(&self, semantics: Semantics, mut f: F) -> Result<Self>
    where
        F: FnMut(&Edge) -> f64,
    {
        Self::new(
            self.n,
            semantics,
            self.edges
                .iter()
                .map(|e| (e.i as usize, e.j as usize, f(e))),
        )
    }

    /// Keeps the edges for which `keep` returns true.
    pub fn filter_edges<F>(&self, mut keep: F) -> Self
    where
        F: FnMut(&Edge) -> bool,
    {
        Self {
            n: self.n,
            semantics: self.semantics,
            edges: self.edges.iter().copied().filter(|e| keep(e)).collect(),
        }
    }

    pub fn adjacency(&self) -> Adjacency {
        Adjacency::new(self)
    }
}

/// Compressed per-vertex neighbor lists, sorted by neighbor id.
#[derive(Debug, Clone)]
pub struct Adjacency {
    offsets: Vec<usize>,
    targets: Vec<u32>,
    weights: Vec<f64>,
}

impl Adjacency {
    fn new(g: &RelationGraph) -> Self {
        let n = g.n_vertices();
        let deg = g.degrees();
        let mut offsets = Vec::with_capacity(n + 1);
        offsets.push(0);
        for d in &deg {
            offsets.push(offsets.last().unwrap() + d);
        }
        let mut cursor = offsets[..n].to_vec();
        let m = offsets[n];
        let mut targets = vec![0u32; m];
        let mut weights = vec![0.0; m];
        // Edges are sorted by (i, j): the first pass fills each vertex's
        // lower neighbors in increasing order, the second its upper ones.
        for e in g.edges() {
            let j = e.j as usize;
            targets[cursor[j]] = e.i;
            weights[cursor[j]] = e.w;
            cursor[j] += 1;
        }
        for e in g.edges() {
            let i = e.i as usize;
            targets[cursor[i]] = e.j;
            weights[cursor[i]] = e.w;
            cursor[i] += 1;
        }
        Self {
            offsets,
            targets,
            weights,
        }
    }

    pub fn n_vertices(&self) -> usize {
        self.offsets.len() - 1
    }

    pub fn degree(&self, v: usize) -> usize {
        self.offsets[v + 1] - self.offsets[v]
    }

    pub fn neighbors(&self, v: usize) -> &[u32] {
        &self.targets[self.offsets[v]..self.offsets[v + 1]]
    }

    pub fn weights(&self, v: usize) -> &[f64] {
        &self.weights[self.offsets[v]..self.offsets[v + 1]]
    }

    pub fn iter(&self, v: usize) -> impl Iterator<Item = (usize, f64)> + '_ {
        self.neighbors(v)
            .iter()
            .zip(self.weights(v))
            .map(|(&t, &w)| (t as usize, w))
    }

    pub fn contains(&self, v: usize, u: usize) -> bool {
        self.neighbors(v).binary_search(&(u as u32)).is_ok()
    }
}

/// Complete graph whose edge `(i, j)` carries `d[i][j]`.
pub fn graph_from_matrix(d: &DistanceMatrix, semantics: Semantics) -> Result<RelationGraph> {
    RelationGraph::complete(d.len(), semantics, |i, j| d.get(i, j))
}

/// Dense matrix view of a complete graph; missing pairs are an error.
pub fn matrix_from_graph(g: &RelationGraph) -> Result<DistanceMatrix> {
    if !g.is_complete() {
        return Err(Error::invalid(format!(
            "graph with {} of {} edges is not complete",
            g.n_edges(),
            g.n_vertices() * g.n_vertices().saturating_sub(1) / 2
        )));
    }
    let n = g.n_vertices();
    let mut values = vec![0.0; n * n];
    for e in g.edges() {
        let (i, j) = (e.i as usize, e.j as usize);
        values[i * n + j] = e.w;
        values[j * n + i] = e.w;
    }
    Ok(DistanceMatrix { n, values })
}

/// N points in 2 or 3 dimensions, row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct Layout {
    n: usize,
    dim: usize,
    coords: Vec<f64>,
}

impl Layout {
    pub fn new(n: usize, dim: usize, coords: Vec<f64>) -> Result<Self> {
        if !(dim == 2 || dim == 3) {
            return Err(Error::invalid(format!("layout dimension must be 2 or 3, got {dim}")));
        }
        if coords.len() != n * dim {
            return Err(Error::invalid(format!(
                "expected {} coordinates, got {}",
                n * dim,
                coords.len()
            )));
        }
        if coords.iter().any(|c| !c.is_finite()) {
            return Err(Error::Numeric("layout has non-finite coordinates".into()));
        }
        Ok(Self { n, dim, coords })
    }

    pub fn from_points<R: AsRef<[f64]>>(points: &[R]) -> Result<Self> {
        let dim = points.first().map_or(2, |p| p.as_ref().len());
        let mut coords = Vec::with_capacity(points.len() * dim);
        for p in points {
            if p.as_ref().len() != dim {
                return Err(Error::invalid("points have mixed dimensions"));
            }
            coords.extend_from_slice(p.as_ref());
        }
        Self::new(points.len(), dim, coords)
    }

    pub fn n_points(&self) -> usize {
        self.n
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn point(&self, i: usize) -> &[f64] {
        &self.coords[i * self.dim..(i + 1) * self.dim]
    }

    pub fn coords(&self) -> &[f64] {
        &self.coords
    }

    pub fn distance(&self, i: usize, j: usize) -> f64 {
        euclidean(self.point(i), self.point(j))
    }

    pub fn translated(&self, offset: &[f64]) -> Self {
        let mut coords = self.coords.clone();
        for p in coords.chunks_mut(self.dim) {
            for (c, o) in p.iter_mut().zip(offset) {
                *c += o;
            }
        }
        Self {
            n: self.n,
            dim: self.dim,
            coords,
        }
    }

    pub fn scaled(&self, factor: f64) -> Self {
        Self {
            n: self.n,
            dim: self.dim,
            coords: self.coords.iter().map(|c| c * factor).collect(),
        }
    }

    /// The layout as a data matrix (for neighborhood metrics).
    pub fn to_data(&self) -> Result<DataMatrix> {
        DataMatrix::new(self.n, self.dim, self.coords.clone())
    }
}

/// Named scalar metrics and per-node score vectors.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct QualityReport {
    pub scalars: BTreeMap<String, f64>,
    pub per_node: BTreeMap<String, Vec<f64>>,
}

impl QualityReport {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn insert_scalar(&mut self, name: impl Into<String>, value: f64) {
        self.scalars.insert(name.into(), value);
    }

    pub fn insert_per_node(&mut self, name: impl Into<String>, n: usize, values: Vec<f64>) -> Result<()> {
        if values.len() != n {
            return Err(Error::invalid(format!(
                "per-node vector of length {} for {n} nodes",
                values.len()
            )));
        }
        self.per_node.insert(name.into(), values);
        Ok(())
    }
}
