//! Brute-force reference implementations and random instances shared by the
//! integration tests. Nothing here calls into the library's algorithms;
//! only its data types are used.

#![allow(dead_code)]

use std::collections::HashSet;
use std::path::PathBuf;

use graphdr::{DataMatrix, Layout, RelationGraph, Semantics};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn workspace_file(rel: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../..").join(rel)
}

pub fn random_data(rng: &mut ChaCha8Rng, n: usize, m: usize) -> DataMatrix {
    let v: Vec<f64> = (0..n * m).map(|_| rng.random_range(-1.0..1.0)).collect();
    DataMatrix::new(n, m, v).unwrap()
}

pub fn random_layout(rng: &mut ChaCha8Rng, n: usize, dim: usize, scale: f64) -> Layout {
    let v: Vec<f64> = (0..n * dim).map(|_| rng.random_range(-scale..scale)).collect();
    Layout::new(n, dim, v).unwrap()
}

/// Random graph where each pair is an edge with probability `density`.
/// With `integer_weights`, weights are drawn from 1..=5 so path sums are
/// exact in floating point.
pub fn random_graph(rng: &mut ChaCha8Rng, n: usize, density: f64, semantics: Semantics, integer_weights: bool) -> RelationGraph {
    let mut edges = Vec::new();
    for i in 0..n {
        for j in (i + 1)..n {
            if rng.random::<f64>() < density {
                let w = if integer_weights {
                    rng.random_range(1..=5) as f64
                } else {
                    rng.random_range(0.01..1.0)
                };
                edges.push((i, j, w));
            }
        }
    }
    RelationGraph::new(n, semantics, edges).unwrap()
}

pub fn dist(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum::<f64>().sqrt()
}

pub fn points(data: &DataMatrix) -> Vec<Vec<f64>> {
    (0..data.n_rows()).map(|i| data.row(i).to_vec()).collect()
}

pub fn layout_points(l: &Layout) -> Vec<Vec<f64>> {
    (0..l.n_points()).map(|i| l.point(i).to_vec()).collect()
}

/// Every other item ordered by distance from `i`, ties by index.
pub fn ranking(pts: &[Vec<f64>], i: usize) -> Vec<usize> {
    let mut others: Vec<usize> = (0..pts.len()).filter(|&j| j != i).collect();
    others.sort_by(|&a, &b| {
        dist(&pts[i], &pts[a])
            .partial_cmp(&dist(&pts[i], &pts[b]))
            .unwrap()
            .then(a.cmp(&b))
    });
    others
}

pub fn knn_sets(pts: &[Vec<f64>], k: usize) -> Vec<HashSet<usize>> {
    (0..pts.len()).map(|i| ranking(pts, i).into_iter().take(k).collect()).collect()
}

pub fn knn_edge_set(pts: &[Vec<f64>], k: usize) -> HashSet<(usize, usize)> {
    let mut out = HashSet::new();
    for (i, s) in knn_sets(pts, k).iter().enumerate() {
        for &j in s {
            out.insert((i.min(j), i.max(j)));
        }
    }
    out
}

pub fn edge_set(g: &RelationGraph) -> HashSet<(usize, usize)> {
    g.edges().iter().map(|e| (e.i as usize, e.j as usize)).collect()
}

pub fn jaccard(a: &HashSet<(usize, usize)>, b: &HashSet<(usize, usize)>) -> f64 {
    let union = a.union(b).count();
    if union == 0 {
        1.0
    } else {
        a.intersection(b).count() as f64 / union as f64
    }
}

pub fn kruskal_stress(layout: &[Vec<f64>], d: &[Vec<f64>]) -> f64 {
    let (mut num, mut den) = (0.0, 0.0);
    for i in 0..d.len() {
        for j in (i + 1)..d.len() {
            let e = dist(&layout[i], &layout[j]) - d[i][j];
            num += e * e;
            den += d[i][j] * d[i][j];
        }
    }
    (num / den).sqrt()
}

pub fn neighborhood_preservation(data: &[Vec<f64>], layout: &[Vec<f64>], k: usize) -> f64 {
    let (a, b) = (knn_sets(data, k), knn_sets(layout, k));
    a.iter().zip(&b).map(|(x, y)| x.intersection(y).count() as f64 / k as f64).sum::<f64>() / data.len() as f64
}

pub fn trustworthiness(data: &[Vec<f64>], layout: &[Vec<f64>], k: usize) -> f64 {
    let n = data.len();
    let mut penalty = 0.0;
    for i in 0..n {
        let high = ranking(data, i);
        let low: Vec<usize> = ranking(layout, i).into_iter().take(k).collect();
        for j in low {
            let r = high.iter().position(|&x| x == j).unwrap() + 1;
            if r > k {
                penalty += (r - k) as f64;
            }
        }
    }
    let (n, k) = (n as f64, k as f64);
    1.0 - 2.0 / (n * k * (2.0 * n - 3.0 * k - 1.0)) * penalty
}

pub fn neighbor_hit(layout: &[Vec<f64>], labels: &[i64], k: usize) -> f64 {
    let sets = knn_sets(layout, k);
    sets.iter()
        .enumerate()
        .map(|(i, s)| s.iter().filter(|&&j| labels[j] == labels[i]).count() as f64 / k as f64)
        .sum::<f64>()
        / layout.len() as f64
}

/// Floyd-Warshall with edge cost `cost(w)`.
pub fn floyd_warshall(g: &RelationGraph, cost: impl Fn(f64) -> f64) -> Vec<Vec<f64>> {
    let n = g.n_vertices();
    let mut d = vec![vec![f64::INFINITY; n]; n];
    for (i, row) in d.iter_mut().enumerate() {
        row[i] = 0.0;
    }
    for e in g.edges() {
        let (i, j) = (e.i as usize, e.j as usize);
        d[i][j] = d[i][j].min(cost(e.w));
        d[j][i] = d[i][j];
    }
    for m in 0..n {
        for i in 0..n {
            for j in 0..n {
                if d[i][m] + d[m][j] < d[i][j] {
                    d[i][j] = d[i][m] + d[m][j];
                }
            }
        }
    }
    d
}

/// Single-source distances by Bellman-Ford relaxation.
pub fn bellman_ford(g: &RelationGraph, s: usize) -> Vec<f64> {
    let n = g.n_vertices();
    let mut d = vec![f64::INFINITY; n];
    d[s] = 0.0;
    for _ in 0..n {
        for e in g.edges() {
            let (i, j) = (e.i as usize, e.j as usize);
            if d[i] + e.w < d[j] {
                d[j] = d[i] + e.w;
            }
            if d[j] + e.w < d[i] {
                d[i] = d[j] + e.w;
            }
        }
    }
    d
}

pub fn closeness(d: &[Vec<f64>]) -> Vec<f64> {
    d.iter()
        .map(|row| {
            let reach: Vec<f64> = row.iter().copied().filter(|v| v.is_finite()).collect();
            let total: f64 = reach.iter().sum();
            if reach.len() <= 1 || total == 0.0 {
                0.0
            } else {
                (reach.len() - 1) as f64 / total
            }
        })
        .collect()
}

/// Number of shortest paths between every pair, by summing over the last
/// step. Requires exact distances (integer costs).
fn path_counts(g: &RelationGraph, d: &[Vec<f64>], cost: &impl Fn(f64) -> f64) -> Vec<Vec<f64>> {
    let n = d.len();
    let mut sigma = vec![vec![0.0; n]; n];
    for s in 0..n {
        let mut order: Vec<usize> = (0..n).filter(|&v| d[s][v].is_finite()).collect();
        order.sort_by(|&a, &b| d[s][a].partial_cmp(&d[s][b]).unwrap());
        sigma[s][s] = 1.0;
        for &v in order.iter().skip(1) {
            let mut count = 0.0;
            for e in g.edges() {
                let (a, b) = (e.i as usize, e.j as usize);
                for (u, t) in [(a, b), (b, a)] {
                    if t == v && d[s][u] + cost(e.w) == d[s][v] {
                        count += sigma[s][u];
                    }
                }
            }
            sigma[s][v] = count;
        }
    }
    sigma
}

/// Betweenness over unordered pairs `{s, t}` from the definition
/// `sum sigma_st(v) / sigma_st`.
pub fn betweenness(g: &RelationGraph, cost: impl Fn(f64) -> f64, normalized: bool) -> Vec<f64> {
    let d = floyd_warshall(g, &cost);
    let sigma = path_counts(g, &d, &cost);
    let n = d.len();
    let mut out = vec![0.0; n];
    for (v, slot) in out.iter_mut().enumerate() {
        for s in 0..n {
            for t in (s + 1)..n {
                if s == v || t == v || !d[s][t].is_finite() {
                    continue;
                }
                if d[s][v] + d[v][t] == d[s][t] {
                    *slot += sigma[s][v] * sigma[v][t] / sigma[s][t];
                }
            }
        }
    }
    if normalized && n > 2 {
        let pairs = ((n - 1) * (n - 2)) as f64 / 2.0;
        out.iter_mut().for_each(|v| *v /= pairs);
    }
    out
}

/// Prim's algorithm on the dense weight matrix (connected input).
pub fn prim_total_weight(g: &RelationGraph) -> f64 {
    let n = g.n_vertices();
    let mut w = vec![vec![f64::INFINITY; n]; n];
    for e in g.edges() {
        w[e.i as usize][e.j as usize] = e.w;
        w[e.j as usize][e.i as usize] = e.w;
    }
    let mut in_tree = vec![false; n];
    let mut best = vec![f64::INFINITY; n];
    best[0] = 0.0;
    let mut total = 0.0;
    for _ in 0..n {
        let v = (0..n)
            .filter(|&v| !in_tree[v])
            .min_by(|&a, &b| best[a].partial_cmp(&best[b]).unwrap())
            .unwrap();
        in_tree[v] = true;
        total += best[v];
        for u in 0..n {
            if !in_tree[u] && w[v][u] < best[u] {
                best[u] = w[v][u];
            }
        }
    }
    total
}

/// Compares `analytic` with central differences of `f` around `x`.
/// Component `a` passes when `|g_a - fd_a| <= rtol * max(|fd_a|, max|fd|)`.
pub fn gradient_matches(f: impl Fn(&[f64]) -> f64, x: &[f64], analytic: &[f64], rtol: f64) -> Result<(), String> {
    let mut fd = vec![0.0; x.len()];
    for a in 0..x.len() {
        let h = 1e-6 * x[a].abs().max(1.0);
        let mut xp = x.to_vec();
        let mut xm = x.to_vec();
        xp[a] += h;
        xm[a] -= h;
        fd[a] = (f(&xp) - f(&xm)) / (2.0 * h);
    }
    let scale = fd.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    for a in 0..x.len() {
        let tol = rtol * fd[a].abs().max(scale);
        if (analytic[a] - fd[a]).abs() > tol {
            return Err(format!("component {a}: analytic {} vs finite difference {}", analytic[a], fd[a]));
        }
    }
    Ok(())
}
