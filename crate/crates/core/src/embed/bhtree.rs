//! Space-partitioning tree (quadtree in 2D, octree in 3D) for approximating
//! all-pairs repulsion.
//!
//! A cell is replaced by a point mass at its centroid when
//! `cell_width / distance < theta` and the query point lies outside it.

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::types::Layout;

const MAX_DEPTH: usize = 48;
const NO_CHILD: u32 = u32::MAX;

/// Pairwise interaction as a function of squared distance: the first value
/// multiplies `(y_i - y_j)` in the force, the second is accumulated into
/// the normalization sum.
pub trait RepulsionKernel: Sync {
    fn eval(&self, d2: f64) -> (f64, f64);
}

/// Student-t kernel `q = 1 / (1 + d^2)`: force coefficient `q^2`, sum `q`.
#[derive(Debug, Clone, Copy, Default)]
pub struct StudentT;

impl RepulsionKernel for StudentT {
    #[inline]
    fn eval(&self, d2: f64) -> (f64, f64) {
        let q = 1.0 / (1.0 + d2);
        (q * q, q)
    }
}

/// Gaussian kernel `exp(-d^2)` for symmetric SNE.
#[derive(Debug, Clone, Copy, Default)]
pub(crate) struct Gaussian;

impl RepulsionKernel for Gaussian {
    #[inline]
    fn eval(&self, d2: f64) -> (f64, f64) {
        let e = (-d2).exp();
        (e, e)
    }
}

/// Fruchterman-Reingold repulsion of magnitude `k^2 / d`.
#[derive(Debug, Clone, Copy)]
pub(crate) struct InverseDistance {
    pub k2: f64,
    pub min_d2: f64,
}

impl RepulsionKernel for InverseDistance {
    #[inline]
    fn eval(&self, d2: f64) -> (f64, f64) {
        (self.k2 / d2.max(self.min_d2), 0.0)
    }
}

/// Per-point forces plus the sum of kernel values over ordered pairs.
#[derive(Debug, Clone, PartialEq)]
pub struct RepulsionField {
    pub dim: usize,
    /// Row-major N x dim.
    pub forces: Vec<f64>,
    pub normalization: f64,
}

impl RepulsionField {
    pub fn force(&self, i: usize) -> &[f64] {
        &self.forces[i * self.dim..(i + 1) * self.dim]
    }
}

#[derive(Debug, Clone)]
struct Node {
    center: [f64; 3],
    half: f64,
    mass: f64,
    com: [f64; 3],
    children: [u32; 8],
    start: u32,
    end: u32,
    leaf: bool,
}

#[derive(Debug, Clone)]
pub struct SpaceTree<'a> {
    coords: &'a [f64],
    dim: usize,
    nodes: Vec<Node>,
    order: Vec<u32>,
}

impl<'a> SpaceTree<'a> {
    pub fn new(coords: &'a [f64], dim: usize) -> Self {
        assert!(dim == 2 || dim == 3, "tree supports 2 or 3 dimensions");
        let n = coords.len() / dim;
        let mut lo = [f64::INFINITY; 3];
        let mut hi = [f64::NEG_INFINITY; 3];
        for p in coords.chunks(dim) {
            for a in 0..dim {
                lo[a] = lo[a].min(p[a]);
                hi[a] = hi[a].max(p[a]);
            }
        }
        let mut center = [0.0; 3];
        let mut half: f64 = 0.0;
        for a in 0..dim {
            center[a] = 0.5 * (lo[a] + hi[a]);
            half = half.max(0.5 * (hi[a] - lo[a]));
        }
        let half = if half > 0.0 { half * (1.0 + 1e-9) } else { 1.0 };
        let mut tree = SpaceTree {
            coords,
            dim,
            nodes: Vec::with_capacity(2 * n.max(1)),
            order: (0..n as u32).collect(),
        };
        if n > 0 {
            tree.build(center, half, 0, n, 0);
        }
        tree
    }

    pub fn n_nodes(&self) -> usize {
        self.nodes.len()
    }

    fn point(&self, i: usize) -> &[f64] {
        &self.coords[i * self.dim..(i + 1) * self.dim]
    }

    fn build(&mut self, center: [f64; 3], half: f64, start: usize, end: usize, depth: usize) -> u32 {
        let dim = self.dim;
        let id = self.nodes.len() as u32;
        let mut com = [0.0; 3];
        for &p in &self.order[start..end] {
            let x = self.point(p as usize);
            for a in 0..dim {
                com[a] += x[a];
            }
        }
        let mass = (end - start) as f64;
        for c in com.iter_mut().take(dim) {
            *c /= mass;
        }
        self.nodes.push(Node {
            center,
            half,
            mass,
            com,
            children: [NO_CHILD; 8],
            start: start as u32,
            end: end as u32,
            leaf: true,
        });
        if end - start <= 1 || depth >= MAX_DEPTH {
            return id;
        }
        let orthant = |x: &[f64]| -> usize { (0..dim).fold(0, |acc, a| acc | (((x[a] >= center[a]) as usize) << a)) };
        let mut keyed: Vec<(usize, u32)> = self.order[start..end]
            .iter()
            .map(|&p| (orthant(self.point(p as usize)), p))
            .collect();
        keyed.sort_by_key(|k| k.0);
        for (slot, (_, p)) in self.order[start..end].iter_mut().zip(&keyed) {
            *slot = *p;
        }
        let mut children = [NO_CHILD; 8];
        let mut s = start;
        while s < end {
            let q = keyed[s - start].0;
            let mut e = s;
            while e < end && keyed[e - start].0 == q {
                e += 1;
            }
            let mut c = center;
            for (a, ca) in c.iter_mut().enumerate().take(dim) {
                *ca += if (q >> a) & 1 == 1 { 0.5 * half } else { -0.5 * half };
            }
            children[q] = self.build(c, 0.5 * half, s, e, depth + 1);
            s = e;
        }
        let node = &mut self.nodes[id as usize];
        node.leaf = false;
        node.children = children;
        id
    }

    fn contains(&self, node: &Node, x: &[f64]) -> bool {
        (0..self.dim).all(|a| (x[a] - node.center[a]).abs() <= node.half)
    }

    /// Approximate force on point `i` and its normalization contribution.
    pub(crate) fn query<K: RepulsionKernel>(&self, i: usize, theta: f64, kernel: &K, out: &mut [f64]) -> f64 {
        let dim = self.dim;
        let x = self.point(i);
        out.iter_mut().for_each(|v| *v = 0.0);
        let mut z = 0.0;
        let theta2 = theta * theta;
        let mut stack = vec![0u32];
        while let Some(id) = stack.pop() {
            let node = &self.nodes[id as usize];
            if node.leaf {
                for &j in &self.order[node.start as usize..node.end as usize] {
                    let j = j as usize;
                    if j == i {
                        continue;
                    }
                    let y = self.point(j);
                    let d2: f64 = (0..dim).map(|a| (x[a] - y[a]) * (x[a] - y[a])).sum();
                    let (c, zz) = kernel.eval(d2);
                    z += zz;
                    for a in 0..dim {
                        out[a] += c * (x[a] - y[a]);
                    }
                }
                continue;
            }
            let d2: f64 = (0..dim).map(|a| (x[a] - node.com[a]).powi(2)).sum();
            let width = 2.0 * node.half;
            if width * width < theta2 * d2 && !self.contains(node, x) {
                let (c, zz) = kernel.eval(d2);
                z += node.mass * zz;
                for a in 0..dim {
                    out[a] += node.mass * c * (x[a] - node.com[a]);
                }
            } else {
                // reverse so children are visited in orthant order
                for &c in node.children.iter().rev() {
                    if c != NO_CHILD {
                        stack.push(c);
                    }
                }
            }
        }
        z
    }
}

/// Evaluates the field at every point. `theta = None` sums all pairs
/// exactly. Each point's sum is computed independently and the
/// normalization is reduced in index order.
pub(crate) fn field<K: RepulsionKernel>(coords: &[f64], dim: usize, theta: Option<f64>, kernel: &K) -> RepulsionField {
    let n = coords.len() / dim;
    let mut forces = vec![0.0; n * dim];
    let zs: Vec<f64> = match theta {
        Some(theta) => {
            let tree = SpaceTree::new(coords, dim);
            forces
                .par_chunks_mut(dim)
                .enumerate()
                .map(|(i, out)| tree.query(i, theta, kernel, out))
                .collect()
        }
        None => forces
            .par_chunks_mut(dim)
            .enumerate()
            .map(|(i, out)| {
                let x = &coords[i * dim..(i + 1) * dim];
                let mut z = 0.0;
                for j in 0..n {
                    if j == i {
                        continue;
                    }
                    let y = &coords[j * dim..(j + 1) * dim];
                    let d2: f64 = (0..dim).map(|a| (x[a] - y[a]) * (x[a] - y[a])).sum();
                    let (c, zz) = kernel.eval(d2);
                    z += zz;
                    for a in 0..dim {
                        out[a] += c * (x[a] - y[a]);
                    }
                }
                z
            })
            .collect(),
    };
    RepulsionField {
        dim,
        forces,
        normalization: zs.iter().sum(),
    }
}

/// Student-t repulsion `sum_j (1 + |y_i - y_j|^2)^-2 (y_i - y_j)` per point,
/// approximated with a space-partitioning tree.
pub fn barnes_hut_repulsion(layout: &Layout, theta: f64) -> Result<RepulsionField> {
    if !(theta > 0.0 && theta <= 1.0) {
        return Err(Error::invalid(format!("theta {theta} outside (0, 1]")));
    }
    Ok(field(layout.coords(), layout.dim(), Some(theta), &StudentT))
}

/// The same field summed over all pairs.
pub fn exact_repulsion(layout: &Layout) -> RepulsionField {
    field(layout.coords(), layout.dim(), None, &StudentT)
}
