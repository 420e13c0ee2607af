//! Symmetric SNE and t-SNE on a probability graph.
//!
//! Edge weights are renormalized so that `sum_{i != j} p_ij = 1` over
//! ordered pairs; the layout-space `q_ij` is normalized the same way.

use rayon::prelude::*;

use super::bhtree::{field, Gaussian, RepulsionKernel, StudentT};
use super::{finish, initial_coords, rng_for, EmbedParams, InitScale, Repulsion, MOMENTUM_SWITCH};
use crate::error::{Error, Result};
use crate::types::{squared_euclidean, Adjacency, Layout, RelationGraph};

/// Normalized joint probabilities in adjacency form.
#[derive(Debug, Clone)]
pub struct Affinities {
    n: usize,
    adj: Adjacency,
    /// `p_ij` aligned with `adj`, already divided by the ordered-pair total.
    p: Vec<Vec<f64>>,
}

impl Affinities {
    pub fn from_graph(g: &RelationGraph) -> Result<Self> {
        if g.edges().iter().any(|e| e.w < 0.0) {
            return Err(Error::invalid("affinities must be nonnegative"));
        }
        let total = 2.0 * g.total_weight();
        if total <= 0.0 {
            return Err(Error::invalid("graph has no positive affinity"));
        }
        let adj = g.adjacency();
        let p = (0..g.n_vertices())
            .map(|v| adj.weights(v).iter().map(|w| w / total).collect())
            .collect();
        Ok(Self {
            n: g.n_vertices(),
            adj,
            p,
        })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn iter(&self, i: usize) -> impl Iterator<Item = (usize, f64)> + '_ {
        self.adj
            .neighbors(i)
            .iter()
            .zip(&self.p[i])
            .map(|(&j, &p)| (j as usize, p))
    }

    /// `sum p ln p` over ordered pairs.
    fn neg_entropy(&self) -> f64 {
        (0..self.n)
            .flat_map(|i| self.p[i].iter())
            .filter(|&&p| p > 0.0)
            .map(|&p| p * p.ln())
            .sum()
    }
}

#[derive(Clone, Copy)]
enum Family {
    Gaussian,
    StudentT,
}

impl Family {
    /// Unnormalized similarity `w(d^2)`.
    #[inline]
    fn weight(self, d2: f64) -> f64 {
        match self {
            Family::Gaussian => (-d2).exp(),
            Family::StudentT => 1.0 / (1.0 + d2),
        }
    }
}

fn check_layout(p: &Affinities, layout: &Layout) -> Result<()> {
    if layout.n_points() != p.n() {
        return Err(Error::invalid("layout and affinities differ in size"));
    }
    Ok(())
}

fn objective(p: &Affinities, coords: &[f64], dim: usize, family: Family) -> f64 {
    let n = p.n();
    let point = |i: usize| &coords[i * dim..(i + 1) * dim];
    let z: f64 = (0..n)
        .into_par_iter()
        .map(|i| {
            (0..n)
                .filter(|&j| j != i)
                .map(|j| family.weight(squared_euclidean(point(i), point(j))))
                .sum::<f64>()
        })
        .collect::<Vec<f64>>()
        .iter()
        .sum();
    let cross: f64 = (0..n)
        .map(|i| {
            p.iter(i)
                .filter(|&(_, pij)| pij > 0.0)
                .map(|(j, pij)| pij * family.weight(squared_euclidean(point(i), point(j))).ln())
                .sum::<f64>()
        })
        .sum();
    p.neg_entropy() - cross + z.ln()
}

/// Gradient with attraction scaled by `exaggeration`.
fn gradient(
    p: &Affinities,
    coords: &[f64],
    dim: usize,
    family: Family,
    exaggeration: f64,
    repulsion: Repulsion,
) -> Vec<f64> {
    let theta = match repulsion {
        Repulsion::Exact => None,
        Repulsion::BarnesHut { theta } => Some(theta),
    };
    let rep = match family {
        Family::Gaussian => field(coords, dim, theta, &Gaussian),
        Family::StudentT => field(coords, dim, theta, &StudentT),
    };
    let z = rep.normalization;
    let point = |i: usize| &coords[i * dim..(i + 1) * dim];
    let mut grad = vec![0.0; coords.len()];
    grad.par_chunks_mut(dim).enumerate().for_each(|(i, g)| {
        let yi = point(i);
        for (j, pij) in p.iter(i) {
            let yj = point(j);
            let d2 = squared_euclidean(yi, yj);
            let c = match family {
                Family::Gaussian => exaggeration * pij,
                Family::StudentT => exaggeration * pij / (1.0 + d2),
            };
            for a in 0..dim {
                g[a] += c * (yi[a] - yj[a]);
            }
        }
        let f = rep.force(i);
        for a in 0..dim {
            g[a] = 4.0 * (g[a] - f[a] / z);
        }
    });
    grad
}

/// `KL(P || Q)` with Gaussian `q`.
pub fn sne_objective(p: &Affinities, layout: &Layout) -> Result<f64> {
    check_layout(p, layout)?;
    Ok(objective(p, layout.coords(), layout.dim(), Family::Gaussian))
}

/// `4 sum_j (p_ij - q_ij)(y_i - y_j)`, row-major.
pub fn sne_gradient(p: &Affinities, layout: &Layout) -> Result<Vec<f64>> {
    check_layout(p, layout)?;
    Ok(gradient(p, layout.coords(), layout.dim(), Family::Gaussian, 1.0, Repulsion::Exact))
}

/// `KL(P || Q)` with Student-t `q`.
pub fn tsne_objective(p: &Affinities, layout: &Layout) -> Result<f64> {
    check_layout(p, layout)?;
    Ok(objective(p, layout.coords(), layout.dim(), Family::StudentT))
}

/// `4 sum_j (p_ij - q_ij)(y_i - y_j)(1 + |y_i - y_j|^2)^-1`, row-major.
pub fn tsne_gradient(p: &Affinities, layout: &Layout) -> Result<Vec<f64>> {
    check_layout(p, layout)?;
    Ok(gradient(p, layout.coords(), layout.dim(), Family::StudentT, 1.0, Repulsion::Exact))
}

/// Dense row-major `q_ij` (Student-t), normalized over ordered pairs.
pub fn student_t_joint(layout: &Layout) -> Vec<f64> {
    let n = layout.n_points();
    let mut q = vec![0.0; n * n];
    let mut z = 0.0;
    for i in 0..n {
        for j in 0..n {
            if i != j {
                let (w, _) = StudentT.eval(squared_euclidean(layout.point(i), layout.point(j)));
                let w = w.sqrt();
                q[i * n + j] = w;
                z += w;
            }
        }
    }
    q.iter_mut().for_each(|v| *v /= z);
    q
}

fn descend(g: &RelationGraph, params: &EmbedParams, family: Family) -> Result<Layout> {
    let p = Affinities::from_graph(g)?;
    let n = g.n_vertices();
    let dim = params.dim;
    let mut rng = rng_for(params.seed);
    let mut y = initial_coords(params, n, InitScale::Tiny, &mut rng)?;
    let mut update = vec![0.0; y.len()];
    for it in 0..params.iterations {
        let grad = gradient(&p, &y, dim, family, params.early_exaggeration.at(it), params.repulsion);
        let momentum = if it < MOMENTUM_SWITCH { 0.5 } else { 0.8 };
        for ((yv, u), gv) in y.iter_mut().zip(update.iter_mut()).zip(&grad) {
            *u = momentum * *u - params.learning_rate * gv;
            *yv += *u;
        }
        if y.iter().any(|v| !v.is_finite()) {
            return Err(Error::Numeric(format!("gradient descent diverged at iteration {it}")));
        }
    }
    finish(n, dim, y)
}

/// Symmetric SNE: Gaussian layout similarities, momentum gradient descent.
pub fn sne_embed(g: &RelationGraph, params: &EmbedParams) -> Result<Layout> {
    descend(g, params, Family::Gaussian)
}

/// t-SNE: Student-t layout similarities with early exaggeration.
pub fn tsne_embed(g: &RelationGraph, params: &EmbedParams) -> Result<Layout> {
    descend(g, params, Family::StudentT)
}
