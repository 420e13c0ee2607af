//! Edge-sampling SGD with negative sampling, as in UMAP.
//!
//! Each edge is visited at a rate proportional to its weight. A visit pulls
//! its endpoints together and pushes the moving endpoint away from
//! `negative_samples` uniformly drawn non-neighbors. The step size decays
//! linearly to zero over the epochs.

use rand::Rng;

use super::{finish, initial_coords, rng_for, EmbedParams, InitScale};
use crate::error::{Error, Result};
use crate::types::{squared_euclidean, RelationGraph};

/// Curve parameters of `1 / (1 + a d^(2b))` fitted for `min_dist = 0.1`.
pub const UMAP_A: f64 = 1.577;
pub const UMAP_B: f64 = 0.8951;

const CLIP: f64 = 4.0;
const REPULSION_EPS: f64 = 0.001;
/// Tries per negative sample before giving up on finding a non-neighbor.
const MAX_REJECTIONS: usize = 64;

pub fn negative_sampling_embed(g: &RelationGraph, params: &EmbedParams) -> Result<super::Layout> {
    if g.edges().iter().any(|e| e.w < 0.0) {
        return Err(Error::invalid("negative sampling needs nonnegative weights"));
    }
    let n = g.n_vertices();
    let dim = params.dim;
    let mut rng = rng_for(params.seed);
    let mut y = initial_coords(params, n, InitScale::Box10, &mut rng)?;
    let epochs = params.iterations;
    let w_max = g.max_weight().unwrap_or(0.0);
    if w_max <= 0.0 {
        return finish(n, dim, y);
    }
    let adj = g.adjacency();
    // both directions of every edge that is sampled at least once
    let mut heads = Vec::new();
    let mut tails = Vec::new();
    let mut period = Vec::new();
    for e in g.edges() {
        if e.w <= 0.0 || e.w < w_max / epochs as f64 {
            continue;
        }
        for (h, t) in [(e.i, e.j), (e.j, e.i)] {
            heads.push(h as usize);
            tails.push(t as usize);
            period.push(w_max / e.w);
        }
    }
    let mut next_sample = period.clone();
    let (a, b) = (UMAP_A, UMAP_B);
    let mut delta = vec![0.0; dim];
    for epoch in 0..epochs {
        let alpha = params.learning_rate * (1.0 - epoch as f64 / epochs as f64);
        let now = (epoch + 1) as f64;
        for s in 0..heads.len() {
            if next_sample[s] > now {
                continue;
            }
            next_sample[s] += period[s];
            let (h, t) = (heads[s], tails[s]);
            let d2 = squared_euclidean(&y[h * dim..(h + 1) * dim], &y[t * dim..(t + 1) * dim]);
            let attract = if d2 > 0.0 {
                -2.0 * a * b * d2.powf(b - 1.0) / (1.0 + a * d2.powf(b))
            } else {
                0.0
            };
            for c in 0..dim {
                delta[c] = (attract * (y[h * dim + c] - y[t * dim + c])).clamp(-CLIP, CLIP) * alpha;
            }
            for c in 0..dim {
                y[h * dim + c] += delta[c];
                y[t * dim + c] -= delta[c];
            }
            for _ in 0..params.negative_samples {
                let Some(k) = draw_non_neighbor(&mut rng, n, h, &adj) else {
                    break;
                };
                let d2 = squared_euclidean(&y[h * dim..(h + 1) * dim], &y[k * dim..(k + 1) * dim]);
                let repel = 2.0 * b / ((REPULSION_EPS + d2) * (1.0 + a * d2.powf(b)));
                for c in 0..dim {
                    let g = if repel > 0.0 {
                        (repel * (y[h * dim + c] - y[k * dim + c])).clamp(-CLIP, CLIP)
                    } else {
                        CLIP
                    };
                    y[h * dim + c] += g * alpha;
                }
            }
        }
    }
    finish(n, dim, y)
}

fn draw_non_neighbor<R: Rng>(rng: &mut R, n: usize, v: usize, adj: &crate::types::Adjacency) -> Option<usize> {
    for _ in 0..MAX_REJECTIONS {
        let k = rng.random_range(0..n);
        if k != v && !adj.contains(v, k) {
            return Some(k);
        }
    }
    None
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::embed::Init;
    use crate::types::{Layout, Semantics};

    #[test]
    fn single_edge_without_negatives_converges() {
        let g = RelationGraph::new(2, Semantics::Probability, [(0, 1, 1.0)]).unwrap();
        let init = Layout::from_points(&[[0.0, 0.0], [6.0, 0.0]]).unwrap();
        let mut params = EmbedParams::negative_sampling().with_init(Init::Given(init));
        params.negative_samples = 0;
        let out = negative_sampling_embed(&g, &params).unwrap();
        assert!(out.distance(0, 1) < 0.5, "{}", out.distance(0, 1));
    }

    #[test]
    fn deterministic_given_seed() {
        let g = RelationGraph::new(5, Semantics::Probability, [(0, 1, 1.0), (1, 2, 0.5), (3, 4, 0.7)]).unwrap();
        let p = EmbedParams::negative_sampling().with_iterations(50);
        assert_eq!(negative_sampling_embed(&g, &p).unwrap(), negative_sampling_embed(&g, &p).unwrap());
    }
}
