//! Fruchterman-Reingold spring layout.
//!
//! Edges pull with force `w d^2 / K`, all pairs push with `K^2 / d`, and
//! each step a vertex moves along its net force by at most the current
//! temperature. The temperature starts at a tenth of the initial extent and
//! cools linearly.

use rayon::prelude::*;

use super::bhtree::{field, InverseDistance};
use super::{finish, initial_coords, rng_for, EmbedParams, InitScale, Repulsion};
use crate::error::{Error, Result};
use crate::types::{Layout, RelationGraph, Semantics};

/// Ideal edge length `sqrt(area / n)` over a unit area.
pub fn ideal_length(n: usize) -> f64 {
    (1.0 / n.max(1) as f64).sqrt()
}

fn extent(coords: &[f64], dim: usize) -> f64 {
    (0..dim)
        .map(|a| {
            let (lo, hi) = coords
                .chunks(dim)
                .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), p| (lo.min(p[a]), hi.max(p[a])));
            hi - lo
        })
        .fold(0.0, f64::max)
}

pub fn spring_layout(g: &RelationGraph, params: &EmbedParams) -> Result<Layout> {
    if g.semantics() == Semantics::Dissimilarity {
        return Err(Error::invalid(
            "spring layout reads weights as attraction; flip dissimilarities to similarities first",
        ));
    }
    if g.edges().iter().any(|e| e.w < 0.0) {
        return Err(Error::invalid("spring layout needs nonnegative weights"));
    }
    let n = g.n_vertices();
    let dim = params.dim;
    let mut rng = rng_for(params.seed);
    let mut y = initial_coords(params, n, InitScale::UnitBox, &mut rng)?;
    let k = ideal_length(n);
    let kernel = InverseDistance {
        k2: k * k,
        min_d2: 1e-18,
    };
    let theta = match params.repulsion {
        Repulsion::Exact => None,
        Repulsion::BarnesHut { theta } => Some(theta),
    };
    let adj = g.adjacency();
    let start = 0.1 * extent(&y, dim).max(k);
    let cooling = start / (params.iterations as f64 + 1.0);
    let mut temperature = start;
    for _ in 0..params.iterations {
        let mut disp = field(&y, dim, theta, &kernel).forces;
        disp.par_chunks_mut(dim).enumerate().for_each(|(i, out)| {
            let yi = &y[i * dim..(i + 1) * dim];
            for (j, w) in adj.iter(i) {
                let yj = &y[j * dim..(j + 1) * dim];
                let d = crate::types::euclidean(yi, yj);
                // w d^2 / K along the unit vector
                let c = w * d / k;
                for a in 0..dim {
                    out[a] -= c * (yi[a] - yj[a]);
                }
            }
        });
        for (p, dp) in y.chunks_mut(dim).zip(disp.chunks(dim)) {
            let len = dp.iter().map(|v| v * v).sum::<f64>().sqrt();
            if len > 0.0 {
                let s = len.min(temperature) / len;
                for a in 0..dim {
                    p[a] += dp[a] * s;
                }
            }
        }
        temperature -= cooling;
    }
    finish(n, dim, y)
}
