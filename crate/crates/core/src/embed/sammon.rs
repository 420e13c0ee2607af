//! Sammon mapping by gradient descent with backtracking.
//!
//! Stress is `E = (1 / sum_{i<j} w_ij) sum_{i<j} (w_ij - d_ij)^2 / w_ij`
//! with `w` the input dissimilarities and `d` the layout distances.

use rayon::prelude::*;

use super::{finish, initial_coords, rng_for, EmbedParams, Init, InitScale};
use crate::error::{Error, Result};
use crate::types::{euclidean, DistanceMatrix, Layout};

const MAX_BACKTRACKS: usize = 40;
const STEP_GROWTH: f64 = 1.5;
/// Layout distances below this are treated as this value in the gradient.
const MIN_LAYOUT_DISTANCE: f64 = 1e-12;

fn check_inputs(d: &DistanceMatrix, n_points: usize) -> Result<f64> {
    if d.len() != n_points {
        return Err(Error::invalid("distance matrix and layout differ in size"));
    }
    let n = d.len();
    let mut total = 0.0;
    for i in 0..n {
        for j in (i + 1)..n {
            let w = d.get(i, j);
            if w <= 0.0 {
                return Err(Error::ZeroDistance { i, j });
            }
            total += w;
        }
    }
    Ok(total)
}

fn stress_of(d: &DistanceMatrix, coords: &[f64], dim: usize, total: f64) -> f64 {
    let n = d.len();
    let rows: Vec<f64> = (0..n)
        .into_par_iter()
        .map(|i| {
            let yi = &coords[i * dim..(i + 1) * dim];
            ((i + 1)..n)
                .map(|j| {
                    let w = d.get(i, j);
                    let dij = euclidean(yi, &coords[j * dim..(j + 1) * dim]);
                    (w - dij) * (w - dij) / w
                })
                .sum()
        })
        .collect();
    rows.iter().sum::<f64>() / total
}

fn gradient_of(d: &DistanceMatrix, coords: &[f64], dim: usize, total: f64) -> Vec<f64> {
    let n = d.len();
    let mut grad = vec![0.0; coords.len()];
    grad.par_chunks_mut(dim).enumerate().for_each(|(i, g)| {
        let yi = &coords[i * dim..(i + 1) * dim];
        for j in 0..n {
            if j == i {
                continue;
            }
            let yj = &coords[j * dim..(j + 1) * dim];
            let w = d.get(i, j);
            let dij = euclidean(yi, yj).max(MIN_LAYOUT_DISTANCE);
            let c = (dij - w) / (dij * w);
            for a in 0..dim {
                g[a] += c * (yi[a] - yj[a]);
            }
        }
        for v in g.iter_mut() {
            *v *= 2.0 / total;
        }
    });
    grad
}

pub fn sammon_stress(d: &DistanceMatrix, layout: &Layout) -> Result<f64> {
    let total = check_inputs(d, layout.n_points())?;
    Ok(stress_of(d, layout.coords(), layout.dim(), total))
}

/// `dE/dy_i = (-2 / sum w) sum_j (w_ij - d_ij) / (w_ij d_ij) (y_i - y_j)`.
pub fn sammon_gradient(d: &DistanceMatrix, layout: &Layout) -> Result<Vec<f64>> {
    let total = check_inputs(d, layout.n_points())?;
    Ok(gradient_of(d, layout.coords(), layout.dim(), total))
}

/// Steepest descent on the stress; each accepted step does not increase it.
/// `Init::Pca` scores are used at their own scale.
pub fn sammon_embed(d: &DistanceMatrix, params: &EmbedParams) -> Result<Layout> {
    let n = d.len();
    let total = check_inputs(d, n)?;
    let dim = params.dim;
    let mean = total / (n * (n - 1) / 2) as f64;
    let mut rng = rng_for(params.seed);
    let scale = InitScale::Spread(mean / (2.0 * dim as f64).sqrt());
    let mut y = match &params.init {
        Init::Pca(l) => initial_coords(&params.clone().with_init(Init::Given(l.clone())), n, scale, &mut rng)?,
        _ => initial_coords(params, n, scale, &mut rng)?,
    };
    let mut energy = stress_of(d, &y, dim, total);
    let mut step = params.learning_rate;
    let mut trial = vec![0.0; y.len()];
    for _ in 0..params.iterations {
        let grad = gradient_of(d, &y, dim, total);
        let mut accepted = false;
        for _ in 0..MAX_BACKTRACKS {
            for ((t, yv), g) in trial.iter_mut().zip(&y).zip(&grad) {
                *t = yv - step * g;
            }
            let e = stress_of(d, &trial, dim, total);
            if e <= energy {
                std::mem::swap(&mut y, &mut trial);
                energy = e;
                step *= STEP_GROWTH;
                accepted = true;
                break;
            }
            step *= 0.5;
        }
        if !accepted {
            break;
        }
    }
    finish(n, dim, y)
}
