//! Mapping stage: layouts from relationship graphs and distance matrices.
//!
//! Every iterative embedder is sequential per iteration barrier and draws
//! its randomness from a ChaCha stream seeded by [`EmbedParams::seed`], so a
//! given `(graph, params)` pair reproduces the same bits.

mod bhtree;
mod linear;
mod negsample;
mod sammon;
mod sne;
mod spring;

pub use bhtree::{barnes_hut_repulsion, exact_repulsion, RepulsionField, SpaceTree, StudentT};
pub use linear::{classical_mds, pca, pca_init, Pca};
pub use negsample::{negative_sampling_embed, UMAP_A, UMAP_B};
pub use sammon::{sammon_embed, sammon_gradient, sammon_stress};
pub use sne::{
    sne_embed, sne_gradient, sne_objective, student_t_joint, tsne_embed, tsne_gradient, tsne_objective,
    Affinities,
};
pub use spring::{ideal_length, spring_layout};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::types::Layout;

/// Iteration at which t-SNE/SNE momentum switches from 0.5 to 0.8.
pub const MOMENTUM_SWITCH: usize = 250;
pub const COINCIDENT_JITTER: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq)]
pub enum Init {
    /// Seeded random positions at the method's natural scale.
    Random,
    /// Principal-component scores, rescaled to the method's natural scale.
    Pca(Layout),
    /// Used verbatim.
    Given(Layout),
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Repulsion {
    Exact,
    BarnesHut { theta: f64 },
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Exaggeration {
    pub factor: f64,
    pub duration: usize,
}

impl Exaggeration {
    pub const NONE: Exaggeration = Exaggeration {
        factor: 1.0,
        duration: 0,
    };

    pub(crate) fn at(&self, iteration: usize) -> f64 {
        if iteration < self.duration {
            self.factor
        } else {
            1.0
        }
    }
}

impl Default for Exaggeration {
    fn default() -> Self {
        Self {
            factor: 12.0,
            duration: 250,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct EmbedParams {
    pub dim: usize,
    pub iterations: usize,
    pub learning_rate: f64,
    pub seed: u64,
    pub init: Init,
    pub early_exaggeration: Exaggeration,
    pub negative_samples: usize,
    pub repulsion: Repulsion,
}

impl EmbedParams {
    /// t-SNE / SNE defaults: 1000 iterations, factor-12 exaggeration for the
    /// first 250.
    pub fn tsne() -> Self {
        Self {
            dim: 2,
            iterations: 1000,
            learning_rate: 200.0,
            seed: 42,
            init: Init::Random,
            early_exaggeration: Exaggeration::default(),
            negative_samples: 0,
            repulsion: Repulsion::Exact,
        }
    }

    /// 50 iterations of Fruchterman-Reingold with linear cooling.
    pub fn spring() -> Self {
        Self {
            dim: 2,
            iterations: 50,
            learning_rate: 1.0,
            seed: 42,
            init: Init::Random,
            early_exaggeration: Exaggeration::NONE,
            negative_samples: 0,
            repulsion: Repulsion::Exact,
        }
    }

    /// 500 epochs, initial rate 1 decaying linearly, 5 negative samples.
    pub fn negative_sampling() -> Self {
        Self {
            dim: 2,
            iterations: 500,
            learning_rate: 1.0,
            seed: 42,
            init: Init::Random,
            early_exaggeration: Exaggeration::NONE,
            negative_samples: 5,
            repulsion: Repulsion::Exact,
        }
    }

    pub fn sammon() -> Self {
        Self {
            dim: 2,
            iterations: 500,
            learning_rate: 1.0,
            seed: 42,
            init: Init::Random,
            early_exaggeration: Exaggeration::NONE,
            negative_samples: 0,
            repulsion: Repulsion::Exact,
        }
    }

    pub fn with_init(mut self, init: Init) -> Self {
        self.init = init;
        self
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }

    pub fn with_iterations(mut self, iterations: usize) -> Self {
        self.iterations = iterations;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.dim == 2 || self.dim == 3) {
            return Err(Error::invalid("embedding dimension must be 2 or 3"));
        }
        if self.iterations < 1 {
            return Err(Error::invalid("iterations must be >= 1"));
        }
        if !(self.learning_rate > 0.0 && self.learning_rate.is_finite()) {
            return Err(Error::invalid("learning rate must be positive"));
        }
        if !(self.early_exaggeration.factor >= 1.0 && self.early_exaggeration.factor.is_finite()) {
            return Err(Error::invalid("exaggeration factor must be >= 1"));
        }
        if let Repulsion::BarnesHut { theta } = self.repulsion {
            if !(theta > 0.0 && theta <= 1.0) {
                return Err(Error::invalid("Barnes-Hut theta must lie in (0, 1]"));
            }
        }
        match &self.init {
            Init::Pca(l) | Init::Given(l) if l.dim() != self.dim => {
                Err(Error::invalid("initial layout dimension differs from target dimension"))
            }
            _ => Ok(()),
        }
    }
}

/// Natural coordinate range an embedder starts from.
#[derive(Debug, Clone, Copy)]
pub(crate) enum InitScale {
    /// Centered, first-axis standard deviation of `1e-4`.
    Tiny,
    /// Fitted into the unit box, aspect preserved.
    UnitBox,
    /// Each axis stretched onto `[0, 10]`.
    Box10,
    /// Centered Gaussian with the given standard deviation.
    Spread(f64),
}

pub(crate) fn rng_for(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Resolves the initial coordinates for `n` points and jitters exact
/// duplicates.
pub(crate) fn initial_coords(params: &EmbedParams, n: usize, scale: InitScale, rng: &mut ChaCha8Rng) -> Result<Vec<f64>> {
    params.validate()?;
    let dim = params.dim;
    let mut coords = match &params.init {
        Init::Given(l) => {
            check_len(l, n)?;
            l.coords().to_vec()
        }
        Init::Pca(l) => {
            check_len(l, n)?;
            rescale(l.coords(), dim, scale)
        }
        Init::Random => {
            let mut c = vec![0.0; n * dim];
            match scale {
                InitScale::Tiny => {
                    let normal = Normal::new(0.0, 1e-4).unwrap();
                    c.iter_mut().for_each(|v| *v = normal.sample(rng));
                }
                InitScale::UnitBox => c.iter_mut().for_each(|v| *v = rng.random::<f64>()),
                InitScale::Box10 => c.iter_mut().for_each(|v| *v = rng.random_range(0.0..10.0)),
                InitScale::Spread(sd) => {
                    let normal = Normal::new(0.0, sd.max(f64::MIN_POSITIVE)).unwrap();
                    c.iter_mut().for_each(|v| *v = normal.sample(rng));
                }
            }
            c
        }
    };
    jitter_coincident(&mut coords, dim, rng);
    Ok(coords)
}

fn check_len(l: &Layout, n: usize) -> Result<()> {
    if l.n_points() != n {
        return Err(Error::invalid(format!(
            "initial layout has {} points, graph has {n}",
            l.n_points()
        )));
    }
    Ok(())
}

fn rescale(coords: &[f64], dim: usize, scale: InitScale) -> Vec<f64> {
    let n = coords.len() / dim;
    let mut out = coords.to_vec();
    let mut lo = vec![f64::INFINITY; dim];
    let mut hi = vec![f64::NEG_INFINITY; dim];
    let mut mean = vec![0.0; dim];
    for p in coords.chunks(dim) {
        for a in 0..dim {
            lo[a] = lo[a].min(p[a]);
            hi[a] = hi[a].max(p[a]);
            mean[a] += p[a] / n as f64;
        }
    }
    match scale {
        InitScale::Tiny | InitScale::Spread(_) => {
            let target = match scale {
                InitScale::Spread(sd) => sd,
                _ => 1e-4,
            };
            let var = coords.chunks(dim).map(|p| (p[0] - mean[0]).powi(2)).sum::<f64>() / n as f64;
            let f = if var > 0.0 { target / var.sqrt() } else { 1.0 };
            for p in out.chunks_mut(dim) {
                for a in 0..dim {
                    p[a] = (p[a] - mean[a]) * f;
                }
            }
        }
        InitScale::UnitBox => {
            let extent = (0..dim).map(|a| hi[a] - lo[a]).fold(0.0, f64::max);
            let f = if extent > 0.0 { 1.0 / extent } else { 1.0 };
            for p in out.chunks_mut(dim) {
                for a in 0..dim {
                    p[a] = (p[a] - lo[a]) * f;
                }
            }
        }
        InitScale::Box10 => {
            for p in out.chunks_mut(dim) {
                for a in 0..dim {
                    let span = hi[a] - lo[a];
                    p[a] = if span > 0.0 { 10.0 * (p[a] - lo[a]) / span } else { 0.0 };
                }
            }
        }
    }
    out
}

/// Nudges all but the first of every group of exactly coincident points by
/// seeded noise of magnitude [`COINCIDENT_JITTER`].
pub(crate) fn jitter_coincident(coords: &mut [f64], dim: usize, rng: &mut ChaCha8Rng) {
    let n = coords.len() / dim;
    let mut order: Vec<usize> = (0..n).collect();
    let cmp = |a: &usize, b: &usize| {
        let (pa, pb) = (&coords[a * dim..(a + 1) * dim], &coords[b * dim..(b + 1) * dim]);
        pa.iter()
            .zip(pb)
            .map(|(x, y)| x.total_cmp(y))
            .find(|o| o.is_ne())
            .unwrap_or(std::cmp::Ordering::Equal)
            .then(a.cmp(b))
    };
    order.sort_by(cmp);
    let mut dup = Vec::new();
    for w in order.windows(2) {
        let (a, b) = (w[0], w[1]);
        if coords[a * dim..(a + 1) * dim] == coords[b * dim..(b + 1) * dim] {
            dup.push(b);
        }
    }
    dup.sort_unstable();
    for i in dup {
        for a in 0..dim {
            coords[i * dim + a] += rng.random_range(-COINCIDENT_JITTER..COINCIDENT_JITTER);
        }
    }
}

pub(crate) fn finish(n: usize, dim: usize, coords: Vec<f64>) -> Result<Layout> {
    Layout::new(n, dim, coords).map_err(|_| Error::Numeric("embedding diverged to non-finite coordinates".into()))
}
