//! Per-item Gaussian bandwidths matched to a target perplexity.

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::types::DistanceMatrix;

pub const SIGMA_MIN: f64 = 1e-10;
pub const SIGMA_MAX: f64 = 1e10;
/// Tolerance on `log2(perplexity)`, i.e. on the entropy in bits.
pub const ENTROPY_TOLERANCE: f64 = 1e-5;
pub const MAX_STEPS: usize = 100;

/// Result of calibrating one distance row.
#[derive(Debug, Clone, PartialEq)]
pub struct RowCalibration {
    pub sigma: f64,
    pub achieved_perplexity: f64,
    /// `p_{j|i}`, zero at the item itself, summing to 1.
    pub conditional: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct PerplexityCalibration {
    pub sigma: Vec<f64>,
    pub achieved_perplexity: Vec<f64>,
}

/// Gaussian conditional distribution of row `self_index` at bandwidth
/// `sigma`, along with its entropy in bits.
pub fn conditional_row(distance_row: &[f64], self_index: usize, sigma: f64) -> (Vec<f64>, f64) {
    let min_sq = distance_row
        .iter()
        .enumerate()
        .filter(|&(j, _)| j != self_index)
        .map(|(_, d)| d * d)
        .fold(f64::INFINITY, f64::min);
    let inv = 1.0 / (2.0 * sigma * sigma);
    let mut p = vec![0.0; distance_row.len()];
    let mut sum = 0.0;
    let mut weighted = 0.0;
    for (j, &d) in distance_row.iter().enumerate() {
        if j == self_index {
            continue;
        }
        // shifting by the nearest distance cancels in the normalization and
        // keeps the largest term at exp(0)
        let x = (d * d - min_sq) * inv;
        let e = (-x).exp();
        p[j] = e;
        sum += e;
        weighted += e * x;
    }
    for v in &mut p {
        *v /= sum;
    }
    let entropy = (sum.ln() + weighted / sum) / std::f64::consts::LN_2;
    (p, entropy)
}

/// Bisects sigma on a log scale over `[SIGMA_MIN, SIGMA_MAX]` until the
/// entropy of `p_{.|i}` is within [`ENTROPY_TOLERANCE`] bits of
/// `log2(target)`.
pub fn perplexity_calibrate(
    distance_row: &[f64],
    self_index: usize,
    target_perplexity: f64,
) -> Result<RowCalibration> {
    let n = distance_row.len();
    if self_index >= n || n < 2 {
        return Err(Error::invalid("distance row too short or self index out of range"));
    }
    if !(1.0..=(n - 1) as f64).contains(&target_perplexity) {
        return Err(Error::invalid(format!(
            "perplexity {target_perplexity} outside [1, {}]",
            n - 1
        )));
    }
    let target = target_perplexity.log2();
    let (mut lo, mut hi) = (SIGMA_MIN.ln(), SIGMA_MAX.ln());
    let mut best: Option<(f64, Vec<f64>, f64)> = None;
    for _ in 0..MAX_STEPS {
        let mid = 0.5 * (lo + hi);
        let sigma = mid.exp();
        let (p, h) = conditional_row(distance_row, self_index, sigma);
        let err = h - target;
        let better = best.as_ref().is_none_or(|b| (b.2 - target).abs() > err.abs());
        if better {
            best = Some((sigma, p, h));
        }
        if err.abs() <= ENTROPY_TOLERANCE {
            break;
        }
        if err > 0.0 {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    let (sigma, conditional, h) = best.expect("at least one step");
    if (h - target).abs() > ENTROPY_TOLERANCE {
        return Err(Error::Calibration {
            row: self_index,
            reason: format!(
                "entropy {h:.6} bits after {MAX_STEPS} steps, target {target:.6}; distance row is degenerate"
            ),
        });
    }
    Ok(RowCalibration {
        sigma,
        achieved_perplexity: h.exp2(),
        conditional,
    })
}

/// Calibrates every row of `d`; row `i` of the returned row-major matrix is
/// `p_{.|i}`.
pub fn conditional_probabilities(
    d: &DistanceMatrix,
    target_perplexity: f64,
) -> Result<(Vec<f64>, PerplexityCalibration)> {
    let n = d.len();
    let rows: Vec<RowCalibration> = (0..n)
        .into_par_iter()
        .map(|i| perplexity_calibrate(d.row(i), i, target_perplexity))
        .collect::<Result<_>>()?;
    let mut p = Vec::with_capacity(n * n);
    let mut sigma = Vec::with_capacity(n);
    let mut achieved = Vec::with_capacity(n);
    for r in rows {
        p.extend_from_slice(&r.conditional);
        sigma.push(r.sigma);
        achieved.push(r.achieved_perplexity);
    }
    Ok((
        p,
        PerplexityCalibration {
            sigma,
            achieved_perplexity: achieved,
        },
    ))
}
