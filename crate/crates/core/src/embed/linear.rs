//! Analytic embeddings: principal components and classical MDS.

use nalgebra::{DMatrix, SymmetricEigen};

use crate::error::Result;
use crate::types::{DataMatrix, DistanceMatrix, Layout};

/// Principal-component projection of mean-centered data.
#[derive(Debug, Clone)]
pub struct Pca {
    pub layout: Layout,
    /// Covariance eigenvalues (divisor `N - 1`), descending.
    pub eigenvalues: Vec<f64>,
    /// Retained unit-length components, one per output axis, each of length m.
    pub components: Vec<Vec<f64>>,
    pub mean: Vec<f64>,
}

/// Eigenpairs sorted by descending eigenvalue.
fn sorted_eigen(m: DMatrix<f64>) -> (Vec<f64>, Vec<Vec<f64>>) {
    let eig = SymmetricEigen::new(m);
    let mut idx: Vec<usize> = (0..eig.eigenvalues.len()).collect();
    idx.sort_by(|&a, &b| eig.eigenvalues[b].total_cmp(&eig.eigenvalues[a]).then(a.cmp(&b)));
    let values = idx.iter().map(|&i| eig.eigenvalues[i]).collect();
    let vectors = idx
        .iter()
        .map(|&i| {
            let mut v: Vec<f64> = eig.eigenvectors.column(i).iter().copied().collect();
            orient(&mut v);
            v
        })
        .collect();
    (values, vectors)
}

/// Flips `v` so its largest-magnitude entry is positive (first one on ties).
fn orient(v: &mut [f64]) {
    let mut best = 0;
    for (i, x) in v.iter().enumerate() {
        if x.abs() > v[best].abs() {
            best = i;
        }
    }
    if v.get(best).is_some_and(|&x| x < 0.0) {
        v.iter_mut().for_each(|x| *x = -*x);
    }
}

pub fn pca(data: &DataMatrix, dim: usize) -> Result<Pca> {
    let (n, m) = (data.n_rows(), data.n_cols());
    let mut mean = vec![0.0; m];
    for i in 0..n {
        for (a, v) in data.row(i).iter().enumerate() {
            mean[a] += v;
        }
    }
    mean.iter_mut().for_each(|v| *v /= n as f64);
    let centered = DMatrix::from_fn(n, m, |i, a| data.row(i)[a] - mean[a]);
    let cov = (centered.transpose() * &centered) / (n as f64 - 1.0);
    let (eigenvalues, vectors) = sorted_eigen(cov);
    let keep = dim.min(m);
    let components: Vec<Vec<f64>> = vectors.into_iter().take(keep).collect();
    let mut coords = vec![0.0; n * dim];
    for i in 0..n {
        for (c, comp) in components.iter().enumerate() {
            coords[i * dim + c] = (0..m).map(|a| centered[(i, a)] * comp[a]).sum();
        }
    }
    Ok(Pca {
        layout: Layout::new(n, dim, coords)?,
        eigenvalues,
        components,
        mean,
    })
}

/// Scores on the top `dim` principal components; axes beyond the data
/// dimension are zero.
pub fn pca_init(data: &DataMatrix, dim: usize) -> Result<Layout> {
    pca(data, dim).map(|p| p.layout)
}

/// Torgerson scaling: eigen-decomposition of `B = -1/2 J D^2 J`, with each
/// axis scaled by the square root of its eigenvalue. Axes without a positive
/// eigenvalue are left at zero.
pub fn classical_mds(d: &DistanceMatrix, dim: usize) -> Result<Layout> {
    let n = d.len();
    let sq = DMatrix::from_fn(n, n, |i, j| d.get(i, j) * d.get(i, j));
    let row_mean: Vec<f64> = (0..n).map(|i| sq.row(i).sum() / n as f64).collect();
    let grand = row_mean.iter().sum::<f64>() / n as f64;
    let b = DMatrix::from_fn(n, n, |i, j| -0.5 * (sq[(i, j)] - row_mean[i] - row_mean[j] + grand));
    let (values, vectors) = sorted_eigen(b);
    let scale = values.first().copied().unwrap_or(0.0).abs().max(1.0);
    let mut coords = vec![0.0; n * dim];
    let mut missing = 0;
    for c in 0..dim {
        match values.get(c) {
            Some(&lambda) if lambda > 1e-12 * scale => {
                let s = lambda.sqrt();
                for i in 0..n {
                    coords[i * dim + c] = vectors[c][i] * s;
                }
            }
            _ => missing += 1,
        }
    }
    if missing > 0 {
        log::warn!("classical MDS: {missing} of {dim} axes have no positive eigenvalue; padded with zeros");
    }
    Layout::new(n, dim, coords)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::types::{distance_matrix, Metric};

    #[test]
    fn square_corners_are_recovered() {
        let data = DataMatrix::from_rows(&[[0.0, 0.0], [1.0, 0.0], [1.0, 1.0], [0.0, 1.0]]).unwrap();
        let d = distance_matrix(&data, Metric::Euclidean).unwrap();
        let l = classical_mds(&d, 2).unwrap();
        for i in 0..4 {
            for j in 0..4 {
                assert!((l.distance(i, j) - d.get(i, j)).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn collinear_points_have_flat_second_axis() {
        let data = DataMatrix::from_rows(&[[0.0, 0.0], [1.0, 2.0], [3.0, 6.0], [4.0, 8.0]]).unwrap();
        let d = distance_matrix(&data, Metric::Euclidean).unwrap();
        let l = classical_mds(&d, 2).unwrap();
        assert!((0..4).all(|i| l.point(i)[1].abs() < 1e-6));
        let p = pca_init(&data, 2).unwrap();
        assert!((0..4).all(|i| p.point(i)[1].abs() < 1e-10));
    }

    #[test]
    fn pca_of_planar_data_preserves_distances() {
        let data = DataMatrix::from_rows(&[[0.3, 1.0], [2.0, -1.0], [5.0, 0.5], [1.0, 4.0], [-2.0, 0.0]]).unwrap();
        let p = pca_init(&data, 2).unwrap();
        for i in 0..5 {
            for j in 0..5 {
                let a = crate::types::euclidean(data.row(i), data.row(j));
                assert!((p.distance(i, j) - a).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn pca_pads_when_data_is_one_dimensional() {
        let data = DataMatrix::from_rows(&[[0.0], [1.0], [3.0]]).unwrap();
        let p = pca_init(&data, 2).unwrap();
        assert!((0..3).all(|i| p.point(i)[1] == 0.0));
    }

    #[test]
    fn sign_convention() {
        let mut v = vec![0.1, -0.9, 0.3];
        orient(&mut v);
        assert_eq!(v, vec![-0.1, 0.9, -0.3]);
    }
}
