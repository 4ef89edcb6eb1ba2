//! Principal components from the eigendecomposition of the sample covariance.

use nalgebra::{DMatrix, SymmetricEigen};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::eval::matrix::FeatureMatrix;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Pca {
    /// Column means removed before projection.
    pub means: Vec<f64>,
    /// `loadings[c][j]`: weight of feature `j` in component `c`.
    pub loadings: Vec<Vec<f64>>,
    /// `scores[i][c]`: row `i` projected on component `c`.
    pub scores: Vec<Vec<f64>>,
    pub eigenvalues: Vec<f64>,
    pub explained_variance_ratio: Vec<f64>,
}

/// The leading `components` principal axes. Each axis is signed so that its
/// largest-magnitude loading is positive.
pub fn pca(m: &FeatureMatrix, components: usize) -> Result<Pca> {
    let (n, p) = (m.nrows(), m.ncols());
    if n < 2 {
        return Err(Error::TooFewRows { needed: 2, got: n });
    }
    if components == 0 || components > p {
        return Err(Error::InvalidArgument(format!(
            "components must lie in 1..={p}, got {components}"
        )));
    }
    let means: Vec<f64> = (0..p)
        .map(|j| m.data().iter().map(|r| r[j]).sum::<f64>() / n as f64)
        .collect();
    let x = DMatrix::from_fn(n, p, |i, j| m.row(i)[j] - means[j]);
    let cov = (x.transpose() * &x) / (n - 1) as f64;
    let eig = SymmetricEigen::new(cov);

    let mut order: Vec<usize> = (0..p).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[b].total_cmp(&eig.eigenvalues[a]));
    let eigenvalues: Vec<f64> = order.iter().map(|&i| eig.eigenvalues[i].max(0.0)).collect();
    let total: f64 = eigenvalues.iter().sum();
    if !(total > 0.0) {
        return Err(Error::DegenerateCovariance);
    }

    let loadings: Vec<Vec<f64>> = order[..components]
        .iter()
        .map(|&c| {
            let v: Vec<f64> = eig.eigenvectors.column(c).iter().copied().collect();
            let lead = v
                .iter()
                .copied()
                .fold(0.0f64, |best, x| if x.abs() > best.abs() { x } else { best });
            if lead < 0.0 {
                v.into_iter().map(|x| -x).collect()
            } else {
                v
            }
        })
        .collect();
    let scores = (0..n)
        .map(|i| {
            loadings
                .iter()
                .map(|l| (0..p).map(|j| x[(i, j)] * l[j]).sum())
                .collect()
        })
        .collect();
    let explained_variance_ratio = eigenvalues[..components].iter().map(|l| l / total).collect();
    Ok(Pca {
        means,
        loadings,
        scores,
        eigenvalues: eigenvalues[..components].to_vec(),
        explained_variance_ratio,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::eval::matrix::{Origin, RowLabel};
    use crate::rng;
    use rand_distr::{Distribution, StandardNormal};

    fn matrix(data: Vec<Vec<f64>>) -> FeatureMatrix {
        let cols = (0..data[0].len()).map(|j| format!("f{j}")).collect();
        let rows = (0..data.len())
            .map(|i| RowLabel::new(i.to_string(), "m", Origin::Original))
            .collect();
        FeatureMatrix::new(rows, cols, data).unwrap()
    }

    fn gaussian(n: usize, p: usize, seed: u64) -> Vec<Vec<f64>> {
        let mut r = rng::stream(seed, 0);
        (0..n)
            .map(|_| (0..p).map(|_| StandardNormal.sample(&mut r)).collect())
            .collect()
    }

    #[test]
    fn points_on_a_line() {
        let data = (0..20).map(|i| vec![i as f64, 3.0 - 2.0 * i as f64]).collect();
        let p = pca(&matrix(data), 2).unwrap();
        assert!((p.explained_variance_ratio[0] - 1.0).abs() < 1e-9);
        let l = &p.loadings[0];
        let s5 = 5f64.sqrt();
        // direction (1, -2)/√5, signed so the -2 entry is positive
        assert!((l[0] + 1.0 / s5).abs() < 1e-9 && (l[1] - 2.0 / s5).abs() < 1e-9);
    }

    #[test]
    fn isotropic_sample() {
        let p = pca(&matrix(gaussian(10_000, 2, 5)), 2).unwrap();
        for r in &p.explained_variance_ratio {
            assert!((r - 0.5).abs() < 0.05, "{r}");
        }
    }

    #[test]
    fn orthonormal_and_reconstructs() {
        let data = gaussian(60, 4, 8)
            .into_iter()
            .map(|r| vec![r[0], r[0] + 0.3 * r[1], r[2] - r[1], 2.0 * r[3] + 1.0])
            .collect::<Vec<_>>();
        let m = matrix(data.clone());
        let p = pca(&m, 4).unwrap();
        for a in 0..4 {
            for b in 0..4 {
                let dot: f64 = (0..4).map(|j| p.loadings[a][j] * p.loadings[b][j]).sum();
                assert!((dot - if a == b { 1.0 } else { 0.0 }).abs() < 1e-9);
            }
        }
        for w in p.explained_variance_ratio.windows(2) {
            assert!(w[0] >= w[1]);
        }
        assert!((p.explained_variance_ratio.iter().sum::<f64>() - 1.0).abs() < 1e-12);
        for (i, row) in data.iter().enumerate() {
            for j in 0..4 {
                let back: f64 = p.means[j] + (0..4).map(|c| p.scores[i][c] * p.loadings[c][j]).sum::<f64>();
                assert!((back - row[j]).abs() < 1e-9);
            }
        }
        for l in &p.loadings {
            let lead = l.iter().copied().fold(0.0f64, |b, x| if x.abs() > b.abs() { x } else { b });
            assert!(lead > 0.0);
        }
    }

    #[test]
    fn degenerate_inputs() {
        assert!(matches!(pca(&matrix(vec![vec![1.0, 2.0]; 5]), 1), Err(Error::DegenerateCovariance)));
        assert!(pca(&matrix(vec![vec![1.0, 2.0]]), 1).is_err());
        assert!(pca(&matrix(vec![vec![1.0], vec![2.0]]), 2).is_err());
    }
}
