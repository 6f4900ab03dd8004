use nalgebra::{DMatrix, SymmetricEigen};
use serde::Serialize;

use crate::error::{Error, Result};

/// Principal axes of a point set.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PcaModel {
    pub mean: Vec<f64>,
    /// `k` orthonormal rows, strongest first.
    pub components: Vec<Vec<f64>>,
    /// Eigenvalue (sample variance along the axis) for each component.
    pub variances: Vec<f64>,
}

impl PcaModel {
    pub fn dim(&self) -> usize {
        self.mean.len()
    }

    pub fn explained_ratio(&self) -> Vec<f64> {
        let total: f64 = self.variances.iter().sum();
        self.variances.iter().map(|v| if total > 0.0 { v / total } else { 0.0 }).collect()
    }
}

/// Flips `v` so its first clearly nonzero coordinate is positive.
fn orient(v: &mut [f64]) {
    if let Some(&first) = v.iter().find(|x| x.abs() > 1e-12) {
        if first < 0.0 {
            v.iter_mut().for_each(|x| *x = -*x);
        }
    }
}

/// Fits the top `k` components from the sample covariance (n - 1).
pub fn pca_fit(vectors: &[Vec<f64>], k: usize) -> Result<PcaModel> {
    if vectors.len() < 2 {
        return Err(Error::InsufficientData(format!("pca needs 2 vectors, got {}", vectors.len())));
    }
    let d = vectors[0].len();
    if d == 0 || vectors.iter().any(|v| v.len() != d) {
        return Err(Error::Dimensions("pca vectors must share a non-zero dimension".into()));
    }
    if k == 0 || k > d {
        return Err(Error::InvalidParameter(format!("k = {k} for dimension {d}")));
    }
    let n = vectors.len() as f64;
    let mean: Vec<f64> = (0..d).map(|j| vectors.iter().map(|v| v[j]).sum::<f64>() / n).collect();
    let mut cov = DMatrix::<f64>::zeros(d, d);
    for v in vectors {
        for i in 0..d {
            for j in 0..d {
                cov[(i, j)] += (v[i] - mean[i]) * (v[j] - mean[j]);
            }
        }
    }
    cov /= n - 1.0;
    let eig = SymmetricEigen::new(cov);
    let mut axes: Vec<(f64, Vec<f64>)> = (0..d)
        .map(|c| {
            let mut v: Vec<f64> = eig.eigenvectors.column(c).iter().copied().collect();
            orient(&mut v);
            // Round-off can leave tiny negative eigenvalues.
            (eig.eigenvalues[c].max(0.0), v)
        })
        .collect();
    axes.sort_by(|a, b| {
        b.0.total_cmp(&a.0).then_with(|| {
            a.1.iter().zip(&b.1).map(|(x, y)| y.total_cmp(x)).find(|o| o.is_ne()).unwrap_or(std::cmp::Ordering::Equal)
        })
    });
    axes.truncate(k);
    Ok(PcaModel {
        mean,
        variances: axes.iter().map(|a| a.0).collect(),
        components: axes.into_iter().map(|a| a.1).collect(),
    })
}

/// Coordinates `components · (v - mean)`.
pub fn pca_project(m: &PcaModel, v: &[f64]) -> Result<Vec<f64>> {
    if v.len() != m.dim() {
        return Err(Error::Dimensions(format!("vector of length {} for a {}-d model", v.len(), m.dim())));
    }
    Ok(m.components.iter().map(|c| c.iter().zip(v).zip(&m.mean).map(|((a, x), mu)| a * (x - mu)).sum()).collect())
}

/// Inverse of [`pca_project`] (exact when `k` equals the dimension).
pub fn pca_reconstruct(m: &PcaModel, coords: &[f64]) -> Result<Vec<f64>> {
    if coords.len() != m.components.len() {
        return Err(Error::Dimensions(format!("{} coordinates for {} components", coords.len(), m.components.len())));
    }
    let mut out = m.mean.clone();
    for (c, &t) in m.components.iter().zip(coords) {
        for (o, a) in out.iter_mut().zip(c) {
            *o += t * a;
        }
    }
    Ok(out)
}
