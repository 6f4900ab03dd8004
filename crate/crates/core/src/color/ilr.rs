//! Isometric log-ratio coordinates for compositions.
//!
//! The basis is the Helmert-style sequential one: coordinate `i` (0-based,
//! `i < D - 1`) is
//!
//! ```text
//! ilr_i = sqrt((i + 1) / (i + 2)) * ln( gmean(x_0..=x_i) / x_{i+1} )
//! ```
//!
//! which equals the projection of the clr vector onto
//! `e_i = sqrt((i+1)/(i+2)) * (1/(i+1), …, 1/(i+1), -1, 0, …, 0)`.

use super::palette::ColorComposition;
use crate::error::{Error, Result};

pub const DEFAULT_PSEUDO_COUNT: f64 = 1e-4;

/// Orthonormal `(D-1)×D` basis of the clr hyperplane, row per coordinate.
pub fn helmert_basis(parts: usize) -> Vec<Vec<f64>> {
    (0..parts.saturating_sub(1))
        .map(|i| {
            let k = (i + 1) as f64;
            let scale = (k / (k + 1.0)).sqrt();
            (0..parts)
                .map(|j| {
                    if j <= i {
                        scale / k
                    } else if j == i + 1 {
                        -scale
                    } else {
                        0.0
                    }
                })
                .collect()
        })
        .collect()
}

/// Centered log-ratio of a strictly positive composition.
pub fn clr(parts: &[f64]) -> Vec<f64> {
    let logs: Vec<f64> = parts.iter().map(|p| p.ln()).collect();
    let mean = logs.iter().sum::<f64>() / logs.len() as f64;
    logs.iter().map(|l| l - mean).collect()
}

/// Replaces zero parts with `pseudo` and renormalizes.
pub fn close_zeros(fractions: &[f64], pseudo: f64) -> Vec<f64> {
    let replaced: Vec<f64> = fractions.iter().map(|&f| if f > 0.0 { f } else { pseudo }).collect();
    let total: f64 = replaced.iter().sum();
    replaced.iter().map(|f| f / total).collect()
}

/// ILR coordinates (`D - 1` of them) of a composition.
pub fn ilr_transform(c: &ColorComposition, pseudo: f64) -> Result<Vec<f64>> {
    if c.fractions.len() < 2 {
        return Err(Error::InvalidParameter("ilr needs at least two parts".into()));
    }
    if !(pseudo > 0.0) {
        return Err(Error::InvalidParameter(format!("pseudo-count {pseudo}")));
    }
    let z = clr(&close_zeros(&c.fractions, pseudo));
    Ok(helmert_basis(z.len()).iter().map(|e| e.iter().zip(&z).map(|(a, b)| a * b).sum()).collect())
}

pub fn euclidean(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum::<f64>().sqrt()
}
