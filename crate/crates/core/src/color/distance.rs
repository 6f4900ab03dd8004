use std::io::Write;

use rayon::prelude::*;
use serde::Serialize;

use super::ilr::euclidean;
use crate::error::{Error, Result};

pub const DEFAULT_BIN_WIDTH: f64 = 0.05;

/// Fixed-width histogram starting at zero.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Histogram {
    pub bin_width: f64,
    pub counts: Vec<u64>,
}

impl Histogram {
    /// Bins `[k·w, (k+1)·w)`; enough bins to hold the largest value.
    pub fn build(values: &[f64], bin_width: f64) -> Result<Self> {
        if !(bin_width > 0.0) || !bin_width.is_finite() {
            return Err(Error::InvalidParameter(format!("bin width {bin_width}")));
        }
        let max = values.iter().copied().fold(0.0f64, f64::max);
        let mut counts = vec![0u64; (max / bin_width).floor() as usize + 1];
        for &v in values {
            let k = ((v.max(0.0) / bin_width).floor() as usize).min(counts.len() - 1);
            counts[k] += 1;
        }
        Ok(Self { bin_width, counts })
    }

    pub fn total(&self) -> u64 {
        self.counts.iter().sum()
    }

    pub fn bins(&self) -> impl Iterator<Item = (f64, f64, u64)> + '_ {
        self.counts.iter().enumerate().map(|(k, &c)| (k as f64 * self.bin_width, (k + 1) as f64 * self.bin_width, c))
    }

    /// Writes `bin_lo,bin_hi,count` rows.
    pub fn write_csv<W: Write>(&self, w: W) -> Result<()> {
        let mut out = csv::WriterBuilder::new().terminator(csv::Terminator::Any(b'\n')).from_writer(w);
        out.write_record(["bin_lo", "bin_hi", "count"]).map_err(csv_err)?;
        for (lo, hi, c) in self.bins() {
            out.write_record([format!("{lo:.4}"), format!("{hi:.4}"), c.to_string()]).map_err(csv_err)?;
        }
        out.flush().map_err(|e| Error::io("<histogram>", e))
    }
}

pub(crate) fn csv_err(e: csv::Error) -> Error {
    Error::Config(format!("csv: {e}"))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum DistanceMode {
    Intra,
    Inter,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DistanceAnalysis {
    pub mode: DistanceMode,
    /// Intra: pairs `(i, j)`, `i < j`, in lexicographic order.
    /// Inter: one value per vector of `set_b`, in order.
    pub values: Vec<f64>,
    /// Inter only: index into `set_a` of each nearest vector.
    pub nearest: Vec<usize>,
    pub histogram: Histogram,
}

/// Intra-set pairwise distances (`set_b = None`) or, for each vector of
/// `set_b`, the distance to its nearest neighbour in `set_a`.
pub fn distance_analysis(set_a: &[Vec<f64>], set_b: Option<&[Vec<f64>]>, bin_width: f64) -> Result<DistanceAnalysis> {
    if set_a.is_empty() {
        return Err(Error::InsufficientData("distance analysis needs a non-empty set".into()));
    }
    let d = set_a[0].len();
    if set_a.iter().chain(set_b.unwrap_or(&[]).iter()).any(|v| v.len() != d) {
        return Err(Error::Dimensions("vectors of differing dimension".into()));
    }
    let (mode, values, nearest) = match set_b {
        None => {
            let n = set_a.len();
            let values: Vec<f64> = (0..n)
                .into_par_iter()
                .flat_map_iter(|i| (i + 1..n).map(move |j| euclidean(&set_a[i], &set_a[j])))
                .collect();
            (DistanceMode::Intra, values, Vec::new())
        }
        Some(b) => {
            if b.is_empty() {
                return Err(Error::InsufficientData("inter analysis needs a non-empty second set".into()));
            }
            let (values, nearest) =
                b.par_iter()
                    .map(|v| {
                        set_a
                            .iter()
                            .enumerate()
                            .map(|(i, a)| (euclidean(a, v), i))
                            .fold((f64::INFINITY, 0), |best, x| if x.0 < best.0 { x } else { best })
                    })
                    .unzip();
            (DistanceMode::Inter, values, nearest)
        }
    };
    Ok(DistanceAnalysis { mode, histogram: Histogram::build(&values, bin_width)?, values, nearest })
}
