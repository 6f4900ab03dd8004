//! Pigmentation analysis: palette composition, ILR, PCA and distance
//! histograms.

mod distance;
mod ilr;
mod palette;
mod pca;

use std::io::Write;

pub use distance::{distance_analysis, DistanceAnalysis, DistanceMode, Histogram, DEFAULT_BIN_WIDTH};
pub use ilr::{close_zeros, clr, euclidean, helmert_basis, ilr_transform, DEFAULT_PSEUDO_COUNT};
pub use palette::{
    lab_to_rgb, quantify_all_colors, quantify_colors, rgb_to_lab, ColorComposition, Palette, PaletteEntry, BLUE_GREY,
    DARK_BROWN, GREEN, LIGHT_BROWN,
};
pub use pca::{pca_fit, pca_project, pca_reconstruct, PcaModel};

use crate::error::{Error, Result};
use distance::csv_err;

fn writer<W: Write>(w: W) -> csv::Writer<W> {
    csv::WriterBuilder::new().terminator(csv::Terminator::Any(b'\n')).from_writer(w)
}

fn write_rows<W: Write>(w: W, header: Vec<String>, rows: impl Iterator<Item = Vec<String>>) -> Result<()> {
    let mut out = writer(w);
    out.write_record(&header).map_err(csv_err)?;
    for r in rows {
        out.write_record(&r).map_err(csv_err)?;
    }
    out.flush().map_err(|e| Error::io("<csv>", e))
}

/// `id,ilr1,…` rows.
pub fn write_ilr_csv<W: Write>(w: W, ids: &[String], vectors: &[Vec<f64>]) -> Result<()> {
    let dim = vectors.first().map_or(0, Vec::len);
    let header = std::iter::once("id".to_string()).chain((1..=dim).map(|i| format!("ilr{i}"))).collect();
    write_rows(
        w,
        header,
        ids.iter()
            .zip(vectors)
            .map(|(id, v)| std::iter::once(id.clone()).chain(v.iter().map(|x| format!("{x:.9}"))).collect()),
    )
}

/// `id,set,pc1,…` rows.
pub fn write_pca_csv<W: Write>(w: W, rows: &[(String, String, Vec<f64>)]) -> Result<()> {
    let dim = rows.first().map_or(0, |r| r.2.len());
    let header = ["id", "set"].iter().map(|s| s.to_string()).chain((1..=dim).map(|i| format!("pc{i}"))).collect();
    write_rows(
        w,
        header,
        rows.iter().map(|(id, set, v)| {
            [id.clone(), set.clone()].into_iter().chain(v.iter().map(|x| format!("{x:.9}"))).collect()
        }),
    )
}

/// Raw distance values, one per row, with the nearest reference when known.
pub fn write_distances_csv<W: Write>(
    w: W,
    a: &DistanceAnalysis,
    labels_a: &[String],
    labels_b: &[String],
) -> Result<()> {
    match a.mode {
        DistanceMode::Intra => {
            let n = labels_a.len();
            let pairs = (0..n).flat_map(|i| (i + 1..n).map(move |j| (i, j)));
            write_rows(
                w,
                vec!["id_a".into(), "id_b".into(), "distance".into()],
                pairs
                    .zip(&a.values)
                    .map(|((i, j), d)| vec![labels_a[i].clone(), labels_a[j].clone(), format!("{d:.9}")]),
            )
        }
        DistanceMode::Inter => write_rows(
            w,
            vec!["id".into(), "nearest".into(), "distance".into()],
            labels_b
                .iter()
                .zip(&a.nearest)
                .zip(&a.values)
                .map(|((id, &k), d)| vec![id.clone(), labels_a[k].clone(), format!("{d:.9}")]),
        ),
    }
}
