//! Contrast-limited adaptive histogram equalization.

use super::raster::{quantize, RasterImage};
use crate::error::{Error, Result};

pub const DEFAULT_CLIP_LIMIT: f64 = 2.0;
/// Tile grid for 360×45 polar strips: 8 tiles along the angle, 1 radially.
pub const DEFAULT_TILES_X: usize = 8;
pub const DEFAULT_TILES_Y: usize = 1;

/// Half-open pixel span `[start, end)` of tile `t` out of `tiles` over `len`.
#[inline]
fn tile_span(t: usize, tiles: usize, len: usize) -> (usize, usize) {
    (t * len / tiles, (t + 1) * len / tiles)
}

/// Clips a histogram at `limit` counts and spreads the excess evenly. The
/// remainder of the integer division goes to evenly spaced bins.
pub(crate) fn clip_histogram(hist: &mut [u32; 256], limit: u32) {
    let mut excess = 0u32;
    for h in hist.iter_mut() {
        if *h > limit {
            excess += *h - limit;
            *h = limit;
        }
    }
    let batch = excess / 256;
    let residual = (excess % 256) as usize;
    hist.iter_mut().for_each(|h| *h += batch);
    if let Some(step) = 256usize.checked_div(residual) {
        let step = step.max(1);
        for i in (0..256).step_by(step).take(residual) {
            hist[i] += 1;
        }
    }
}

/// Equalization lookup table for one tile.
fn tile_lut(img: &RasterImage, xs: (usize, usize), ys: (usize, usize), clip_limit: f64) -> [u8; 256] {
    let mut hist = [0u32; 256];
    for y in ys.0..ys.1 {
        for &v in &img.data()[y * img.width() + xs.0..y * img.width() + xs.1] {
            hist[v as usize] += 1;
        }
    }
    let pixels = ((xs.1 - xs.0) * (ys.1 - ys.0)) as u32;
    let limit = ((clip_limit * pixels as f64 / 256.0) as u32).max(1);
    clip_histogram(&mut hist, limit);
    let mut lut = [0u8; 256];
    let mut cdf = 0u32;
    for (v, &h) in hist.iter().enumerate() {
        cdf += h;
        lut[v] = quantize(cdf as f64 * 255.0 / pixels as f64);
    }
    lut
}

/// For coordinate `p`, the two neighbouring tiles and the weight of the
/// second one, interpolating between tile centers and clamping at the edges.
fn blend_axis(p: usize, centers: &[f64]) -> (usize, usize, f64) {
    let p = p as f64;
    let last = centers.len() - 1;
    if p <= centers[0] {
        return (0, 0, 0.0);
    }
    if p >= centers[last] {
        return (last, last, 0.0);
    }
    let i = centers.partition_point(|&c| c <= p) - 1;
    let t = (p - centers[i]) / (centers[i + 1] - centers[i]);
    (i, i + 1, t)
}

/// CLAHE on a grayscale raster with a `tiles_x`×`tiles_y` grid.
pub fn clahe(img: &RasterImage, clip_limit: f64, tiles_x: usize, tiles_y: usize) -> Result<RasterImage> {
    img.require_channels(1)?;
    if tiles_x == 0 || tiles_y == 0 || tiles_x > img.width() || tiles_y > img.height() {
        return Err(Error::InvalidParameter(format!(
            "tile grid {tiles_x}x{tiles_y} does not fit a {}x{} image",
            img.width(),
            img.height()
        )));
    }
    if !(clip_limit > 0.0) {
        return Err(Error::InvalidParameter(format!("clip limit {clip_limit}")));
    }
    let (w, h) = (img.width(), img.height());
    let mut luts = Vec::with_capacity(tiles_x * tiles_y);
    for ty in 0..tiles_y {
        for tx in 0..tiles_x {
            luts.push(tile_lut(img, tile_span(tx, tiles_x, w), tile_span(ty, tiles_y, h), clip_limit));
        }
    }
    let centers = |tiles: usize, len: usize| -> Vec<f64> {
        (0..tiles)
            .map(|t| {
                let (a, b) = tile_span(t, tiles, len);
                (a + b - 1) as f64 / 2.0
            })
            .collect()
    };
    let cx = centers(tiles_x, w);
    let cy = centers(tiles_y, h);
    let col_blend: Vec<_> = (0..w).map(|x| blend_axis(x, &cx)).collect();
    let mut data = Vec::with_capacity(w * h);
    for y in 0..h {
        let (y0, y1, ty) = blend_axis(y, &cy);
        for (x, &(x0, x1, tx)) in col_blend.iter().enumerate() {
            let v = img.data()[y * w + x] as usize;
            let m = |ix: usize, iy: usize| luts[iy * tiles_x + ix][v] as f64;
            let top = (1.0 - tx) * m(x0, y0) + tx * m(x1, y0);
            let bottom = (1.0 - tx) * m(x0, y1) + tx * m(x1, y1);
            data.push(quantize((1.0 - ty) * top + ty * bottom));
        }
    }
    RasterImage::new(w, h, 1, data)
}
