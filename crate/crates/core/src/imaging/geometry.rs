use super::raster::{quantize, RasterImage};
use crate::error::{Error, Result};

/// Rotates a square raster about its center by `degrees`, counterclockwise
/// as displayed. Multiples of 90° are exact pixel permutations; other angles
/// resample bilinearly with black outside the source.
pub fn rotate(img: &RasterImage, degrees: f64) -> Result<RasterImage> {
    if img.width() != img.height() {
        return Err(Error::Dimensions(format!("rotation needs a square image, got {}x{}", img.width(), img.height())));
    }
    if !degrees.is_finite() {
        return Err(Error::InvalidParameter(format!("rotation angle {degrees}")));
    }
    let turns = degrees / 90.0;
    if turns == turns.round() {
        return Ok(rotate_quarter_turns(img, turns.round() as i64));
    }
    let n = img.width();
    let ch = img.channels();
    let c = (n as f64 - 1.0) / 2.0;
    let (sin, cos) = degrees.to_radians().sin_cos();
    let mut data = Vec::with_capacity(n * n * ch);
    let mut px = [0.0; 3];
    for y in 0..n {
        for x in 0..n {
            let dx = x as f64 - c;
            let dy = c - y as f64;
            // Inverse rotation takes the output position back to the source.
            let sx = dx * cos + dy * sin;
            let sy = -dx * sin + dy * cos;
            img.sample_bilinear(c + sx, c - sy, &mut px[..ch]);
            data.extend(px[..ch].iter().map(|&v| quantize(v)));
        }
    }
    RasterImage::new(n, n, ch, data)
}

fn rotate_quarter_turns(img: &RasterImage, turns: i64) -> RasterImage {
    let n = img.width();
    let ch = img.channels();
    let turns = turns.rem_euclid(4);
    let mut out = img.clone();
    if turns == 0 {
        return out;
    }
    for y in 0..n {
        for x in 0..n {
            let (sx, sy) = match turns {
                1 => (n - 1 - y, x),
                2 => (n - 1 - x, n - 1 - y),
                _ => (y, n - 1 - x),
            };
            let src = img.pixel(sx, sy);
            out.pixel_mut(x, y)[..ch].copy_from_slice(src);
        }
    }
    out
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ResizeMethod {
    Bilinear,
    /// Catmull-Rom cubic (a = -0.5).
    Bicubic,
    /// Coverage-weighted box average.
    Area,
}

/// Resamples to `out_w`×`out_h`. Interpolating methods align pixel centers
/// (`src = (dst + 0.5) * scale - 0.5`) and clamp at the border.
pub fn resize(img: &RasterImage, out_w: usize, out_h: usize, method: ResizeMethod) -> Result<RasterImage> {
    if out_w == 0 || out_h == 0 {
        return Err(Error::Dimensions(format!("resize target {out_w}x{out_h}")));
    }
    if out_w == img.width() && out_h == img.height() {
        return Ok(img.clone());
    }
    let xs = axis_weights(img.width(), out_w, method);
    let ys = axis_weights(img.height(), out_h, method);
    let ch = img.channels();
    // Separable: filter rows into a float buffer, then columns.
    let w = img.width();
    let mut tmp = vec![0.0f64; out_w * img.height() * ch];
    for y in 0..img.height() {
        let row = &img.data()[y * w * ch..(y + 1) * w * ch];
        for (ox, taps) in xs.iter().enumerate() {
            for c in 0..ch {
                tmp[(y * out_w + ox) * ch + c] = taps.iter().map(|&(i, wt)| wt * row[i * ch + c] as f64).sum();
            }
        }
    }
    let mut data = Vec::with_capacity(out_w * out_h * ch);
    for taps in &ys {
        for ox in 0..out_w {
            for c in 0..ch {
                let v: f64 = taps.iter().map(|&(i, wt)| wt * tmp[(i * out_w + ox) * ch + c]).sum();
                data.push(quantize(v));
            }
        }
    }
    RasterImage::new(out_w, out_h, ch, data)
}

fn catmull_rom(t: f64) -> f64 {
    const A: f64 = -0.5;
    let t = t.abs();
    if t <= 1.0 {
        (A + 2.0) * t * t * t - (A + 3.0) * t * t + 1.0
    } else if t < 2.0 {
        A * t * t * t - 5.0 * A * t * t + 8.0 * A * t - 4.0 * A
    } else {
        0.0
    }
}

/// Per-output-index list of (source index, weight); weights sum to one.
fn axis_weights(src: usize, dst: usize, method: ResizeMethod) -> Vec<Vec<(usize, f64)>> {
    let scale = src as f64 / dst as f64;
    let clamp = |i: i64| i.clamp(0, src as i64 - 1) as usize;
    (0..dst)
        .map(|o| {
            let mut taps: Vec<(usize, f64)> = match method {
                ResizeMethod::Bilinear => {
                    let s = ((o as f64 + 0.5) * scale - 0.5).clamp(0.0, (src - 1) as f64);
                    let i0 = s.floor();
                    let t = s - i0;
                    let i0 = i0 as i64;
                    vec![(clamp(i0), 1.0 - t), (clamp(i0 + 1), t)]
                }
                ResizeMethod::Bicubic => {
                    let s = (o as f64 + 0.5) * scale - 0.5;
                    let i0 = s.floor();
                    let t = s - i0;
                    let i0 = i0 as i64;
                    (-1..=2).map(|k| (clamp(i0 + k), catmull_rom(t - k as f64))).collect()
                }
                ResizeMethod::Area => {
                    let lo = o as f64 * scale;
                    let hi = (o + 1) as f64 * scale;
                    let first = lo.floor() as usize;
                    let last = (hi.ceil() as usize).min(src);
                    (first..last)
                        .map(|i| {
                            let cover = (hi.min(i as f64 + 1.0) - lo.max(i as f64)).max(0.0);
                            (i, cover / scale)
                        })
                        .collect()
                }
            };
            taps.retain(|t| t.1 != 0.0);
            let total: f64 = taps.iter().map(|t| t.1).sum();
            taps.iter_mut().for_each(|t| t.1 /= total);
            taps
        })
        .collect()
}
