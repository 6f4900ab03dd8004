use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use super::config::PipelineConfig;
use crate::color::{quantify_all_colors, Palette};
use crate::error::{Error, Result};
use crate::imaging::{quantize, rotate, unwrap_polar, wrap_cartesian, IrisBoundaries, PolarStrip, RasterImage};
use crate::segmentation::BinaryMask;

/// Number of boundary rays checked by [`coverage_gate`] (one per 30° slice).
pub const COVERAGE_RAYS: usize = 12;

/// Boundaries from the spread of colored pixels around the frame center:
/// the pupil radius is the nearest colored pixel, the limbic radius the
/// farthest.
pub fn approximate_boundaries(img: &RasterImage, colored_threshold: u8) -> Result<IrisBoundaries> {
    let (cx, cy) = img.center();
    let mut range: Option<(f64, f64)> = None;
    for y in 0..img.height() {
        for x in 0..img.width() {
            if img.is_colored(x, y, colored_threshold) {
                let d = (x as f64 - cx).hypot(y as f64 - cy);
                range = Some(range.map_or((d, d), |(lo, hi)| (lo.min(d), hi.max(d))));
            }
        }
    }
    let (lo, hi) = range.ok_or(Error::NoColoredPixels)?;
    Ok(IrisBoundaries::new(cx, cy, lo, hi))
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CoverageReport {
    /// Angles (degrees, counterclockwise from +x) of rays that missed the
    /// iris pattern.
    pub empty_rays: Vec<u32>,
    pub pass: bool,
}

/// Casts rays at 0°, 30°, …, 330° from the pupil to the limbic radius and
/// fails the image when too many of them cross no colored pattern.
pub fn coverage_gate(img: &RasterImage, b: &IrisBoundaries, cfg: &PipelineConfig) -> CoverageReport {
    let n = cfg.coverage_samples;
    let mut empty_rays = Vec::new();
    for k in 0..COVERAGE_RAYS {
        let deg = (k * 360 / COVERAGE_RAYS) as u32;
        let (sin, cos) = (deg as f64).to_radians().sin_cos();
        let hits = (0..n)
            .filter(|&i| {
                let rho = b.pupil_radius + (i as f64 + 0.5) / n as f64 * (b.limbic_radius - b.pupil_radius);
                let x = (b.center_x + rho * cos).round();
                let y = (b.center_y - rho * sin).round();
                x >= 0.0
                    && y >= 0.0
                    && (x as usize) < img.width()
                    && (y as usize) < img.height()
                    && img.is_colored(x as usize, y as usize, cfg.colored_pixel_threshold)
            })
            .count();
        if (hits as f64) < cfg.coverage_min_fraction * n as f64 {
            empty_rays.push(deg);
        }
    }
    let pass = empty_rays.len() < cfg.coverage_max_empty;
    CoverageReport { empty_rays, pass }
}

/// Boundary-inward mean fill.
///
/// Each pass assigns every missing sample that touches a known one (8
/// neighbours, columns wrapping around) the rounded mean of its known
/// neighbours, reading only the previous pass's state.
pub fn inpaint(strip: &PolarStrip, missing: &BinaryMask) -> Result<PolarStrip> {
    let (rows, cols, ch) = (strip.radial_size(), strip.angular_size(), strip.channels());
    if missing.width() != cols || missing.height() != rows {
        return Err(Error::Dimensions(format!(
            "mask {}x{} for a {cols}x{rows} strip",
            missing.width(),
            missing.height()
        )));
    }
    let mut pending: Vec<usize> = (0..rows * cols).filter(|&i| missing.bits()[i]).collect();
    if pending.is_empty() {
        return Ok(strip.clone());
    }
    if pending.len() == rows * cols {
        return Err(Error::NothingToInpaint);
    }
    let mut known: Vec<bool> = missing.bits().iter().map(|m| !m).collect();
    let mut data = strip.as_image().data().to_vec();
    let mut updates: Vec<(usize, [u8; 3])> = Vec::new();
    while !pending.is_empty() {
        updates.clear();
        let mut still = Vec::new();
        for &i in &pending {
            let (r, c) = (i / cols, i % cols);
            let mut nbrs = [usize::MAX; 8];
            let mut k = 0;
            for dr in -1i64..=1 {
                let rr = r as i64 + dr;
                if rr < 0 || rr >= rows as i64 {
                    continue;
                }
                for dc in -1i64..=1 {
                    let cc = (c as i64 + dc).rem_euclid(cols as i64) as usize;
                    let j = rr as usize * cols + cc;
                    if j != i && known[j] && !nbrs[..k].contains(&j) {
                        nbrs[k] = j;
                        k += 1;
                    }
                }
            }
            if k == 0 {
                still.push(i);
                continue;
            }
            let mut px = [0u8; 3];
            for (ci, p) in px.iter_mut().enumerate().take(ch) {
                let sum: f64 = nbrs[..k].iter().map(|&j| data[j * ch + ci] as f64).sum();
                *p = quantize(sum / k as f64);
            }
            updates.push((i, px));
        }
        for &(i, px) in &updates {
            data[i * ch..(i + 1) * ch].copy_from_slice(&px[..ch]);
            known[i] = true;
        }
        pending = still;
    }
    PolarStrip::new(rows, cols, ch, data)
}

/// Eye-color class from palette fractions: 0 when the class-0 categories
/// (blue-grey, green) hold a strict majority of colored pixels, else 1.
pub fn label_color_class(img: &RasterImage, palette: &Palette) -> Result<u8> {
    let comp = quantify_all_colors(img, palette)?;
    let light: f64 = comp.fractions.iter().zip(&palette.entries).filter(|(_, e)| e.class == 0).map(|(f, _)| f).sum();
    Ok(if light > 0.5 { 0 } else { 1 })
}

/// `rotations + 1` frames: the original, then clockwise turns by
/// `rotation_step`, `2·rotation_step`, ….
pub fn augment_rotations(img: &RasterImage, cfg: &PipelineConfig) -> Result<Vec<RasterImage>> {
    let mut out = Vec::with_capacity(cfg.rotations + 1);
    out.push(img.clone());
    for k in 1..=cfg.rotations {
        out.push(rotate(img, -cfg.rotation_step * k as f64)?);
    }
    Ok(out)
}

/// FNV-1a of a source id, used as the per-image seed.
pub fn image_seed(id: &str) -> u64 {
    id.bytes().fold(0xcbf2_9ce4_8422_2325u64, |h, b| (h ^ b as u64).wrapping_mul(0x0100_0000_01b3))
}

/// Independent stream per (global seed, image, variant).
pub fn variant_rng(seed: u64, image_seed: u64, variant: u64) -> ChaCha8Rng {
    let mut key = [0u8; 32];
    key[..8].copy_from_slice(&seed.to_le_bytes());
    key[8..16].copy_from_slice(&image_seed.to_le_bytes());
    key[16..24].copy_from_slice(&variant.to_le_bytes());
    ChaCha8Rng::from_seed(key)
}

/// Pixels whose centers lie in the annulus.
fn annulus_pixels(w: usize, h: usize, b: &IrisBoundaries) -> Vec<(usize, usize)> {
    (0..h).flat_map(|y| (0..w).map(move |x| (x, y))).filter(|&(x, y)| b.contains(x as f64, y as f64)).collect()
}

/// Draws one disc-union mask restricted to the annulus. Redraws until the
/// covered fraction lands in the configured band; after a bounded number of
/// tries the draw closest to the band is used.
fn draw_holes(
    w: usize,
    h: usize,
    b: &IrisBoundaries,
    annulus: &[(usize, usize)],
    cfg: &PipelineConfig,
    rng: &mut ChaCha8Rng,
) -> BinaryMask {
    const MAX_DRAWS: usize = 200;
    let scale = b.limbic_radius / cfg.wrapped_limbic_radius;
    let (p2, l2) = (b.pupil_radius.powi(2), b.limbic_radius.powi(2));
    let mut best: Option<(f64, BinaryMask)> = None;
    for _ in 0..MAX_DRAWS {
        let n = rng.random_range(cfg.holes_min..=cfg.holes_max);
        let discs: Vec<(f64, f64, f64)> = (0..n)
            .map(|_| {
                let rho = (p2 + rng.random::<f64>() * (l2 - p2)).sqrt();
                let theta = rng.random::<f64>() * std::f64::consts::TAU;
                let r = scale * rng.random_range(cfg.hole_radius_min..=cfg.hole_radius_max);
                (b.center_x + rho * theta.cos(), b.center_y - rho * theta.sin(), r)
            })
            .collect();
        let mut mask = BinaryMask::new(w, h);
        let mut covered = 0usize;
        for &(x, y) in annulus {
            if discs.iter().any(|&(dx, dy, r)| (x as f64 - dx).hypot(y as f64 - dy) <= r) {
                mask.set(x, y, true);
                covered += 1;
            }
        }
        let frac = covered as f64 / annulus.len() as f64;
        let miss = (cfg.hole_area_min - frac).max(frac - cfg.hole_area_max).max(0.0);
        if miss == 0.0 {
            return mask;
        }
        if best.as_ref().is_none_or(|(m, _)| miss < *m) {
            best = Some((miss, mask));
        }
    }
    best.expect("at least one draw").1
}

/// Refills the masked pixels of `img` by unwrapping, inpainting in polar
/// space and wrapping back. Unmasked pixels are untouched.
///
/// Strip samples whose interpolation footprint reaches a cleared pixel or
/// a pixel outside the annulus count as missing, so the fill never pulls
/// in black from the pupil or the background.
pub fn refill_holes(img: &RasterImage, b: &IrisBoundaries, holes: &BinaryMask) -> Result<RasterImage> {
    let radial = (b.limbic_radius - b.pupil_radius).ceil().max(3.0) as usize;
    let angular = (std::f64::consts::TAU * b.limbic_radius).round().max(8.0) as usize;
    let mut cleared = img.clone();
    let ch = img.channels();
    let mut mask_img = RasterImage::filled(img.width(), img.height(), 1, 0)?;
    for y in 0..img.height() {
        for x in 0..img.width() {
            if holes.get(x, y) {
                cleared.pixel_mut(x, y).iter_mut().for_each(|v| *v = 0);
            }
            if holes.get(x, y) || !b.contains(x as f64, y as f64) {
                mask_img.pixel_mut(x, y)[0] = 255;
            }
        }
    }
    let strip = unwrap_polar(&cleared, b, radial, angular)?;
    let mask_strip = unwrap_polar(&mask_img, b, radial, angular)?;
    let missing = BinaryMask::from_fn(angular, radial, |c, r| mask_strip.sample(r, c)[0] > 0);
    let filled = wrap_cartesian(&inpaint(&strip, &missing)?, b, img.width().max(img.height()))?;
    for y in 0..img.height() {
        for x in 0..img.width() {
            if holes.get(x, y) {
                let src = filled.pixel(x, y)[..ch].to_vec();
                cleared.pixel_mut(x, y).copy_from_slice(&src);
            }
        }
    }
    Ok(cleared)
}

/// `hole_punch_count` partial-occlusion variants of a square frame.
pub fn hole_punch_variants(
    img: &RasterImage,
    b: &IrisBoundaries,
    cfg: &PipelineConfig,
    image_seed: u64,
) -> Result<Vec<RasterImage>> {
    use rayon::prelude::*;
    if img.width() != img.height() {
        return Err(Error::Dimensions("hole punching needs a square frame".into()));
    }
    b.check_fits(img.width(), img.height())?;
    let annulus = annulus_pixels(img.width(), img.height(), b);
    if annulus.is_empty() {
        return Err(Error::Boundaries("annulus contains no pixel centers".into()));
    }
    (0..cfg.hole_punch_count)
        .into_par_iter()
        .map(|v| {
            let mut rng = variant_rng(cfg.seed, image_seed, v as u64);
            let holes = draw_holes(img.width(), img.height(), b, &annulus, cfg, &mut rng);
            refill_holes(img, b, &holes)
        })
        .collect()
}
