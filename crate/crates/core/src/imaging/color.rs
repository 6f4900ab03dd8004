use super::raster::{quantize, RasterImage};
use crate::error::{Error, Result};

const LUMA_R: f64 = 0.299;
const LUMA_G: f64 = 0.587;
const LUMA_B: f64 = 0.114;

#[inline]
pub fn luma(rgb: &[u8]) -> u8 {
    quantize(LUMA_R * rgb[0] as f64 + LUMA_G * rgb[1] as f64 + LUMA_B * rgb[2] as f64)
}

/// Converts an RGB raster to grayscale with BT.601 luma weights.
pub fn to_grayscale(img: &RasterImage) -> Result<RasterImage> {
    img.require_channels(3)?;
    let data = img.data().chunks_exact(3).map(luma).collect();
    RasterImage::new(img.width(), img.height(), 1, data)
}

/// Grayscale view of any raster; gray inputs are cloned.
pub fn ensure_gray(img: &RasterImage) -> RasterImage {
    if img.is_gray() {
        img.clone()
    } else {
        to_grayscale(img).expect("three channels")
    }
}

/// Neutralizes the color cast of the brightest 1% of non-black pixels.
///
/// The top percentile (by channel mean) of pixels that are not pure black
/// is averaged per channel; every channel is then scaled so those means
/// coincide with their common average. Black pixels stay black.
pub fn white_balance(img: &RasterImage) -> Result<RasterImage> {
    img.require_channels(3)?;
    let mut lit: Vec<(u16, usize)> = img
        .data()
        .chunks_exact(3)
        .enumerate()
        .filter(|(_, p)| p.iter().any(|&v| v != 0))
        .map(|(i, p)| (p.iter().map(|&v| v as u16).sum(), i))
        .collect();
    if lit.len() < 100 {
        return Err(Error::InsufficientPixels { needed: 100, found: lit.len() });
    }
    let take = lit.len() / 100;
    // Brightest first; ties resolved by raster order.
    lit.sort_unstable_by(|a, b| b.0.cmp(&a.0).then(a.1.cmp(&b.1)));
    let mut means = [0.0f64; 3];
    for &(_, i) in &lit[..take] {
        for (m, &v) in means.iter_mut().zip(&img.data()[i * 3..i * 3 + 3]) {
            *m += v as f64;
        }
    }
    means.iter_mut().for_each(|m| *m /= take as f64);
    let target = means.iter().sum::<f64>() / 3.0;
    let gains = means.map(|m| if m > 0.0 { target / m } else { 1.0 });
    let data = img.data().chunks_exact(3).flat_map(|p| [0, 1, 2].map(|c| quantize(p[c] as f64 * gains[c]))).collect();
    RasterImage::new(img.width(), img.height(), 3, data)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn luma_of_extremes() {
        let white = RasterImage::filled(3, 2, 3, 255).unwrap();
        assert!(to_grayscale(&white).unwrap().data().iter().all(|&v| v == 255));
        let black = RasterImage::filled(3, 2, 3, 0).unwrap();
        assert!(to_grayscale(&black).unwrap().data().iter().all(|&v| v == 0));
        // 0.299 * 255 = 76.245
        assert_eq!(luma(&[255, 0, 0]), 76);
    }

    #[test]
    fn grayscale_needs_rgb() {
        let g = RasterImage::filled(2, 2, 1, 3).unwrap();
        assert!(matches!(to_grayscale(&g), Err(Error::ChannelCount { expected: 3, actual: 1 })));
    }

    fn textured(gains: [f64; 3]) -> RasterImage {
        RasterImage::rgb_from_fn(40, 40, |x, y| {
            if (x + y) % 7 == 0 {
                return [0, 0, 0];
            }
            let base = 40.0 + ((x * 13 + y * 7) % 80) as f64;
            gains.map(|g| quantize(base * g))
        })
        .unwrap()
    }

    fn bright_means(img: &RasterImage) -> [f64; 3] {
        let mut px: Vec<&[u8]> = img.data().chunks_exact(3).filter(|p| p.iter().any(|&v| v != 0)).collect();
        let take = px.len() / 100;
        px.sort_by_key(|p| std::cmp::Reverse(p.iter().map(|&v| v as u16).sum::<u16>()));
        let mut m = [0.0; 3];
        for p in &px[..take] {
            for c in 0..3 {
                m[c] += p[c] as f64 / take as f64;
            }
        }
        m
    }

    #[test]
    fn neutral_image_unchanged() {
        let img = textured([1.0, 1.0, 1.0]);
        assert_eq!(white_balance(&img).unwrap(), img);
    }

    #[test]
    fn tinted_image_is_neutralized() {
        let img = textured([2.0, 1.0, 1.0]);
        let out = white_balance(&img).unwrap();
        let m = bright_means(&out);
        assert!((m[0] - m[1]).abs() <= 1.0 && (m[1] - m[2]).abs() <= 1.0, "{m:?}");
        let again = white_balance(&out).unwrap();
        let worst = out.data().iter().zip(again.data()).map(|(&a, &b)| (a as i16 - b as i16).abs()).max().unwrap();
        assert!(worst <= 1);
    }

    #[test]
    fn black_stays_black_and_small_images_fail() {
        let img = textured([1.3, 0.9, 0.7]);
        let out = white_balance(&img).unwrap();
        for (a, b) in img.data().chunks_exact(3).zip(out.data().chunks_exact(3)) {
            if a == [0, 0, 0] {
                assert_eq!(b, [0, 0, 0]);
            }
        }
        let tiny = RasterImage::filled(9, 9, 3, 50).unwrap();
        assert!(matches!(white_balance(&tiny), Err(Error::InsufficientPixels { found: 81, .. })));
    }
}
