use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::imaging::{quantize, IrisBoundaries, RasterImage, DEFAULT_COLORED_THRESHOLD};

// D65 reference white.
const XN: f64 = 0.950_47;
const YN: f64 = 1.0;
const ZN: f64 = 1.088_83;

fn srgb_to_linear(c: f64) -> f64 {
    if c <= 0.040_45 {
        c / 12.92
    } else {
        ((c + 0.055) / 1.055).powf(2.4)
    }
}

fn linear_to_srgb(c: f64) -> f64 {
    if c <= 0.003_130_8 {
        12.92 * c
    } else {
        1.055 * c.powf(1.0 / 2.4) - 0.055
    }
}

/// sRGB (8-bit) to CIELAB under D65.
pub fn rgb_to_lab(rgb: [u8; 3]) -> [f64; 3] {
    let [r, g, b] = rgb.map(|v| srgb_to_linear(v as f64 / 255.0));
    let x = 0.412_456_4 * r + 0.357_576_1 * g + 0.180_437_5 * b;
    let y = 0.212_672_9 * r + 0.715_152_2 * g + 0.072_175 * b;
    let z = 0.019_333_9 * r + 0.119_192 * g + 0.950_304_1 * b;
    let f = |t: f64| {
        if t > 216.0 / 24389.0 {
            t.cbrt()
        } else {
            (24389.0 / 27.0 * t + 16.0) / 116.0
        }
    };
    let (fx, fy, fz) = (f(x / XN), f(y / YN), f(z / ZN));
    [116.0 * fy - 16.0, 500.0 * (fx - fy), 200.0 * (fy - fz)]
}

/// CIELAB to the nearest 8-bit sRGB color (out-of-gamut values clip).
pub fn lab_to_rgb(lab: [f64; 3]) -> [u8; 3] {
    let fy = (lab[0] + 16.0) / 116.0;
    let fx = fy + lab[1] / 500.0;
    let fz = fy - lab[2] / 200.0;
    let inv = |f: f64| {
        if f.powi(3) > 216.0 / 24389.0 {
            f.powi(3)
        } else {
            (116.0 * f - 16.0) * 27.0 / 24389.0
        }
    };
    let (x, y, z) = (inv(fx) * XN, inv(fy) * YN, inv(fz) * ZN);
    let r = 3.240_454_2 * x - 1.537_138_5 * y - 0.498_531_4 * z;
    let g = -0.969_266 * x + 1.876_010_8 * y + 0.041_556 * z;
    let b = 0.055_643_4 * x - 0.204_025_9 * y + 1.057_225_2 * z;
    [r, g, b].map(|c| quantize(linear_to_srgb(c.clamp(0.0, 1.0)) * 255.0))
}

/// One palette category: a CIELAB centroid and the eye-color class it
/// counts toward (0 = blue-grey/green, 1 = brown).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PaletteEntry {
    pub name: String,
    pub lab: [f64; 3],
    pub class: u8,
}

/// Nearest-centroid pigment palette.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Palette {
    pub entries: Vec<PaletteEntry>,
    pub colored_threshold: u8,
}

pub const BLUE_GREY: usize = 0;
pub const GREEN: usize = 1;
pub const LIGHT_BROWN: usize = 2;
pub const DARK_BROWN: usize = 3;

impl Default for Palette {
    /// Four iris pigment categories. The centroids are plumbing constants
    /// picked to sit apart in CIELAB, not fitted values.
    fn default() -> Self {
        let e = |name: &str, lab: [f64; 3], class| PaletteEntry { name: name.to_string(), lab, class };
        Self {
            entries: vec![
                e("blue-grey", [58.0, -3.0, -10.0], 0),
                e("green", [52.0, -14.0, 16.0], 0),
                e("light-brown", [50.0, 14.0, 32.0], 1),
                e("dark-brown", [25.0, 10.0, 14.0], 1),
            ],
            colored_threshold: DEFAULT_COLORED_THRESHOLD,
        }
    }
}

impl Palette {
    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// Index of the nearest centroid (Euclidean in CIELAB; first on ties).
    pub fn classify(&self, rgb: [u8; 3]) -> usize {
        let lab = rgb_to_lab(rgb);
        let dist = |c: &[f64; 3]| (0..3).map(|i| (lab[i] - c[i]).powi(2)).sum::<f64>();
        let mut best = (0usize, f64::INFINITY);
        for (i, e) in self.entries.iter().enumerate() {
            let d = dist(&e.lab);
            if d < best.1 {
                best = (i, d);
            }
        }
        best.0
    }

    /// sRGB rendering of a centroid.
    pub fn centroid_rgb(&self, i: usize) -> [u8; 3] {
        lab_to_rgb(self.entries[i].lab)
    }
}

/// Fractions of colored pixels per palette category.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ColorComposition {
    pub fractions: Vec<f64>,
    pub pixel_count: usize,
}

impl ColorComposition {
    pub fn from_counts(counts: &[usize]) -> Result<Self> {
        let total: usize = counts.iter().sum();
        if total == 0 {
            return Err(Error::NoColoredPixels);
        }
        Ok(Self { fractions: counts.iter().map(|&c| c as f64 / total as f64).collect(), pixel_count: total })
    }

    /// Direct construction from fractions (renormalized to sum to one).
    pub fn from_fractions(fractions: &[f64]) -> Result<Self> {
        let total: f64 = fractions.iter().sum();
        if fractions.is_empty() || fractions.iter().any(|&f| !(f >= 0.0)) || !(total > 0.0) {
            return Err(Error::InvalidParameter(format!("composition {fractions:?}")));
        }
        Ok(Self { fractions: fractions.iter().map(|f| f / total).collect(), pixel_count: 0 })
    }
}

fn compose(
    img: &RasterImage,
    palette: &Palette,
    mut keep: impl FnMut(usize, usize) -> bool,
) -> Result<ColorComposition> {
    img.require_channels(3)?;
    let mut counts = vec![0usize; palette.len()];
    for y in 0..img.height() {
        for x in 0..img.width() {
            if !keep(x, y) || !img.is_colored(x, y, palette.colored_threshold) {
                continue;
            }
            let p = img.pixel(x, y);
            counts[palette.classify([p[0], p[1], p[2]])] += 1;
        }
    }
    ColorComposition::from_counts(&counts)
}

/// Palette composition of the colored pixels inside the iris annulus.
pub fn quantify_colors(img: &RasterImage, b: &IrisBoundaries, palette: &Palette) -> Result<ColorComposition> {
    compose(img, palette, |x, y| b.contains(x as f64, y as f64))
}

/// Palette composition of every colored pixel of the image.
pub fn quantify_all_colors(img: &RasterImage, palette: &Palette) -> Result<ColorComposition> {
    compose(img, palette, |_, _| true)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn lab_round_trip_and_reference_values() {
        let white = rgb_to_lab([255, 255, 255]);
        assert!((white[0] - 100.0).abs() < 1e-3 && white[1].abs() < 1e-2 && white[2].abs() < 1e-2);
        let red = rgb_to_lab([255, 0, 0]);
        assert!((red[0] - 53.24).abs() < 0.05 && (red[1] - 80.09).abs() < 0.1 && (red[2] - 67.20).abs() < 0.1);
        for rgb in [[12u8, 200, 90], [250, 250, 3], [0, 0, 0], [90, 60, 30]] {
            assert_eq!(lab_to_rgb(rgb_to_lab(rgb)), rgb);
        }
    }

    #[test]
    fn centroids_classify_to_themselves() {
        let p = Palette::default();
        for i in 0..p.len() {
            assert_eq!(p.classify(p.centroid_rgb(i)), i);
        }
    }

    #[test]
    fn half_and_half_annulus() {
        let p = Palette::default();
        let b = IrisBoundaries::centered(128, 20.0, 50.0);
        let img = RasterImage::rgb_from_fn(128, 128, |x, y| {
            if !b.contains(x as f64, y as f64) {
                [0, 0, 0]
            } else if x < 64 {
                p.centroid_rgb(BLUE_GREY)
            } else {
                p.centroid_rgb(DARK_BROWN)
            }
        })
        .unwrap();
        let c = quantify_colors(&img, &b, &p).unwrap();
        assert!((c.fractions[BLUE_GREY] - 0.5).abs() <= 1.0 / c.pixel_count as f64);
        assert!((c.fractions[DARK_BROWN] - 0.5).abs() <= 1.0 / c.pixel_count as f64);
        assert_eq!(c.fractions[GREEN], 0.0);
        assert!((c.fractions.iter().sum::<f64>() - 1.0).abs() <= 1e-9);

        let green = RasterImage::rgb_from_fn(128, 128, |x, y| {
            if b.contains(x as f64, y as f64) {
                p.centroid_rgb(GREEN)
            } else {
                [0, 0, 0]
            }
        })
        .unwrap();
        assert_eq!(quantify_colors(&green, &b, &p).unwrap().fractions, vec![0.0, 1.0, 0.0, 0.0]);
    }

    #[test]
    fn black_image_has_no_composition() {
        let img = RasterImage::filled(16, 16, 3, 0).unwrap();
        assert!(matches!(quantify_all_colors(&img, &Palette::default()), Err(Error::NoColoredPixels)));
    }
}
