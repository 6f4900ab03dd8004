//! Seeded procedural irises and codes for tests, benchmarks and the
//! bundled demo corpora.

use std::f64::consts::TAU;
use std::path::Path;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::encoding::{IrisCode, CODE_COLS, CODE_ROWS};
use crate::error::Result;
use crate::imaging::{quantize, save_png, IrisBoundaries, RasterImage};

/// Sum of random polar waves: angular orders 8..=40 cycles per turn and
/// up to 5 cycles across the annulus, normalized to unit variance.
#[derive(Debug, Clone)]
pub struct IrisTexture {
    waves: Vec<(f64, f64, f64, f64)>,
    norm: f64,
}

impl IrisTexture {
    pub const WAVES: usize = 64;

    pub fn new(seed: u64) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let waves: Vec<(f64, f64, f64, f64)> = (0..Self::WAVES)
            .map(|_| {
                let m = rng.random_range(8..=40) as f64;
                let q = rng.random_range(0.0..5.0);
                let phase = rng.random_range(0.0..TAU);
                let amp = rng.random_range(0.5..1.0);
                (m, q, phase, amp)
            })
            .collect();
        let norm = (waves.iter().map(|w| w.3 * w.3).sum::<f64>() / 2.0).sqrt();
        Self { waves, norm }
    }

    /// Texture at radial fraction `u ∈ [0, 1]` and angle `theta` (radians,
    /// counterclockwise), roughly standard normal.
    pub fn value(&self, u: f64, theta: f64) -> f64 {
        self.waves.iter().map(|&(m, q, phase, amp)| amp * (m * theta + TAU * q * u + phase).cos()).sum::<f64>()
            / self.norm
    }
}

/// Base colors roughly spanning light and brown irises. Shading keeps
/// every iris pixel at ≥ 60% of its base so the pattern stays well clear
/// of the black pupil and background under Otsu thresholding.
pub const BASE_COLORS: [[f64; 3]; 4] =
    [[130.0, 150.0, 170.0], [120.0, 150.0, 110.0], [180.0, 130.0, 80.0], [140.0, 95.0, 60.0]];

/// A square RGB frame with a textured annulus on black. The angular
/// sector `wedge` (degrees `from..=to`, counterclockwise) is left black.
pub fn iris_frame(
    seed: u64,
    size: usize,
    b: &IrisBoundaries,
    base: [f64; 3],
    wedge: Option<(f64, f64)>,
) -> RasterImage {
    let tex = IrisTexture::new(seed);
    RasterImage::rgb_from_fn(size, size, |x, y| {
        let dx = x as f64 - b.center_x;
        let dy = b.center_y - y as f64;
        let rho = dx.hypot(dy);
        if rho < b.pupil_radius || rho > b.limbic_radius {
            return [0; 3];
        }
        let theta = dy.atan2(dx).rem_euclid(TAU);
        if let Some((from, to)) = wedge {
            let d = (theta.to_degrees() - from).rem_euclid(360.0);
            if d <= to - from {
                return [0; 3];
            }
        }
        let u = (rho - b.pupil_radius) / (b.limbic_radius - b.pupil_radius);
        let shade = 0.8 + 0.2 * tex.value(u, theta).tanh();
        base.map(|c| quantize(c * shade))
    })
    .expect("valid size")
}

/// A 256×256 textured iris at the canonical 45/85 radii.
pub fn textured_iris(seed: u64) -> RasterImage {
    let b = IrisBoundaries::centered(256, 45.0, 85.0);
    iris_frame(seed, 256, &b, BASE_COLORS[(seed % 4) as usize], None)
}

/// Writes the 10-image demo corpus (`iris_00.png` … `iris_09.png`,
/// 512×512, radii 100/220). `iris_07` has a black wedge over the rays at
/// 0°, 30°, 60° and 90°, so the coverage gate rejects it. Returns the ids.
pub fn write_mini_corpus(dir: &Path, seed: u64) -> Result<Vec<String>> {
    std::fs::create_dir_all(dir).map_err(|e| crate::Error::io(dir, e))?;
    let b = IrisBoundaries::centered(512, 100.0, 220.0);
    let mut ids = Vec::new();
    for i in 0..10u64 {
        let id = format!("iris_{i:02}");
        let wedge = (i == 7).then_some((-5.0, 95.0));
        let img = iris_frame(seed.wrapping_mul(1000).wrapping_add(i), 512, &b, BASE_COLORS[(i % 4) as usize], wedge);
        save_png(&img, dir.join(format!("{id}.png")))?;
        ids.push(id);
    }
    Ok(ids)
}

/// Uniformly random 45×360 code.
pub fn random_code(seed: u64) -> IrisCode {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    IrisCode::from_fn(CODE_ROWS, CODE_COLS, |_, _| (rng.random(), rng.random()))
}
