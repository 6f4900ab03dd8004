//! Cartesian ⇄ polar mapping of the iris annulus.
//!
//! Angles are measured counterclockwise (as seen on screen) from the +x axis,
//! so a point at angle `θ` and radius `ρ` sits at
//! `(cx + ρ cos θ, cy - ρ sin θ)` in pixel coordinates. Radial samples are
//! centered in their band: row `i` of an `n`-row strip lies at
//! `pupil + (i + 0.5) / n * (limbic - pupil)`.

use super::raster::{quantize, IrisBoundaries, PolarStrip, RasterImage};
use crate::error::{Error, Result};

#[inline]
fn radius_of_row(b: &IrisBoundaries, row: f64, radial: usize) -> f64 {
    b.pupil_radius + (row + 0.5) / radial as f64 * (b.limbic_radius - b.pupil_radius)
}

/// Unwraps the annulus described by `b` into a `radial`×`angular` strip
/// using bilinear interpolation.
pub fn unwrap_polar(img: &RasterImage, b: &IrisBoundaries, radial: usize, angular: usize) -> Result<PolarStrip> {
    if radial == 0 || angular == 0 {
        return Err(Error::InvalidParameter(format!("polar strip must be at least 1x1, got {radial}x{angular}")));
    }
    b.check_fits(img.width(), img.height())?;
    let ch = img.channels();
    let trig: Vec<(f64, f64)> =
        (0..angular).map(|c| (c as f64 * 360.0 / angular as f64).to_radians().sin_cos()).collect();
    let mut data = Vec::with_capacity(radial * angular * ch);
    let mut px = [0.0; 3];
    for r in 0..radial {
        let rho = radius_of_row(b, r as f64, radial);
        for &(sin, cos) in &trig {
            let x = b.center_x + rho * cos;
            let y = b.center_y - rho * sin;
            img.sample_bilinear(x, y, &mut px[..ch]);
            data.extend(px[..ch].iter().map(|&v| quantize(v)));
        }
    }
    PolarStrip::new(radial, angular, ch, data)
}

/// Position of a Cartesian point in strip coordinates (fractional row and
/// column), or `None` outside the annulus.
#[inline]
pub(crate) fn strip_coords(b: &IrisBoundaries, radial: usize, angular: usize, x: f64, y: f64) -> Option<(f64, f64)> {
    let dx = x - b.center_x;
    let dy = b.center_y - y;
    let rho = dx.hypot(dy);
    if rho < b.pupil_radius || rho > b.limbic_radius {
        return None;
    }
    let row = (rho - b.pupil_radius) / (b.limbic_radius - b.pupil_radius) * radial as f64 - 0.5;
    let mut deg = dy.atan2(dx).to_degrees();
    if deg < 0.0 {
        deg += 360.0;
    }
    let col = deg / 360.0 * angular as f64;
    Some((row.clamp(0.0, (radial - 1) as f64), col))
}

/// Bilinear strip sample; rows clamp, columns wrap around the circle.
pub(crate) fn sample_strip(strip: &PolarStrip, row: f64, col: f64, out: &mut [f64]) {
    let n = strip.angular_size();
    let rows = strip.radial_size();
    let r0 = row.floor();
    let c0 = col.floor();
    let tr = row - r0;
    let tc = col - c0;
    let r0 = r0 as usize;
    let r1 = (r0 + 1).min(rows - 1);
    let c0 = (c0 as i64).rem_euclid(n as i64) as usize;
    let c1 = (c0 + 1) % n;
    out.iter_mut().for_each(|v| *v = 0.0);
    for (r, c, w) in
        [(r0, c0, (1.0 - tr) * (1.0 - tc)), (r0, c1, (1.0 - tr) * tc), (r1, c0, tr * (1.0 - tc)), (r1, c1, tr * tc)]
    {
        if w == 0.0 {
            continue;
        }
        for (o, &s) in out.iter_mut().zip(strip.sample(r, c)) {
            *o += w * s as f64;
        }
    }
}

/// Wraps a strip back into an `out_size`×`out_size` frame; pixels whose
/// center lies outside the annulus are black.
pub fn wrap_cartesian(strip: &PolarStrip, b: &IrisBoundaries, out_size: usize) -> Result<RasterImage> {
    if out_size == 0 {
        return Err(Error::InvalidParameter("output size must be positive".into()));
    }
    b.check_fits(out_size, out_size)?;
    let ch = strip.channels();
    let (radial, angular) = (strip.radial_size(), strip.angular_size());
    let mut data = vec![0u8; out_size * out_size * ch];
    let mut px = [0.0; 3];
    for y in 0..out_size {
        for x in 0..out_size {
            if let Some((row, col)) = strip_coords(b, radial, angular, x as f64, y as f64) {
                sample_strip(strip, row, col, &mut px[..ch]);
                let i = (y * out_size + x) * ch;
                for (d, &v) in data[i..i + ch].iter_mut().zip(&px[..ch]) {
                    *d = quantize(v);
                }
            }
        }
    }
    RasterImage::new(out_size, out_size, ch, data)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ring_gradient(size: usize, b: &IrisBoundaries) -> RasterImage {
        RasterImage::gray_from_fn(size, size, |x, y| {
            let r = (x as f64 - b.center_x).hypot(y as f64 - b.center_y);
            quantize(r * 1.5)
        })
        .unwrap()
    }

    #[test]
    fn constant_image_gives_constant_strip() {
        let img = RasterImage::filled(256, 256, 3, 77).unwrap();
        let b = IrisBoundaries::centered(256, 45.0, 85.0);
        let s = unwrap_polar(&img, &b, 45, 360).unwrap();
        assert_eq!((s.radial_size(), s.angular_size()), (45, 360));
        assert!(s.as_image().data().iter().all(|&v| v == 77));
    }

    #[test]
    fn ring_gradient_rows_are_flat() {
        let b = IrisBoundaries::centered(256, 45.0, 85.0);
        let img = ring_gradient(256, &b);
        let s = unwrap_polar(&img, &b, 45, 360).unwrap();
        for r in 0..45 {
            let row: Vec<f64> = (0..360).map(|c| s.sample(r, c)[0] as f64).collect();
            let expected = radius_of_row(&b, r as f64, 45) * 1.5;
            for v in &row {
                // Bilinear interpolation of a cone deviates by under a level.
                assert!((v - expected).abs() <= 1.0, "row {r}: {v} vs {expected}");
            }
        }
    }

    #[test]
    fn out_of_frame_boundaries_rejected() {
        let img = RasterImage::filled(100, 100, 1, 1).unwrap();
        let b = IrisBoundaries::centered(100, 20.0, 60.0);
        assert!(unwrap_polar(&img, &b, 45, 360).is_err());
        assert!(unwrap_polar(&img, &IrisBoundaries::centered(100, 10.0, 40.0), 0, 360).is_err());
    }

    #[test]
    fn constant_strip_wraps_to_annulus() {
        let strip = PolarStrip::new(45, 360, 1, vec![200; 45 * 360]).unwrap();
        let b = IrisBoundaries::centered(256, 45.0, 85.0);
        let img = wrap_cartesian(&strip, &b, 256).unwrap();
        for y in 0..256 {
            for x in 0..256 {
                let inside = b.contains(x as f64, y as f64);
                assert_eq!(img.pixel(x, y)[0], if inside { 200 } else { 0 });
            }
        }
    }

    #[test]
    fn wrap_unwrap_round_trip_on_smooth_annulus() {
        let b = IrisBoundaries::centered(256, 45.0, 85.0);
        let img = RasterImage::gray_from_fn(256, 256, |x, y| {
            let dx = x as f64 - b.center_x;
            let dy = b.center_y - y as f64;
            let r = dx.hypot(dy);
            if r < b.pupil_radius || r > b.limbic_radius {
                return 0;
            }
            let t = dy.atan2(dx);
            quantize(128.0 + 60.0 * (3.0 * t).sin() + 0.8 * (r - 65.0))
        })
        .unwrap();
        let strip = unwrap_polar(&img, &b, 45, 360).unwrap();
        let back = wrap_cartesian(&strip, &b, 256).unwrap();
        let (mut sum, mut n) = (0.0, 0usize);
        for y in 0..256 {
            for x in 0..256 {
                let r = (x as f64 - b.center_x).hypot(y as f64 - b.center_y);
                if r >= b.pupil_radius + 2.0 && r <= b.limbic_radius - 2.0 {
                    sum += (img.pixel(x, y)[0] as f64 - back.pixel(x, y)[0] as f64).abs();
                    n += 1;
                }
            }
        }
        assert!(sum / n as f64 <= 5.0, "mae {}", sum / n as f64);
    }
}
