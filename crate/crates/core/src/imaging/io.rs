use std::path::Path;

use image::{DynamicImage, GrayImage, RgbImage};

use super::raster::{quantize, RasterImage};
use crate::error::{Error, Result};

fn composite(value: u8, alpha: u8) -> u8 {
    quantize(value as f64 * alpha as f64 / 255.0)
}

/// Loads an 8-bit raster. Alpha is composited over black; 16-bit inputs are
/// reduced to 8 bits.
pub fn load_image(path: impl AsRef<Path>) -> Result<RasterImage> {
    let path = path.as_ref();
    let dynamic = image::open(path).map_err(|source| Error::Image { path: path.to_path_buf(), source })?;
    from_dynamic(dynamic)
}

pub fn from_dynamic(dynamic: DynamicImage) -> Result<RasterImage> {
    let (w, h) = (dynamic.width() as usize, dynamic.height() as usize);
    match dynamic {
        DynamicImage::ImageLuma8(g) => RasterImage::new(w, h, 1, g.into_raw()),
        DynamicImage::ImageLumaA8(ga) => {
            let data = ga.pixels().map(|p| composite(p.0[0], p.0[1])).collect();
            RasterImage::new(w, h, 1, data)
        }
        DynamicImage::ImageRgb8(rgb) => RasterImage::new(w, h, 3, rgb.into_raw()),
        other => {
            let rgba = other.to_rgba8();
            let data = rgba.pixels().flat_map(|p| [0, 1, 2].map(|c| composite(p.0[c], p.0[3]))).collect();
            RasterImage::new(w, h, 3, data)
        }
    }
}

pub fn save_png(img: &RasterImage, path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    let (w, h) = (img.width() as u32, img.height() as u32);
    let dynamic = if img.is_gray() {
        DynamicImage::ImageLuma8(GrayImage::from_raw(w, h, img.data().to_vec()).expect("buffer size"))
    } else {
        DynamicImage::ImageRgb8(RgbImage::from_raw(w, h, img.data().to_vec()).expect("buffer size"))
    };
    dynamic
        .save_with_format(path, image::ImageFormat::Png)
        .map_err(|source| Error::Image { path: path.to_path_buf(), source })
}

#[cfg(test)]
mod tests {
    use super::*;
    use image::{Rgba, RgbaImage};

    #[test]
    fn png_round_trip_and_alpha() {
        let dir = tempfile::tempdir().unwrap();
        let img = RasterImage::rgb_from_fn(5, 4, |x, y| [x as u8 * 40, y as u8 * 50, 7]).unwrap();
        let p = dir.path().join("a.png");
        save_png(&img, &p).unwrap();
        assert_eq!(load_image(&p).unwrap(), img);

        let mut rgba = RgbaImage::new(2, 1);
        rgba.put_pixel(0, 0, Rgba([200, 100, 50, 255]));
        rgba.put_pixel(1, 0, Rgba([200, 100, 50, 128]));
        let q = dir.path().join("b.png");
        rgba.save(&q).unwrap();
        let loaded = load_image(&q).unwrap();
        assert_eq!(loaded.channels(), 3);
        assert_eq!(loaded.pixel(0, 0), &[200, 100, 50]);
        assert_eq!(loaded.pixel(1, 0), &[100, 50, 25]);
    }

    #[test]
    fn missing_file_reports_path() {
        let err = load_image("/nonexistent/iris.png").unwrap_err();
        assert!(err.to_string().contains("/nonexistent/iris.png"));
    }
}
