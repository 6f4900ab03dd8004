//! Iris normalization and binary iris-code generation.

mod code;
mod log_gabor;

pub use code::{
    IrisCode, BITS_PER_CELL, CODE_BITS, CODE_COLS, CODE_PAYLOAD_BYTES, CODE_ROWS, FILE_HEADER_BYTES, FILE_MAGIC,
};
pub use log_gabor::{log_gabor_row, GaborParams, LogGaborFilter};
pub use rustfft::num_complex::Complex64;

use crate::error::{Error, Result};
use crate::imaging::{
    clahe, ensure_gray, unwrap_polar, IrisBoundaries, PolarStrip, RasterImage, DEFAULT_CLIP_LIMIT, DEFAULT_TILES_X,
    DEFAULT_TILES_Y,
};
use crate::segmentation::{segment_iris, BoundarySpec};

/// A 45×360 grayscale polar strip after contrast equalization.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NormalizedIris {
    strip: PolarStrip,
}

impl NormalizedIris {
    pub fn new(strip: PolarStrip) -> Result<Self> {
        if strip.radial_size() != CODE_ROWS || strip.angular_size() != CODE_COLS || strip.channels() != 1 {
            return Err(Error::Dimensions(format!(
                "normalized iris must be a {CODE_ROWS}x{CODE_COLS} gray strip, got {}x{}x{}",
                strip.radial_size(),
                strip.angular_size(),
                strip.channels()
            )));
        }
        Ok(Self { strip })
    }

    pub fn strip(&self) -> &PolarStrip {
        &self.strip
    }

    pub fn row(&self, r: usize) -> Vec<f64> {
        (0..CODE_COLS).map(|c| self.strip.sample(r, c)[0] as f64).collect()
    }

    pub fn column_rotate(&self, k: i64) -> Self {
        Self { strip: self.strip.column_rotate(k) }
    }
}

/// Grayscale, unwrap to 45×360 and equalize with CLAHE.
pub fn normalize(img: &RasterImage, b: &IrisBoundaries) -> Result<NormalizedIris> {
    let gray = ensure_gray(img);
    let strip = unwrap_polar(&gray, b, CODE_ROWS, CODE_COLS)?;
    let eq = clahe(strip.as_image(), DEFAULT_CLIP_LIMIT, DEFAULT_TILES_X, DEFAULT_TILES_Y)?;
    NormalizedIris::new(PolarStrip::from_image(eq))
}

/// Sign quantization of complex responses, one row per code row. Zero
/// components quantize to 1.
pub fn quantize_responses(responses: &[Vec<Complex64>]) -> Result<IrisCode> {
    let cols = responses.first().map_or(0, Vec::len);
    if responses.is_empty() || cols == 0 || responses.iter().any(|r| r.len() != cols) {
        return Err(Error::Dimensions("response rows must be non-empty and equally long".into()));
    }
    Ok(IrisCode::from_fn(responses.len(), cols, |r, c| {
        let z = responses[r][c];
        (z.re >= 0.0, z.im >= 0.0)
    }))
}

/// Reusable encoder holding a planned filter.
#[derive(Debug)]
pub struct IrisEncoder {
    filter: LogGaborFilter,
}

impl IrisEncoder {
    pub fn new(params: &GaborParams) -> Result<Self> {
        Ok(Self { filter: LogGaborFilter::new(CODE_COLS, params)? })
    }

    pub fn responses(&self, n: &NormalizedIris) -> Vec<Vec<Complex64>> {
        (0..CODE_ROWS).map(|r| self.filter.apply(&n.row(r)).expect("row length fixed")).collect()
    }

    pub fn encode(&self, n: &NormalizedIris) -> IrisCode {
        quantize_responses(&self.responses(n)).expect("fixed geometry")
    }

    /// Segment, normalize and encode a frame.
    pub fn encode_image(&self, img: &RasterImage, spec: &BoundarySpec) -> Result<(IrisCode, IrisBoundaries)> {
        let b = segment_iris(img, spec)?;
        let n = normalize(img, &b)?;
        Ok((self.encode(&n), b))
    }
}

impl Default for IrisEncoder {
    fn default() -> Self {
        Self::new(&GaborParams::default()).expect("default parameters are valid")
    }
}

pub fn encode(n: &NormalizedIris, p: &GaborParams) -> Result<IrisCode> {
    Ok(IrisEncoder::new(p)?.encode(n))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn textured_strip(seed: u64) -> NormalizedIris {
        let mut s = seed | 1;
        let data: Vec<u8> = (0..CODE_ROWS * CODE_COLS)
            .map(|_| {
                s ^= s << 13;
                s ^= s >> 7;
                s ^= s << 17;
                (s >> 56) as u8
            })
            .collect();
        NormalizedIris::new(PolarStrip::new(CODE_ROWS, CODE_COLS, 1, data).unwrap()).unwrap()
    }

    #[test]
    fn code_is_32400_bits() {
        let code = encode(&textured_strip(3), &GaborParams::default()).unwrap();
        assert_eq!(code.bit_len(), 32400);
        assert_eq!(code.to_packed().len(), 4050);
        assert_eq!(code, encode(&textured_strip(3), &GaborParams::default()).unwrap());
    }

    #[test]
    fn quadrant_one_row_is_all_ones() {
        let mut rows = vec![vec![Complex64::new(-1.0, 0.5); CODE_COLS]; CODE_ROWS];
        rows[7] = vec![Complex64::new(2.0, 3.0); CODE_COLS];
        rows[8][0] = Complex64::new(0.0, 0.0);
        let code = quantize_responses(&rows).unwrap();
        assert!((0..CODE_COLS).all(|c| code.cell(7, c) == (true, true)));
        assert_eq!(code.cell(0, 0), (false, true));
        assert_eq!(code.cell(8, 0), (true, true));
    }

    #[test]
    fn flipping_real_sign_flips_real_bit_only() {
        let enc = IrisEncoder::default();
        let mut resp = enc.responses(&textured_strip(11));
        let base = quantize_responses(&resp).unwrap();
        resp[3][100].re = -resp[3][100].re;
        let flipped = quantize_responses(&resp).unwrap();
        let (r0, i0) = base.cell(3, 100);
        let (r1, i1) = flipped.cell(3, 100);
        assert_ne!(r0, r1);
        assert_eq!(i0, i1);
        assert_eq!(crate::matching::hamming(&base, &flipped).unwrap() * 32400.0, 1.0);
    }

    #[test]
    fn encode_commutes_with_column_rotation() {
        let enc = IrisEncoder::default();
        let n = textured_strip(5);
        let code = enc.encode(&n);
        for k in [1i64, 17, 180, 359] {
            let rotated = enc.encode(&n.column_rotate(k));
            assert_eq!(rotated, crate::matching::shift_code(&code, k), "k={k}");
        }
    }

    #[test]
    fn constant_annulus_normalizes_to_constant() {
        let b = IrisBoundaries::centered(256, 45.0, 85.0);
        let img =
            RasterImage::rgb_from_fn(
                256,
                256,
                |x, y| {
                    if b.contains(x as f64, y as f64) {
                        [90, 140, 60]
                    } else {
                        [0, 0, 0]
                    }
                },
            )
            .unwrap();
        // Shrink the sampling band so no sample touches the black border.
        let inner = IrisBoundaries::new(b.center_x, b.center_y, 47.0, 83.0);
        let n = normalize(&img, &inner).unwrap();
        let first = n.strip().sample(0, 0)[0];
        assert!(n.strip().as_image().data().iter().all(|&v| v == first));
        assert_eq!((n.strip().radial_size(), n.strip().angular_size()), (45, 360));
    }
}
