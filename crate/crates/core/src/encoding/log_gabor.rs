use std::sync::Arc;

use rustfft::num_complex::Complex64;
use rustfft::{Fft, FftPlanner};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct GaborParams {
    /// Center wavelength in samples.
    pub wavelength: f64,
    /// Bandwidth as the ratio σ/f₀.
    pub sigma_over_f: f64,
}

impl Default for GaborParams {
    fn default() -> Self {
        Self { wavelength: 18.0, sigma_over_f: 0.5 }
    }
}

impl GaborParams {
    pub fn validate(&self) -> Result<()> {
        if !(self.wavelength > 2.0) || !(self.sigma_over_f > 0.0 && self.sigma_over_f < 1.0) {
            return Err(Error::InvalidParameter(format!(
                "log-Gabor needs wavelength > 2 and 0 < sigma/f < 1, got {} and {}",
                self.wavelength, self.sigma_over_f
            )));
        }
        Ok(())
    }

    /// Transfer function at normalized frequency `f` (cycles per sample).
    pub fn gain(&self, f: f64) -> f64 {
        if f <= 0.0 {
            return 0.0;
        }
        let f0 = 1.0 / self.wavelength;
        let num = (f / f0).ln();
        let den = self.sigma_over_f.ln();
        (-(num * num) / (2.0 * den * den)).exp()
    }
}

/// One-dimensional log-Gabor filter for signals of a fixed length.
///
/// The zero-mean signal is transformed, bins `1..=N/2` are weighted by the
/// log-Gabor gain and all other bins (DC and negative frequencies) are
/// zeroed, so the inverse transform is an analytic, band-passed signal.
/// The forward transform is unscaled and the inverse scaled by `1/N`.
pub struct LogGaborFilter {
    len: usize,
    gains: Vec<f64>,
    forward: Arc<dyn Fft<f64>>,
    inverse: Arc<dyn Fft<f64>>,
}

impl std::fmt::Debug for LogGaborFilter {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("LogGaborFilter").field("len", &self.len).finish_non_exhaustive()
    }
}

impl LogGaborFilter {
    pub fn new(len: usize, params: &GaborParams) -> Result<Self> {
        params.validate()?;
        if len < 2 {
            return Err(Error::InvalidParameter(format!("filter length {len}")));
        }
        let gains =
            (0..len).map(|k| if k >= 1 && k <= len / 2 { params.gain(k as f64 / len as f64) } else { 0.0 }).collect();
        let mut planner = FftPlanner::new();
        Ok(Self { len, gains, forward: planner.plan_fft_forward(len), inverse: planner.plan_fft_inverse(len) })
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    /// Frequency-domain weight applied to DFT bin `k`.
    pub fn bin_gain(&self, k: usize) -> f64 {
        self.gains[k]
    }

    pub fn apply(&self, signal: &[f64]) -> Result<Vec<Complex64>> {
        if signal.len() != self.len {
            return Err(Error::InvalidParameter(format!("filter expects {} samples, got {}", self.len, signal.len())));
        }
        let mean = signal.iter().sum::<f64>() / self.len as f64;
        let mut buf: Vec<Complex64> = signal.iter().map(|&v| Complex64::new(v - mean, 0.0)).collect();
        self.forward.process(&mut buf);
        for (b, &g) in buf.iter_mut().zip(&self.gains) {
            *b *= g;
        }
        self.inverse.process(&mut buf);
        let scale = 1.0 / self.len as f64;
        buf.iter_mut().for_each(|b| *b *= scale);
        Ok(buf)
    }
}

/// Filters one 360-sample angular row of a normalized iris.
pub fn log_gabor_row(signal: &[f64], params: &GaborParams) -> Result<Vec<Complex64>> {
    if signal.len() != super::code::CODE_COLS {
        return Err(Error::InvalidParameter(format!(
            "a normalized iris row has {} samples, got {}",
            super::code::CODE_COLS,
            signal.len()
        )));
    }
    LogGaborFilter::new(signal.len(), params)?.apply(signal)
}
