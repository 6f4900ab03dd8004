use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::imaging::DEFAULT_COLORED_THRESHOLD;

/// Settings for [`run_pipeline`](super::run_pipeline).
///
/// Lengths are in pixels. Hole radii are given at the scale of the
/// `wrapped_size` frame and scaled proportionally to the frame they are
/// applied to.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PipelineConfig {
    pub polar_width: usize,
    pub polar_height: usize,
    pub wrapped_size: usize,
    pub wrapped_pupil_radius: f64,
    pub wrapped_limbic_radius: f64,
    pub final_size: usize,
    pub rotations: usize,
    pub rotation_step: f64,
    pub hole_punch_count: usize,
    pub seed: u64,
    pub colored_pixel_threshold: u8,
    pub coverage_samples: usize,
    pub coverage_min_fraction: f64,
    pub coverage_max_empty: usize,
    pub holes_min: usize,
    pub holes_max: usize,
    pub hole_radius_min: f64,
    pub hole_radius_max: f64,
    pub hole_area_min: f64,
    pub hole_area_max: f64,
    /// Expected radii of the final frame, checked by segmentation.
    pub final_pupil_radius: f64,
    pub final_limbic_radius: f64,
    pub final_tolerance: f64,
    /// Source ids dropped by manual review.
    pub exclude: Vec<String>,
}

impl Default for PipelineConfig {
    fn default() -> Self {
        Self {
            polar_width: 3216,
            polar_height: 341,
            wrapped_size: 1024,
            wrapped_pupil_radius: 170.0,
            wrapped_limbic_radius: 340.0,
            final_size: 256,
            rotations: 11,
            rotation_step: 30.0,
            hole_punch_count: 30,
            seed: 0,
            colored_pixel_threshold: DEFAULT_COLORED_THRESHOLD,
            coverage_samples: 64,
            coverage_min_fraction: 0.1,
            coverage_max_empty: 4,
            holes_min: 5,
            holes_max: 15,
            hole_radius_min: 20.0,
            hole_radius_max: 60.0,
            hole_area_min: 0.05,
            hole_area_max: 0.25,
            final_pupil_radius: 45.0,
            final_limbic_radius: 85.0,
            final_tolerance: 3.0,
            exclude: Vec::new(),
        }
    }
}

fn parse<T: std::str::FromStr>(key: &str, value: &str) -> Result<T> {
    value.parse().map_err(|_| Error::Config(format!("bad value for `{key}`: {value:?}")))
}

impl PipelineConfig {
    /// Sets one field from its textual form. Keys are the field names.
    pub fn set(&mut self, key: &str, value: &str) -> Result<()> {
        let v = value.trim();
        match key.trim() {
            "polar_width" => self.polar_width = parse(key, v)?,
            "polar_height" => self.polar_height = parse(key, v)?,
            "wrapped_size" => self.wrapped_size = parse(key, v)?,
            "wrapped_pupil_radius" => self.wrapped_pupil_radius = parse(key, v)?,
            "wrapped_limbic_radius" => self.wrapped_limbic_radius = parse(key, v)?,
            "final_size" => self.final_size = parse(key, v)?,
            "rotations" => self.rotations = parse(key, v)?,
            "rotation_step" => self.rotation_step = parse(key, v)?,
            "hole_punch_count" => self.hole_punch_count = parse(key, v)?,
            "seed" => self.seed = parse(key, v)?,
            "colored_pixel_threshold" => self.colored_pixel_threshold = parse(key, v)?,
            "coverage_samples" => self.coverage_samples = parse(key, v)?,
            "coverage_min_fraction" => self.coverage_min_fraction = parse(key, v)?,
            "coverage_max_empty" => self.coverage_max_empty = parse(key, v)?,
            "holes_min" => self.holes_min = parse(key, v)?,
            "holes_max" => self.holes_max = parse(key, v)?,
            "hole_radius_min" => self.hole_radius_min = parse(key, v)?,
            "hole_radius_max" => self.hole_radius_max = parse(key, v)?,
            "hole_area_min" => self.hole_area_min = parse(key, v)?,
            "hole_area_max" => self.hole_area_max = parse(key, v)?,
            "final_pupil_radius" => self.final_pupil_radius = parse(key, v)?,
            "final_limbic_radius" => self.final_limbic_radius = parse(key, v)?,
            "final_tolerance" => self.final_tolerance = parse(key, v)?,
            "exclude" => {
                self.exclude = v.split(',').map(str::trim).filter(|s| !s.is_empty()).map(String::from).collect()
            }
            other => return Err(Error::Config(format!("unknown key `{other}`"))),
        }
        Ok(())
    }

    /// Parses `key = value` lines over the defaults. Blank lines and lines
    /// starting with `#` are ignored.
    pub fn from_kv_str(text: &str) -> Result<Self> {
        let mut cfg = Self::default();
        for (n, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let (k, v) =
                line.split_once('=').ok_or_else(|| Error::Config(format!("line {}: expected key = value", n + 1)))?;
            cfg.set(k, v)?;
        }
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::from_kv_str(&text)
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |m: &str| Err(Error::Config(m.to_string()));
        if [self.polar_width, self.polar_height, self.wrapped_size, self.final_size, self.coverage_samples].contains(&0)
        {
            return bad("sizes and sample counts must be positive");
        }
        if !(self.wrapped_pupil_radius > 0.0 && self.wrapped_pupil_radius < self.wrapped_limbic_radius) {
            return bad("need 0 < wrapped_pupil_radius < wrapped_limbic_radius");
        }
        if 2.0 * self.wrapped_limbic_radius > self.wrapped_size as f64 {
            return bad("wrapped limbic circle does not fit the wrapped frame");
        }
        if !(self.rotation_step > 0.0) || (self.rotation_step * (self.rotations + 1) as f64 - 360.0).abs() > 1e-9 {
            return bad("rotation_step × (rotations + 1) must equal 360");
        }
        if self.holes_min == 0 || self.holes_min > self.holes_max {
            return bad("need 1 ≤ holes_min ≤ holes_max");
        }
        if !(self.hole_radius_min > 0.0 && self.hole_radius_min <= self.hole_radius_max) {
            return bad("need 0 < hole_radius_min ≤ hole_radius_max");
        }
        if !(0.0 <= self.hole_area_min && self.hole_area_min < self.hole_area_max && self.hole_area_max <= 1.0) {
            return bad("need 0 ≤ hole_area_min < hole_area_max ≤ 1");
        }
        if !(0.0..=1.0).contains(&self.coverage_min_fraction) || self.coverage_max_empty == 0 {
            return bad("coverage settings out of range");
        }
        if !(self.final_tolerance >= 0.0
            && self.final_pupil_radius > 0.0
            && self.final_pupil_radius < self.final_limbic_radius)
        {
            return bad("final radii invalid");
        }
        Ok(())
    }

    /// Wrapped-frame boundaries (centered).
    pub fn wrapped_boundaries(&self) -> crate::imaging::IrisBoundaries {
        crate::imaging::IrisBoundaries::centered(
            self.wrapped_size,
            self.wrapped_pupil_radius,
            self.wrapped_limbic_radius,
        )
    }
}
