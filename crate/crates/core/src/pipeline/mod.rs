//! Raw iris-on-black images to a training-style dataset: gating,
//! normalization, color labelling, rotation augmentation and hole-punched
//! authentic variants.

mod config;
mod steps;

use std::fs;
use std::io::{BufRead, Write};
use std::path::{Path, PathBuf};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

pub use config::PipelineConfig;
pub use steps::{
    approximate_boundaries, augment_rotations, coverage_gate, hole_punch_variants, image_seed, inpaint,
    label_color_class, refill_holes, variant_rng, CoverageReport, COVERAGE_RAYS,
};

use crate::color::Palette;
use crate::error::{Error, Result};
use crate::imaging::{
    load_image, resize, save_png, unwrap_polar, white_balance, wrap_cartesian, IrisBoundaries, RasterImage,
    ResizeMethod,
};
use crate::segmentation::{segment_iris, BinaryMask, BoundarySpec};

pub const MANIFEST_FILE: &str = "manifest.jsonl";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum RejectReason {
    Unreadable,
    Excluded,
    NoColor,
    Boundaries,
    Coverage,
    Inpaint,
    WhiteBalance,
    Segmentation,
}

impl RejectReason {
    pub fn as_str(self) -> &'static str {
        match self {
            Self::Unreadable => "unreadable",
            Self::Excluded => "excluded",
            Self::NoColor => "nocolor",
            Self::Boundaries => "boundaries",
            Self::Coverage => "coverage",
            Self::Inpaint => "inpaint",
            Self::WhiteBalance => "whitebalance",
            Self::Segmentation => "segmentation",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Rejection {
    pub reason: RejectReason,
    pub detail: String,
}

impl Rejection {
    fn new(reason: RejectReason, detail: impl ToString) -> Self {
        Self { reason, detail: detail.to_string() }
    }
}

/// In-memory result of processing one accepted image.
#[derive(Debug, Clone)]
pub struct ProcessedImage {
    pub source_boundaries: IrisBoundaries,
    pub color_class: u8,
    pub final_boundaries: IrisBoundaries,
    /// Original final frame first, then the clockwise rotations.
    pub rotations: Vec<RasterImage>,
    pub hole_punched: Vec<RasterImage>,
}

impl ProcessedImage {
    pub fn original(&self) -> &RasterImage {
        &self.rotations[0]
    }

    /// The authentic variants: every rotation except the original, then
    /// every hole-punched frame.
    pub fn authentic(&self) -> impl Iterator<Item = &RasterImage> {
        self.rotations[1..].iter().chain(&self.hole_punched)
    }
}

fn to_rgb(img: &RasterImage) -> RasterImage {
    if img.channels() == 3 {
        return img.clone();
    }
    RasterImage::rgb_from_fn(img.width(), img.height(), |x, y| [img.pixel(x, y)[0]; 3]).expect("same size")
}

/// Frame-level preprocessing up to the final-size frame: boundary
/// estimate, coverage gate, polar refinement and fill, white balance,
/// re-wrap, color class and downsampling.
pub fn prepare_frame(
    img: &RasterImage,
    cfg: &PipelineConfig,
    palette: &Palette,
) -> Result<(RasterImage, IrisBoundaries, u8, IrisBoundaries), Rejection> {
    let img = to_rgb(img);
    let b = approximate_boundaries(&img, cfg.colored_pixel_threshold)
        .map_err(|e| Rejection::new(RejectReason::NoColor, e))?;
    b.check_radii().map_err(|e| Rejection::new(RejectReason::Boundaries, e))?;
    let cov = coverage_gate(&img, &b, cfg);
    if !cov.pass {
        return Err(Rejection::new(
            RejectReason::Coverage,
            format!("{} empty rays at {:?} degrees", cov.empty_rays.len(), cov.empty_rays),
        ));
    }

    let radial = (b.limbic_radius - b.pupil_radius).ceil().max(1.0) as usize;
    let angular = (std::f64::consts::TAU * b.limbic_radius).round().max(1.0) as usize;
    let native = unwrap_polar(&img, &b, radial, angular).map_err(|e| Rejection::new(RejectReason::Boundaries, e))?;
    let strip = resize(native.as_image(), cfg.polar_width, cfg.polar_height, ResizeMethod::Bicubic)
        .map_err(|e| Rejection::new(RejectReason::Boundaries, e))?;
    let missing =
        BinaryMask::from_fn(strip.width(), strip.height(), |x, y| !strip.is_colored(x, y, cfg.colored_pixel_threshold));
    let strip = inpaint(&crate::imaging::PolarStrip::from_image(strip), &missing)
        .map_err(|e| Rejection::new(RejectReason::Inpaint, e))?;
    let balanced = white_balance(strip.as_image()).map_err(|e| Rejection::new(RejectReason::WhiteBalance, e))?;
    let wb = cfg.wrapped_boundaries();
    let wrapped = wrap_cartesian(&crate::imaging::PolarStrip::from_image(balanced), &wb, cfg.wrapped_size)
        .map_err(|e| Rejection::new(RejectReason::Boundaries, e))?;
    let class = label_color_class(&wrapped, palette).map_err(|e| Rejection::new(RejectReason::NoColor, e))?;
    let fin = resize(&wrapped, cfg.final_size, cfg.final_size, ResizeMethod::Area)
        .map_err(|e| Rejection::new(RejectReason::Boundaries, e))?;
    let fb = wb.rescaled(cfg.wrapped_size, cfg.final_size);

    let spec = BoundarySpec {
        tolerance: cfg.final_tolerance,
        ..BoundarySpec::new(cfg.final_pupil_radius, cfg.final_limbic_radius)
    };
    segment_iris(&fin, &spec).map_err(|e| Rejection::new(RejectReason::Segmentation, e))?;
    Ok((fin, fb, class, b))
}

/// Full per-image processing, including augmentation.
pub fn process_image(
    img: &RasterImage,
    id: &str,
    cfg: &PipelineConfig,
    palette: &Palette,
) -> Result<ProcessedImage, Rejection> {
    let (fin, fb, color_class, source_boundaries) = prepare_frame(img, cfg, palette)?;
    let rotations = augment_rotations(&fin, cfg).map_err(|e| Rejection::new(RejectReason::Boundaries, e))?;
    let hole_punched =
        hole_punch_variants(&fin, &fb, cfg, image_seed(id)).map_err(|e| Rejection::new(RejectReason::Inpaint, e))?;
    Ok(ProcessedImage { source_boundaries, color_class, final_boundaries: fb, rotations, hole_punched })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum RecordStatus {
    Accepted,
    Rejected,
}

/// One manifest line. Paths are relative to the output directory.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ImageRecord {
    pub id: String,
    pub source: String,
    pub status: RecordStatus,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub reason: Option<RejectReason>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub detail: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub color_class: Option<u8>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub source_boundaries: Option<IrisBoundaries>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub final_boundaries: Option<IrisBoundaries>,
    #[serde(default)]
    pub rotations: Vec<String>,
    #[serde(default)]
    pub authentic: Vec<String>,
}

impl ImageRecord {
    fn rejected(id: &str, source: &str, r: Rejection) -> Self {
        Self {
            id: id.to_string(),
            source: source.to_string(),
            status: RecordStatus::Rejected,
            reason: Some(r.reason),
            detail: Some(r.detail),
            color_class: None,
            source_boundaries: None,
            final_boundaries: None,
            rotations: Vec::new(),
            authentic: Vec::new(),
        }
    }

    pub fn original(&self) -> Option<&str> {
        self.rotations.first().map(String::as_str)
    }
}

/// JSON-lines record of a pipeline run, sorted by source id.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct DatasetManifest {
    pub records: Vec<ImageRecord>,
}

impl DatasetManifest {
    pub fn accepted(&self) -> impl Iterator<Item = &ImageRecord> {
        self.records.iter().filter(|r| r.status == RecordStatus::Accepted)
    }

    pub fn rejected(&self) -> impl Iterator<Item = &ImageRecord> {
        self.records.iter().filter(|r| r.status == RecordStatus::Rejected)
    }

    pub fn write_jsonl<W: Write>(&self, mut w: W) -> Result<()> {
        for r in &self.records {
            let line = serde_json::to_string(r).map_err(|e| Error::Config(e.to_string()))?;
            writeln!(w, "{line}").map_err(|e| Error::io("<manifest>", e))?;
        }
        Ok(())
    }

    pub fn read_jsonl<R: BufRead>(r: R) -> Result<Self> {
        let mut records = Vec::new();
        for (n, line) in r.lines().enumerate() {
            let line = line.map_err(|e| Error::io("<manifest>", e))?;
            if line.trim().is_empty() {
                continue;
            }
            records
                .push(serde_json::from_str(&line).map_err(|e| Error::Config(format!("manifest line {}: {e}", n + 1)))?);
        }
        Ok(Self { records })
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let f = fs::File::open(path).map_err(|e| Error::io(path, e))?;
        Self::read_jsonl(std::io::BufReader::new(f))
    }
}

/// Regular, non-hidden files of a directory in name order.
pub fn list_inputs(dir: &Path) -> Result<Vec<PathBuf>> {
    let mut files: Vec<PathBuf> = fs::read_dir(dir)
        .map_err(|e| Error::io(dir, e))?
        .filter_map(|e| e.ok())
        .map(|e| e.path())
        .filter(|p| p.is_file() && !p.file_name().and_then(|n| n.to_str()).is_some_and(|n| n.starts_with('.')))
        .collect();
    files.sort();
    Ok(files)
}

fn save_outputs(out_dir: &Path, id: &str, p: &ProcessedImage) -> Result<(Vec<String>, Vec<String>)> {
    let rel_dir = format!("class{}/{id}", p.color_class);
    fs::create_dir_all(out_dir.join(&rel_dir)).map_err(|e| Error::io(out_dir.join(&rel_dir), e))?;
    let mut rotations = Vec::new();
    for (k, img) in p.rotations.iter().enumerate() {
        let rel = format!("{rel_dir}/rot_{k}.png");
        save_png(img, out_dir.join(&rel))?;
        rotations.push(rel);
    }
    let mut authentic: Vec<String> = rotations[1..].to_vec();
    for (v, img) in p.hole_punched.iter().enumerate() {
        let rel = format!("{rel_dir}/auth_{v}.png");
        save_png(img, out_dir.join(&rel))?;
        authentic.push(rel);
    }
    Ok((rotations, authentic))
}

/// Processes every file of `input_dir`, writing frames under `out_dir`
/// (`class{c}/{id}/rot_{k}.png`, `…/auth_{v}.png`) and the manifest to
/// `out_dir/manifest.jsonl`. Per-image failures are recorded, not raised.
pub fn run_pipeline(input_dir: &Path, out_dir: &Path, cfg: &PipelineConfig) -> Result<DatasetManifest> {
    cfg.validate()?;
    let inputs = list_inputs(input_dir)?;
    fs::create_dir_all(out_dir).map_err(|e| Error::io(out_dir, e))?;
    let palette = Palette { colored_threshold: cfg.colored_pixel_threshold, ..Palette::default() };
    let records: Vec<ImageRecord> = inputs
        .par_iter()
        .map(|path| -> Result<ImageRecord> {
            let id = path.file_stem().and_then(|s| s.to_str()).unwrap_or("unnamed").to_string();
            let source = path.file_name().and_then(|s| s.to_str()).unwrap_or_default().to_string();
            if cfg.exclude.contains(&id) {
                return Ok(ImageRecord::rejected(
                    &id,
                    &source,
                    Rejection::new(RejectReason::Excluded, "manual exclusion"),
                ));
            }
            let img = match load_image(path) {
                Ok(img) => img,
                Err(e) => return Ok(ImageRecord::rejected(&id, &source, Rejection::new(RejectReason::Unreadable, e))),
            };
            match process_image(&img, &id, cfg, &palette) {
                Err(r) => {
                    log::info!("{id}: rejected ({}): {}", r.reason.as_str(), r.detail);
                    Ok(ImageRecord::rejected(&id, &source, r))
                }
                Ok(p) => {
                    let (rotations, authentic) = save_outputs(out_dir, &id, &p)?;
                    log::info!("{id}: class {} with {} variants", p.color_class, authentic.len());
                    Ok(ImageRecord {
                        id,
                        source,
                        status: RecordStatus::Accepted,
                        reason: None,
                        detail: None,
                        color_class: Some(p.color_class),
                        source_boundaries: Some(p.source_boundaries),
                        final_boundaries: Some(p.final_boundaries),
                        rotations,
                        authentic,
                    })
                }
            }
        })
        .collect::<Result<_>>()?;
    let mut manifest = DatasetManifest { records };
    manifest.records.sort_by(|a, b| a.id.cmp(&b.id).then_with(|| a.source.cmp(&b.source)));
    let path = out_dir.join(MANIFEST_FILE);
    let mut f = std::io::BufWriter::new(fs::File::create(&path).map_err(|e| Error::io(&path, e))?);
    manifest.write_jsonl(&mut f)?;
    f.flush().map_err(|e| Error::io(&path, e))?;
    Ok(manifest)
}
