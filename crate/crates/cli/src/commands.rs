use std::collections::HashMap;
use std::fs;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use clap::Args;
use rayon::prelude::*;

use irisval::color::{
    distance_analysis, ilr_transform, pca_fit, pca_project, quantify_colors, write_distances_csv, write_ilr_csv,
    write_pca_csv, Palette, DEFAULT_BIN_WIDTH, DEFAULT_PSEUDO_COUNT,
};
use irisval::encoding::IrisCode;
use irisval::imaging::load_image;
use irisval::matching::{
    build_distributions, read_authentic_map, sweep_threshold, uniqueness_screen, write_authentic_map,
    write_distributions_csv, write_screen_csv, write_threshold_csv, LabeledCode, ThresholdSummary, DEFAULT_CRITERION,
};
use irisval::pipeline::{
    approximate_boundaries, list_inputs, run_pipeline, DatasetManifest, PipelineConfig, MANIFEST_FILE,
};
use irisval::{BoundarySpec, IrisEncoder};

use crate::{Failure, Global, EXIT_EMPTY, EXIT_INSUFFICIENT, EXIT_USAGE};

type CmdResult = Result<(), Failure>;

fn usage(msg: impl Into<String>) -> Failure {
    Failure::new(EXIT_USAGE, msg)
}

fn create_dir(dir: &Path) -> CmdResult {
    fs::create_dir_all(dir).map_err(|e| usage(format!("{}: {e}", dir.display())))
}

fn create_file(path: &Path) -> Result<BufWriter<fs::File>, Failure> {
    if let Some(parent) = path.parent() {
        create_dir(parent)?;
    }
    fs::File::create(path).map(BufWriter::new).map_err(|e| usage(format!("{}: {e}", path.display())))
}

fn require_dir(dir: &Path) -> CmdResult {
    if dir.is_dir() {
        Ok(())
    } else {
        Err(usage(format!("{}: not a readable directory", dir.display())))
    }
}

fn stem(path: &Path) -> String {
    path.file_stem().and_then(|s| s.to_str()).unwrap_or("unnamed").to_string()
}

#[derive(Debug, Args)]
pub struct PreprocessArgs {
    /// Directory of raw iris-on-black images
    pub input: PathBuf,
    /// Flat `key = value` file over the pipeline defaults
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Override one setting (`key=value`); applied after the config file
    #[arg(long = "set", value_name = "KEY=VALUE")]
    pub overrides: Vec<String>,
}

pub fn preprocess(g: &Global, a: &PreprocessArgs) -> CmdResult {
    require_dir(&a.input)?;
    let mut cfg = match &a.config {
        Some(p) => PipelineConfig::load(p)?,
        None => PipelineConfig::default(),
    };
    for kv in &a.overrides {
        let (k, v) = kv.split_once('=').ok_or_else(|| usage(format!("--set expects key=value, got {kv:?}")))?;
        cfg.set(k, v)?;
    }
    if let Some(seed) = g.seed {
        cfg.seed = seed;
    }
    cfg.validate()?;
    let m = run_pipeline(&a.input, &g.out, &cfg)?;
    let accepted = m.accepted().count();
    println!(
        "preprocess: {accepted} accepted, {} rejected; manifest {}",
        m.rejected().count(),
        g.out.join(MANIFEST_FILE).display()
    );
    for r in m.rejected() {
        println!(
            "  rejected {}: {} ({})",
            r.id,
            r.reason.map_or("unknown", |x| x.as_str()),
            r.detail.as_deref().unwrap_or("")
        );
    }
    if accepted == 0 {
        return Err(Failure::new(EXIT_EMPTY, "no image survived preprocessing"));
    }
    Ok(())
}

#[derive(Debug, Args)]
pub struct EncodeArgs {
    /// Image files or directories of images
    #[arg(required_unless_present = "manifest", conflicts_with = "manifest")]
    pub paths: Vec<PathBuf>,
    /// Encode a preprocessed dataset: writes `reference/`, `variants/` and
    /// `authentic_map.csv`
    #[arg(long)]
    pub manifest: Option<PathBuf>,
    /// Expected pupil radius in pixels
    #[arg(long, default_value_t = 45.0)]
    pub pupil: f64,
    /// Expected limbic radius in pixels
    #[arg(long, default_value_t = 85.0)]
    pub limbic: f64,
    /// Allowed radius deviation in pixels
    #[arg(long, default_value_t = 3.0)]
    pub tolerance: f64,
    /// Largest accepted circle-center offset from the frame center
    #[arg(long, default_value_t = 10.0)]
    pub max_center_offset: f64,
}

struct EncodeJob {
    source: PathBuf,
    dest: String,
}

pub fn encode(g: &Global, a: &EncodeArgs) -> CmdResult {
    let spec = BoundarySpec {
        tolerance: a.tolerance,
        max_center_offset: a.max_center_offset,
        ..BoundarySpec::new(a.pupil, a.limbic)
    };
    spec.validate()?;
    let mut jobs = Vec::new();
    // (reference dest, variant dest) pairs for the authentic map.
    let mut pairs: Vec<(String, String, String)> = Vec::new();
    if let Some(mpath) = &a.manifest {
        let manifest = DatasetManifest::load(mpath)?;
        let base = mpath.parent().unwrap_or(Path::new("."));
        for r in manifest.accepted() {
            let Some(original) = r.original() else { continue };
            let reference = format!("reference/{}.icode", r.id);
            jobs.push(EncodeJob { source: base.join(original), dest: reference.clone() });
            for v in &r.authentic {
                let dest = format!("variants/{}/{}.icode", r.id, stem(Path::new(v)));
                jobs.push(EncodeJob { source: base.join(v), dest: dest.clone() });
                pairs.push((r.id.clone(), reference.clone(), dest));
            }
        }
    } else {
        for p in &a.paths {
            let files = if p.is_dir() {
                list_inputs(p)?
            } else if p.is_file() {
                vec![p.clone()]
            } else {
                return Err(usage(format!("{}: no such file or directory", p.display())));
            };
            jobs.extend(files.into_iter().map(|f| EncodeJob { dest: format!("{}.icode", stem(&f)), source: f }));
        }
    }
    create_dir(&g.out)?;
    let encoder = IrisEncoder::default();
    let results: Vec<Result<(), String>> = jobs
        .par_iter()
        .map(|job| {
            let img = load_image(&job.source).map_err(|e| e.to_string())?;
            let (code, _) = encoder.encode_image(&img, &spec).map_err(|e| e.to_string())?;
            let dest = g.out.join(&job.dest);
            if let Some(parent) = dest.parent() {
                fs::create_dir_all(parent).map_err(|e| format!("{}: {e}", parent.display()))?;
            }
            code.save(&dest).map_err(|e| e.to_string())
        })
        .collect();
    let mut ok: HashMap<&str, bool> = HashMap::new();
    for (job, r) in jobs.iter().zip(&results) {
        if let Err(e) = r {
            log::warn!("{}: skipped: {e}", job.source.display());
        }
        ok.insert(job.dest.as_str(), r.is_ok());
    }
    let written = results.iter().filter(|r| r.is_ok()).count();
    println!("encode: {written} codes written to {}, {} failed", g.out.display(), results.len() - written);
    if a.manifest.is_some() {
        let rows: Vec<(String, String)> =
            pairs.into_iter().filter(|(_, r, v)| ok[r.as_str()] && ok[v.as_str()]).map(|(id, _, v)| (id, v)).collect();
        let path = g.out.join("authentic_map.csv");
        write_authentic_map(create_file(&path)?, &rows)?;
    }
    if written == 0 {
        return Err(Failure::new(EXIT_INSUFFICIENT, "no image could be encoded"));
    }
    Ok(())
}

/// Every `.icode` file of a directory, sorted by name, keyed by file stem.
fn load_code_dir(dir: &Path) -> Result<Vec<LabeledCode>, Failure> {
    require_dir(dir)?;
    list_inputs(dir)?
        .into_iter()
        .filter(|p| p.extension().is_some_and(|e| e == "icode"))
        .map(|p| Ok(LabeledCode::new(stem(&p), IrisCode::load(&p)?)))
        .collect()
}

#[derive(Debug, Args)]
pub struct ValidateArgs {
    /// Directory of reference (original) `.icode` files
    pub reference_dir: PathBuf,
    /// `original,variant` CSV; variant paths are relative to the map file
    #[arg(long)]
    pub authentic_map: Option<PathBuf>,
}

pub fn validate(g: &Global, a: &ValidateArgs) -> CmdResult {
    let refs = load_code_dir(&a.reference_dir)?;
    if refs.len() < 2 {
        return Err(Failure::new(
            EXIT_INSUFFICIENT,
            format!("need at least 2 reference codes in {}, found {}", a.reference_dir.display(), refs.len()),
        ));
    }
    let index: HashMap<&str, usize> = refs.iter().enumerate().map(|(i, r)| (r.id.as_str(), i)).collect();
    let mut variants: Vec<Vec<IrisCode>> = vec![Vec::new(); refs.len()];
    let mut variant_ids: Vec<Vec<String>> = vec![Vec::new(); refs.len()];
    if let Some(map_path) = &a.authentic_map {
        let f = fs::File::open(map_path).map_err(|e| usage(format!("{}: {e}", map_path.display())))?;
        let base = map_path.parent().unwrap_or(Path::new("."));
        for (original, variant) in read_authentic_map(f)? {
            let &i = index
                .get(original.as_str())
                .ok_or_else(|| usage(format!("authentic map names unknown reference {original:?}")))?;
            variants[i].push(IrisCode::load(base.join(&variant))?);
            variant_ids[i].push(variant);
        }
    }
    let codes: Vec<IrisCode> = refs.iter().map(|r| r.code.clone()).collect();
    let ids: Vec<String> = refs.iter().map(|r| r.id.clone()).collect();
    let d = build_distributions(&codes, &variants)?;

    create_dir(&g.out)?;
    write_distributions_csv(create_file(&g.out.join("distributions.csv"))?, &d, &ids, &variant_ids)?;
    let report = if d.authentic.is_empty() {
        log::warn!("no authentic comparisons; skipping the threshold sweep");
        None
    } else {
        let r = sweep_threshold(&d)?;
        write_threshold_csv(create_file(&g.out.join("thresholds.csv"))?, &r)?;
        Some(r)
    };
    let summary = serde_json::json!({
        "threshold": ThresholdSummary::new(&d, report.as_ref()),
        "authentic": d.authentic_summary,
        "imposter": d.imposter_summary,
    });
    let mut f = create_file(&g.out.join("summary.json"))?;
    serde_json::to_writer_pretty(&mut f, &summary).map_err(|e| usage(e.to_string()))?;
    writeln!(f).and_then(|_| f.flush()).map_err(|e| usage(e.to_string()))?;

    print!(
        "validate: {} references, {} authentic and {} imposter comparisons",
        refs.len(),
        d.authentic.len(),
        d.imposter.len()
    );
    match &report {
        Some(r) => println!("; criterion {:.2} (FAR {}, FRR {})", r.chosen, r.chosen_far, r.chosen_frr),
        None => println!("; no criterion without authentic samples"),
    }
    Ok(())
}

#[derive(Debug, Args)]
pub struct ScreenArgs {
    /// Directory of candidate `.icode` files
    pub candidate_dir: PathBuf,
    /// Directory of reference `.icode` files
    pub reference_dir: PathBuf,
    /// Minimum best-shift distance for a candidate to count as unique
    #[arg(long, default_value_t = DEFAULT_CRITERION)]
    pub criterion: f64,
}

pub fn screen(g: &Global, a: &ScreenArgs) -> CmdResult {
    if !(a.criterion > 0.0 && a.criterion < 1.0) {
        return Err(usage(format!("--criterion must lie in (0, 1), got {}", a.criterion)));
    }
    let candidates = load_code_dir(&a.candidate_dir)?;
    let references = load_code_dir(&a.reference_dir)?;
    if candidates.is_empty() || references.is_empty() {
        return Err(Failure::new(EXIT_INSUFFICIENT, "candidate and reference directories must hold codes"));
    }
    let report = uniqueness_screen(&candidates, &references, a.criterion)?;
    create_dir(&g.out)?;
    write_screen_csv(create_file(&g.out.join("screen.csv"))?, &report)?;
    println!(
        "screen: {} candidates, {} pass, {} fail at criterion {}",
        report.entries.len(),
        report.passed(),
        report.failed(),
        a.criterion
    );
    Ok(())
}

#[derive(Debug, Args)]
pub struct ColorArgs {
    /// Directory of images (e.g. the training set)
    pub set_a: PathBuf,
    /// Optional second directory (e.g. generated images) for the inter-set
    /// analysis
    pub set_b: Option<PathBuf>,
    /// Histogram bin width
    #[arg(long, default_value_t = DEFAULT_BIN_WIDTH)]
    pub bin_width: f64,
    /// Pseudo-count replacing zero fractions before the log-ratio
    #[arg(long, default_value_t = DEFAULT_PSEUDO_COUNT)]
    pub pseudo: f64,
    /// Principal components to export
    #[arg(long, default_value_t = 3)]
    pub components: usize,
}

/// (ids, ILR vectors) of the usable images in a directory.
fn ilr_set(dir: &Path, palette: &Palette, pseudo: f64) -> Result<(Vec<String>, Vec<Vec<f64>>), Failure> {
    require_dir(dir)?;
    let files = list_inputs(dir)?;
    let rows: Vec<Option<(String, Vec<f64>)>> = files
        .par_iter()
        .map(|p| {
            let result = load_image(p)
                .and_then(|img| {
                    let b = approximate_boundaries(&img, palette.colored_threshold)?;
                    quantify_colors(&img, &b, palette)
                })
                .and_then(|c| ilr_transform(&c, pseudo));
            match result {
                Ok(v) => Some((stem(p), v)),
                Err(e) => {
                    log::warn!("{}: skipped: {e}", p.display());
                    None
                }
            }
        })
        .collect();
    Ok(rows.into_iter().flatten().unzip())
}

pub fn coloranalysis(g: &Global, a: &ColorArgs) -> CmdResult {
    if !(a.bin_width > 0.0) {
        return Err(usage("--bin-width must be positive"));
    }
    let palette = Palette::default();
    let (ids_a, set_a) = ilr_set(&a.set_a, &palette, a.pseudo)?;
    if set_a.is_empty() {
        return Err(Failure::new(EXIT_INSUFFICIENT, format!("no usable images in {}", a.set_a.display())));
    }
    let (ids_b, set_b) = match &a.set_b {
        Some(dir) => {
            let s = ilr_set(dir, &palette, a.pseudo)?;
            if s.1.is_empty() {
                return Err(Failure::new(EXIT_INSUFFICIENT, format!("no usable images in {}", dir.display())));
            }
            s
        }
        None => (Vec::new(), Vec::new()),
    };
    create_dir(&g.out)?;
    write_ilr_csv(create_file(&g.out.join("ilr.csv"))?, &ids_a, &set_a)?;
    if a.set_b.is_some() {
        write_ilr_csv(create_file(&g.out.join("ilr_b.csv"))?, &ids_b, &set_b)?;
    }

    let joint: Vec<Vec<f64>> = set_a.iter().chain(&set_b).cloned().collect();
    if joint.len() >= 2 {
        let k = a.components.clamp(1, joint[0].len());
        let model = pca_fit(&joint, k)?;
        let mut rows = Vec::new();
        for (label, ids, set) in [("a", &ids_a, &set_a), ("b", &ids_b, &set_b)] {
            for (id, v) in ids.iter().zip(set.iter()) {
                rows.push((id.clone(), label.to_string(), pca_project(&model, v)?));
            }
        }
        write_pca_csv(create_file(&g.out.join("pca.csv"))?, &rows)?;
        log::info!("pca explained variance ratio {:?}", model.explained_ratio());
    } else {
        log::warn!("a single vector has no principal components; pca.csv not written");
    }

    let intra = distance_analysis(&set_a, None, a.bin_width)?;
    intra.histogram.write_csv(create_file(&g.out.join("histogram_intra.csv"))?)?;
    write_distances_csv(create_file(&g.out.join("distances_intra.csv"))?, &intra, &ids_a, &[])?;
    print!("coloranalysis: {} images in set a, {} intra-set distances", set_a.len(), intra.values.len());
    if a.set_b.is_some() {
        let inter = distance_analysis(&set_a, Some(&set_b), a.bin_width)?;
        inter.histogram.write_csv(create_file(&g.out.join("histogram_inter.csv"))?)?;
        write_distances_csv(create_file(&g.out.join("distances_inter.csv"))?, &inter, &ids_a, &ids_b)?;
        print!("; {} images in set b", set_b.len());
    }
    println!();
    Ok(())
}
