use irisval::color::Palette;
use irisval::imaging::rotate;
use irisval::matching::best_match;
use irisval::pipeline::{coverage_gate, image_seed, process_image, PipelineConfig, RejectReason};
use irisval::synthetic::{iris_frame, BASE_COLORS};
use irisval::{segment_iris, BoundarySpec, IrisBoundaries, IrisEncoder, RasterImage};

fn small_config() -> PipelineConfig {
    PipelineConfig { hole_punch_count: 4, ..PipelineConfig::default() }
}

fn source(seed: u64, wedge: Option<(f64, f64)>) -> RasterImage {
    let b = IrisBoundaries::centered(512, 100.0, 220.0);
    iris_frame(seed, 512, &b, BASE_COLORS[(seed % 4) as usize], wedge)
}

fn annulus_mae(a: &RasterImage, b: &RasterImage, bounds: &IrisBoundaries) -> f64 {
    let inner = IrisBoundaries {
        pupil_radius: bounds.pupil_radius + 2.0,
        limbic_radius: bounds.limbic_radius - 2.0,
        ..*bounds
    };
    let (mut sum, mut n) = (0.0, 0usize);
    for y in 0..a.height() {
        for x in 0..a.width() {
            if inner.contains(x as f64, y as f64) {
                for (p, q) in a.pixel(x, y).iter().zip(b.pixel(x, y)) {
                    sum += (*p as f64 - *q as f64).abs();
                    n += 1;
                }
            }
        }
    }
    sum / n as f64
}

#[test]
fn wider_gaps_never_reduce_empty_rays() {
    let cfg = PipelineConfig::default();
    let b = IrisBoundaries::centered(512, 100.0, 220.0);
    let mut last = 0;
    for width in [0.0, 20.0, 45.0, 80.0, 120.0, 170.0, 250.0] {
        let wedge = (width > 0.0).then_some((10.0, 10.0 + width));
        let report = coverage_gate(&source(4, wedge), &b, &cfg);
        assert!(report.empty_rays.len() >= last, "width {width}: {:?}", report.empty_rays);
        assert_eq!(report.pass, report.empty_rays.len() < cfg.coverage_max_empty);
        last = report.empty_rays.len();
    }
    assert!(last >= 4);
}

#[test]
fn processed_frames_meet_the_training_geometry() {
    let cfg = small_config();
    let out = process_image(&source(21, None), "iris_x", &cfg, &Palette::default()).unwrap();
    assert_eq!(out.rotations.len(), 12);
    assert_eq!(out.hole_punched.len(), 4);
    let spec = BoundarySpec::default();
    for frame in out.rotations.iter().chain(&out.hole_punched) {
        assert_eq!((frame.width(), frame.height()), (256, 256));
        let b = segment_iris(frame, &spec).unwrap();
        assert!((b.pupil_radius - 45.0).abs() <= 3.0 && (b.limbic_radius - 85.0).abs() <= 3.0, "{b:?}");
    }
    // 180° rotation followed by another 180° lands back on the original.
    let back = rotate(&out.rotations[6], 180.0).unwrap();
    let mae = annulus_mae(&back, out.original(), &out.final_boundaries);
    assert!(mae <= 3.0, "mae {mae}");
}

#[test]
fn hole_punched_variants_stay_authentic() {
    let cfg = small_config();
    let palette = Palette::default();
    let enc = IrisEncoder::default();
    let spec = BoundarySpec::default();
    let a = process_image(&source(30, None), "a", &cfg, &palette).unwrap();
    let b = process_image(&source(31, None), "b", &cfg, &palette).unwrap();
    let code = |img: &RasterImage| enc.encode_image(img, &spec).unwrap().0;
    let ca = code(a.original());
    let imposter = best_match(&ca, &code(b.original())).unwrap().hd;
    for v in &a.hole_punched {
        let hd = best_match(&ca, &code(v)).unwrap().hd;
        assert!(hd < 0.3 && hd < imposter, "authentic {hd} vs imposter {imposter}");
    }
}

#[test]
fn processing_is_deterministic_per_id() {
    let cfg = small_config();
    let palette = Palette::default();
    let img = source(8, None);
    let x = process_image(&img, "same", &cfg, &palette).unwrap();
    let y = process_image(&img, "same", &cfg, &palette).unwrap();
    assert_eq!(x.hole_punched, y.hole_punched);
    assert_ne!(image_seed("same"), image_seed("other"));
    let z = process_image(&img, "other", &cfg, &palette).unwrap();
    assert_ne!(x.hole_punched, z.hole_punched);
}

#[test]
fn black_and_gapped_sources_are_rejected() {
    let cfg = small_config();
    let palette = Palette::default();
    let black = RasterImage::filled(128, 128, 3, 0).unwrap();
    assert_eq!(process_image(&black, "k", &cfg, &palette).unwrap_err().reason, RejectReason::NoColor);
    let gapped = source(2, Some((0.0, 150.0)));
    assert_eq!(process_image(&gapped, "g", &cfg, &palette).unwrap_err().reason, RejectReason::Coverage);
}
