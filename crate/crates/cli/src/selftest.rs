//! Cross-checks of the fast algorithms against the brute-force oracles on
//! random inputs.

use clap::Args;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use irisval::color::{euclidean, ilr_transform, ColorComposition, DEFAULT_PSEUDO_COUNT};
use irisval::encoding::IrisCode;
use irisval::matching::best_match;
use irisval::oracles::{aitchison_distance, best_match_naive, min_enclosing_circle_brute, otsu_exhaustive};
use irisval::segmentation::{min_enclosing_circle, otsu_threshold};
use irisval::synthetic::{random_code, textured_iris};
use irisval::{segment_iris, BoundarySpec, RasterImage};

use crate::{Failure, Global, EXIT_CHECK_FAILED, EXIT_USAGE};

#[derive(Debug, Args)]
pub struct SelftestArgs {
    /// Random cases per check
    #[arg(long, default_value_t = 20)]
    pub cases: usize,
}

struct Check {
    name: &'static str,
    failures: usize,
    cases: usize,
    worst: String,
}

impl Check {
    fn new(name: &'static str) -> Self {
        Self { name, failures: 0, cases: 0, worst: String::new() }
    }

    fn record(&mut self, ok: bool, detail: impl FnOnce() -> String) {
        self.cases += 1;
        if !ok {
            if self.failures == 0 {
                self.worst = detail();
            }
            self.failures += 1;
        }
    }
}

fn otsu_check(rng: &mut ChaCha8Rng, cases: usize) -> Result<Check, Failure> {
    let mut c = Check::new("otsu threshold vs exhaustive search");
    for _ in 0..cases {
        let (w, h) = (rng.random_range(4..40), rng.random_range(4..40));
        let lo: u8 = rng.random_range(0..128);
        let hi: u8 = rng.random_range(lo..=255);
        let data: Vec<u8> = (0..w * h).map(|_| rng.random_range(lo..=hi)).collect();
        let img = RasterImage::new(w, h, 1, data.clone())?;
        let (fast, slow) = (otsu_threshold(&img).level, otsu_exhaustive(&data));
        c.record(fast == slow, || format!("{w}x{h}: {fast} vs {slow}"));
    }
    Ok(c)
}

fn circle_check(rng: &mut ChaCha8Rng, cases: usize) -> Result<Check, Failure> {
    let mut c = Check::new("enclosing circle vs brute force");
    for _ in 0..cases {
        let n = rng.random_range(1..40);
        let pts: Vec<(f64, f64)> =
            (0..n).map(|_| (rng.random_range(-50.0..50.0), rng.random_range(-50.0..50.0))).collect();
        let fast = min_enclosing_circle(&pts)?;
        let slow = min_enclosing_circle_brute(&pts);
        let err = (fast.radius - slow.radius).abs();
        let covers = pts.iter().all(|&p| fast.contains(p));
        c.record(err <= 1e-9 && covers, || format!("{n} points: radius error {err:e}, covers {covers}"));
    }
    Ok(c)
}

fn match_check(rng: &mut ChaCha8Rng, cases: usize) -> Result<Check, Failure> {
    let mut c = Check::new("best rotation match vs naive scan");
    for _ in 0..cases {
        let a = random_code(rng.random());
        // Half the cases compare against a rotated, lightly corrupted copy.
        let b = if rng.random() {
            let s = rng.random_range(0..a.cols());
            let mut b = IrisCode::from_fn(a.rows(), a.cols(), |r, col| a.cell(r, (col + s) % a.cols()));
            for _ in 0..500 {
                let (r, j) = (rng.random_range(0..a.rows()), rng.random_range(0..2 * a.cols()));
                b.set_bit(r, j, !b.bit(r, j));
            }
            b
        } else {
            random_code(rng.random())
        };
        let fast = best_match(&a, &b)?.hd;
        let slow = best_match_naive(&a, &b);
        c.record(fast == slow, || format!("{fast} vs {slow}"));
    }
    Ok(c)
}

fn ilr_check(rng: &mut ChaCha8Rng, cases: usize) -> Result<Check, Failure> {
    let mut c = Check::new("ilr distance vs aitchison distance");
    for _ in 0..cases {
        let x: Vec<f64> = (0..4).map(|_| rng.random_range(0.01..1.0)).collect();
        let y: Vec<f64> = (0..4).map(|_| rng.random_range(0.01..1.0)).collect();
        let (cx, cy) = (ColorComposition::from_fractions(&x)?, ColorComposition::from_fractions(&y)?);
        let d = euclidean(&ilr_transform(&cx, DEFAULT_PSEUDO_COUNT)?, &ilr_transform(&cy, DEFAULT_PSEUDO_COUNT)?);
        let oracle = aitchison_distance(&cx.fractions, &cy.fractions);
        let err = (d - oracle).abs();
        c.record(err <= 1e-9, || format!("{d} vs {oracle}"));
    }
    Ok(c)
}

fn code_file_check(rng: &mut ChaCha8Rng, cases: usize) -> Result<Check, Failure> {
    let mut c = Check::new("code file round trip");
    for _ in 0..cases {
        let code = random_code(rng.random());
        let bytes = code.to_file_bytes();
        let back = IrisCode::from_file_bytes(&bytes)?;
        c.record(bytes.len() == 4058 && back == code, || format!("{} bytes", bytes.len()));
    }
    Ok(c)
}

fn segmentation_check(rng: &mut ChaCha8Rng, cases: usize) -> Result<Check, Failure> {
    let mut c = Check::new("segmentation of synthetic frames");
    let spec = BoundarySpec::default();
    for _ in 0..cases {
        let seed = rng.random();
        let result = segment_iris(&textured_iris(seed), &spec);
        let ok = result.as_ref().is_ok_and(|b| {
            (b.pupil_radius - 45.0).abs() <= spec.tolerance && (b.limbic_radius - 85.0).abs() <= spec.tolerance
        });
        c.record(ok, || format!("seed {seed}: {result:?}"));
    }
    Ok(c)
}

pub fn run(g: &Global, a: &SelftestArgs) -> Result<(), Failure> {
    if a.cases == 0 {
        return Err(Failure::new(EXIT_USAGE, "--cases must be positive"));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(g.seed.unwrap_or(0));
    let n = a.cases;
    // The naive match scan costs ~10M bit comparisons per pair.
    let checks = [
        otsu_check(&mut rng, n)?,
        circle_check(&mut rng, n)?,
        match_check(&mut rng, n.min(10))?,
        ilr_check(&mut rng, n)?,
        code_file_check(&mut rng, n)?,
        segmentation_check(&mut rng, n.min(10))?,
    ];
    let mut failed = 0;
    for c in &checks {
        if c.failures == 0 {
            println!("PASS {} ({} cases)", c.name, c.cases);
        } else {
            failed += 1;
            println!("FAIL {} ({} of {} cases; first: {})", c.name, c.failures, c.cases, c.worst);
        }
    }
    if failed > 0 {
        return Err(Failure::new(EXIT_CHECK_FAILED, format!("{failed} selftest check(s) failed")));
    }
    Ok(())
}
