//! Rotation-invariant comparison of iris codes and the statistics built on
//! it: authentic/imposter distributions, the threshold sweep and screening
//! of candidate codes against a reference set.

mod export;
mod kernel;

pub use export::{
    read_authentic_map, write_authentic_map, write_distributions_csv, write_screen_csv, write_threshold_csv,
    ThresholdSummary,
};
pub use kernel::{hamming, hamming_count, shift_code, PreparedCode};

use rayon::prelude::*;
use serde::Serialize;

use crate::encoding::IrisCode;
use crate::error::{Error, Result};

/// Number of thresholds in the sweep grid `{0.00, 0.01, …, 0.99}`.
pub const THRESHOLD_STEPS: usize = 100;

/// Codes are from the same iris when their distance is strictly below the
/// criterion.
pub const DEFAULT_CRITERION: f64 = 0.4;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct MatchScore {
    /// Minimum fractional Hamming distance over all cyclic shifts.
    pub hd: f64,
    /// Smallest shift (in cells, i.e. degrees) attaining `hd`.
    pub best_shift: usize,
}

/// Minimum Hamming distance between `a` and every cyclic shift of a
/// prepared `b`.
pub fn best_match_prepared(a: &IrisCode, b: &PreparedCode) -> Result<MatchScore> {
    kernel::check_dims(a, b.code())?;
    let mut best = (u32::MAX, 0usize);
    for s in 0..a.cols() {
        let d = b.shifted_distance(a, s);
        if d < best.0 {
            best = (d, s);
            if d == 0 {
                break;
            }
        }
    }
    Ok(MatchScore { hd: best.0 as f64 / a.bit_len() as f64, best_shift: best.1 })
}

/// `min_s hamming(a, shift_code(b, s))` with the smallest minimizing shift.
pub fn best_match(a: &IrisCode, b: &IrisCode) -> Result<MatchScore> {
    kernel::check_dims(a, b)?;
    best_match_prepared(a, &PreparedCode::new(b.clone()))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PairScore {
    /// Original index (authentic) or first original (imposter).
    pub id_a: usize,
    /// Variant index within its original (authentic) or second original.
    pub id_b: usize,
    pub score: MatchScore,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SampleSummary {
    pub count: usize,
    pub mean: f64,
    /// Sample standard deviation (n - 1); zero below two samples.
    pub sd: f64,
    pub min: f64,
    pub max: f64,
}

impl SampleSummary {
    pub fn of(values: impl Iterator<Item = f64> + Clone) -> Self {
        let count = values.clone().count();
        if count == 0 {
            return Self { count, mean: f64::NAN, sd: f64::NAN, min: f64::NAN, max: f64::NAN };
        }
        let mean = values.clone().sum::<f64>() / count as f64;
        let ss: f64 = values.clone().map(|v| (v - mean) * (v - mean)).sum();
        let sd = if count > 1 { (ss / (count - 1) as f64).sqrt() } else { 0.0 };
        let min = values.clone().fold(f64::INFINITY, f64::min);
        let max = values.fold(f64::NEG_INFINITY, f64::max);
        Self { count, mean, sd, min, max }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct HdDistributions {
    pub authentic: Vec<PairScore>,
    pub imposter: Vec<PairScore>,
    pub authentic_summary: SampleSummary,
    pub imposter_summary: SampleSummary,
    /// Set when no authentic comparisons were available.
    pub authentic_missing: bool,
}

impl HdDistributions {
    pub fn authentic_hds(&self) -> Vec<f64> {
        self.authentic.iter().map(|p| p.score.hd).collect()
    }

    pub fn imposter_hds(&self) -> Vec<f64> {
        self.imposter.iter().map(|p| p.score.hd).collect()
    }
}

/// Authentic scores compare every original with each of its variants;
/// imposter scores cover every unordered pair of distinct originals.
/// `variants` is either empty or has one (possibly empty) list per original.
pub fn build_distributions(originals: &[IrisCode], variants: &[Vec<IrisCode>]) -> Result<HdDistributions> {
    if originals.len() < 2 {
        return Err(Error::InsufficientData(format!("need at least 2 original codes, got {}", originals.len())));
    }
    if !variants.is_empty() && variants.len() != originals.len() {
        return Err(Error::InsufficientData(format!(
            "{} variant lists for {} originals",
            variants.len(),
            originals.len()
        )));
    }
    for c in originals.iter().chain(variants.iter().flatten()) {
        kernel::check_dims(&originals[0], c)?;
    }
    let prepared: Vec<PreparedCode> = originals.par_iter().map(|c| PreparedCode::new(c.clone())).collect();

    let authentic: Vec<PairScore> = variants
        .par_iter()
        .enumerate()
        .flat_map_iter(|(i, list)| {
            let original = &prepared[i];
            list.iter().enumerate().map(move |(v, code)| PairScore {
                id_a: i,
                id_b: v,
                score: best_match_prepared(code, original).expect("dimensions checked"),
            })
        })
        .collect();

    let n = originals.len();
    let imposter: Vec<PairScore> = (0..n)
        .into_par_iter()
        .flat_map_iter(|i| {
            let prepared = &prepared;
            (i + 1..n).map(move |j| PairScore {
                id_a: i,
                id_b: j,
                score: best_match_prepared(&originals[i], &prepared[j]).expect("dimensions checked"),
            })
        })
        .collect();

    Ok(HdDistributions {
        authentic_summary: SampleSummary::of(authentic.iter().map(|p| p.score.hd)),
        imposter_summary: SampleSummary::of(imposter.iter().map(|p| p.score.hd)),
        authentic_missing: authentic.is_empty(),
        authentic,
        imposter,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ThresholdReport {
    pub grid: Vec<f64>,
    /// Fraction of imposter samples strictly below each threshold.
    pub far: Vec<f64>,
    /// Fraction of authentic samples at or above each threshold.
    pub frr: Vec<f64>,
    pub chosen: f64,
    pub chosen_far: f64,
    pub chosen_frr: f64,
    pub n_authentic: usize,
    pub n_imposter: usize,
}

pub fn threshold_grid() -> Vec<f64> {
    (0..THRESHOLD_STEPS).map(|i| i as f64 / 100.0).collect()
}

/// Sweeps the 100-point grid and picks the threshold minimizing FAR + FRR,
/// preferring the smaller threshold on ties.
pub fn sweep_threshold(d: &HdDistributions) -> Result<ThresholdReport> {
    sweep_samples(&d.authentic_hds(), &d.imposter_hds())
}

pub fn sweep_samples(authentic: &[f64], imposter: &[f64]) -> Result<ThresholdReport> {
    if authentic.is_empty() || imposter.is_empty() {
        return Err(Error::InsufficientData(format!(
            "threshold sweep needs both distributions, got {} authentic and {} imposter samples",
            authentic.len(),
            imposter.len()
        )));
    }
    let mut auth = authentic.to_vec();
    let mut imp = imposter.to_vec();
    auth.sort_by(f64::total_cmp);
    imp.sort_by(f64::total_cmp);
    let (na, ni) = (auth.len() as u128, imp.len() as u128);
    let grid = threshold_grid();
    let mut counts = Vec::with_capacity(grid.len());
    for &t in &grid {
        let false_accepts = imp.partition_point(|&h| h < t) as u128;
        let false_rejects = na - auth.partition_point(|&h| h < t) as u128;
        counts.push((false_accepts, false_rejects));
    }
    // FAR + FRR compared exactly as fa/ni + fr/na ~ fa·na + fr·ni.
    let chosen_index =
        (0..grid.len()).min_by_key(|&i| (counts[i].0 * na + counts[i].1 * ni, i)).expect("grid is non-empty");
    let far: Vec<f64> = counts.iter().map(|c| c.0 as f64 / ni as f64).collect();
    let frr: Vec<f64> = counts.iter().map(|c| c.1 as f64 / na as f64).collect();
    Ok(ThresholdReport {
        chosen: grid[chosen_index],
        chosen_far: far[chosen_index],
        chosen_frr: frr[chosen_index],
        grid,
        far,
        frr,
        n_authentic: auth.len(),
        n_imposter: imp.len(),
    })
}

/// A code with a caller-chosen identifier.
#[derive(Debug, Clone, PartialEq)]
pub struct LabeledCode {
    pub id: String,
    pub code: IrisCode,
}

impl LabeledCode {
    pub fn new(id: impl Into<String>, code: IrisCode) -> Self {
        Self { id: id.into(), code }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ScreenEntry {
    pub candidate_id: String,
    pub min_hd: f64,
    pub best_shift: usize,
    pub closest_ref: String,
    /// True when the candidate is unique, i.e. `min_hd >= criterion`.
    pub pass: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct UniquenessReport {
    pub criterion: f64,
    pub entries: Vec<ScreenEntry>,
}

impl UniquenessReport {
    pub fn passed(&self) -> usize {
        self.entries.iter().filter(|e| e.pass).count()
    }

    pub fn failed(&self) -> usize {
        self.entries.len() - self.passed()
    }
}

/// Compares each candidate with every reference; a candidate fails when any
/// reference matches it below `criterion`. References sharing the
/// candidate's id are skipped.
pub fn uniqueness_screen(
    candidates: &[LabeledCode],
    references: &[LabeledCode],
    criterion: f64,
) -> Result<UniquenessReport> {
    if !(criterion > 0.0 && criterion < 1.0) {
        return Err(Error::InvalidParameter(format!("criterion {criterion} outside (0, 1)")));
    }
    if references.is_empty() {
        return Err(Error::InsufficientData("empty reference set".into()));
    }
    for c in candidates.iter().chain(references) {
        kernel::check_dims(&references[0].code, &c.code)?;
    }
    let prepared: Vec<PreparedCode> = references.par_iter().map(|r| PreparedCode::new(r.code.clone())).collect();
    let entries = candidates
        .par_iter()
        .map(|cand| {
            let mut best: Option<(MatchScore, usize)> = None;
            for (k, r) in references.iter().enumerate() {
                if r.id == cand.id {
                    continue;
                }
                let score = best_match_prepared(&cand.code, &prepared[k])?;
                if best.is_none_or(|(b, _)| score.hd < b.hd) {
                    best = Some((score, k));
                }
            }
            let (score, k) =
                best.ok_or_else(|| Error::InsufficientData(format!("no references left to compare with {}", cand.id)))?;
            Ok(ScreenEntry {
                candidate_id: cand.id.clone(),
                min_hd: score.hd,
                best_shift: score.best_shift,
                closest_ref: references[k].id.clone(),
                pass: score.hd >= criterion,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(UniquenessReport { criterion, entries })
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn random_code(rng: &mut ChaCha8Rng) -> IrisCode {
        IrisCode::from_fn(45, 360, |_, _| (rng.random(), rng.random()))
    }

    #[test]
    fn self_match_is_zero_at_shift_zero() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let c = random_code(&mut rng);
        assert_eq!(best_match(&c, &c).unwrap(), MatchScore { hd: 0.0, best_shift: 0 });
    }

    #[test]
    fn aligning_shift_recovered() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let c = random_code(&mut rng);
        for k in [1i64, 37, 200, 359] {
            let m = best_match(&c, &shift_code(&c, k)).unwrap();
            assert_eq!(m.hd, 0.0);
            // shift_code(shift_code(c, k), 360 - k) == c
            assert_eq!(m.best_shift as i64, (360 - k) % 360);
        }
    }

    #[test]
    fn best_match_is_symmetric_and_bounded() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..5 {
            let a = random_code(&mut rng);
            let b = random_code(&mut rng);
            let ab = best_match(&a, &b).unwrap();
            let ba = best_match(&b, &a).unwrap();
            assert_eq!(ab.hd, ba.hd);
            assert!(ab.hd <= hamming(&a, &b).unwrap());
        }
    }

    #[test]
    fn counting_identities() {
        let codes = vec![IrisCode::zeros(45, 360); 50];
        let d = build_distributions(&codes, &[]).unwrap();
        assert_eq!(d.imposter.len(), 50 * 49 / 2);
        assert!(d.authentic_missing);

        let variants = vec![vec![IrisCode::zeros(45, 360); 41]; 50];
        let d = build_distributions(&codes, &variants).unwrap();
        assert_eq!(d.authentic.len(), 50 * 41);
        assert!(!d.authentic_missing);

        let two = build_distributions(&codes[..2], &[vec![], vec![]]).unwrap();
        assert_eq!((two.imposter.len(), two.authentic.len()), (1, 0));
        assert!(two.authentic_missing);
        assert!(build_distributions(&codes[..1], &[]).is_err());
    }

    #[test]
    fn separated_sweep() {
        let auth: Vec<f64> = (0..50).map(|i| 0.2 - i as f64 * 0.003).collect();
        let imp: Vec<f64> = (0..80).map(|i| 0.44 + i as f64 * 0.001).collect();
        let r = sweep_samples(&auth, &imp).unwrap();
        assert!(r.chosen > 0.2 && r.chosen <= 0.44, "{}", r.chosen);
        assert_eq!((r.chosen_far, r.chosen_frr), (0.0, 0.0));
        // Smallest zero-error threshold.
        assert_eq!(r.chosen, 0.21);
        assert_eq!(r.grid.len(), 100);
        for w in r.far.windows(2) {
            assert!(w[0] <= w[1]);
        }
        for w in r.frr.windows(2) {
            assert!(w[0] >= w[1]);
        }
    }

    #[test]
    fn sweep_boundary_is_strict() {
        // A sample exactly at the threshold is rejected (not < t).
        let r = sweep_samples(&[0.3], &[0.3]).unwrap();
        let i = 30;
        assert_eq!(r.grid[i], 0.3);
        assert_eq!(r.far[i], 0.0);
        assert_eq!(r.frr[i], 1.0);
        assert!(sweep_samples(&[], &[0.5]).is_err());
    }

    #[test]
    fn screening() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let refs: Vec<LabeledCode> = (0..5).map(|i| LabeledCode::new(format!("r{i}"), random_code(&mut rng))).collect();
        let clone = LabeledCode::new("dup", refs[2].code.clone());
        let inverse = LabeledCode::new("inv", refs[0].code.complement());
        let rep = uniqueness_screen(&[clone, inverse], &refs[..3], 0.4).unwrap();
        assert!(!rep.entries[0].pass);
        assert!(rep.entries[1].pass);

        let rep = uniqueness_screen(&[LabeledCode::new("dup", refs[2].code.clone())], &refs, 0.4).unwrap();
        assert_eq!(rep.entries[0].min_hd, 0.0);
        assert_eq!(rep.entries[0].closest_ref, "r2");
        assert_eq!(rep.failed(), 1);

        // Same id is skipped.
        let rep = uniqueness_screen(&refs, &refs, 0.4).unwrap();
        assert_eq!(rep.passed(), 5);
        assert!(uniqueness_screen(&refs, &[], 0.4).is_err());
        assert!(uniqueness_screen(&refs, &refs, 1.0).is_err());
        assert!(uniqueness_screen(&refs[..1], &refs[..1], 0.4).is_err());
    }
}
