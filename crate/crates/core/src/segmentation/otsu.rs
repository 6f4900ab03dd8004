use crate::imaging::RasterImage;

/// Result of Otsu's method. `degenerate` is set when the histogram has a
/// single occupied level, in which case `level` is that value.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct OtsuThreshold {
    pub level: u8,
    pub degenerate: bool,
}

pub fn histogram(img: &RasterImage) -> [u64; 256] {
    let mut hist = [0u64; 256];
    for &v in img.data() {
        hist[v as usize] += 1;
    }
    hist
}

/// 128×128 → 256-bit product as (high, low).
fn mul_wide(a: u128, b: u128) -> (u128, u128) {
    const MASK: u128 = u64::MAX as u128;
    let (a_hi, a_lo) = (a >> 64, a & MASK);
    let (b_hi, b_lo) = (b >> 64, b & MASK);
    let ll = a_lo * b_lo;
    let lh = a_lo * b_hi;
    let hl = a_hi * b_lo;
    let hh = a_hi * b_hi;
    let mid = (ll >> 64) + (lh & MASK) + (hl & MASK);
    let lo = (ll & MASK) | (mid << 64);
    let hi = hh + (lh >> 64) + (hl >> 64) + (mid >> 64);
    (hi, lo)
}

/// Between-class variance up to a constant factor, kept as the exact ratio
/// `num / den` so equal splits compare equal.
#[derive(Clone, Copy)]
struct Score {
    num: u128,
    den: u128,
}

impl Score {
    fn greater_than(&self, other: &Score) -> bool {
        mul_wide(self.num, other.den) > mul_wide(other.num, self.den)
    }
}

/// Level `t` maximizing the between-class variance of the `≤ t` / `> t`
/// split, with ties going to the smallest `t`. Uses exact integer
/// arithmetic over a 256-bin histogram of a grayscale raster.
pub fn otsu_threshold(img: &RasterImage) -> OtsuThreshold {
    otsu_from_histogram(&histogram(img))
}

pub fn otsu_from_histogram(hist: &[u64; 256]) -> OtsuThreshold {
    let total: u64 = hist.iter().sum();
    let sum: u128 = hist.iter().enumerate().map(|(v, &c)| v as u128 * c as u128).sum();
    let occupied: Vec<usize> = (0..256).filter(|&v| hist[v] > 0).collect();
    if occupied.len() <= 1 {
        return OtsuThreshold { level: occupied.first().copied().unwrap_or(0) as u8, degenerate: true };
    }
    let mut best: Option<(u8, Score)> = None;
    let (mut n0, mut s0) = (0u128, 0u128);
    for (t, &h) in hist.iter().enumerate() {
        n0 += h as u128;
        s0 += t as u128 * h as u128;
        let n1 = total as u128 - n0;
        if n0 == 0 || n1 == 0 {
            continue;
        }
        // N²·w0·w1·(μ0-μ1)² = (N·S0 - n0·S)² / (n0·n1)
        let a = total as u128 * s0;
        let b = n0 * sum;
        let diff = a.abs_diff(b);
        let score = Score { num: diff * diff, den: n0 * n1 };
        if best.as_ref().is_none_or(|(_, s)| score.greater_than(s)) {
            best = Some((t as u8, score));
        }
    }
    OtsuThreshold { level: best.map(|b| b.0).expect("two occupied levels"), degenerate: false }
}
