//! Slow, obviously-correct reference implementations used to cross-check
//! the production algorithms (unit tests, the acceptance suite and the
//! `selftest` command).

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::encoding::IrisCode;
use crate::segmentation::Circle;

/// Otsu level by direct floating-point evaluation of the between-class
/// variance at every split; the first maximum wins.
pub fn otsu_exhaustive(pixels: &[u8]) -> u8 {
    let n = pixels.len() as f64;
    let mut best = (0u8, -1.0f64);
    for t in 0..=255u8 {
        let (lo, hi): (Vec<f64>, Vec<f64>) = (
            pixels.iter().filter(|&&p| p <= t).map(|&p| p as f64).collect(),
            pixels.iter().filter(|&&p| p > t).map(|&p| p as f64).collect(),
        );
        if lo.is_empty() || hi.is_empty() {
            continue;
        }
        let (w0, w1) = (lo.len() as f64 / n, hi.len() as f64 / n);
        let m0 = lo.iter().sum::<f64>() / lo.len() as f64;
        let m1 = hi.iter().sum::<f64>() / hi.len() as f64;
        let score = w0 * w1 * (m0 - m1) * (m0 - m1);
        if score > best.1 {
            best = (t, score);
        }
    }
    best.0
}

fn circumcircle(a: (f64, f64), b: (f64, f64), c: (f64, f64)) -> Option<Circle> {
    let d = 2.0 * (a.0 * (b.1 - c.1) + b.0 * (c.1 - a.1) + c.0 * (a.1 - b.1));
    if d.abs() < 1e-12 {
        return None;
    }
    let sq = |p: (f64, f64)| p.0 * p.0 + p.1 * p.1;
    let x = (sq(a) * (b.1 - c.1) + sq(b) * (c.1 - a.1) + sq(c) * (a.1 - b.1)) / d;
    let y = (sq(a) * (c.0 - b.0) + sq(b) * (a.0 - c.0) + sq(c) * (b.0 - a.0)) / d;
    Some(Circle { x, y, radius: (a.0 - x).hypot(a.1 - y) })
}

/// Minimum enclosing circle by trying every circle defined by two or three
/// input points.
pub fn min_enclosing_circle_brute(points: &[(f64, f64)]) -> Circle {
    assert!(!points.is_empty());
    let covers = |c: &Circle| points.iter().all(|p| (p.0 - c.x).hypot(p.1 - c.y) <= c.radius * (1.0 + 1e-9) + 1e-9);
    let mut best = Circle { x: points[0].0, y: points[0].1, radius: 0.0 };
    if covers(&best) {
        return best;
    }
    best.radius = f64::INFINITY;
    let n = points.len();
    for i in 0..n {
        for j in i + 1..n {
            let (a, b) = (points[i], points[j]);
            let c = Circle { x: (a.0 + b.0) / 2.0, y: (a.1 + b.1) / 2.0, radius: (a.0 - b.0).hypot(a.1 - b.1) / 2.0 };
            if c.radius < best.radius && covers(&c) {
                best = c;
            }
            for &p in &points[j + 1..] {
                if let Some(c) = circumcircle(a, b, p) {
                    if c.radius < best.radius && covers(&c) {
                        best = c;
                    }
                }
            }
        }
    }
    best
}

/// Differing bits between `a` and `b` rotated left by `shift` cells,
/// counted one cell at a time.
pub fn shifted_distance_naive(a: &IrisCode, b: &IrisCode, shift: usize) -> u32 {
    let cols = a.cols();
    let mut n = 0;
    for r in 0..a.rows() {
        for c in 0..cols {
            let (x_re, x_im) = a.cell(r, c);
            let (y_re, y_im) = b.cell(r, (c + shift) % cols);
            n += (x_re != y_re) as u32 + (x_im != y_im) as u32;
        }
    }
    n
}

/// Minimum over all shifts of the naive count, as a fraction.
pub fn best_match_naive(a: &IrisCode, b: &IrisCode) -> f64 {
    (0..a.cols()).map(|s| shifted_distance_naive(a, b, s)).min().unwrap_or(0) as f64 / a.bit_len() as f64
}

/// Aitchison distance from the log-ratio double sum
/// `sqrt( 1/(2D) Σ_i Σ_j (ln(x_i/x_j) − ln(y_i/y_j))² )`.
pub fn aitchison_distance(x: &[f64], y: &[f64]) -> f64 {
    let d = x.len();
    let mut s = 0.0;
    for i in 0..d {
        for j in 0..d {
            let t = (x[i] / x[j]).ln() - (y[i] / y[j]).ln();
            s += t * t;
        }
    }
    (s / (2.0 * d as f64)).sqrt()
}

/// Monte-Carlo mean of `min` over `shifts` independent
/// Binomial(`bits`, ½) / `bits` draws, each draw an exact popcount of
/// random words.
pub fn simulate_min_binomial_mean(trials: usize, shifts: usize, bits: usize, seed: u64) -> f64 {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let words = bits / 64;
    let tail = bits % 64;
    let mut total = 0.0;
    for _ in 0..trials {
        let mut min = u32::MAX;
        for _ in 0..shifts {
            let mut ones: u32 = (0..words).map(|_| rng.random::<u64>().count_ones()).sum();
            if tail > 0 {
                ones += (rng.random::<u64>() & ((1u64 << tail) - 1)).count_ones();
            }
            min = min.min(ones);
        }
        total += min as f64 / bits as f64;
    }
    total / trials as f64
}
