//! Minimum enclosing circle (Welzl).

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Circle {
    pub x: f64,
    pub y: f64,
    pub radius: f64,
}

impl Circle {
    #[inline]
    pub fn contains(&self, p: (f64, f64)) -> bool {
        let d = (p.0 - self.x).hypot(p.1 - self.y);
        d <= self.radius + 1e-10 * self.radius.max(1.0)
    }

    fn from_two(a: (f64, f64), b: (f64, f64)) -> Self {
        Circle { x: (a.0 + b.0) / 2.0, y: (a.1 + b.1) / 2.0, radius: (a.0 - b.0).hypot(a.1 - b.1) / 2.0 }
    }

    /// Smallest circle through or around three points: the circumcircle when
    /// it is needed, otherwise the widest diametral circle.
    fn from_three(a: (f64, f64), b: (f64, f64), c: (f64, f64)) -> Self {
        let (bx, by) = (b.0 - a.0, b.1 - a.1);
        let (cx, cy) = (c.0 - a.0, c.1 - a.1);
        let d = 2.0 * (bx * cy - by * cx);
        let scale = (bx * bx + by * by).max(cx * cx + cy * cy);
        let pairs = [Circle::from_two(a, b), Circle::from_two(a, c), Circle::from_two(b, c)];
        // A diametral circle of one pair may already cover the third point.
        let diametral = pairs
            .into_iter()
            .filter(|k| k.contains(a) && k.contains(b) && k.contains(c))
            .min_by(|p, q| p.radius.total_cmp(&q.radius));
        if let Some(k) = diametral {
            return k;
        }
        if d.abs() <= 1e-14 * scale {
            return pairs.into_iter().max_by(|p, q| p.radius.total_cmp(&q.radius)).expect("three candidates");
        }
        let b2 = bx * bx + by * by;
        let c2 = cx * cx + cy * cy;
        let ux = (cy * b2 - by * c2) / d;
        let uy = (bx * c2 - cx * b2) / d;
        Circle { x: a.0 + ux, y: a.1 + uy, radius: ux.hypot(uy) }
    }
}

fn content_seed(points: &[(f64, f64)]) -> u64 {
    // FNV-1a over the coordinate bits.
    let mut h = 0xcbf2_9ce4_8422_2325u64;
    for p in points {
        for v in [p.0.to_bits(), p.1.to_bits()] {
            for byte in v.to_le_bytes() {
                h ^= byte as u64;
                h = h.wrapping_mul(0x0000_0100_0000_01b3);
            }
        }
    }
    h
}

/// Smallest circle enclosing every point. The processing order is shuffled
/// with a seed derived from the input, so results are reproducible.
pub fn min_enclosing_circle(points: &[(f64, f64)]) -> Result<Circle> {
    if points.is_empty() {
        return Err(Error::InvalidParameter("no points to enclose".into()));
    }
    let mut pts = points.to_vec();
    pts.shuffle(&mut ChaCha8Rng::seed_from_u64(content_seed(points)));
    let mut c = Circle { x: pts[0].0, y: pts[0].1, radius: 0.0 };
    for i in 1..pts.len() {
        if c.contains(pts[i]) {
            continue;
        }
        c = Circle { x: pts[i].0, y: pts[i].1, radius: 0.0 };
        for j in 0..i {
            if c.contains(pts[j]) {
                continue;
            }
            c = Circle::from_two(pts[i], pts[j]);
            for k in 0..j {
                if !c.contains(pts[k]) {
                    c = Circle::from_three(pts[i], pts[j], pts[k]);
                }
            }
        }
    }
    Ok(c)
}
