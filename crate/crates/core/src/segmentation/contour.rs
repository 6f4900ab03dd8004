//! Suzuki–Abe border following.

use crate::imaging::RasterImage;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BinaryMask {
    width: usize,
    height: usize,
    bits: Vec<bool>,
}

impl BinaryMask {
    pub fn new(width: usize, height: usize) -> Self {
        Self { width, height, bits: vec![false; width * height] }
    }

    pub fn from_fn(width: usize, height: usize, mut f: impl FnMut(usize, usize) -> bool) -> Self {
        let mut bits = Vec::with_capacity(width * height);
        for y in 0..height {
            for x in 0..width {
                bits.push(f(x, y));
            }
        }
        Self { width, height, bits }
    }

    /// Foreground where the gray level exceeds `level`.
    pub fn threshold(img: &RasterImage, level: u8) -> Self {
        let gray = crate::imaging::ensure_gray(img);
        Self { width: gray.width(), height: gray.height(), bits: gray.data().iter().map(|&v| v > level).collect() }
    }

    #[inline]
    pub fn width(&self) -> usize {
        self.width
    }

    #[inline]
    pub fn height(&self) -> usize {
        self.height
    }

    #[inline]
    pub fn get(&self, x: usize, y: usize) -> bool {
        self.bits[y * self.width + x]
    }

    #[inline]
    pub fn set(&mut self, x: usize, y: usize, v: bool) {
        self.bits[y * self.width + x] = v;
    }

    pub fn count(&self) -> usize {
        self.bits.iter().filter(|&&b| b).count()
    }

    pub fn bits(&self) -> &[bool] {
        &self.bits
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ContourKind {
    Outer,
    Hole,
}

/// Closed border of a foreground component (outer) or of a background hole
/// inside one. Points are 8-connected pixel coordinates `(x, y)`; outer
/// borders run counterclockwise as displayed, holes clockwise.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Contour {
    pub points: Vec<(i32, i32)>,
    pub kind: ContourKind,
}

impl Contour {
    /// Shoelace area with y pointing up; positive for counterclockwise.
    pub fn signed_area(&self) -> f64 {
        let n = self.points.len();
        let mut acc = 0i64;
        for i in 0..n {
            let (x0, y0) = self.points[i];
            let (x1, y1) = self.points[(i + 1) % n];
            acc += x0 as i64 * (-(y1 as i64)) - x1 as i64 * (-(y0 as i64));
        }
        acc as f64 / 2.0
    }
}

// Neighbour offsets (drow, dcol), counterclockwise as displayed starting east.
const DIRS: [(isize, isize); 8] = [(0, 1), (-1, 1), (-1, 0), (-1, -1), (0, -1), (1, -1), (1, 0), (1, 1)];

fn dir_of(from: (usize, usize), to: (usize, usize)) -> usize {
    let d = (to.0 as isize - from.0 as isize, to.1 as isize - from.1 as isize);
    DIRS.iter().position(|&o| o == d).expect("neighbouring pixels")
}

#[inline]
fn step(p: (usize, usize), d: usize) -> (usize, usize) {
    let (dr, dc) = DIRS[d];
    ((p.0 as isize + dr) as usize, (p.1 as isize + dc) as usize)
}

/// Traces every border of the mask: one outer contour per 8-connected
/// foreground component and one hole contour per 4-connected background
/// region enclosed by foreground.
pub fn trace_contours(mask: &BinaryMask) -> Vec<Contour> {
    let (w, h) = (mask.width() + 2, mask.height() + 2);
    let mut f = vec![0i32; w * h];
    for y in 0..mask.height() {
        for x in 0..mask.width() {
            if mask.get(x, y) {
                f[(y + 1) * w + x + 1] = 1;
            }
        }
    }
    let at = |p: (usize, usize)| p.0 * w + p.1;
    let mut contours = Vec::new();
    let mut nbd = 1i32;
    for i in 1..h - 1 {
        for j in 1..w - 1 {
            let v = f[i * w + j];
            let start = (i, j);
            let (from, kind) = if v == 1 && f[i * w + j - 1] == 0 {
                ((i, j - 1), ContourKind::Outer)
            } else if v >= 1 && f[i * w + j + 1] == 0 {
                ((i, j + 1), ContourKind::Hole)
            } else {
                continue;
            };
            nbd += 1;
            let mut points = Vec::new();
            // Clockwise search for the first foreground neighbour.
            let d0 = dir_of(start, from);
            let first = (0..8).map(|k| (d0 + 8 - k) % 8).map(|d| step(start, d)).find(|&p| f[at(p)] != 0);
            let Some(first) = first else {
                f[at(start)] = -nbd;
                points.push(start);
                contours.push(finish(points, kind));
                continue;
            };
            let mut prev = first;
            let mut cur = start;
            loop {
                // Counterclockwise search starting after `prev`.
                let dp = dir_of(cur, prev);
                let mut east_is_zero = false;
                let mut next = cur;
                for k in 1..=8 {
                    let d = (dp + k) % 8;
                    let p = step(cur, d);
                    if f[at(p)] != 0 {
                        next = p;
                        break;
                    }
                    if d == 0 {
                        east_is_zero = true;
                    }
                }
                if east_is_zero {
                    f[at(cur)] = -nbd;
                } else if f[at(cur)] == 1 {
                    f[at(cur)] = nbd;
                }
                points.push(cur);
                if next == start && cur == first {
                    break;
                }
                prev = cur;
                cur = next;
            }
            contours.push(finish(points, kind));
        }
    }
    contours
}

fn finish(points: Vec<(usize, usize)>, kind: ContourKind) -> Contour {
    let mut c = Contour { points: points.into_iter().map(|(r, col)| (col as i32 - 1, r as i32 - 1)).collect(), kind };
    let area = c.signed_area();
    let want_ccw = kind == ContourKind::Outer;
    if (want_ccw && area < 0.0) || (!want_ccw && area > 0.0) {
        c.points.reverse();
    }
    c
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::collections::HashSet;

    #[test]
    fn empty_mask_has_no_contours() {
        assert!(trace_contours(&BinaryMask::new(12, 9)).is_empty());
    }

    #[test]
    fn square_border() {
        let mask = BinaryMask::from_fn(20, 20, |x, y| (5..15).contains(&x) && (5..15).contains(&y));
        let cs = trace_contours(&mask);
        assert_eq!(cs.len(), 1);
        let c = &cs[0];
        assert_eq!(c.kind, ContourKind::Outer);
        let expected: HashSet<(i32, i32)> = (5..15)
            .flat_map(|x| (5..15).map(move |y| (x, y)))
            .filter(|&(x, y)| x == 5 || x == 14 || y == 5 || y == 14)
            .collect();
        assert_eq!(expected.len(), 36);
        assert_eq!(c.points.len(), 36);
        assert_eq!(c.points.iter().copied().collect::<HashSet<_>>(), expected);
        assert!(c.signed_area() > 0.0);
    }

    #[test]
    fn consecutive_points_are_neighbours() {
        let mask = BinaryMask::from_fn(30, 30, |x, y| {
            let (dx, dy) = (x as f64 - 14.5, y as f64 - 14.5);
            let r = dx.hypot(dy);
            (4.0..12.0).contains(&r) && !(x > 20 && y < 12)
        });
        for c in trace_contours(&mask) {
            let n = c.points.len();
            for k in 0..n {
                let (a, b) = (c.points[k], c.points[(k + 1) % n]);
                assert!((a.0 - b.0).abs() <= 1 && (a.1 - b.1).abs() <= 1, "{a:?} {b:?}");
            }
        }
    }

    #[test]
    fn annulus_has_outer_and_hole() {
        let mask = BinaryMask::from_fn(64, 64, |x, y| {
            let r = (x as f64 - 31.5).hypot(y as f64 - 31.5);
            (10.0..=25.0).contains(&r)
        });
        let cs = trace_contours(&mask);
        assert_eq!(cs.len(), 2);
        let outer = cs.iter().find(|c| c.kind == ContourKind::Outer).unwrap();
        let hole = cs.iter().find(|c| c.kind == ContourKind::Hole).unwrap();
        assert!(outer.signed_area() > 0.0);
        assert!(hole.signed_area() < 0.0);
    }

    #[test]
    fn isolated_pixel_is_single_point() {
        let mut mask = BinaryMask::new(5, 5);
        mask.set(2, 2, true);
        let cs = trace_contours(&mask);
        assert_eq!(cs, vec![Contour { points: vec![(2, 2)], kind: ContourKind::Outer }]);
    }
}
