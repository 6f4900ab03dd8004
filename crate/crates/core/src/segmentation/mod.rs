//! Pupillary and limbic boundary detection for iris-on-black frames.
//!
//! Otsu's threshold separates the iris from the black background, the mask's
//! borders are traced, every border gets its minimum enclosing circle and the
//! circles near the frame center are matched against the expected radii.

mod circle;
mod contour;
mod otsu;

pub use circle::{min_enclosing_circle, Circle};
pub use contour::{trace_contours, BinaryMask, Contour, ContourKind};
pub use otsu::{histogram, otsu_from_histogram, otsu_threshold, OtsuThreshold};

use thiserror::Error;

use crate::imaging::{ensure_gray, IrisBoundaries, RasterImage};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum SegmentationError {
    #[error("no suitable boundary contours found")]
    NoBoundaries,
    #[error(
        "boundary radii deviate from expectation: pupil {pupil:.2} (expected {expected_pupil}), \
         limbic {limbic:.2} (expected {expected_limbic})"
    )]
    DeviationExceeded { pupil: f64, limbic: f64, expected_pupil: f64, expected_limbic: f64 },
    #[error("{count} plausible boundary circles with no unique best pair")]
    AmbiguousCandidates { count: usize },
}

/// Expected geometry of the frames being segmented.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct BoundarySpec {
    pub expected_pupil_radius: f64,
    pub expected_limbic_radius: f64,
    /// Largest accepted radius error, in pixels.
    pub tolerance: f64,
    /// Largest accepted distance of a circle center from the frame center.
    pub max_center_offset: f64,
}

impl Default for BoundarySpec {
    /// Geometry of 256×256 training frames.
    fn default() -> Self {
        Self { expected_pupil_radius: 45.0, expected_limbic_radius: 85.0, tolerance: 3.0, max_center_offset: 10.0 }
    }
}

impl BoundarySpec {
    pub fn new(pupil: f64, limbic: f64) -> Self {
        Self { expected_pupil_radius: pupil, expected_limbic_radius: limbic, ..Self::default() }
    }

    pub fn validate(&self) -> crate::Result<()> {
        let ok = self.tolerance >= 0.0
            && self.max_center_offset >= 0.0
            && self.expected_pupil_radius > 0.0
            && self.expected_pupil_radius < self.expected_limbic_radius;
        if !ok {
            return Err(crate::Error::InvalidParameter(format!("boundary spec {self:?}")));
        }
        Ok(())
    }
}

/// A circle fitted to one traced border.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CandidateCircle {
    pub circle: Circle,
    pub kind: ContourKind,
}

/// Circle for each contour. Outer borders use the enclosing radius; hole
/// borders are traced on the foreground pixels around the hole, so their
/// radius is the distance from the enclosing center to the nearest of them.
pub fn candidate_circles(contours: &[Contour]) -> Vec<CandidateCircle> {
    contours
        .iter()
        .map(|c| {
            let pts: Vec<(f64, f64)> = c.points.iter().map(|&(x, y)| (x as f64, y as f64)).collect();
            let mut circle = min_enclosing_circle(&pts).expect("contours are non-empty");
            if c.kind == ContourKind::Hole {
                circle.radius =
                    pts.iter().map(|p| (p.0 - circle.x).hypot(p.1 - circle.y)).fold(f64::INFINITY, f64::min);
            }
            CandidateCircle { circle, kind: c.kind }
        })
        .collect()
}

/// Finds the pupillary and limbic circles of an iris-on-black frame.
pub fn segment_iris(img: &RasterImage, spec: &BoundarySpec) -> Result<IrisBoundaries, SegmentationError> {
    let gray = ensure_gray(img);
    let otsu = otsu_threshold(&gray);
    if otsu.degenerate {
        return Err(SegmentationError::NoBoundaries);
    }
    let mask = BinaryMask::threshold(&gray, otsu.level);
    let circles = candidate_circles(&trace_contours(&mask));
    select_boundaries(&circles, gray.center(), spec)
}

/// Picks the (pupil, limbic) pair among candidate circles.
pub fn select_boundaries(
    circles: &[CandidateCircle],
    frame_center: (f64, f64),
    spec: &BoundarySpec,
) -> Result<IrisBoundaries, SegmentationError> {
    let mut centered: Vec<&CandidateCircle> = circles
        .iter()
        .filter(|c| {
            c.circle.radius >= 1.0
                && (c.circle.x - frame_center.0).hypot(c.circle.y - frame_center.1) <= spec.max_center_offset
        })
        .collect();
    // Largest first, nearest the center among equals.
    centered.sort_by(|a, b| {
        b.circle.radius.total_cmp(&a.circle.radius).then_with(|| {
            let da = (a.circle.x - frame_center.0).hypot(a.circle.y - frame_center.1);
            let db = (b.circle.x - frame_center.0).hypot(b.circle.y - frame_center.1);
            da.total_cmp(&db)
        })
    });
    let outers: Vec<&CandidateCircle> = centered.iter().copied().filter(|c| c.kind == ContourKind::Outer).collect();
    let holes: Vec<&CandidateCircle> = centered.iter().copied().filter(|c| c.kind == ContourKind::Hole).collect();
    let Some(&limbic_guess) = outers.first() else {
        return Err(SegmentationError::NoBoundaries);
    };

    // The pupil is normally a hole in the iris component; without one, fall
    // back to nested outer contours.
    let pupil_pool: Vec<&CandidateCircle> = if holes.iter().any(|h| h.circle.radius < limbic_guess.circle.radius) {
        holes
    } else {
        outers.iter().skip(1).copied().collect()
    };
    let pairs: Vec<(&CandidateCircle, &CandidateCircle)> = pupil_pool
        .iter()
        .flat_map(|&p| outers.iter().map(move |&l| (p, l)))
        .filter(|(p, l)| !std::ptr::eq(*p, *l) && p.circle.radius < l.circle.radius)
        .collect();
    if pairs.is_empty() {
        return Err(SegmentationError::NoBoundaries);
    }

    let deviation = |p: &CandidateCircle, l: &CandidateCircle| {
        ((p.circle.radius - spec.expected_pupil_radius).abs(), (l.circle.radius - spec.expected_limbic_radius).abs())
    };
    let plausible: Vec<_> = pairs
        .iter()
        .filter(|(p, l)| {
            let (dp, dl) = deviation(p, l);
            dp <= spec.tolerance && dl <= spec.tolerance
        })
        .collect();
    if plausible.is_empty() {
        let (p, l) = pairs[0];
        return Err(SegmentationError::DeviationExceeded {
            pupil: p.circle.radius,
            limbic: l.circle.radius,
            expected_pupil: spec.expected_pupil_radius,
            expected_limbic: spec.expected_limbic_radius,
        });
    }
    let cost = |(p, l): &&(&CandidateCircle, &CandidateCircle)| {
        let (dp, dl) = deviation(p, l);
        dp + dl
    };
    let best = plausible.iter().min_by(|a, b| cost(a).total_cmp(&cost(b))).copied().expect("non-empty");
    let best_cost = cost(&best);
    let rivals = plausible
        .iter()
        .filter(|pair| {
            (cost(pair) - best_cost).abs() <= 1e-9 && (pair.0.circle != best.0.circle || pair.1.circle != best.1.circle)
        })
        .count();
    if rivals > 0 {
        let mut distinct: Vec<Circle> = Vec::new();
        for (p, l) in &plausible {
            for c in [p.circle, l.circle] {
                if !distinct.contains(&c) {
                    distinct.push(c);
                }
            }
        }
        return Err(SegmentationError::AmbiguousCandidates { count: distinct.len() });
    }
    let (p, l) = *best;
    Ok(IrisBoundaries::new(
        (p.circle.x + l.circle.x) / 2.0,
        (p.circle.y + l.circle.y) / 2.0,
        p.circle.radius,
        l.circle.radius,
    ))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn annulus(size: usize, pupil: f64, limbic: f64) -> RasterImage {
        let c = (size as f64 - 1.0) / 2.0;
        RasterImage::rgb_from_fn(size, size, |x, y| {
            let r = (x as f64 - c).hypot(y as f64 - c);
            if r >= pupil && r <= limbic {
                [150 + (x % 7) as u8 * 5, 110, 70 + (y % 5) as u8 * 8]
            } else {
                [0, 0, 0]
            }
        })
        .unwrap()
    }

    #[test]
    fn finds_synthetic_annulus() {
        let b = segment_iris(&annulus(256, 45.0, 85.0), &BoundarySpec::default()).unwrap();
        assert!((b.pupil_radius - 45.0).abs() <= 1.0, "{b:?}");
        assert!((b.limbic_radius - 85.0).abs() <= 1.0, "{b:?}");
        assert!((b.center_x - 127.5).abs() <= 1.0 && (b.center_y - 127.5).abs() <= 1.0);
    }

    #[test]
    fn rejects_oversized_limbus() {
        let err = segment_iris(&annulus(256, 45.0, 95.0), &BoundarySpec::default()).unwrap_err();
        assert!(matches!(err, SegmentationError::DeviationExceeded { .. }), "{err:?}");
    }

    #[test]
    fn black_frame_has_no_boundaries() {
        let img = RasterImage::filled(256, 256, 3, 0).unwrap();
        assert_eq!(segment_iris(&img, &BoundarySpec::default()), Err(SegmentationError::NoBoundaries));
    }

    #[test]
    fn off_center_iris_is_ignored() {
        let img = RasterImage::rgb_from_fn(256, 256, |x, y| {
            let r = (x as f64 - 160.0).hypot(y as f64 - 127.5);
            if (45.0..=85.0).contains(&r) {
                [120, 90, 60]
            } else {
                [0, 0, 0]
            }
        })
        .unwrap();
        assert_eq!(segment_iris(&img, &BoundarySpec::default()), Err(SegmentationError::NoBoundaries));
    }

    #[test]
    fn solid_disk_pair_without_hole() {
        // A bright pupil disk inside a darker iris: no holes, nested outers.
        let circles = [
            CandidateCircle { circle: Circle { x: 127.5, y: 127.5, radius: 85.0 }, kind: ContourKind::Outer },
            CandidateCircle { circle: Circle { x: 127.0, y: 127.5, radius: 44.0 }, kind: ContourKind::Outer },
        ];
        let b = select_boundaries(&circles, (127.5, 127.5), &BoundarySpec::default()).unwrap();
        assert_eq!((b.pupil_radius, b.limbic_radius), (44.0, 85.0));
        assert_eq!(b.center_x, 127.25);
    }

    #[test]
    fn equal_cost_pairs_are_ambiguous() {
        let mk = |x: f64, r: f64, kind| CandidateCircle { circle: Circle { x, y: 127.5, radius: r }, kind };
        let circles = [
            mk(127.5, 85.0, ContourKind::Outer),
            mk(127.5, 44.0, ContourKind::Hole),
            mk(128.5, 46.0, ContourKind::Hole),
        ];
        assert_eq!(
            select_boundaries(&circles, (127.5, 127.5), &BoundarySpec::default()),
            Err(SegmentationError::AmbiguousCandidates { count: 3 })
        );
    }

    #[test]
    fn closest_pair_wins_among_plausible() {
        let mk = |r: f64, kind| CandidateCircle { circle: Circle { x: 127.5, y: 127.5, radius: r }, kind };
        let circles = [mk(86.0, ContourKind::Outer), mk(83.5, ContourKind::Outer), mk(44.5, ContourKind::Hole)];
        let b = select_boundaries(&circles, (127.5, 127.5), &BoundarySpec::default()).unwrap();
        assert_eq!((b.pupil_radius, b.limbic_radius), (44.5, 86.0));
    }
}
