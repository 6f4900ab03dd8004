//! Iris-code biometrics toolkit: segmentation, log-Gabor encoding, shifted
//! Hamming matching with FAR/FRR analysis, a dataset preprocessing
//! pipeline, and compositional pigmentation statistics.

// `!(x > 0.0)` is used on purpose: it also rejects NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod color;
pub mod encoding;
mod error;
pub mod imaging;
pub mod matching;
pub mod oracles;
pub mod pipeline;
pub mod segmentation;
pub mod synthetic;

pub use encoding::{IrisCode, IrisEncoder};
pub use error::{Error, Result};
pub use imaging::{IrisBoundaries, PolarStrip, RasterImage};
pub use matching::{best_match, MatchScore};
pub use segmentation::{segment_iris, BoundarySpec, SegmentationError};
