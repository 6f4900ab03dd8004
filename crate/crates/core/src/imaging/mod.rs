//! Pixel-level primitives: rasters, polar mapping, color and geometric
//! transforms, CLAHE and PNG I/O.

mod clahe;
mod color;
mod geometry;
mod io;
mod polar;
mod raster;

pub use clahe::{clahe, DEFAULT_CLIP_LIMIT, DEFAULT_TILES_X, DEFAULT_TILES_Y};
pub use color::{ensure_gray, luma, to_grayscale, white_balance};
pub use geometry::{resize, rotate, ResizeMethod};
pub use io::{from_dynamic, load_image, save_png};
pub use polar::{unwrap_polar, wrap_cartesian};
pub use raster::{quantize, IrisBoundaries, PolarStrip, RasterImage, DEFAULT_COLORED_THRESHOLD};
