//! Text effects transfer by statistics-guided patch synthesis.

pub mod analysis;
pub mod cli;
pub mod debug;
pub mod error;
pub mod geometry;
pub mod image;
pub mod pyramid;
pub mod scale;
pub mod synthesis;
pub mod synthetic;

pub use error::{ErrorKind, Result, TexfxError};
pub use image::{downsample, load_image, patch_ssd, save_png, PatchCoord, RasterImage};
pub use pyramid::{build_pyramid, Pyramid};
pub use scale::{
    detect_optimal_scales, estimate_posterior, scale_distance_histogram, ScaleHistogram, ScaleMap,
    ScalePosterior, ScaleStack, SearchStrategy,
};
pub use synthesis::{prepare_source, transfer, transfer_with, Mode, NNField, SynthesisParams};
