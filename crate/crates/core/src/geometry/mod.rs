//! Text region geometry: masks, skeletons, distance transforms and the
//! width-normalized distance field.

pub mod distance;
pub mod edt;
pub mod mask;
pub mod thinning;

pub use distance::{
    bin_with_edges, corrected_radius, fit_width_regression, normalized_distance_field,
    DistanceField, GeometryTransforms, WidthRegression, DEFAULT_OUTLIER_FRACTION, DISTANCE_BINS,
};
pub use edt::{distance_to_set, DistanceMap};
pub use mask::{binarize, TextMask};
pub use thinning::{skeletonize, SkeletonContour};
