//! Width-normalized distance to the text skeleton.
//!
//! Contour radii (distance from each contour pixel to the skeleton) are sorted
//! and fitted with a line against their rank. The low tail of that line gives
//! a floor for radii damaged by skeleton spurs, and its midpoint gives the
//! mean text width used outside the glyph. Inside the glyph the distance to
//! the contour is divided by the corrected radius of the nearest contour
//! pixel, so contour pixels sit at 1 and the skeleton near 0.

use serde::Serialize;

use super::edt::{distance_to_set, DistanceMap};
use super::mask::TextMask;
use super::thinning::{skeletonize, SkeletonContour};
use crate::error::{Result, TexfxError};

pub const DISTANCE_BINS: usize = 100;
pub const DEFAULT_OUTLIER_FRACTION: f64 = 0.2;

/// Least-squares line through (rank, radius) of the sorted contour radii.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct WidthRegression {
    pub slope: f64,
    pub intercept: f64,
    pub contour_count: usize,
    pub mean_radius: f64,
}

impl WidthRegression {
    /// Fitted radius at the given fraction of the rank range.
    pub fn radius_at_fraction(&self, fraction: f64) -> f64 {
        fraction * self.slope * self.contour_count as f64 + self.intercept
    }
}

/// Ordinary least squares of sorted `radii` against ranks `1..=n`.
pub fn fit_sorted_radii(radii: &[f64]) -> Result<WidthRegression> {
    let n = radii.len();
    if n < 2 {
        return Err(TexfxError::InvalidArgument(format!(
            "need at least 2 contour pixels for the width fit, got {n}"
        )));
    }
    let mut sorted = radii.to_vec();
    sorted.sort_by(f64::total_cmp);
    let nf = n as f64;
    let mean_rank = (nf + 1.0) / 2.0;
    let mean_r = sorted.iter().sum::<f64>() / nf;
    let mut sxy = 0.0;
    let mut sxx = 0.0;
    for (i, r) in sorted.iter().enumerate() {
        let dx = (i + 1) as f64 - mean_rank;
        sxy += dx * (r - mean_r);
        sxx += dx * dx;
    }
    let slope = sxy / sxx;
    let intercept = mean_r - slope * mean_rank;
    let reg = WidthRegression {
        slope,
        intercept,
        contour_count: n,
        mean_radius: 0.5 * slope * nf + intercept,
    };
    Ok(reg)
}

/// Fits the width line from the contour pixels' distances to the skeleton.
pub fn fit_width_regression(
    sc: &SkeletonContour,
    raw_dist_to_skel: &[f64],
) -> Result<WidthRegression> {
    let radii: Vec<f64> = sc.contour.iter().map(|&i| raw_dist_to_skel[i]).collect();
    fit_sorted_radii(&radii)
}

/// `max(r(q), fraction * k * |contour| + b)` for a contour pixel `q`.
pub fn corrected_radius(
    q: usize,
    reg: &WidthRegression,
    raw_dist_to_skel: &[f64],
    outlier_fraction: f64,
) -> f64 {
    raw_dist_to_skel[q].max(reg.radius_at_fraction(outlier_fraction))
}

/// Transforms shared by the normalization step.
#[derive(Debug, Clone)]
pub struct GeometryTransforms {
    pub to_skeleton: DistanceMap,
    pub to_contour: DistanceMap,
}

impl GeometryTransforms {
    pub fn compute(sc: &SkeletonContour) -> Result<Self> {
        Ok(Self {
            to_skeleton: distance_to_set(sc.width, sc.height, &sc.skeleton)?,
            to_contour: distance_to_set(sc.width, sc.height, &sc.contour)?,
        })
    }
}

/// Normalized skeleton distance per pixel plus its 100-bin quantization.
#[derive(Debug, Clone)]
pub struct DistanceField {
    pub width: usize,
    pub height: usize,
    pub dist: Vec<f64>,
    pub regression: WidthRegression,
    pub bin_edges: Vec<f64>,
    pub bins: Vec<u8>,
}

/// Uniform edges over `[0, max]`.
pub fn uniform_edges(max: f64) -> Vec<f64> {
    (0..=DISTANCE_BINS)
        .map(|i| max * i as f64 / DISTANCE_BINS as f64)
        .collect()
}

/// Quantizes a distance against `edges`. Values past the last edge land in
/// the top bin; a value equal to an interior edge goes to the upper bin.
pub fn bin_with_edges(edges: &[f64], value: f64) -> usize {
    let last = edges.len() - 2;
    let max = edges[edges.len() - 1];
    if !(max > 0.0) || value <= 0.0 {
        return 0;
    }
    let mut idx = ((value / max) * (edges.len() - 1) as f64).floor() as isize;
    idx = idx.clamp(0, last as isize);
    let mut idx = idx as usize;
    while idx < last && value >= edges[idx + 1] {
        idx += 1;
    }
    while idx > 0 && value < edges[idx] {
        idx -= 1;
    }
    idx
}

impl DistanceField {
    /// Full pipeline from a mask: skeleton, transforms, width fit, normalization.
    pub fn from_mask(mask: &TextMask, outlier_fraction: f64) -> Result<Self> {
        let sc = skeletonize(mask);
        let tf = GeometryTransforms::compute(&sc)?;
        let reg = fit_width_regression(&sc, &tf.to_skeleton.dist)?;
        normalized_distance_field(mask, &sc, &reg, &tf, outlier_fraction)
    }

    #[inline]
    pub fn at(&self, x: usize, y: usize) -> f64 {
        self.dist[y * self.width + x]
    }

    pub fn max_distance(&self) -> f64 {
        self.bin_edges[DISTANCE_BINS]
    }

    /// Bin of an arbitrary distance under this field's edges.
    pub fn bin_of(&self, value: f64) -> usize {
        bin_with_edges(&self.bin_edges, value)
    }

    /// Re-quantizes against another field's edges (targets use the source's).
    pub fn with_edges(mut self, edges: &[f64]) -> Self {
        self.bin_edges = edges.to_vec();
        self.bins = self
            .dist
            .iter()
            .map(|&d| bin_with_edges(edges, d) as u8)
            .collect();
        self
    }
}

pub fn normalized_distance_field(
    mask: &TextMask,
    sc: &SkeletonContour,
    reg: &WidthRegression,
    tf: &GeometryTransforms,
    outlier_fraction: f64,
) -> Result<DistanceField> {
    let (w, h) = (mask.width(), mask.height());
    if sc.width != w || sc.height != h || tf.to_contour.dist.len() != w * h {
        return Err(TexfxError::SizeMismatch(
            "mask, skeleton and transforms must share one domain".into(),
        ));
    }
    if !(reg.mean_radius > 0.0) {
        return Err(TexfxError::DegenerateMask("too thin to measure"));
    }
    let floor = reg.radius_at_fraction(outlier_fraction);
    let inside = mask.as_slice();
    let dist: Vec<f64> = (0..w * h)
        .map(|i| {
            let dc = tf.to_contour.dist[i];
            if inside[i] {
                let foot = tf.to_contour.nearest[i];
                let r = tf.to_skeleton.dist[foot].max(floor);
                if r > 0.0 {
                    (1.0 - dc / r).max(0.0)
                } else {
                    1.0
                }
            } else {
                1.0 + dc / reg.mean_radius
            }
        })
        .collect();
    let max = dist.iter().copied().fold(0.0, f64::max);
    let edges = uniform_edges(max);
    let bins = dist
        .iter()
        .map(|&d| bin_with_edges(&edges, d) as u8)
        .collect();
    Ok(DistanceField {
        width: w,
        height: h,
        dist,
        regression: *reg,
        bin_edges: edges,
        bins,
    })
}

/// One point of the sorted-radius scatter, with the fitted line value.
#[derive(Debug, Clone, Serialize)]
pub struct RadiusSample {
    pub rank: usize,
    pub radius: f64,
    pub fitted: f64,
}

pub fn radius_scatter(sc: &SkeletonContour, raw_dist_to_skel: &[f64]) -> Result<Vec<RadiusSample>> {
    let reg = fit_width_regression(sc, raw_dist_to_skel)?;
    let mut radii: Vec<f64> = sc.contour.iter().map(|&i| raw_dist_to_skel[i]).collect();
    radii.sort_by(f64::total_cmp);
    Ok(radii
        .into_iter()
        .enumerate()
        .map(|(i, radius)| RadiusSample {
            rank: i + 1,
            radius,
            fitted: reg.slope * (i + 1) as f64 + reg.intercept,
        })
        .collect())
}
