//! How well location predicts color and patch scale, per partition mode.

pub mod classifier;
pub mod partition;
pub mod response;

use serde::Serialize;

pub use classifier::{OneVsRest, TrainConfig};
pub use partition::{make_partition, PartitionMap, PartitionMode};
pub use response::{
    best_match_distances, curves_from_distances, distance_maps, population_std, scale_reliability,
    scale_response_curves, CurvePoint, ResponseCurves, ScaleReliability, DEFAULT_PATCH_SIZES,
    MAX_MEMBERS,
};

use crate::error::{Result, TexfxError};
use crate::geometry::DEFAULT_OUTLIER_FRACTION;
use crate::image::RasterImage;
use crate::synthesis::text_distance;

/// Training error of predicting partition labels from pixel color.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ColorReliability {
    pub r_color: f64,
    pub epsilon: f64,
}

fn rgb_features(style: &RasterImage) -> Vec<f64> {
    let ch = style.channels();
    style
        .data()
        .chunks(ch)
        .flat_map(|px| if ch == 3 { [px[0], px[1], px[2]] } else { [px[0]; 3] })
        .collect()
}

pub fn color_reliability(partition: &PartitionMap, style: &RasterImage) -> Result<ColorReliability> {
    color_reliability_with(partition, style, TrainConfig::default())
}

pub fn color_reliability_with(
    partition: &PartitionMap,
    style: &RasterImage,
    cfg: TrainConfig,
) -> Result<ColorReliability> {
    if style.dims() != (partition.width, partition.height) {
        return Err(TexfxError::SizeMismatch("partition and style image differ".into()));
    }
    let features = rgb_features(style);
    let labels: Vec<usize> = partition.label.iter().map(|&l| l as usize).collect();
    let model = OneVsRest::train(&features, 3, &labels, partition.n, cfg);
    let epsilon = model.error_rate(&features, &labels);
    Ok(ColorReliability {
        r_color: 1.0 - epsilon,
        epsilon,
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct AnalysisParams {
    pub partitions: usize,
    pub patch_sizes: Vec<usize>,
    pub seed: u64,
    pub threshold: f64,
    pub outlier_fraction: f64,
    pub max_members: usize,
}

impl Default for AnalysisParams {
    fn default() -> Self {
        Self {
            partitions: 16,
            patch_sizes: DEFAULT_PATCH_SIZES.to_vec(),
            seed: 0,
            threshold: 0.5,
            outlier_fraction: DEFAULT_OUTLIER_FRACTION,
            max_members: MAX_MEMBERS,
        }
    }
}

/// One partition mode's results. `r_scale` is `None` when degenerate.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ModeReport {
    pub mode: PartitionMode,
    pub r_color: f64,
    pub epsilon: f64,
    pub r_scale: Option<f64>,
    pub sigma_inter: f64,
    pub sigma_intra: f64,
    pub curves: Vec<CurvePoint>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ReliabilityReport {
    pub image: String,
    pub modes: Vec<ModeReport>,
}

impl ReliabilityReport {
    pub fn mode(&self, mode: PartitionMode) -> Option<&ModeReport> {
        self.modes.iter().find(|m| m.mode == mode)
    }
}

/// Runs the requested modes, in order, on one exemplar pair. Match distances
/// are computed once per patch size and shared across modes.
pub fn analyze(
    image: &str,
    text: &RasterImage,
    style: &RasterImage,
    modes: &[PartitionMode],
    params: &AnalysisParams,
) -> Result<ReliabilityReport> {
    if text.dims() != style.dims() {
        return Err(TexfxError::SizeMismatch(format!(
            "text {:?} vs style {:?}",
            text.dims(),
            style.dims()
        )));
    }
    let (w, h) = text.dims();
    let luma = text.luma();
    let (_, df, _) = text_distance(&luma, params.threshold, params.outlier_fraction)?;
    let distances = distance_maps(&luma, style, &params.patch_sizes, params.seed)?;
    let mut out = Vec::with_capacity(modes.len());
    for &mode in modes {
        let part = make_partition(mode, w, h, Some(&df), params.partitions, params.seed)?;
        let color = color_reliability(&part, style)?;
        let curves = curves_from_distances(
            &part,
            &params.patch_sizes,
            &distances,
            params.max_members,
            params.seed,
        )?;
        let rel = scale_reliability(&curves)?;
        out.push(ModeReport {
            mode,
            r_color: color.r_color,
            epsilon: color.epsilon,
            r_scale: rel.r_scale.is_finite().then_some(rel.r_scale),
            sigma_inter: rel.sigma_inter,
            sigma_intra: rel.sigma_intra,
            curves: curves.points,
        });
    }
    Ok(ReliabilityReport {
        image: image.to_string(),
        modes: out,
    })
}
