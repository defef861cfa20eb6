use log::warn;
use rand::seq::index::sample;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use super::partition::PartitionMap;
use crate::error::{Result, TexfxError};
use crate::image::{clamp_center, RasterImage};
use crate::scale::{self_match_field, SearchStrategy};

/// Default patch sides for response curves.
pub const DEFAULT_PATCH_SIZES: [usize; 5] = [3, 5, 9, 15, 21];
/// Members matched per partition at most.
pub const MAX_MEMBERS: usize = 2000;

/// Mean and population standard deviation of best-match distances of one
/// partition at one patch size.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CurvePoint {
    pub partition: usize,
    pub patch_size: usize,
    pub mean: f64,
    pub std: f64,
    pub count: usize,
}

/// `points[partition * sizes + k]` for patch size `patch_sizes[k]`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ResponseCurves {
    pub partitions: usize,
    pub patch_sizes: Vec<usize>,
    pub points: Vec<CurvePoint>,
}

impl ResponseCurves {
    pub fn point(&self, partition: usize, k: usize) -> &CurvePoint {
        &self.points[partition * self.patch_sizes.len() + k]
    }
}

/// Best same-image match distance of every pixel at patch side `m`, taken at
/// its clamped patch center; `None` where no admissible match exists.
/// Exhaustive for sources up to 64x64.
pub fn best_match_distances(
    text: &RasterImage,
    style: &RasterImage,
    m: usize,
    seed: u64,
) -> Vec<Option<f64>> {
    let (w, h) = text.dims();
    let strategy = SearchStrategy::for_size(w, h, seed);
    let field = self_match_field(text, style, m, None, strategy);
    (0..w * h)
        .map(|i| {
            let (x, y) = (clamp_center(i % w, w, m), clamp_center(i / w, h, m));
            field[y * w + x].map(|s| s.cost)
        })
        .collect()
}

fn mean_std(values: &[f64]) -> (f64, f64) {
    let n = values.len() as f64;
    let mean = values.iter().sum::<f64>() / n;
    let var = values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / n;
    (mean, var.sqrt())
}

/// Population standard deviation.
pub fn population_std(values: &[f64]) -> f64 {
    mean_std(values).1
}

/// Curves from precomputed per-size distance maps; each partition samples at
/// most `max_members` of its valid centers with a seeded sampler.
pub fn curves_from_distances(
    partition: &PartitionMap,
    patch_sizes: &[usize],
    distances: &[Vec<Option<f64>>],
    max_members: usize,
    seed: u64,
) -> Result<ResponseCurves> {
    let mut points = Vec::with_capacity(partition.n * patch_sizes.len());
    for c in 0..partition.n {
        for (k, &m) in patch_sizes.iter().enumerate() {
            let valid: Vec<f64> = partition
                .label
                .iter()
                .zip(&distances[k])
                .filter_map(|(&l, d)| if l as usize == c { *d } else { None })
                .collect();
            if valid.is_empty() {
                return Err(TexfxError::EmptyPartition(c));
            }
            let chosen: Vec<f64> = if valid.len() > max_members {
                let mut rng = ChaCha8Rng::seed_from_u64(seed ^ ((c as u64) << 32 | m as u64));
                let mut idx = sample(&mut rng, valid.len(), max_members).into_vec();
                idx.sort_unstable();
                idx.into_iter().map(|i| valid[i]).collect()
            } else {
                valid
            };
            let (mean, std) = mean_std(&chosen);
            points.push(CurvePoint {
                partition: c,
                patch_size: m,
                mean,
                std,
                count: chosen.len(),
            });
        }
    }
    Ok(ResponseCurves {
        partitions: partition.n,
        patch_sizes: patch_sizes.to_vec(),
        points,
    })
}

/// Per-(partition, patch size) response of best same-image match distances.
pub fn scale_response_curves(
    partition: &PartitionMap,
    text: &RasterImage,
    style: &RasterImage,
    patch_sizes: &[usize],
    seed: u64,
) -> Result<ResponseCurves> {
    if text.dims() != (partition.width, partition.height) || style.dims() != text.dims() {
        return Err(TexfxError::SizeMismatch("partition and images differ".into()));
    }
    let distances = distance_maps(text, style, patch_sizes, seed)?;
    curves_from_distances(partition, patch_sizes, &distances, MAX_MEMBERS, seed)
}

/// One best-match distance map per patch size.
pub fn distance_maps(
    text: &RasterImage,
    style: &RasterImage,
    patch_sizes: &[usize],
    seed: u64,
) -> Result<Vec<Vec<Option<f64>>>> {
    let (w, h) = text.dims();
    patch_sizes
        .iter()
        .map(|&m| {
            if m < 3 || m % 2 == 0 || m > w || m > h {
                return Err(TexfxError::InvalidArgument(format!(
                    "patch size {m} must be odd, >= 3 and fit the {w}x{h} image"
                )));
            }
            Ok(best_match_distances(text, style, m, seed.wrapping_add(m as u64)))
        })
        .collect()
}

/// Inter- and intra-curve spread and their ratio.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ScaleReliability {
    /// `sigma_inter / sigma_intra`; infinite when only the intra spread
    /// vanishes, NaN when both do.
    pub r_scale: f64,
    pub sigma_inter: f64,
    pub sigma_intra: f64,
}

pub fn scale_reliability(curves: &ResponseCurves) -> Result<ScaleReliability> {
    let sizes = curves.patch_sizes.len();
    if curves.partitions < 2 || sizes < 2 {
        return Err(TexfxError::InvalidArgument(
            "scale reliability needs at least 2 partitions and 2 patch sizes".into(),
        ));
    }
    let sigma_inter = (0..sizes)
        .map(|k| {
            let means: Vec<f64> = (0..curves.partitions).map(|c| curves.point(c, k).mean).collect();
            population_std(&means)
        })
        .sum::<f64>()
        / sizes as f64;
    let sigma_intra =
        curves.points.iter().map(|p| p.std).sum::<f64>() / curves.points.len() as f64;
    let r_scale = if sigma_intra > 0.0 {
        sigma_inter / sigma_intra
    } else {
        warn!("intra-curve deviation is zero; scale reliability is degenerate");
        if sigma_inter > 0.0 {
            f64::INFINITY
        } else {
            f64::NAN
        }
    };
    Ok(ScaleReliability {
        r_scale,
        sigma_inter,
        sigma_intra,
    })
}
