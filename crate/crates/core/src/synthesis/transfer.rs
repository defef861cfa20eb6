use log::{debug, info, warn};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use super::context::{posterior_weights, LevelContext, ScaleLayer};
use super::field::NNField;
use super::params::{Mode, SynthesisParams};
use super::search::{init_by_distribution, patchmatch_step, upsample_field};
use super::vote::vote_weighted;
use crate::error::{Result, TexfxError};
use crate::geometry::{
    binarize, fit_width_regression, normalized_distance_field, skeletonize, DistanceField,
    GeometryTransforms, TextMask,
};
use crate::geometry::distance::{radius_scatter, RadiusSample};
use crate::image::{resize_plane, RasterImage};
use crate::pyramid::{build_pyramid, level_dims, max_feasible_depth, Pyramid};
use crate::scale::{
    detect_optimal_scales, estimate_posterior, scale_distance_histogram, ScaleHistogram, ScaleMap,
    ScalePosterior, ScaleStack, SearchStrategy,
};

/// Seed of the randomized self-matching in scale detection. Fixed, so the
/// source statistics do not depend on the synthesis seed.
pub const SCALE_SEARCH_SEED: u64 = 0x5ca1e;

/// Source-side preprocessing, computed once and shared across targets.
#[derive(Debug, Clone)]
pub struct SourceContext {
    pub text: RasterImage,
    pub style: RasterImage,
    pub mask: TextMask,
    pub distance: DistanceField,
    pub radius_samples: Vec<RadiusSample>,
    pub scale_map: ScaleMap,
    pub histogram: ScaleHistogram,
    pub posterior: ScalePosterior,
    patch_size: usize,
    outlier_fraction: f64,
    threshold: f64,
}

impl SourceContext {
    pub fn patch_size(&self) -> usize {
        self.patch_size
    }
}

/// Distance field of a text image, binarized at `threshold`.
pub fn text_distance(
    text: &RasterImage,
    threshold: f64,
    outlier_fraction: f64,
) -> Result<(TextMask, DistanceField, Vec<RadiusSample>)> {
    let mask = binarize(text, threshold)?;
    let sc = skeletonize(&mask);
    let tf = GeometryTransforms::compute(&sc)?;
    let reg = fit_width_regression(&sc, &tf.to_skeleton.dist)?;
    let df = normalized_distance_field(&mask, &sc, &reg, &tf, outlier_fraction)?;
    let scatter = radius_scatter(&sc, &tf.to_skeleton.dist)?;
    Ok((mask, df, scatter))
}

/// Distance field, optimal scales and scale posterior of a source pair.
pub fn prepare_source(
    source_text: &RasterImage,
    source_style: &RasterImage,
    params: &SynthesisParams,
) -> Result<SourceContext> {
    params.validate()?;
    if source_text.dims() != source_style.dims() {
        return Err(TexfxError::SizeMismatch(format!(
            "source text {:?} vs source style {:?}",
            source_text.dims(),
            source_style.dims()
        )));
    }
    let (w, h) = source_text.dims();
    let m = params.patch_size;
    if w < m || h < m {
        return Err(TexfxError::InvalidArgument(format!(
            "{w}x{h} source cannot hold a {m}x{m} patch"
        )));
    }
    let text = source_text.luma();
    let (mask, distance, radius_samples) =
        text_distance(&text, params.threshold, params.outlier_fraction)?;

    let feasible = ScaleStack::max_levels(w, h, params.scale_factor, m);
    let levels = params.scales.min(feasible);
    if levels < params.scales {
        warn!("source {w}x{h} supports only {levels} of {} scales", params.scales);
    }
    let stack = ScaleStack::new(&text, source_style, levels, params.scale_factor, m)?;
    let strategy = SearchStrategy::for_size(w, h, SCALE_SEARCH_SEED);
    let scale_map = detect_optimal_scales(&stack, params.omega, strategy);
    let histogram = scale_distance_histogram(&scale_map, &distance)?;
    let posterior = estimate_posterior(&histogram)?;
    debug!(
        "source {w}x{h}: mean width {:.2}, {} scales",
        distance.regression.mean_radius, levels
    );
    Ok(SourceContext {
        text,
        style: source_style.clone(),
        mask,
        distance,
        radius_samples,
        scale_map,
        histogram,
        posterior,
        patch_size: m,
        outlier_fraction: params.outlier_fraction,
        threshold: params.threshold,
    })
}

/// Objective values recorded at one pyramid level: after initialization, then
/// after every search sweep and every vote.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LevelTrace {
    /// 1 is the finest level.
    pub level: usize,
    pub width: usize,
    pub height: usize,
    pub objective: Vec<f64>,
}

#[derive(Debug, Clone)]
pub struct TransferResult {
    pub image: RasterImage,
    pub trace: Vec<LevelTrace>,
    /// Final full-resolution correspondence field.
    pub field: NNField,
    pub target_mask: TextMask,
    pub target_distance: DistanceField,
    pub pyramid_depth: usize,
}

/// End-to-end transfer: preprocess the source, then synthesize.
pub fn transfer(
    source_text: &RasterImage,
    source_style: &RasterImage,
    target_text: &RasterImage,
    params: &SynthesisParams,
) -> Result<TransferResult> {
    let src = prepare_source(source_text, source_style, params)?;
    transfer_with(&src, target_text, params)
}

fn plane_pyramid(data: &[f64], w: usize, h: usize, pyr: &Pyramid) -> Vec<Vec<f64>> {
    pyr.levels
        .iter()
        .map(|l| resize_plane(data, w, h, 1, l.width(), l.height()))
        .collect()
}

/// Synthesizes the stylized target for `target_text` from a prepared source.
pub fn transfer_with(
    src: &SourceContext,
    target_text: &RasterImage,
    params: &SynthesisParams,
) -> Result<TransferResult> {
    params.validate()?;
    if params.patch_size != src.patch_size
        || params.outlier_fraction != src.outlier_fraction
        || params.threshold != src.threshold
    {
        return Err(TexfxError::InvalidArgument(
            "source context was prepared with different geometry parameters".into(),
        ));
    }
    let m = params.patch_size;
    let t_text = target_text.luma();
    let (tw, th) = t_text.dims();
    let (sw, sh) = src.text.dims();
    if tw < m || th < m {
        return Err(TexfxError::InvalidArgument(format!(
            "{tw}x{th} target cannot hold a {m}x{m} patch"
        )));
    }
    let (target_mask, t_dist, _) = text_distance(&t_text, params.threshold, params.outlier_fraction)?;
    let t_dist = t_dist.with_edges(&src.distance.bin_edges);

    let coarsest = params.coarsest.min(tw.max(th)).min(sw.max(sh));
    if coarsest < params.coarsest {
        warn!("coarsest level reduced to {coarsest} pixels to fit the images");
    }
    let depth = params
        .pyramid_depth
        .min(max_feasible_depth(sw, sh, params.pyramid_depth, coarsest))
        .min(max_feasible_depth(tw, th, params.pyramid_depth, coarsest));
    if depth < params.pyramid_depth {
        warn!("pyramid depth reduced to {depth} levels to fit the images");
    }
    for (w, h) in [(sw, sh), (tw, th)] {
        let dims = level_dims(w, h, depth, coarsest)?;
        if let Some(&(lw, lh, _)) = dims.iter().find(|d| d.0 < m || d.1 < m) {
            return Err(TexfxError::InvalidArgument(format!(
                "pyramid level {lw}x{lh} cannot hold a {m}x{m} patch; raise --coarsest"
            )));
        }
    }

    let s_text = build_pyramid(&src.text, depth, coarsest)?;
    let s_style = build_pyramid(&src.style, depth, coarsest)?;
    let t_pyr = build_pyramid(&t_text, depth, coarsest)?;
    let s_dist = plane_pyramid(&src.distance.dist, sw, sh, &s_text);
    let t_dists = plane_pyramid(&t_dist.dist, tw, th, &t_pyr);
    let edges = &src.distance.bin_edges;
    let window = match params.mode {
        Mode::Full => src.posterior.levels,
        Mode::Baseline => 1,
    };

    let mut rng = ChaCha8Rng::seed_from_u64(params.seed);
    let mut finals: Vec<RasterImage> = Vec::with_capacity(depth);
    let mut trace = Vec::with_capacity(depth);
    let mut field: Option<NNField> = None;

    for k in 0..depth {
        let n_layers = window.min(k + 1);
        let layers: Vec<ScaleLayer> = (0..n_layers)
            .map(|j| ScaleLayer {
                source_text: s_text.levels[k - j].clone(),
                source_style: s_style.levels[k - j].clone(),
                target_text: t_pyr.levels[k - j].clone(),
                target_style: (j > 0).then(|| finals[k - j].clone()),
            })
            .collect();
        let (lw, lh) = t_pyr.levels[k].dims();
        let level_bins: Vec<u8> = t_dists[k].iter().map(|&d| t_dist.bin_of(d) as u8).collect();
        let weights = match params.mode {
            Mode::Full => posterior_weights(&src.posterior, &level_bins, n_layers),
            Mode::Baseline => vec![1.0; lw * lh],
        };
        let mut ctx = LevelContext::new(
            layers,
            weights,
            s_dist[k].clone(),
            t_dists[k].clone(),
            edges,
            params,
        )?;
        let vote_w = ctx.vote_weights();

        let mut f = match field.take() {
            None => init_by_distribution(&ctx, &mut rng, params.init_candidates)?,
            Some(parent) => upsample_field(&parent, &ctx)?,
        };
        ctx.target_style = vote_weighted(&f, ctx.source_style(), m, &vote_w)?;
        ctx.recompute_costs(&mut f);
        let mut objective = vec![ctx.objective(&f)];

        for it in 0..params.iterations {
            let swaps = patchmatch_step(&ctx, &mut f, it, &mut rng);
            objective.push(ctx.objective(&f));
            ctx.target_style = vote_weighted(&f, ctx.source_style(), m, &vote_w)?;
            ctx.recompute_costs(&mut f);
            objective.push(ctx.objective(&f));
            debug!("level {} iteration {it}: {swaps} swaps", depth - k);
        }
        info!(
            "level {}/{depth} ({lw}x{lh}): objective {:.6} -> {:.6}",
            depth - k,
            objective[0],
            objective[objective.len() - 1]
        );
        trace.push(LevelTrace {
            level: depth - k,
            width: lw,
            height: lh,
            objective,
        });
        finals.push(ctx.target_style.clone());
        field = Some(f);
    }

    Ok(TransferResult {
        image: finals.pop().expect("at least one level"),
        trace,
        field: field.expect("at least one level"),
        target_mask,
        target_distance: t_dist,
        pyramid_depth: depth,
    })
}
