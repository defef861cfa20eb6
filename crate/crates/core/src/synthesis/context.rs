use rayon::prelude::*;

use super::field::NNField;
use super::params::SynthesisParams;
use crate::error::{Result, TexfxError};
use crate::geometry::bin_with_edges;
use crate::image::{clamp_center, ssd_at, RasterImage};
use crate::scale::ScalePosterior;

/// Squared distance mismatch, scaled by the target distance when it exceeds 1.
#[inline]
pub fn distribution_cost(dist_p: f64, dist_q: f64) -> f64 {
    let d = dist_p - dist_q;
    d * d / (dist_p * dist_p).max(1.0)
}

/// Usage penalty of a source patch: its usage count.
#[inline]
pub fn psycho_cost(usage: u32) -> f64 {
    usage as f64
}

/// One scale of the joint appearance window.
#[derive(Debug, Clone)]
pub struct ScaleLayer {
    pub source_text: RasterImage,
    pub source_style: RasterImage,
    pub target_text: RasterImage,
    /// Fixed stylized target for coarser layers; `None` for the layer being
    /// synthesized, whose image lives on the context.
    pub target_style: Option<RasterImage>,
}

#[derive(Debug, Clone)]
struct LayerMaps {
    tx: Vec<usize>,
    ty: Vec<usize>,
    sx: Vec<usize>,
    sy: Vec<usize>,
}

fn axis_map(n: usize, n_layer: usize, m: usize) -> Vec<usize> {
    let r = n_layer as f64 / n as f64;
    (0..n)
        .map(|v| {
            let c = ((v as f64 * r).round() as usize).min(n_layer - 1);
            clamp_center(c, n_layer, m)
        })
        .collect()
}

/// Everything the search needs at one pyramid level: the joint-scale layers,
/// per-pixel layer weights, distance fields and the evolving stylized target.
#[derive(Debug, Clone)]
pub struct LevelContext {
    pub patch: usize,
    pub lambda1: f64,
    pub lambda2: f64,
    pub lambda3: f64,
    pub width: usize,
    pub height: usize,
    pub source_width: usize,
    pub source_height: usize,
    pub target_style: RasterImage,
    layers: Vec<ScaleLayer>,
    maps: Vec<LayerMaps>,
    weights: Vec<f64>,
    target_dist: Vec<f64>,
    target_bins: Vec<u8>,
    source_dist: Vec<f64>,
    source_bins: Vec<u8>,
}

impl LevelContext {
    /// `weights` holds `layers.len()` entries per target pixel. Distances are
    /// quantized with the source `edges`.
    pub fn new(
        layers: Vec<ScaleLayer>,
        weights: Vec<f64>,
        source_dist: Vec<f64>,
        target_dist: Vec<f64>,
        edges: &[f64],
        params: &SynthesisParams,
    ) -> Result<Self> {
        let m = params.patch_size;
        let first = layers
            .first()
            .ok_or_else(|| TexfxError::InvalidArgument("no scale layers".into()))?;
        if first.target_style.is_some() || layers[1..].iter().any(|l| l.target_style.is_none()) {
            return Err(TexfxError::InvalidArgument(
                "only the first layer is synthesized".into(),
            ));
        }
        let (w, h) = first.target_text.dims();
        let (sw, sh) = first.source_text.dims();
        for l in &layers {
            if l.source_text.dims() != l.source_style.dims() {
                return Err(TexfxError::SizeMismatch("source text and style differ".into()));
            }
            if let Some(ts) = &l.target_style {
                if ts.dims() != l.target_text.dims() || ts.channels() != l.source_style.channels() {
                    return Err(TexfxError::SizeMismatch("target layer shape differs".into()));
                }
            }
            if l.source_text.channels() != l.target_text.channels() {
                return Err(TexfxError::ChannelMismatch {
                    left: l.source_text.channels(),
                    right: l.target_text.channels(),
                });
            }
            let (a, b) = (l.source_text.dims(), l.target_text.dims());
            if a.0.min(a.1).min(b.0).min(b.1) < m {
                return Err(TexfxError::InvalidArgument(format!(
                    "layer of {}x{} / {}x{} cannot hold a {m}x{m} patch",
                    a.0, a.1, b.0, b.1
                )));
            }
        }
        if weights.len() != w * h * layers.len() {
            return Err(TexfxError::SizeMismatch("layer weights".into()));
        }
        if source_dist.len() != sw * sh || target_dist.len() != w * h {
            return Err(TexfxError::SizeMismatch("distance fields".into()));
        }
        let maps = layers
            .iter()
            .map(|l| LayerMaps {
                tx: axis_map(w, l.target_text.width(), m),
                ty: axis_map(h, l.target_text.height(), m),
                sx: axis_map(sw, l.source_text.width(), m),
                sy: axis_map(sh, l.source_text.height(), m),
            })
            .collect();
        let target_bins = target_dist.iter().map(|&d| bin_with_edges(edges, d) as u8).collect();
        let source_bins = source_dist.iter().map(|&d| bin_with_edges(edges, d) as u8).collect();
        let target_style = RasterImage::filled(w, h, first.source_style.channels(), 0.0);
        Ok(Self {
            patch: m,
            lambda1: params.lambda1,
            lambda2: params.lambda2,
            lambda3: params.lambda3,
            width: w,
            height: h,
            source_width: sw,
            source_height: sh,
            target_style,
            layers,
            maps,
            weights,
            target_dist,
            target_bins,
            source_dist,
            source_bins,
        })
    }

    /// Single-scale context with unit weights.
    pub fn single_scale(
        source_text: RasterImage,
        source_style: RasterImage,
        target_text: RasterImage,
        source_dist: Vec<f64>,
        target_dist: Vec<f64>,
        edges: &[f64],
        params: &SynthesisParams,
    ) -> Result<Self> {
        let n = target_text.width() * target_text.height();
        let layer = ScaleLayer {
            source_text,
            source_style,
            target_text,
            target_style: None,
        };
        Self::new(vec![layer], vec![1.0; n], source_dist, target_dist, edges, params)
    }

    pub fn layer_count(&self) -> usize {
        self.layers.len()
    }

    pub fn layer(&self, j: usize) -> &ScaleLayer {
        &self.layers[j]
    }

    pub fn source_style(&self) -> &RasterImage {
        &self.layers[0].source_style
    }

    #[inline]
    pub fn weight(&self, p: usize, j: usize) -> f64 {
        self.weights[p * self.layers.len() + j]
    }

    pub fn target_dist(&self) -> &[f64] {
        &self.target_dist
    }

    pub fn source_dist(&self) -> &[f64] {
        &self.source_dist
    }

    pub fn target_bins(&self) -> &[u8] {
        &self.target_bins
    }

    pub fn source_bins(&self) -> &[u8] {
        &self.source_bins
    }

    /// Whether source index `q` is a valid patch center.
    pub fn is_valid_source(&self, q: usize) -> bool {
        let half = self.patch / 2;
        let (x, y) = (q % self.source_width, q / self.source_width);
        x >= half && y >= half && x + half < self.source_width && y + half < self.source_height
    }

    /// Source centers in raster order.
    pub fn valid_sources(&self) -> Vec<usize> {
        let half = self.patch / 2;
        let mut out = Vec::new();
        for y in half..self.source_height - half {
            for x in half..self.source_width - half {
                out.push(y * self.source_width + x);
            }
        }
        out
    }

    /// Posterior-weighted joint-scale appearance distance between target pixel
    /// `p` and source center `q`.
    pub fn appearance_cost(&self, p: usize, q: usize) -> f64 {
        let (px, py) = (p % self.width, p / self.width);
        let (qx, qy) = (q % self.source_width, q / self.source_width);
        let m = self.patch;
        let mut total = 0.0;
        for (j, (layer, map)) in self.layers.iter().zip(&self.maps).enumerate() {
            let w = self.weight(p, j);
            if w == 0.0 {
                continue;
            }
            let (tx, ty) = (map.tx[px], map.ty[py]);
            let (sx, sy) = (map.sx[qx], map.sy[qy]);
            let t_style = layer.target_style.as_ref().unwrap_or(&self.target_style);
            let text = ssd_at(&layer.target_text, tx, ty, &layer.source_text, sx, sy, m);
            let style = ssd_at(t_style, tx, ty, &layer.source_style, sx, sy, m);
            total += w * (self.lambda3 * text + style);
        }
        total
    }

    #[inline]
    pub fn distribution_cost(&self, p: usize, q: usize) -> f64 {
        distribution_cost(self.target_dist[p], self.source_dist[q])
    }

    /// Appearance plus weighted distribution cost; the part of the objective
    /// cached per target pixel.
    #[inline]
    pub fn match_cost(&self, p: usize, q: usize) -> f64 {
        self.appearance_cost(p, q) + self.lambda1 * self.distribution_cost(p, q)
    }

    /// All three terms for `p -> q`, with `usage` the count `q` would carry.
    pub fn total_cost(&self, p: usize, q: usize, usage: u32) -> f64 {
        self.match_cost(p, q) + self.lambda2 * psycho_cost(usage)
    }

    /// Refreshes every cached cost, e.g. after the stylized target changed.
    pub fn recompute_costs(&self, field: &mut NNField) {
        let nnf = &field.nnf;
        field
            .cost
            .par_iter_mut()
            .enumerate()
            .for_each(|(p, c)| *c = self.match_cost(p, nnf[p]));
    }

    /// `sum_p total_cost(p, nnf(p), |Phi(nnf(p))|)`, assuming cached costs are
    /// current.
    pub fn objective(&self, field: &NNField) -> f64 {
        field.cost.iter().sum::<f64>() + self.lambda2 * field.usage_square_sum() as f64
    }

    /// Per-pixel weights of the synthesized layer, used by the vote.
    pub fn vote_weights(&self) -> Vec<f64> {
        (0..self.width * self.height).map(|p| self.weight(p, 0)).collect()
    }
}

/// Free-function form of [`LevelContext::appearance_cost`].
pub fn appearance_cost(ctx: &LevelContext, p: usize, q: usize) -> f64 {
    ctx.appearance_cost(p, q)
}

/// Free-function form of [`LevelContext::total_cost`].
pub fn total_cost(ctx: &LevelContext, p: usize, q: usize, usage: u32) -> f64 {
    ctx.total_cost(p, q, usage)
}

/// Per-pixel layer weights from the scale posterior, `n` layers each.
pub fn posterior_weights(posterior: &ScalePosterior, bins: &[u8], n: usize) -> Vec<f64> {
    let table: Vec<Vec<f64>> = (0..crate::geometry::DISTANCE_BINS)
        .map(|b| {
            let mut w = posterior.window_weights(b, n);
            // More layers than posterior scales: those layers get nothing.
            w.resize(n, 0.0);
            w
        })
        .collect();
    let mut out = Vec::with_capacity(bins.len() * n);
    for &b in bins {
        out.extend_from_slice(&table[b as usize]);
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn distribution_cost_cases() {
        assert_eq!(distribution_cost(0.7, 0.7), 0.0);
        assert_eq!(distribution_cost(0.5, 1.5), 1.0);
        assert_eq!(distribution_cost(2.0, 3.0), 0.25);
    }

    #[test]
    fn psycho_cost_is_the_count() {
        assert_eq!(psycho_cost(0), 0.0);
        assert_eq!(psycho_cost(7), 7.0);
    }

    #[test]
    fn axis_map_clamps_to_valid_centers() {
        let map = axis_map(10, 5, 3);
        assert_eq!(map, vec![1, 1, 1, 2, 2, 3, 3, 3, 3, 3]);
    }
}
