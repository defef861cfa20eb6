//! Per-pixel optimal patch scales and the scale/distance posterior.
//!
//! The source pair is examined at `L` scales, each downsampled by a further
//! factor `s`. Starting from the roughest scale, a pixel keeps its scale as
//! soon as its patch both looks flat and finds a close match elsewhere in the
//! same image; pixels that never settle fall through to scale 1.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Result, TexfxError};
use crate::geometry::{DistanceField, DISTANCE_BINS};
use crate::image::{clamp_center, patch_variance, ssd_at, RasterImage};

/// Sources larger than this (in either dimension) use randomized matching.
pub const EXHAUSTIVE_LIMIT: usize = 64;

/// How the nearest same-image patch is found.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SearchStrategy {
    Exhaustive,
    Randomized { iterations: usize, seed: u64 },
}

impl SearchStrategy {
    /// Exhaustive for small images, 10 randomized sweeps otherwise.
    pub fn for_size(width: usize, height: usize, seed: u64) -> Self {
        if width > EXHAUSTIVE_LIMIT || height > EXHAUSTIVE_LIMIT {
            SearchStrategy::Randomized {
                iterations: 10,
                seed,
            }
        } else {
            SearchStrategy::Exhaustive
        }
    }
}

/// Text/style pairs at scales `1..=L`; scale `l` is shrunk by `s^(l-1)`.
#[derive(Debug, Clone)]
pub struct ScaleStack {
    levels: Vec<(RasterImage, RasterImage)>,
    factor: f64,
    patch: usize,
    width: usize,
    height: usize,
}

/// Best same-image correspondence of one level pixel.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SelfMatch {
    pub x: usize,
    pub y: usize,
    pub cost: f64,
}

impl ScaleStack {
    pub fn new(
        text: &RasterImage,
        style: &RasterImage,
        levels: usize,
        factor: f64,
        patch: usize,
    ) -> Result<Self> {
        if text.dims() != style.dims() {
            return Err(TexfxError::SizeMismatch(format!(
                "text {:?} vs style {:?}",
                text.dims(),
                style.dims()
            )));
        }
        if levels == 0 || !(factor > 1.0) || patch % 2 == 0 {
            return Err(TexfxError::InvalidArgument(format!(
                "bad scale stack parameters: L={levels}, s={factor}, m={patch}"
            )));
        }
        let (w, h) = text.dims();
        let mut out = Vec::with_capacity(levels);
        for l in 1..=levels {
            let (lw, lh) = level_dims(w, h, factor, l);
            if lw < patch || lh < patch {
                return Err(TexfxError::InvalidArgument(format!(
                    "scale {l} of a {w}x{h} image is {lw}x{lh}, smaller than the {patch}x{patch} patch"
                )));
            }
            if l == 1 {
                out.push((text.clone(), style.clone()));
            } else {
                out.push((text.resize_area(lw, lh)?, style.resize_area(lw, lh)?));
            }
        }
        Ok(Self {
            levels: out,
            factor,
            patch,
            width: w,
            height: h,
        })
    }

    /// Largest `L` whose every scale still holds an `m x m` patch.
    pub fn max_levels(width: usize, height: usize, factor: f64, patch: usize) -> usize {
        let mut l = 1;
        loop {
            let (lw, lh) = level_dims(width, height, factor, l + 1);
            if lw < patch || lh < patch {
                return l;
            }
            l += 1;
        }
    }

    pub fn level_count(&self) -> usize {
        self.levels.len()
    }

    pub fn patch(&self) -> usize {
        self.patch
    }

    pub fn factor(&self) -> f64 {
        self.factor
    }

    pub fn dims(&self) -> (usize, usize) {
        (self.width, self.height)
    }

    /// Text and style images at 1-based scale `l`.
    pub fn level(&self, l: usize) -> (&RasterImage, &RasterImage) {
        let (t, s) = &self.levels[l - 1];
        (t, s)
    }

    /// Patch center at scale `l` for full-resolution pixel `(x, y)`.
    pub fn map_to_level(&self, l: usize, x: usize, y: usize) -> (usize, usize) {
        let (t, _) = self.level(l);
        let f = self.factor.powi(l as i32 - 1);
        let cx = ((x as f64 / f).round() as usize).min(t.width() - 1);
        let cy = ((y as f64 / f).round() as usize).min(t.height() - 1);
        (
            clamp_center(cx, t.width(), self.patch),
            clamp_center(cy, t.height(), self.patch),
        )
    }
}

fn level_dims(w: usize, h: usize, factor: f64, l: usize) -> (usize, usize) {
    let f = factor.powi(l as i32 - 1);
    (
        ((w as f64 / f).round() as usize).max(1),
        ((h as f64 / f).round() as usize).max(1),
    )
}

#[inline]
fn chebyshev(ax: usize, ay: usize, bx: usize, by: usize) -> usize {
    ax.abs_diff(bx).max(ay.abs_diff(by))
}

#[inline]
fn pair_cost(text: &RasterImage, style: &RasterImage, ax: usize, ay: usize, bx: usize, by: usize, m: usize) -> f64 {
    ssd_at(text, ax, ay, text, bx, by, m) + ssd_at(style, ax, ay, style, bx, by, m)
}

/// Exhaustive nearest patch to the valid center `(cx, cy)` among centers at
/// Chebyshev distance `>= m`. Candidates are visited in raster order and the
/// first minimum wins.
pub fn exhaustive_self_match(
    text: &RasterImage,
    style: &RasterImage,
    m: usize,
    cx: usize,
    cy: usize,
) -> Option<SelfMatch> {
    let half = m / 2;
    let mut best: Option<SelfMatch> = None;
    for y in half..text.height() - half {
        for x in half..text.width() - half {
            if chebyshev(cx, cy, x, y) < m {
                continue;
            }
            let cost = pair_cost(text, style, cx, cy, x, y, m);
            if best.map_or(true, |b| cost < b.cost) {
                best = Some(SelfMatch { x, y, cost });
            }
        }
    }
    best
}

/// Best self-match for every valid center of one image pair, indexed by raster
/// position (border pixels hold `None`). With `needed`, only the flagged
/// centers are guaranteed to be filled by the exhaustive path.
pub fn self_match_field(
    text: &RasterImage,
    style: &RasterImage,
    m: usize,
    needed: Option<&[bool]>,
    strategy: SearchStrategy,
) -> Vec<Option<SelfMatch>> {
    let (w, h) = text.dims();
    let half = m / 2;
    match strategy {
        SearchStrategy::Exhaustive => (0..w * h)
            .into_par_iter()
            .map(|i| {
                let (x, y) = (i % w, i / w);
                let valid = x >= half && y >= half && x + half < w && y + half < h;
                if !valid || needed.is_some_and(|n| !n[i]) {
                    None
                } else {
                    exhaustive_self_match(text, style, m, x, y)
                }
            })
            .collect(),
        SearchStrategy::Randomized { iterations, seed } => {
            randomized_self_match(text, style, m, iterations, seed)
        }
    }
}

/// PatchMatch restricted to candidates outside the query's own neighborhood.
fn randomized_self_match(
    text: &RasterImage,
    style: &RasterImage,
    m: usize,
    iterations: usize,
    seed: u64,
) -> Vec<Option<SelfMatch>> {
    let (w, h) = text.dims();
    let half = m / 2;
    let (x0, x1, y0, y1) = (half, w - 1 - half, half, h - 1 - half);
    let mut out: Vec<Option<SelfMatch>> = vec![None; w * h];
    let mut rng = ChaCha8Rng::seed_from_u64(seed);

    // Random admissible initialization.
    for y in y0..=y1 {
        for x in x0..=x1 {
            for _ in 0..64 {
                let cx = rng.gen_range(x0..=x1);
                let cy = rng.gen_range(y0..=y1);
                if chebyshev(x, y, cx, cy) >= m {
                    let cost = pair_cost(text, style, x, y, cx, cy, m);
                    out[y * w + x] = Some(SelfMatch { x: cx, y: cy, cost });
                    break;
                }
            }
            if out[y * w + x].is_none() {
                out[y * w + x] = exhaustive_self_match(text, style, m, x, y);
            }
        }
    }

    let try_candidate = |out: &mut Vec<Option<SelfMatch>>, x: usize, y: usize, cx: isize, cy: isize| {
        if cx < x0 as isize || cy < y0 as isize || cx > x1 as isize || cy > y1 as isize {
            return;
        }
        let (cx, cy) = (cx as usize, cy as usize);
        if chebyshev(x, y, cx, cy) < m {
            return;
        }
        let cost = pair_cost(text, style, x, y, cx, cy, m);
        let slot = &mut out[y * w + x];
        if slot.map_or(true, |b| cost < b.cost) {
            *slot = Some(SelfMatch { x: cx, y: cy, cost });
        }
    };

    let max_radius = w.max(h) as isize;
    for it in 0..iterations {
        let forward = it % 2 == 0;
        let step: isize = if forward { 1 } else { -1 };
        let ys: Vec<usize> = if forward { (y0..=y1).collect() } else { (y0..=y1).rev().collect() };
        let xs: Vec<usize> = if forward { (x0..=x1).collect() } else { (x0..=x1).rev().collect() };
        for &y in &ys {
            for &x in &xs {
                for (nx, ny) in [(x as isize - step, y as isize), (x as isize, y as isize - step)] {
                    if nx < x0 as isize || ny < y0 as isize || nx > x1 as isize || ny > y1 as isize {
                        continue;
                    }
                    if let Some(nb) = out[ny as usize * w + nx as usize] {
                        let cx = nb.x as isize + (x as isize - nx);
                        let cy = nb.y as isize + (y as isize - ny);
                        try_candidate(&mut out, x, y, cx, cy);
                    }
                }
                let mut radius = max_radius;
                while radius >= 1 {
                    if let Some(cur) = out[y * w + x] {
                        let cx = cur.x as isize + rng.gen_range(-radius..=radius);
                        let cy = cur.y as isize + rng.gen_range(-radius..=radius);
                        try_candidate(
                            &mut out,
                            x,
                            y,
                            cx.clamp(x0 as isize, x1 as isize),
                            cy.clamp(y0 as isize, y1 as isize),
                        );
                    }
                    radius /= 2;
                }
            }
        }
    }
    out
}

/// Nearest same-image match of full-resolution pixel `q` at scale `l`.
pub fn best_match_at_scale(stack: &ScaleStack, l: usize, q: (usize, usize)) -> Option<SelfMatch> {
    let (text, style) = stack.level(l);
    let (cx, cy) = stack.map_to_level(l, q.0, q.1);
    exhaustive_self_match(text, style, stack.patch, cx, cy)
}

/// Optimal scale per full-resolution source pixel, values in `1..=L`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ScaleMap {
    pub width: usize,
    pub height: usize,
    pub levels: usize,
    pub scale: Vec<u8>,
}

impl ScaleMap {
    #[inline]
    pub fn at(&self, x: usize, y: usize) -> usize {
        self.scale[y * self.width + x] as usize
    }
}

/// Roughest-first scale filtering. A still-active pixel settles at scale `l`
/// when `sigma + sqrt(d) <= omega`, where `sigma` is half the standard
/// deviation of its style patch and `d` its best self-match cost. Pixels with
/// no admissible match settle immediately.
pub fn detect_optimal_scales(
    stack: &ScaleStack,
    omega: f64,
    strategy: SearchStrategy,
) -> ScaleMap {
    let (w, h) = stack.dims();
    let levels = stack.level_count();
    let m = stack.patch;
    let mut scale = vec![1u8; w * h];
    let mut active: Vec<usize> = (0..w * h).collect();

    for l in (2..=levels).rev() {
        if active.is_empty() {
            break;
        }
        let (text, style) = stack.level(l);
        let lw = text.width();
        let centers: Vec<usize> = active
            .iter()
            .map(|&i| {
                let (cx, cy) = stack.map_to_level(l, i % w, i / w);
                cy * lw + cx
            })
            .collect();
        let mut needed = vec![false; lw * text.height()];
        for &c in &centers {
            needed[c] = true;
        }
        let level_strategy = match strategy {
            SearchStrategy::Randomized { iterations, seed } => SearchStrategy::Randomized {
                iterations,
                seed: seed.wrapping_add(l as u64),
            },
            s => s,
        };
        let matches = self_match_field(text, style, m, Some(&needed), level_strategy);
        let mut keep = Vec::with_capacity(active.len());
        for (&i, &c) in active.iter().zip(&centers) {
            let settle = match matches[c] {
                None => true,
                Some(sm) => {
                    let sigma = patch_variance(style, c % lw, c / lw, m).sqrt() / 2.0;
                    !(sigma + sm.cost.sqrt() > omega)
                }
            };
            if settle {
                scale[i] = l as u8;
            } else {
                keep.push(i);
            }
        }
        active = keep;
    }
    ScaleMap {
        width: w,
        height: h,
        levels,
        scale,
    }
}

/// Joint counts of (scale, distance bin), `levels x 100`, row-major by scale.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ScaleHistogram {
    pub levels: usize,
    pub counts: Vec<u64>,
}

impl ScaleHistogram {
    pub fn new(levels: usize, counts: Vec<u64>) -> Result<Self> {
        if levels == 0 || counts.len() != levels * DISTANCE_BINS {
            return Err(TexfxError::InvalidArgument(format!(
                "histogram needs {} cells, got {}",
                levels * DISTANCE_BINS,
                counts.len()
            )));
        }
        Ok(Self { levels, counts })
    }

    /// Count for 1-based scale `l` and bin `x`.
    #[inline]
    pub fn get(&self, l: usize, x: usize) -> u64 {
        self.counts[(l - 1) * DISTANCE_BINS + x]
    }

    pub fn total(&self) -> u64 {
        self.counts.iter().sum()
    }
}

pub fn scale_distance_histogram(sm: &ScaleMap, df: &DistanceField) -> Result<ScaleHistogram> {
    if sm.width != df.width || sm.height != df.height {
        return Err(TexfxError::SizeMismatch(format!(
            "scale map {}x{} vs distance field {}x{}",
            sm.width, sm.height, df.width, df.height
        )));
    }
    let mut counts = vec![0u64; sm.levels * DISTANCE_BINS];
    for (&l, &b) in sm.scale.iter().zip(&df.bins) {
        counts[(l as usize - 1) * DISTANCE_BINS + b as usize] += 1;
    }
    ScaleHistogram::new(sm.levels, counts)
}

/// Joint `P(l, x)` and conditional `P(l | x)`, both `levels x 100`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ScalePosterior {
    pub levels: usize,
    pub joint: Vec<f64>,
    pub posterior: Vec<f64>,
}

impl ScalePosterior {
    #[inline]
    pub fn joint(&self, l: usize, x: usize) -> f64 {
        self.joint[(l - 1) * DISTANCE_BINS + x]
    }

    #[inline]
    pub fn posterior(&self, l: usize, x: usize) -> f64 {
        self.posterior[(l - 1) * DISTANCE_BINS + x]
    }

    /// `P(1..=n | x)` renormalized to sum to one; uniform if all are zero.
    pub fn window_weights(&self, bin: usize, n: usize) -> Vec<f64> {
        let n = n.min(self.levels).max(1);
        let raw: Vec<f64> = (1..=n).map(|l| self.posterior(l, bin)).collect();
        let sum: f64 = raw.iter().sum();
        if sum > 0.0 {
            raw.into_iter().map(|p| p / sum).collect()
        } else {
            vec![1.0 / n as f64; n]
        }
    }

    /// `levels x 100` matrix of conditionals, for dumps.
    pub fn posterior_rows(&self) -> Vec<Vec<f64>> {
        self.posterior
            .chunks(DISTANCE_BINS)
            .map(|r| r.to_vec())
            .collect()
    }
}

/// Normalizes the histogram. Bins without samples copy the nearest populated
/// bin, preferring the lower one on ties.
pub fn estimate_posterior(hist: &ScaleHistogram) -> Result<ScalePosterior> {
    let total = hist.total();
    if total == 0 {
        return Err(TexfxError::EmptyHistogram);
    }
    let levels = hist.levels;
    let joint: Vec<f64> = hist
        .counts
        .iter()
        .map(|&c| c as f64 / total as f64)
        .collect();
    let support: Vec<u64> = (0..DISTANCE_BINS)
        .map(|x| (1..=levels).map(|l| hist.get(l, x)).sum())
        .collect();
    let mut posterior = vec![0.0; levels * DISTANCE_BINS];
    for x in 0..DISTANCE_BINS {
        let src = if support[x] > 0 {
            x
        } else {
            nearest_supported(&support, x)
        };
        let col: u64 = support[src];
        for l in 1..=levels {
            posterior[(l - 1) * DISTANCE_BINS + x] = hist.get(l, src) as f64 / col as f64;
        }
    }
    Ok(ScalePosterior {
        levels,
        joint,
        posterior,
    })
}

fn nearest_supported(support: &[u64], x: usize) -> usize {
    for d in 1..support.len() {
        if x >= d && support[x - d] > 0 {
            return x - d;
        }
        if x + d < support.len() && support[x + d] > 0 {
            return x + d;
        }
    }
    unreachable!("histogram has at least one populated bin")
}

#[cfg(test)]
mod tests {
    use super::*;

    fn hist_from(levels: usize, cells: &[(usize, usize, u64)]) -> ScaleHistogram {
        let mut counts = vec![0; levels * DISTANCE_BINS];
        for &(l, x, c) in cells {
            counts[(l - 1) * DISTANCE_BINS + x] = c;
        }
        ScaleHistogram::new(levels, counts).unwrap()
    }

    #[test]
    fn uniform_histogram_gives_uniform_posterior() {
        let h = ScaleHistogram::new(5, vec![3; 500]).unwrap();
        let p = estimate_posterior(&h).unwrap();
        assert!(p.posterior.iter().all(|&v| (v - 0.2).abs() < 1e-15));
        assert!((p.joint.iter().sum::<f64>() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn single_cell_propagates_everywhere() {
        let h = hist_from(4, &[(3, 42, 9)]);
        let p = estimate_posterior(&h).unwrap();
        for x in 0..DISTANCE_BINS {
            for l in 1..=4 {
                assert_eq!(p.posterior(l, x), if l == 3 { 1.0 } else { 0.0 });
            }
        }
    }

    #[test]
    fn empty_columns_prefer_lower_neighbor_on_ties() {
        let h = hist_from(2, &[(1, 10, 1), (2, 12, 1)]);
        let p = estimate_posterior(&h).unwrap();
        assert_eq!(p.posterior(1, 11), 1.0);
        assert_eq!(p.posterior(2, 13), 1.0);
        assert_eq!(p.posterior(1, 0), 1.0);
    }

    #[test]
    fn empty_histogram_is_an_error() {
        let h = ScaleHistogram::new(3, vec![0; 300]).unwrap();
        assert!(matches!(estimate_posterior(&h), Err(TexfxError::EmptyHistogram)));
    }

    #[test]
    fn window_weights_renormalize() {
        let h = hist_from(3, &[(1, 0, 1), (2, 0, 1), (3, 0, 2)]);
        let p = estimate_posterior(&h).unwrap();
        assert_eq!(p.window_weights(0, 2), vec![0.5, 0.5]);
        assert_eq!(p.window_weights(0, 3), vec![0.25, 0.25, 0.5]);
        let h = hist_from(3, &[(3, 0, 2)]);
        let p = estimate_posterior(&h).unwrap();
        assert_eq!(p.window_weights(0, 2), vec![0.5, 0.5]);
    }

    #[test]
    fn stack_levels_halve() {
        let img = RasterImage::filled(40, 24, 1, 0.2);
        let stack = ScaleStack::new(&img, &img, 3, 2.0, 5).unwrap();
        assert_eq!(stack.level(1).0.dims(), (40, 24));
        assert_eq!(stack.level(2).0.dims(), (20, 12));
        assert_eq!(stack.level(3).0.dims(), (10, 6));
        assert!(ScaleStack::new(&img, &img, 4, 2.0, 5).is_err());
        assert_eq!(ScaleStack::max_levels(40, 24, 2.0, 5), 3);
    }

    #[test]
    fn constant_pair_settles_at_roughest_scale() {
        let img = RasterImage::filled(48, 48, 3, 0.4);
        let stack = ScaleStack::new(&img.luma(), &img, 3, 2.0, 5).unwrap();
        let sm = detect_optimal_scales(&stack, 0.3, SearchStrategy::Exhaustive);
        assert!(sm.scale.iter().all(|&l| l == 3));
        let m = best_match_at_scale(&stack, 2, (20, 20)).unwrap();
        assert_eq!(m.cost, 0.0);
    }
}
