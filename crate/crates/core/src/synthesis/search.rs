use rand::Rng;

use super::context::LevelContext;
use super::field::NNField;
use crate::error::Result;
use crate::geometry::DISTANCE_BINS;

/// Seeds each target pixel with a source center of (nearly) equal normalized
/// distance: `k` centers are drawn from the source bin matching the target
/// pixel's bin (or the nearest populated bin) and the lowest distribution
/// cost wins. Cached costs reflect the context's current stylized target.
pub fn init_by_distribution<R: Rng>(ctx: &LevelContext, rng: &mut R, k: usize) -> Result<NNField> {
    let k = k.max(1);
    let mut by_bin: Vec<Vec<usize>> = vec![Vec::new(); DISTANCE_BINS];
    for q in ctx.valid_sources() {
        by_bin[ctx.source_bins()[q] as usize].push(q);
    }
    let pick_bin: Vec<usize> = (0..DISTANCE_BINS).map(|b| nearest_populated(&by_bin, b)).collect();
    let mut nnf = Vec::with_capacity(ctx.width * ctx.height);
    for p in 0..ctx.width * ctx.height {
        let pool = &by_bin[pick_bin[ctx.target_bins()[p] as usize]];
        let mut best = pool[rng.gen_range(0..pool.len())];
        let mut best_cost = ctx.distribution_cost(p, best);
        for _ in 1..k {
            let q = pool[rng.gen_range(0..pool.len())];
            let c = ctx.distribution_cost(p, q);
            if c < best_cost {
                best = q;
                best_cost = c;
            }
        }
        nnf.push(best);
    }
    let mut field = NNField::from_mapping(ctx.width, ctx.height, ctx.source_width, ctx.source_height, nnf)?;
    ctx.recompute_costs(&mut field);
    Ok(field)
}

/// Exact per-pixel argmin of the distribution cost over all source centers;
/// the first minimum in raster order wins.
pub fn init_by_distribution_exhaustive(ctx: &LevelContext) -> Result<NNField> {
    let sources = ctx.valid_sources();
    let nnf = (0..ctx.width * ctx.height)
        .map(|p| {
            let mut best = sources[0];
            let mut best_cost = ctx.distribution_cost(p, best);
            for &q in &sources[1..] {
                let c = ctx.distribution_cost(p, q);
                if c < best_cost {
                    best = q;
                    best_cost = c;
                }
            }
            best
        })
        .collect();
    let mut field = NNField::from_mapping(ctx.width, ctx.height, ctx.source_width, ctx.source_height, nnf)?;
    ctx.recompute_costs(&mut field);
    Ok(field)
}

fn nearest_populated(by_bin: &[Vec<usize>], b: usize) -> usize {
    if !by_bin[b].is_empty() {
        return b;
    }
    for d in 1..by_bin.len() {
        if b >= d && !by_bin[b - d].is_empty() {
            return b - d;
        }
        if b + d < by_bin.len() && !by_bin[b + d].is_empty() {
            return b + d;
        }
    }
    unreachable!("a source always has at least one valid center")
}

/// Tries `q` for target pixel `p` and swaps when the summed objective drops.
///
/// Moving `p` from `q_old` to `q` changes `sum_q |Phi(q)|^2` by
/// `2 * (|Phi(q)| + 1 - |Phi(q_old)|)`, so the comparison below is the exact
/// change of the total objective under live usage counts.
#[inline]
fn try_swap(ctx: &LevelContext, field: &mut NNField, p: usize, q: usize) -> bool {
    let old = field.nnf[p];
    if q == old {
        return false;
    }
    let c = ctx.match_cost(p, q);
    let l2 = 2.0 * ctx.lambda2;
    let new_total = c + l2 * (field.usage[q] as f64 + 1.0);
    let old_total = field.cost[p] + l2 * field.usage[old] as f64;
    if new_total < old_total {
        field.reassign(p, q, c);
        true
    } else {
        false
    }
}

/// One PatchMatch sweep: scanline propagation (forward when `iteration` is
/// even, backward otherwise) followed by exponentially shrinking random
/// search, pixel by pixel. Returns the number of accepted swaps.
pub fn patchmatch_step<R: Rng>(
    ctx: &LevelContext,
    field: &mut NNField,
    iteration: usize,
    rng: &mut R,
) -> usize {
    let (w, h) = (ctx.width, ctx.height);
    let (sw, sh) = (ctx.source_width, ctx.source_height);
    let half = ctx.patch / 2;
    let (x0, x1, y0, y1) = (half as isize, (sw - 1 - half) as isize, half as isize, (sh - 1 - half) as isize);
    let clamp_q = |x: isize, y: isize| -> usize {
        y.clamp(y0, y1) as usize * sw + x.clamp(x0, x1) as usize
    };
    let forward = iteration % 2 == 0;
    let step: isize = if forward { 1 } else { -1 };
    let max_radius = sw.max(sh) as isize;
    let mut swaps = 0;

    for i in 0..h {
        let y = if forward { i } else { h - 1 - i };
        for j in 0..w {
            let x = if forward { j } else { w - 1 - j };
            let p = y * w + x;

            let nx = x as isize - step;
            if nx >= 0 && nx < w as isize {
                let (qx, qy) = field.source_of(y * w + nx as usize);
                let q = clamp_q(qx as isize + step, qy as isize);
                swaps += try_swap(ctx, field, p, q) as usize;
            }
            let ny = y as isize - step;
            if ny >= 0 && ny < h as isize {
                let (qx, qy) = field.source_of(ny as usize * w + x);
                let q = clamp_q(qx as isize, qy as isize + step);
                swaps += try_swap(ctx, field, p, q) as usize;
            }

            let mut radius = max_radius;
            while radius >= 1 {
                let (bx, by) = field.source_of(p);
                let q = clamp_q(
                    bx as isize + rng.gen_range(-radius..=radius),
                    by as isize + rng.gen_range(-radius..=radius),
                );
                swaps += try_swap(ctx, field, p, q) as usize;
                radius /= 2;
            }
        }
    }
    swaps
}

/// Carries a coarser level's field to `ctx`'s resolution. Each pixel inherits
/// its parent's match, rescaled, plus its own offset from the rescaled
/// parent, then clamped to a valid center. Costs are recomputed.
pub fn upsample_field(parent: &NNField, ctx: &LevelContext) -> Result<NNField> {
    let (w, h) = (ctx.width, ctx.height);
    let (sw, sh) = (ctx.source_width, ctx.source_height);
    let (pw, ph) = (parent.width, parent.height);
    let (psw, psh) = (parent.source_width, parent.source_height);
    let half = (ctx.patch / 2) as isize;
    let scale = |v: usize, from: usize, to: usize| -> isize {
        (v as f64 * to as f64 / from as f64).round() as isize
    };
    let mut nnf = Vec::with_capacity(w * h);
    for y in 0..h {
        let py = (scale(y, h, ph) as usize).min(ph - 1);
        let oy = y as isize - scale(py, ph, h);
        for x in 0..w {
            let px = (scale(x, w, pw) as usize).min(pw - 1);
            let ox = x as isize - scale(px, pw, w);
            let (qx, qy) = parent.source_of(py * pw + px);
            let nx = (scale(qx, psw, sw) + ox).clamp(half, sw as isize - 1 - half);
            let ny = (scale(qy, psh, sh) + oy).clamp(half, sh as isize - 1 - half);
            nnf.push(ny as usize * sw + nx as usize);
        }
    }
    let mut field = NNField::from_mapping(w, h, sw, sh, nnf)?;
    ctx.recompute_costs(&mut field);
    Ok(field)
}
