use rayon::prelude::*;

use super::field::NNField;
use crate::error::{Result, TexfxError};
use crate::image::{clamp_center, RasterImage};

/// Target pixels whose clamped patch center is `c`.
#[inline]
fn preimage(c: usize, dim: usize, m: usize) -> (usize, usize) {
    let half = m / 2;
    let lo = if c == half { 0 } else { c };
    let hi = if c + 1 + half == dim { dim - 1 } else { c };
    (lo, hi)
}

/// Unweighted mean of every patch prediction covering each target pixel.
pub fn vote(field: &NNField, source_style: &RasterImage, m: usize) -> Result<RasterImage> {
    vote_impl(field, source_style, m, None)
}

/// Like [`vote`], with a nonnegative weight per contributing target patch.
/// Pixels whose covering weights are all zero fall back to the plain mean.
pub fn vote_weighted(
    field: &NNField,
    source_style: &RasterImage,
    m: usize,
    weights: &[f64],
) -> Result<RasterImage> {
    if weights.len() != field.len() {
        return Err(TexfxError::SizeMismatch(format!(
            "{} vote weights for {} pixels",
            weights.len(),
            field.len()
        )));
    }
    if weights.iter().any(|w| !(*w >= 0.0)) {
        return Err(TexfxError::InvalidArgument("vote weights must be >= 0".into()));
    }
    vote_impl(field, source_style, m, Some(weights))
}

fn vote_impl(
    field: &NNField,
    source_style: &RasterImage,
    m: usize,
    weights: Option<&[f64]>,
) -> Result<RasterImage> {
    let (w, h) = (field.width, field.height);
    if source_style.dims() != (field.source_width, field.source_height) {
        return Err(TexfxError::SizeMismatch(format!(
            "field expects a {}x{} source, got {:?}",
            field.source_width,
            field.source_height,
            source_style.dims()
        )));
    }
    if m % 2 == 0 || w < m || h < m {
        return Err(TexfxError::InvalidArgument(format!(
            "cannot vote {m}x{m} patches on a {w}x{h} target"
        )));
    }
    let half = m / 2;
    let ch = source_style.channels();
    let sw = field.source_width;
    let src = source_style.data();

    // Source sample predicted for target (x, y) by the patch of target pixel p.
    let predict = |p: usize, x: usize, y: usize, c: usize| -> f64 {
        let (cx, cy) = (clamp_center(p % w, w, m), clamp_center(p / w, h, m));
        let q = field.nnf[p];
        let sx = q % sw + x - cx;
        let sy = q / sw + y - cy;
        src[(sy * sw + sx) * ch + c]
    };

    let mut out = vec![0.0; w * h * ch];
    out.par_chunks_mut(w * ch).enumerate().for_each(|(y, row)| {
        let cy_lo = y.saturating_sub(half).max(half);
        let cy_hi = (y + half).min(h - 1 - half);
        let mut acc = vec![0.0; ch];
        for x in 0..w {
            let cx_lo = x.saturating_sub(half).max(half);
            let cx_hi = (x + half).min(w - 1 - half);
            let own = y * w + x;
            let v0: Vec<f64> = (0..ch).map(|c| predict(own, x, y, c)).collect();
            let mut wsum = 0.0;
            let mut count = 0.0;
            acc.iter_mut().for_each(|a| *a = 0.0);
            let mut plain = vec![0.0; ch];
            for cy in cy_lo..=cy_hi {
                let (py_lo, py_hi) = preimage(cy, h, m);
                for cx in cx_lo..=cx_hi {
                    let (px_lo, px_hi) = preimage(cx, w, m);
                    for py in py_lo..=py_hi {
                        for px in px_lo..=px_hi {
                            let p = py * w + px;
                            let wt = weights.map_or(1.0, |ws| ws[p]);
                            wsum += wt;
                            count += 1.0;
                            for c in 0..ch {
                                let d = predict(p, x, y, c) - v0[c];
                                acc[c] += wt * d;
                                plain[c] += d;
                            }
                        }
                    }
                }
            }
            for c in 0..ch {
                let v = if wsum > 0.0 {
                    v0[c] + acc[c] / wsum
                } else {
                    v0[c] + plain[c] / count
                };
                row[x * ch + c] = v.clamp(0.0, 1.0);
            }
        }
    });
    Ok(RasterImage::from_raw_unchecked(w, h, ch, out))
}
