//! Geometric image pyramids with a fixed coarsest size.

use crate::error::{Result, TexfxError};
use crate::image::RasterImage;

/// Levels ordered coarsest first. `scale_ratios[k]` is the downsample factor of
/// level `k` relative to the full-resolution image (1 for the finest).
#[derive(Debug, Clone)]
pub struct Pyramid {
    pub levels: Vec<RasterImage>,
    pub scale_ratios: Vec<f64>,
}

impl Pyramid {
    pub fn depth(&self) -> usize {
        self.levels.len()
    }

    pub fn finest(&self) -> &RasterImage {
        self.levels.last().expect("pyramid has at least one level")
    }

    pub fn coarsest(&self) -> &RasterImage {
        &self.levels[0]
    }
}

/// Level dimensions for an image of `width x height`, coarsest first.
pub fn level_dims(
    width: usize,
    height: usize,
    depth: usize,
    coarsest: usize,
) -> Result<Vec<(usize, usize, f64)>> {
    if depth == 0 {
        return Err(TexfxError::InvalidArgument("pyramid depth must be >= 1".into()));
    }
    let max_dim = width.max(height);
    if coarsest == 0 || coarsest > max_dim {
        return Err(TexfxError::InvalidArgument(format!(
            "coarsest size {coarsest} exceeds image size {width}x{height}"
        )));
    }
    if depth == 1 {
        return Ok(vec![(width, height, 1.0)]);
    }
    let span = max_dim as f64 / coarsest as f64;
    let steps = (depth - 1) as f64;
    let mut dims = Vec::with_capacity(depth);
    for k in 0..depth {
        if k == depth - 1 {
            dims.push((width, height, 1.0));
            continue;
        }
        let ratio = span.powf((steps - k as f64) / steps);
        let w = ((width as f64 / ratio).round() as usize).max(1);
        let h = ((height as f64 / ratio).round() as usize).max(1);
        dims.push((w, h, ratio));
    }
    for pair in dims.windows(2) {
        let (a, b) = (pair[0], pair[1]);
        if a.0.max(a.1) >= b.0.max(b.1) || a.0 > b.0 || a.1 > b.1 {
            return Err(TexfxError::InvalidArgument(format!(
                "{depth} levels between {coarsest} and {max_dim} pixels do not strictly grow"
            )));
        }
    }
    Ok(dims)
}

/// Largest depth `<= depth` whose levels strictly grow.
pub fn max_feasible_depth(width: usize, height: usize, depth: usize, coarsest: usize) -> usize {
    (1..=depth.max(1))
        .rev()
        .find(|&d| level_dims(width, height, d, coarsest).is_ok())
        .unwrap_or(1)
}

/// Each level is resampled directly from `img`, and the finest level is `img`
/// itself.
pub fn build_pyramid(img: &RasterImage, depth: usize, coarsest: usize) -> Result<Pyramid> {
    let dims = level_dims(img.width(), img.height(), depth, coarsest)?;
    let mut levels = Vec::with_capacity(dims.len());
    let mut scale_ratios = Vec::with_capacity(dims.len());
    for (k, &(w, h, ratio)) in dims.iter().enumerate() {
        if k + 1 == dims.len() {
            levels.push(img.clone());
        } else {
            levels.push(img.resize_area(w, h)?);
        }
        scale_ratios.push(ratio);
    }
    Ok(Pyramid {
        levels,
        scale_ratios,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn depth_one_is_the_input() {
        let img = RasterImage::from_fn(9, 7, 3, |x, y, c| ((x + y + c) % 5) as f64 / 4.0);
        let p = build_pyramid(&img, 1, 4).unwrap();
        assert_eq!(p.depth(), 1);
        assert_eq!(p.levels[0], img);
        assert_eq!(p.scale_ratios, vec![1.0]);
    }

    #[test]
    fn ten_levels_from_320_to_32() {
        let img = RasterImage::filled(320, 320, 1, 0.5);
        let p = build_pyramid(&img, 10, 32).unwrap();
        assert_eq!(p.depth(), 10);
        for (k, level) in p.levels.iter().enumerate() {
            let expected = (32.0 * 10f64.powf(k as f64 / 9.0)).round() as usize;
            assert_eq!(level.width(), expected, "level {k}");
        }
        assert_eq!(p.coarsest().width(), 32);
        assert_eq!(p.finest().width(), 320);
    }

    #[test]
    fn ratios_decrease_to_one() {
        let img = RasterImage::filled(200, 120, 1, 0.5);
        let p = build_pyramid(&img, 6, 32).unwrap();
        assert!(p.scale_ratios.windows(2).all(|w| w[0] > w[1]));
        assert_eq!(*p.scale_ratios.last().unwrap(), 1.0);
        assert_eq!(p.coarsest().width().max(p.coarsest().height()), 32);
    }

    #[test]
    fn rejects_oversized_coarsest_and_non_growing_levels() {
        let img = RasterImage::filled(20, 20, 1, 0.5);
        assert!(build_pyramid(&img, 3, 32).is_err());
        assert!(build_pyramid(&img, 10, 18).is_err());
        assert_eq!(max_feasible_depth(20, 20, 10, 18), 3);
    }
}
