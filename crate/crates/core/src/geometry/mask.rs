use crate::error::{Result, TexfxError};
use crate::image::RasterImage;

/// Binary text region. Always holds at least one inside and one outside pixel.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TextMask {
    width: usize,
    height: usize,
    inside: Vec<bool>,
}

impl TextMask {
    pub fn new(width: usize, height: usize, inside: Vec<bool>) -> Result<Self> {
        if inside.len() != width * height {
            return Err(TexfxError::InvalidArgument(format!(
                "mask needs {} pixels, got {}",
                width * height,
                inside.len()
            )));
        }
        if inside.iter().all(|&b| b) {
            return Err(TexfxError::DegenerateMask("inside"));
        }
        if inside.iter().all(|&b| !b) {
            return Err(TexfxError::DegenerateMask("outside"));
        }
        Ok(Self {
            width,
            height,
            inside,
        })
    }

    pub fn from_fn(
        width: usize,
        height: usize,
        mut f: impl FnMut(usize, usize) -> bool,
    ) -> Result<Self> {
        let mut inside = Vec::with_capacity(width * height);
        for y in 0..height {
            for x in 0..width {
                inside.push(f(x, y));
            }
        }
        Self::new(width, height, inside)
    }

    #[inline]
    pub fn width(&self) -> usize {
        self.width
    }

    #[inline]
    pub fn height(&self) -> usize {
        self.height
    }

    #[inline]
    pub fn contains(&self, x: usize, y: usize) -> bool {
        self.inside[y * self.width + x]
    }

    #[inline]
    pub fn as_slice(&self) -> &[bool] {
        &self.inside
    }

    pub fn count(&self) -> usize {
        self.inside.iter().filter(|&&b| b).count()
    }
}

/// Text region = pixels whose channel mean is at least `threshold`.
pub fn binarize(img: &RasterImage, threshold: f64) -> Result<TextMask> {
    if !(threshold > 0.0 && threshold < 1.0) {
        return Err(TexfxError::InvalidArgument(format!(
            "threshold must lie in (0, 1), got {threshold}"
        )));
    }
    let luma = img.luma();
    let inside = luma.data().iter().map(|&v| v >= threshold).collect();
    TextMask::new(img.width(), img.height(), inside)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn bimodal_glyph_is_recovered() {
        let img = RasterImage::from_fn(8, 8, 3, |x, y, _| {
            if (2..6).contains(&x) && (1..7).contains(&y) {
                1.0
            } else {
                0.0
            }
        });
        let mask = binarize(&img, 0.5).unwrap();
        for y in 0..8 {
            for x in 0..8 {
                assert_eq!(mask.contains(x, y), img.get(x, y, 0) == 1.0);
            }
        }
    }

    #[test]
    fn all_black_is_degenerate() {
        let img = RasterImage::filled(5, 5, 1, 0.0);
        assert!(matches!(
            binarize(&img, 0.5),
            Err(TexfxError::DegenerateMask(_))
        ));
        let img = RasterImage::filled(5, 5, 1, 1.0);
        assert!(matches!(
            binarize(&img, 0.5),
            Err(TexfxError::DegenerateMask(_))
        ));
    }

    #[test]
    fn threshold_ties_are_inside() {
        let img = RasterImage::new(2, 1, 1, vec![0.5, 0.0]).unwrap();
        let mask = binarize(&img, 0.5).unwrap();
        assert!(mask.contains(0, 0));
        assert!(!mask.contains(1, 0));
    }
}
