//! Procedural exemplars for tests, benchmarks and demos.
//!
//! Every generator is deterministic; text images are white glyphs on black.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::Result;
use crate::geometry::{binarize, DistanceField, DEFAULT_OUTLIER_FRACTION};
use crate::image::RasterImage;

/// Smooth value noise in `[0, 1]`: a random lattice with spacing `cell`,
/// bilinearly interpolated.
pub fn value_noise(width: usize, height: usize, cell: f64, seed: u64) -> Vec<f64> {
    let gw = (width as f64 / cell).ceil() as usize + 2;
    let gh = (height as f64 / cell).ceil() as usize + 2;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let grid: Vec<f64> = (0..gw * gh).map(|_| rng.gen::<f64>()).collect();
    let mut out = Vec::with_capacity(width * height);
    for y in 0..height {
        let fy = y as f64 / cell;
        let (iy, ty) = (fy.floor() as usize, fy.fract());
        for x in 0..width {
            let fx = x as f64 / cell;
            let (ix, tx) = (fx.floor() as usize, fx.fract());
            let g = |i: usize, j: usize| grid[j * gw + i];
            let top = g(ix, iy) * (1.0 - tx) + g(ix + 1, iy) * tx;
            let bot = g(ix, iy + 1) * (1.0 - tx) + g(ix + 1, iy + 1) * tx;
            out.push(top * (1.0 - ty) + bot * ty);
        }
    }
    out
}

/// HSV with all components in `[0, 1]` to RGB.
pub fn hsv_to_rgb(h: f64, s: f64, v: f64) -> [f64; 3] {
    let h6 = (h.rem_euclid(1.0)) * 6.0;
    let i = h6.floor() as usize % 6;
    let f = h6 - h6.floor();
    let (p, q, t) = (v * (1.0 - s), v * (1.0 - s * f), v * (1.0 - s * (1.0 - f)));
    match i {
        0 => [v, t, p],
        1 => [q, v, p],
        2 => [p, v, t],
        3 => [p, q, v],
        4 => [t, p, v],
        _ => [v, p, q],
    }
}

fn mask_image(width: usize, height: usize, inside: impl Fn(f64, f64) -> bool) -> RasterImage {
    RasterImage::from_fn(width, height, 1, |x, y, _| {
        if inside(x as f64, y as f64) {
            1.0
        } else {
            0.0
        }
    })
}

/// A glowing ring: the text is an annulus, the style a bright core fading
/// into a magenta halo over a dark, faintly mottled background.
pub fn neon_ring(size: usize) -> (RasterImage, RasterImage) {
    let s = size as f64;
    let (c, radius, half) = ((s - 1.0) / 2.0, 0.29 * s, 0.052 * s);
    let ring = move |x: f64, y: f64| ((x - c).hypot(y - c) - radius).abs();
    let text = mask_image(size, size, |x, y| ring(x, y) <= half);
    let grain = value_noise(size, size, 3.0, 11);
    let haze = value_noise(size, size, 12.0, 12);
    let style = RasterImage::from_fn(size, size, 3, |x, y, ch| {
        let d = ring(x as f64, y as f64);
        let i = y * size + x;
        let core = [1.0, 0.92, 1.0];
        let glow = [0.95, 0.2, 0.75];
        let bg = [0.03, 0.02, 0.1];
        let v = if d <= half {
            let t = d / half;
            core[ch] * (1.0 - t * t) + glow[ch] * t * t
        } else {
            let fall = (-(d - half) / (0.06 * s)).exp();
            glow[ch] * fall + bg[ch] * (1.0 - fall) + 0.05 * (haze[i] - 0.5)
        };
        v + 0.04 * (grain[i] - 0.5)
    });
    (text, style)
}

fn h_glyph(size: usize) -> impl Fn(f64, f64) -> bool {
    let s = size as f64;
    move |x: f64, y: f64| {
        let (x, y) = (x / s, y / s);
        let stem = |x0: f64| (x0..=x0 + 0.14).contains(&x) && (0.16..=0.84).contains(&y);
        let bar = (0.22..=0.78).contains(&x) && (0.44..=0.56).contains(&y);
        stem(0.22) || stem(0.64) || bar
    }
}

/// An "H" whose color hue is a monotone function of normalized distance.
pub fn hue_by_distance(size: usize) -> Result<(RasterImage, RasterImage)> {
    let text = mask_image(size, size, h_glyph(size));
    let df = DistanceField::from_mask(&binarize(&text, 0.5)?, DEFAULT_OUTLIER_FRACTION)?;
    let max = df.max_distance();
    let style = RasterImage::from_fn(size, size, 3, |x, y, ch| {
        let t = df.at(x, y) / max;
        hsv_to_rgb(0.8 * t, 0.9, 0.95)[ch]
    });
    Ok((text, style))
}

/// Two full-width horizontal stripes with two textures split along a distance
/// level set: a smooth periodic pattern over the stripes and their halo
/// (normalized distance up to 2), fine-grained noise beyond.
pub fn two_texture(size: usize) -> Result<(RasterImage, RasterImage)> {
    let s = size as f64;
    let text = mask_image(size, size, |_, y| {
        let y = y / s;
        (y - 0.3).abs() <= 0.04 || (y - 0.7).abs() <= 0.04
    });
    let df = DistanceField::from_mask(&binarize(&text, 0.5)?, DEFAULT_OUTLIER_FRACTION)?;
    let tile = value_noise(6, 6, 2.0, 21);
    let fine = value_noise(size, size, 1.5, 22);
    let style = RasterImage::from_fn(size, size, 3, |x, y, ch| {
        if df.at(x, y) <= 2.0 {
            [0.9, 0.6, 0.2][ch] * (0.5 + 0.5 * tile[(y % 6) * 6 + x % 6])
        } else {
            [0.2, 0.4, 0.8][ch] * (0.2 + 0.8 * fine[y * size + x])
        }
    });
    Ok((text, style))
}

/// Horizontal bar of half-width `w` (thickness `2w + 1`), length `16w`, with
/// `4w` of padding on every side.
pub fn bar(w: usize) -> RasterImage {
    let pad = 4 * w;
    let (len, thick) = (16 * w, 2 * w + 1);
    let (width, height) = (len + 2 * pad, thick + 2 * pad);
    RasterImage::from_fn(width, height, 1, |x, y, _| {
        let inside = (pad..pad + len).contains(&x) && (pad..pad + thick).contains(&y);
        inside as u8 as f64
    })
}

/// Block-letter glyph `ch` (one of `L`, `T`, `O`, `H`, `E`) on a `size` square.
pub fn block_glyph(ch: char, size: usize) -> RasterImage {
    let s = size as f64;
    let t = 0.16;
    let inside = move |x: f64, y: f64| -> bool {
        let (x, y) = (x / s, y / s);
        let r = |x0: f64, x1: f64, y0: f64, y1: f64| (x0..=x1).contains(&x) && (y0..=y1).contains(&y);
        match ch {
            'L' => r(0.2, 0.2 + t, 0.15, 0.85) || r(0.2, 0.8, 0.85 - t, 0.85),
            'T' => r(0.15, 0.85, 0.15, 0.15 + t) || r(0.5 - t / 2.0, 0.5 + t / 2.0, 0.15, 0.85),
            'O' => {
                let d = (x - 0.5).hypot(y - 0.5);
                (0.2..=0.2 + t).contains(&d) || (0.34 - t / 2.0..=0.34 + t / 2.0).contains(&d)
            }
            'E' => {
                r(0.2, 0.2 + t, 0.15, 0.85)
                    || r(0.2, 0.8, 0.15, 0.15 + t)
                    || r(0.2, 0.7, 0.5 - t / 2.0, 0.5 + t / 2.0)
                    || r(0.2, 0.8, 0.85 - t, 0.85)
            }
            _ => h_glyph(size)(x * s, y * s),
        }
    };
    mask_image(size, size, inside)
}
