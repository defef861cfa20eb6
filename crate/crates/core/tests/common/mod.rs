//! Helpers shared by the scale and acceptance suites.
#![allow(dead_code)]

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use texfx::synthetic::value_noise;
use texfx::{downsample, RasterImage};

pub fn noise(w: usize, h: usize, ch: usize, seed: u64) -> RasterImage {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    RasterImage::from_fn(w, h, ch, |_, _, _| rng.gen())
}

/// Block noise: one uniform value per `b x b` block and channel.
pub fn block_noise(size: usize, b: usize, ch: usize, seed: u64) -> RasterImage {
    let n = size.div_ceil(b);
    let vals = noise(n, n, ch, seed);
    RasterImage::from_fn(size, size, ch, |x, y, c| vals.get(x / b, y / b, c))
}

/// Pair with blocky texture at a seed-dependent grain and contrast.
pub fn mixed_pair(size: usize, seed: u64) -> (RasterImage, RasterImage) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let grain = [1, 2, 4, 8][rng.gen_range(0..4)];
    let amp: f64 = rng.gen_range(0.3..1.0);
    let t = value_noise(size, size, 6.0, seed * 3 + 1);
    let tex = block_noise(size, grain, 3, seed * 3 + 2);
    let text = RasterImage::from_fn(size, size, 1, |x, y, _| (t[y * size + x] > 0.5) as u8 as f64);
    let style = RasterImage::from_fn(size, size, 3, |x, y, c| {
        let flat = t[y * size + x] < 0.35;
        if flat { 0.2 } else { 0.5 + amp * (tex.get(x, y, c) - 0.5) }
    });
    (text, style)
}

pub fn loop_ssd(a: &RasterImage, (ax, ay): (usize, usize), (bx, by): (usize, usize), m: usize) -> f64 {
    let half = m / 2;
    let mut sum = 0.0;
    for dy in 0..m {
        for dx in 0..m {
            for c in 0..a.channels() {
                let d = a.get(ax + dx - half, ay + dy - half, c) - a.get(bx + dx - half, by + dy - half, c);
                sum += d * d;
            }
        }
    }
    sum / (m * m * a.channels()) as f64
}

/// Exhaustive scan over all centers at Chebyshev distance >= m.
pub fn oracle_match(text: &RasterImage, style: &RasterImage, m: usize, q: (usize, usize)) -> Option<(usize, usize, f64)> {
    let half = m / 2;
    let mut best: Option<(usize, usize, f64)> = None;
    for y in half..text.height() - half {
        for x in half..text.width() - half {
            if x.abs_diff(q.0).max(y.abs_diff(q.1)) < m {
                continue;
            }
            let d = loop_ssd(text, q, (x, y), m) + loop_ssd(style, q, (x, y), m);
            if best.map_or(true, |b| d < b.2) {
                best = Some((x, y, d));
            }
        }
    }
    best
}

pub fn patch_sigma(style: &RasterImage, (cx, cy): (usize, usize), m: usize) -> f64 {
    let half = m / 2;
    let mut v = Vec::new();
    for y in cy - half..=cy + half {
        for x in cx - half..=cx + half {
            for c in 0..style.channels() {
                v.push(style.get(x, y, c));
            }
        }
    }
    let mean = v.iter().sum::<f64>() / v.len() as f64;
    (v.iter().map(|a| (a - mean).powi(2)).sum::<f64>() / v.len() as f64).sqrt() / 2.0
}

/// Scale detection written out directly: roughest scale first, each still-active
/// pixel is matched exhaustively and retires when the filter test fails.
pub fn algorithm_one(text: &RasterImage, style: &RasterImage, levels: usize, m: usize, omega: f64) -> Vec<u8> {
    let (w, h) = text.dims();
    let half = m / 2;
    let mut scal = vec![1u8; w * h];
    let mut active: Vec<bool> = vec![true; w * h];
    for l in (2..=levels).rev() {
        let f = 2f64.powi(l as i32 - 1);
        let (t, s) = (downsample(text, f).unwrap(), downsample(style, f).unwrap());
        for q in 0..w * h {
            if !active[q] {
                continue;
            }
            let map = |v: usize, n: usize| ((v as f64 / f).round() as usize).min(n - 1).clamp(half, n - 1 - half);
            let c = (map(q % w, t.width()), map(q / w, t.height()));
            let settle = match oracle_match(&t, &s, m, c) {
                None => true,
                Some((_, _, d)) => !(patch_sigma(&s, c, m) + d.sqrt() > omega),
            };
            if settle {
                scal[q] = l as u8;
                active[q] = false;
            }
        }
    }
    scal
}
