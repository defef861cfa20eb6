//! Skeleton and contour extraction.

use super::mask::TextMask;

/// Skeleton and contour of a text region, both as raster-order pixel indices.
#[derive(Debug, Clone)]
pub struct SkeletonContour {
    pub width: usize,
    pub height: usize,
    pub skeleton: Vec<usize>,
    pub contour: Vec<usize>,
}

impl SkeletonContour {
    pub fn contour_count(&self) -> usize {
        self.contour.len()
    }
}

/// Guo-Hall thinning followed by a 4-adjacency contour scan. Pixels outside
/// the image count as background.
pub fn skeletonize(mask: &TextMask) -> SkeletonContour {
    let (w, h) = (mask.width(), mask.height());
    let skel = guo_hall(w, h, mask.as_slice());
    let skeleton = (0..w * h).filter(|&i| skel[i]).collect();
    let contour = contour_pixels(mask);
    SkeletonContour {
        width: w,
        height: h,
        skeleton,
        contour,
    }
}

/// Inside pixels with at least one 4-neighbor outside the region.
pub fn contour_pixels(mask: &TextMask) -> Vec<usize> {
    let (w, h) = (mask.width(), mask.height());
    let at = |x: isize, y: isize| -> bool {
        x >= 0
            && y >= 0
            && (x as usize) < w
            && (y as usize) < h
            && mask.contains(x as usize, y as usize)
    };
    let mut out = Vec::new();
    for y in 0..h as isize {
        for x in 0..w as isize {
            if at(x, y) && (!at(x - 1, y) || !at(x + 1, y) || !at(x, y - 1) || !at(x, y + 1)) {
                out.push(y as usize * w + x as usize);
            }
        }
    }
    out
}

/// Two-subiteration thinning (Guo & Hall, 1989). Preserves 8-connectivity and
/// never removes an isolated pixel.
pub fn guo_hall(width: usize, height: usize, inside: &[bool]) -> Vec<bool> {
    let mut img = inside.to_vec();
    let mut active: Vec<usize> = (0..width * height).filter(|&i| img[i]).collect();
    let mut doomed = Vec::new();
    loop {
        let mut changed = false;
        for pass in 0..2 {
            doomed.clear();
            for &i in &active {
                if img[i] && removable(&img, width, height, i, pass) {
                    doomed.push(i);
                }
            }
            for &i in &doomed {
                img[i] = false;
            }
            changed |= !doomed.is_empty();
        }
        if !changed {
            break;
        }
        active.retain(|&i| img[i]);
    }
    img
}

#[inline]
fn removable(img: &[bool], w: usize, h: usize, i: usize, pass: usize) -> bool {
    let (x, y) = ((i % w) as isize, (i / w) as isize);
    let g = |dx: isize, dy: isize| -> u8 {
        let (nx, ny) = (x + dx, y + dy);
        (nx >= 0 && ny >= 0 && (nx as usize) < w && (ny as usize) < h && img[ny as usize * w + nx as usize])
            as u8
    };
    // Clockwise from north.
    let p2 = g(0, -1);
    let p3 = g(1, -1);
    let p4 = g(1, 0);
    let p5 = g(1, 1);
    let p6 = g(0, 1);
    let p7 = g(-1, 1);
    let p8 = g(-1, 0);
    let p9 = g(-1, -1);

    let c = ((1 - p2) & (p3 | p4))
        + ((1 - p4) & (p5 | p6))
        + ((1 - p6) & (p7 | p8))
        + ((1 - p8) & (p9 | p2));
    if c != 1 {
        return false;
    }
    let n1 = (p9 | p2) + (p3 | p4) + (p5 | p6) + (p7 | p8);
    let n2 = (p2 | p3) + (p4 | p5) + (p6 | p7) + (p8 | p9);
    let n = n1.min(n2);
    if !(2..=3).contains(&n) {
        return false;
    }
    let m = if pass == 0 {
        (p6 | p7 | (1 - p9)) & p8
    } else {
        (p2 | p3 | (1 - p5)) & p4
    };
    m == 0
}
