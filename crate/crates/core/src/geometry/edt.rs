//! Exact Euclidean distance transform with nearest-member indices.
//!
//! Felzenszwalb & Huttenlocher: a column pass finds the nearest member row in
//! each column, then a row pass takes the lower envelope of parabolas.
//! Squared distances stay integral so results are exact and independent of
//! how rows are split across workers.

use rayon::prelude::*;

use crate::error::{Result, TexfxError};

#[derive(Debug, Clone)]
pub struct DistanceMap {
    pub width: usize,
    pub height: usize,
    /// Euclidean distance to the nearest member.
    pub dist: Vec<f64>,
    /// Raster index of a nearest member.
    pub nearest: Vec<usize>,
}

/// Distance from every pixel of a `width x height` domain to the nearest of
/// `points` (raster indices).
pub fn distance_to_set(width: usize, height: usize, points: &[usize]) -> Result<DistanceMap> {
    if points.is_empty() {
        return Err(TexfxError::EmptySet);
    }
    let n = width * height;
    let mut member = vec![false; n];
    for &p in points {
        if p >= n {
            return Err(TexfxError::InvalidArgument(format!(
                "point index {p} outside {width}x{height}"
            )));
        }
        member[p] = true;
    }

    // Column pass: nearest member row per (x, y), or None.
    let mut col_row: Vec<Option<u32>> = vec![None; n];
    for x in 0..width {
        let mut last: Option<usize> = None;
        for y in 0..height {
            if member[y * width + x] {
                last = Some(y);
            }
            col_row[y * width + x] = last.map(|v| v as u32);
        }
        let mut next: Option<usize> = None;
        for y in (0..height).rev() {
            if member[y * width + x] {
                next = Some(y);
            }
            let i = y * width + x;
            if let Some(ny) = next {
                let better = match col_row[i] {
                    Some(py) => ny - y < y - py as usize,
                    None => true,
                };
                if better {
                    col_row[i] = Some(ny as u32);
                }
            }
        }
    }

    let mut dist = vec![0.0; n];
    let mut nearest = vec![0usize; n];
    dist.par_chunks_mut(width)
        .zip(nearest.par_chunks_mut(width))
        .enumerate()
        .for_each_init(
            || RowScratch::new(width),
            |scratch, (y, (drow, nrow))| {
                scratch.envelope(y, width, &col_row[y * width..(y + 1) * width], drow, nrow);
            },
        );
    Ok(DistanceMap {
        width,
        height,
        dist,
        nearest,
    })
}

struct RowScratch {
    f: Vec<i64>,
    v: Vec<usize>,
    z: Vec<f64>,
}

impl RowScratch {
    fn new(width: usize) -> Self {
        Self {
            f: vec![0; width],
            v: vec![0; width],
            z: vec![0.0; width + 1],
        }
    }

    fn envelope(
        &mut self,
        y: usize,
        width: usize,
        col_row: &[Option<u32>],
        dist: &mut [f64],
        nearest: &mut [usize],
    ) {
        let mut k: isize = -1;
        for q in 0..width {
            let Some(row) = col_row[q] else { continue };
            let dy = row as i64 - y as i64;
            self.f[q] = dy * dy;
            let fq = (self.f[q] + (q * q) as i64) as f64;
            while k >= 0 {
                let p = self.v[k as usize];
                let fp = (self.f[p] + (p * p) as i64) as f64;
                let s = (fq - fp) / (2.0 * (q as f64 - p as f64));
                if s <= self.z[k as usize] {
                    k -= 1;
                } else {
                    break;
                }
            }
            k += 1;
            let ku = k as usize;
            self.v[ku] = q;
            if ku == 0 {
                self.z[0] = f64::NEG_INFINITY;
            } else {
                let p = self.v[ku - 1];
                let fp = (self.f[p] + (p * p) as i64) as f64;
                self.z[ku] = (fq - fp) / (2.0 * (q as f64 - p as f64));
            }
            self.z[ku + 1] = f64::INFINITY;
        }
        // The column pass always leaves at least one finite column: the set is
        // nonempty and every column containing a member is finite at every row.
        let mut j = 0usize;
        for x in 0..width {
            while self.z[j + 1] < x as f64 {
                j += 1;
            }
            let src = self.v[j];
            let dx = x as i64 - src as i64;
            let d2 = dx * dx + self.f[src];
            dist[x] = (d2 as f64).sqrt();
            let row = col_row[src].expect("envelope columns are finite") as usize;
            nearest[x] = row * width + src;
        }
    }
}
