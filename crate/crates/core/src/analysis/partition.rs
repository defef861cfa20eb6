use std::fmt;
use std::str::FromStr;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::error::{Result, TexfxError};
use crate::geometry::DistanceField;

/// How pixels are split into classes.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum PartitionMode {
    Random,
    Grid,
    Angle,
    Ring,
    Distance,
}

impl PartitionMode {
    pub const ALL: [PartitionMode; 5] = [
        PartitionMode::Random,
        PartitionMode::Grid,
        PartitionMode::Angle,
        PartitionMode::Ring,
        PartitionMode::Distance,
    ];

    pub fn name(self) -> &'static str {
        match self {
            PartitionMode::Random => "random",
            PartitionMode::Grid => "grid",
            PartitionMode::Angle => "angle",
            PartitionMode::Ring => "ring",
            PartitionMode::Distance => "distance",
        }
    }
}

impl fmt::Display for PartitionMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for PartitionMode {
    type Err = TexfxError;

    fn from_str(s: &str) -> Result<Self> {
        PartitionMode::ALL
            .into_iter()
            .find(|m| m.name() == s.trim())
            .ok_or_else(|| {
                TexfxError::InvalidArgument(format!(
                    "unknown partition mode {s:?} (expected random, grid, angle, ring or distance)"
                ))
            })
    }
}

/// A label in `0..n` per pixel, raster order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PartitionMap {
    pub mode: PartitionMode,
    pub n: usize,
    pub width: usize,
    pub height: usize,
    pub label: Vec<u16>,
}

impl PartitionMap {
    pub fn counts(&self) -> Vec<usize> {
        let mut c = vec![0; self.n];
        for &l in &self.label {
            c[l as usize] += 1;
        }
        c
    }
}

/// Splits the domain into `n` equal-population classes by sorting pixels on
/// the mode's scalar key (ties by raster index) and cutting at quantiles.
pub fn make_partition(
    mode: PartitionMode,
    width: usize,
    height: usize,
    distance: Option<&DistanceField>,
    n: usize,
    seed: u64,
) -> Result<PartitionMap> {
    let total = width * height;
    if n < 2 || n > total || n > u16::MAX as usize {
        return Err(TexfxError::InvalidArgument(format!(
            "cannot split {total} pixels into {n} partitions"
        )));
    }
    let (cx, cy) = ((width as f64 - 1.0) / 2.0, (height as f64 - 1.0) / 2.0);
    let order: Vec<usize> = match mode {
        PartitionMode::Random => {
            let mut idx: Vec<usize> = (0..total).collect();
            idx.shuffle(&mut ChaCha8Rng::seed_from_u64(seed));
            idx
        }
        _ => {
            let key: Vec<f64> = match mode {
                PartitionMode::Grid => {
                    let g = (n as f64).sqrt().ceil() as usize;
                    (0..total)
                        .map(|i| {
                            let (x, y) = (i % width, i / width);
                            ((y * g / height) * g + x * g / width) as f64
                        })
                        .collect()
                }
                PartitionMode::Angle => (0..total)
                    .map(|i| ((i / width) as f64 - cy).atan2((i % width) as f64 - cx))
                    .collect(),
                PartitionMode::Ring => (0..total)
                    .map(|i| ((i / width) as f64 - cy).hypot((i % width) as f64 - cx))
                    .collect(),
                PartitionMode::Distance => {
                    let df = distance.ok_or(TexfxError::MissingDistanceField)?;
                    if (df.width, df.height) != (width, height) {
                        return Err(TexfxError::SizeMismatch(format!(
                            "distance field {}x{} vs {width}x{height}",
                            df.width, df.height
                        )));
                    }
                    df.dist.clone()
                }
                PartitionMode::Random => unreachable!(),
            };
            let mut idx: Vec<usize> = (0..total).collect();
            idx.sort_by(|&a, &b| key[a].total_cmp(&key[b]).then(a.cmp(&b)));
            idx
        }
    };
    let mut label = vec![0u16; total];
    for (rank, &i) in order.iter().enumerate() {
        label[i] = (rank * n / total) as u16;
    }
    Ok(PartitionMap {
        mode,
        n,
        width,
        height,
        label,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn populations_are_equal_within_one() {
        for mode in [PartitionMode::Random, PartitionMode::Grid, PartitionMode::Angle, PartitionMode::Ring] {
            let p = make_partition(mode, 37, 23, None, 16, 3).unwrap();
            let c = p.counts();
            let (lo, hi) = (c.iter().min().unwrap(), c.iter().max().unwrap());
            assert!(hi - lo <= 1, "{mode}: {c:?}");
        }
    }

    #[test]
    fn random_256_square_is_exact() {
        let p = make_partition(PartitionMode::Random, 256, 256, None, 16, 9).unwrap();
        assert!(p.counts().iter().all(|&c| c == 4096));
    }

    #[test]
    fn ring_two_way_is_inner_disk() {
        let p = make_partition(PartitionMode::Ring, 20, 20, None, 2, 0).unwrap();
        let c = 9.5;
        let mut max_inner: f64 = 0.0;
        let mut min_outer = f64::MAX;
        for i in 0..400 {
            let r = ((i % 20) as f64 - c).hypot((i / 20) as f64 - c);
            if p.label[i] == 0 {
                max_inner = max_inner.max(r);
            } else {
                min_outer = min_outer.min(r);
            }
        }
        assert!(max_inner <= min_outer);
        assert_eq!(p.counts(), vec![200, 200]);
    }

    #[test]
    fn distance_mode_requires_field() {
        assert!(matches!(
            make_partition(PartitionMode::Distance, 4, 4, None, 2, 0),
            Err(TexfxError::MissingDistanceField)
        ));
    }

    #[test]
    fn parses_names() {
        assert_eq!("ring".parse::<PartitionMode>().unwrap(), PartitionMode::Ring);
        assert!("spiral".parse::<PartitionMode>().is_err());
    }
}
