use crate::error::{Result, TexfxError};

/// Target-to-source correspondences with per-source usage counts.
///
/// `nnf[p]` is the raster index of a valid source patch center, `cost[p]` the
/// cached appearance plus weighted distribution cost of that match, and
/// `usage[q]` the number of target pixels currently mapped to `q`.
#[derive(Debug, Clone, PartialEq)]
pub struct NNField {
    pub width: usize,
    pub height: usize,
    pub source_width: usize,
    pub source_height: usize,
    pub nnf: Vec<usize>,
    pub cost: Vec<f64>,
    pub usage: Vec<u32>,
}

impl NNField {
    /// Field from explicit source indices; costs start at zero.
    pub fn from_mapping(
        width: usize,
        height: usize,
        source_width: usize,
        source_height: usize,
        nnf: Vec<usize>,
    ) -> Result<Self> {
        if nnf.len() != width * height {
            return Err(TexfxError::SizeMismatch(format!(
                "{} correspondences for a {width}x{height} target",
                nnf.len()
            )));
        }
        if let Some(&q) = nnf.iter().find(|&&q| q >= source_width * source_height) {
            return Err(TexfxError::InvalidArgument(format!(
                "source index {q} outside {source_width}x{source_height}"
            )));
        }
        let mut field = Self {
            width,
            height,
            source_width,
            source_height,
            cost: vec![0.0; nnf.len()],
            usage: vec![0; source_width * source_height],
            nnf,
        };
        field.rebuild_usage();
        Ok(field)
    }

    pub fn len(&self) -> usize {
        self.nnf.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nnf.is_empty()
    }

    /// Source `(x, y)` matched by target pixel `p`.
    #[inline]
    pub fn source_of(&self, p: usize) -> (usize, usize) {
        let q = self.nnf[p];
        (q % self.source_width, q / self.source_width)
    }

    /// Recounts usage from scratch.
    pub fn rebuild_usage(&mut self) {
        self.usage.iter_mut().for_each(|u| *u = 0);
        for &q in &self.nnf {
            self.usage[q] += 1;
        }
    }

    /// Moves target pixel `p` to source `q`, keeping usage exact.
    #[inline]
    pub fn reassign(&mut self, p: usize, q: usize, cost: f64) {
        let old = self.nnf[p];
        self.usage[old] -= 1;
        self.usage[q] += 1;
        self.nnf[p] = q;
        self.cost[p] = cost;
    }

    pub fn usage_total(&self) -> u64 {
        self.usage.iter().map(|&u| u as u64).sum()
    }

    /// `sum_p |Phi(nnf(p))|`.
    pub fn psycho_sum(&self) -> u64 {
        self.nnf.iter().map(|&q| self.usage[q] as u64).sum()
    }

    /// `sum_q |Phi(q)|^2`.
    pub fn usage_square_sum(&self) -> u64 {
        self.usage.iter().map(|&u| (u as u64) * (u as u64)).sum()
    }

    /// Population variance of usage over the valid source centers for patch
    /// side `m`.
    pub fn usage_variance(&self, m: usize) -> f64 {
        let half = m / 2;
        let (sw, sh) = (self.source_width, self.source_height);
        let mut n = 0.0;
        let mut sum = 0.0;
        let mut sq = 0.0;
        for y in half..sh - half {
            for x in half..sw - half {
                let u = self.usage[y * sw + x] as f64;
                n += 1.0;
                sum += u;
                sq += u * u;
            }
        }
        let mean = sum / n;
        sq / n - mean * mean
    }
}
