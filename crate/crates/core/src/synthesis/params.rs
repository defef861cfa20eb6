use serde::Serialize;

use crate::error::{Result, TexfxError};
use crate::geometry::DEFAULT_OUTLIER_FRACTION;

/// Appearance model: single-scale matching, or posterior-weighted joint scales.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    Baseline,
    Full,
}

impl std::str::FromStr for Mode {
    type Err = TexfxError;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "baseline" => Ok(Mode::Baseline),
            "full" => Ok(Mode::Full),
            other => Err(TexfxError::InvalidArgument(format!(
                "mode must be baseline or full, got {other:?}"
            ))),
        }
    }
}

/// Every tunable of a transfer run.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SynthesisParams {
    /// Patch side `m` (odd).
    pub patch_size: usize,
    /// Number of scales `L` examined by scale detection.
    pub scales: usize,
    /// Downsample factor `s` between detection scales.
    pub scale_factor: f64,
    pub lambda1: f64,
    pub lambda2: f64,
    pub lambda3: f64,
    pub omega: f64,
    pub pyramid_depth: usize,
    pub coarsest: usize,
    /// Search/vote rounds per pyramid level.
    pub iterations: usize,
    pub seed: u64,
    pub mode: Mode,
    pub outlier_fraction: f64,
    /// Luma threshold that separates text from background.
    pub threshold: f64,
    /// Random candidates per pixel in distribution-seeded initialization.
    pub init_candidates: usize,
}

impl Default for SynthesisParams {
    fn default() -> Self {
        Self {
            patch_size: 5,
            scales: 5,
            scale_factor: 2.0,
            lambda1: 0.01,
            lambda2: 0.005,
            lambda3: 10.0,
            omega: 0.3,
            pyramid_depth: 10,
            coarsest: 32,
            iterations: 10,
            seed: 0,
            mode: Mode::Full,
            outlier_fraction: DEFAULT_OUTLIER_FRACTION,
            threshold: 0.5,
            init_candidates: 20,
        }
    }
}

impl SynthesisParams {
    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(TexfxError::InvalidArgument(msg));
        if self.patch_size < 3 || self.patch_size % 2 == 0 {
            return bad(format!("patch size must be odd and >= 3, got {}", self.patch_size));
        }
        if self.scales == 0 {
            return bad("at least one scale is required".into());
        }
        if self.pyramid_depth == 0 {
            return bad("pyramid depth must be >= 1".into());
        }
        if self.scales > self.pyramid_depth {
            return bad(format!(
                "scales ({}) must not exceed the pyramid depth ({})",
                self.scales, self.pyramid_depth
            ));
        }
        for (name, v) in [
            ("lambda1", self.lambda1),
            ("lambda2", self.lambda2),
            ("lambda3", self.lambda3),
        ] {
            if !(v >= 0.0) || !v.is_finite() {
                return bad(format!("{name} must be a finite value >= 0, got {v}"));
            }
        }
        if !(self.omega > 0.0) || !self.omega.is_finite() {
            return bad(format!("omega must be positive, got {}", self.omega));
        }
        if !(self.scale_factor > 1.0) {
            return bad(format!("scale factor must exceed 1, got {}", self.scale_factor));
        }
        if self.coarsest < self.patch_size {
            return bad(format!(
                "coarsest size {} is smaller than the patch",
                self.coarsest
            ));
        }
        if !(self.outlier_fraction >= 0.0 && self.outlier_fraction <= 1.0) {
            return bad(format!(
                "outlier fraction must lie in [0, 1], got {}",
                self.outlier_fraction
            ));
        }
        if !(self.threshold > 0.0 && self.threshold < 1.0) {
            return bad(format!("threshold must lie in (0, 1), got {}", self.threshold));
        }
        if self.init_candidates == 0 {
            return bad("init needs at least one candidate per pixel".into());
        }
        Ok(())
    }
}
