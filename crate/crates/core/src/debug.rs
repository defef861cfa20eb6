//! Optional visual dumps of intermediate statistics.

use std::fs;
use std::path::{Path, PathBuf};

use crate::error::{Result, TexfxError};
use crate::geometry::DistanceField;
use crate::image::{save_png, RasterImage};
use crate::scale::ScaleMap;
use crate::synthesis::{SourceContext, TransferResult};
use crate::synthetic::hsv_to_rgb;

/// Normalized distance as color: blue at the skeleton through red at the
/// field maximum.
pub fn distance_false_color(df: &DistanceField) -> RasterImage {
    let max = df.max_distance().max(f64::MIN_POSITIVE);
    RasterImage::from_fn(df.width, df.height, 3, |x, y, c| {
        let t = (df.at(x, y) / max).clamp(0.0, 1.0);
        hsv_to_rgb(0.66 * (1.0 - t), 1.0, 1.0)[c]
    })
}

/// Scale map as gray levels, scale 1 black and scale `L` white.
pub fn scale_map_image(sm: &ScaleMap) -> RasterImage {
    let span = (sm.levels.max(2) - 1) as f64;
    RasterImage::from_fn(sm.width, sm.height, 1, |x, y, _| (sm.at(x, y) - 1) as f64 / span)
}

fn write_json<T: serde::Serialize>(path: &Path, value: &T) -> Result<()> {
    let text = serde_json::to_string_pretty(value).map_err(|e| TexfxError::Encode {
        path: path.to_path_buf(),
        message: e.to_string(),
    })?;
    fs::write(path, text + "\n").map_err(|source| TexfxError::Io {
        path: path.to_path_buf(),
        source,
    })
}

fn ensure_dir(dir: &Path) -> Result<()> {
    fs::create_dir_all(dir).map_err(|source| TexfxError::Io {
        path: dir.to_path_buf(),
        source,
    })
}

/// Writes source statistics into `dir`; returns the files written.
pub fn dump_source(dir: &Path, src: &SourceContext) -> Result<Vec<PathBuf>> {
    ensure_dir(dir)?;
    let files = [
        dir.join("source_distance.png"),
        dir.join("radius_regression.json"),
        dir.join("scale_map.png"),
        dir.join("posterior.json"),
    ];
    save_png(&distance_false_color(&src.distance), &files[0])?;
    write_json(&files[1], &src.radius_samples)?;
    save_png(&scale_map_image(&src.scale_map), &files[2])?;
    write_json(&files[3], &src.posterior.posterior_rows())?;
    Ok(files.to_vec())
}

/// Writes target-side statistics into `dir`.
pub fn dump_target(dir: &Path, result: &TransferResult) -> Result<Vec<PathBuf>> {
    ensure_dir(dir)?;
    let path = dir.join("target_distance.png");
    save_png(&distance_false_color(&result.target_distance), &path)?;
    Ok(vec![path])
}
