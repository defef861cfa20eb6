//! Dense float rasters, PNG I/O, area resampling and patch distances.

use std::path::Path;

use image::{ColorType, DynamicImage, GrayImage, ImageReader, RgbImage};

use crate::error::{Result, TexfxError};

/// A `width x height` image with 1 or 3 interleaved channels in `[0, 1]`.
#[derive(Debug, Clone, PartialEq)]
pub struct RasterImage {
    width: usize,
    height: usize,
    channels: usize,
    data: Vec<f64>,
}

impl RasterImage {
    pub fn new(width: usize, height: usize, channels: usize, data: Vec<f64>) -> Result<Self> {
        if width == 0 || height == 0 {
            return Err(TexfxError::InvalidArgument(format!(
                "image dimensions must be positive, got {width}x{height}"
            )));
        }
        if channels != 1 && channels != 3 {
            return Err(TexfxError::InvalidArgument(format!(
                "images carry 1 or 3 channels, got {channels}"
            )));
        }
        if data.len() != width * height * channels {
            return Err(TexfxError::InvalidArgument(format!(
                "expected {} samples, got {}",
                width * height * channels,
                data.len()
            )));
        }
        if let Some(v) = data.iter().find(|v| !(0.0..=1.0).contains(*v)) {
            return Err(TexfxError::InvalidArgument(format!(
                "sample {v} outside [0, 1]"
            )));
        }
        Ok(Self {
            width,
            height,
            channels,
            data,
        })
    }

    /// Image filled with a single value (clamped into `[0, 1]`).
    pub fn filled(width: usize, height: usize, channels: usize, value: f64) -> Self {
        assert!(width > 0 && height > 0 && (channels == 1 || channels == 3));
        Self {
            width,
            height,
            channels,
            data: vec![value.clamp(0.0, 1.0); width * height * channels],
        }
    }

    /// Builds an image from `f(x, y, c)`; results are clamped into `[0, 1]`.
    pub fn from_fn(
        width: usize,
        height: usize,
        channels: usize,
        mut f: impl FnMut(usize, usize, usize) -> f64,
    ) -> Self {
        let mut img = Self::filled(width, height, channels, 0.0);
        for y in 0..height {
            for x in 0..width {
                for c in 0..channels {
                    img.set(x, y, c, f(x, y, c));
                }
            }
        }
        img
    }

    pub(crate) fn from_raw_unchecked(
        width: usize,
        height: usize,
        channels: usize,
        data: Vec<f64>,
    ) -> Self {
        debug_assert_eq!(data.len(), width * height * channels);
        Self {
            width,
            height,
            channels,
            data,
        }
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
    pub fn channels(&self) -> usize {
        self.channels
    }

    #[inline]
    pub fn dims(&self) -> (usize, usize) {
        (self.width, self.height)
    }

    #[inline]
    pub fn data(&self) -> &[f64] {
        &self.data
    }

    #[inline]
    pub fn get(&self, x: usize, y: usize, c: usize) -> f64 {
        self.data[(y * self.width + x) * self.channels + c]
    }

    /// Writes a sample, clamping it into `[0, 1]`.
    #[inline]
    pub fn set(&mut self, x: usize, y: usize, c: usize, v: f64) {
        let idx = (y * self.width + x) * self.channels + c;
        self.data[idx] = v.clamp(0.0, 1.0);
    }

    /// Per-pixel mean over channels.
    pub fn luma(&self) -> RasterImage {
        if self.channels == 1 {
            return self.clone();
        }
        let data = self
            .data
            .chunks_exact(self.channels)
            .map(|px| px.iter().sum::<f64>() / self.channels as f64)
            .collect();
        Self::from_raw_unchecked(self.width, self.height, 1, data)
    }

    /// Resamples to exactly `new_width x new_height` by area averaging.
    pub fn resize_area(&self, new_width: usize, new_height: usize) -> Result<RasterImage> {
        if new_width == 0 || new_height == 0 {
            return Err(TexfxError::InvalidArgument(
                "resampled dimensions must be positive".into(),
            ));
        }
        let data = resize_plane(
            &self.data,
            self.width,
            self.height,
            self.channels,
            new_width,
            new_height,
        );
        Ok(Self::from_raw_unchecked(
            new_width,
            new_height,
            self.channels,
            data.into_iter().map(|v| v.clamp(0.0, 1.0)).collect(),
        ))
    }
}

/// Loads an 8-bit grayscale or RGB PNG.
pub fn load_image(path: impl AsRef<Path>) -> Result<RasterImage> {
    let path = path.as_ref();
    if !path.exists() {
        return Err(TexfxError::FileNotFound {
            path: path.to_path_buf(),
        });
    }
    let reader = ImageReader::open(path)
        .map_err(|source| TexfxError::Io {
            path: path.to_path_buf(),
            source,
        })?
        .with_guessed_format()
        .map_err(|source| TexfxError::Io {
            path: path.to_path_buf(),
            source,
        })?;
    if reader.format() != Some(image::ImageFormat::Png) {
        return Err(TexfxError::Decode {
            path: path.to_path_buf(),
            message: "not a PNG file".into(),
        });
    }
    let decoded = reader.decode().map_err(|e| TexfxError::Decode {
        path: path.to_path_buf(),
        message: e.to_string(),
    })?;
    let (width, height) = (decoded.width() as usize, decoded.height() as usize);
    let (channels, bytes) = match decoded.color() {
        ColorType::L8 => (1, decoded.into_bytes()),
        ColorType::Rgb8 => (3, decoded.into_bytes()),
        other => {
            return Err(TexfxError::UnsupportedFormat {
                path: path.to_path_buf(),
                detail: format!("{other:?}; expected 8-bit gray or RGB"),
            })
        }
    };
    let data = bytes.iter().map(|&b| f64::from(b) / 255.0).collect();
    RasterImage::new(width, height, channels, data)
}

/// Writes an image as an 8-bit PNG (gray for 1 channel, RGB for 3).
pub fn save_png(img: &RasterImage, path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    let bytes: Vec<u8> = img.data.iter().map(|&v| to_byte(v)).collect();
    let (w, h) = (img.width as u32, img.height as u32);
    let dynimg = if img.channels == 1 {
        DynamicImage::ImageLuma8(GrayImage::from_raw(w, h, bytes).expect("buffer size"))
    } else {
        DynamicImage::ImageRgb8(RgbImage::from_raw(w, h, bytes).expect("buffer size"))
    };
    dynimg
        .save_with_format(path, image::ImageFormat::Png)
        .map_err(|e| match e {
            image::ImageError::IoError(source) => TexfxError::Io {
                path: path.to_path_buf(),
                source,
            },
            other => TexfxError::Encode {
                path: path.to_path_buf(),
                message: other.to_string(),
            },
        })
}

#[inline]
pub(crate) fn to_byte(v: f64) -> u8 {
    (v.clamp(0.0, 1.0) * 255.0).round() as u8
}

/// Shrinks by `factor`; output size is `round(size / factor)`.
pub fn downsample(img: &RasterImage, factor: f64) -> Result<RasterImage> {
    if !(factor > 1.0) || !factor.is_finite() {
        return Err(TexfxError::InvalidArgument(format!(
            "downsample factor must exceed 1, got {factor}"
        )));
    }
    let w = (img.width as f64 / factor).round() as usize;
    let h = (img.height as f64 / factor).round() as usize;
    if w == 0 || h == 0 {
        return Err(TexfxError::InvalidArgument(format!(
            "factor {factor} collapses {}x{} to zero size",
            img.width, img.height
        )));
    }
    img.resize_area(w, h)
}

/// Per-output-sample (source index, weight) taps for 1-D area resampling.
fn area_taps(n_in: usize, n_out: usize) -> Vec<Vec<(usize, f64)>> {
    let scale = n_in as f64 / n_out as f64;
    (0..n_out)
        .map(|i| {
            let lo = i as f64 * scale;
            let hi = (i + 1) as f64 * scale;
            let first = lo.floor() as usize;
            let last = (hi.ceil() as usize).min(n_in);
            (first..last)
                .filter_map(|j| {
                    let w = (hi.min((j + 1) as f64) - lo.max(j as f64)).max(0.0);
                    (w > 0.0).then_some((j, w))
                })
                .collect()
        })
        .collect()
}

/// Area resampling of an interleaved float plane. Values are not clamped, so
/// this also serves non-image fields such as distances.
///
/// Each output is `v0 + sum(w * (v - v0)) / sum(w)` with `v0` the first tap, so
/// constant inputs come out bit-exact.
pub(crate) fn resize_plane(
    data: &[f64],
    width: usize,
    height: usize,
    channels: usize,
    new_width: usize,
    new_height: usize,
) -> Vec<f64> {
    if new_width == width && new_height == height {
        return data.to_vec();
    }
    let xt = area_taps(width, new_width);
    let yt = area_taps(height, new_height);

    let mut rows = vec![0.0; new_width * height * channels];
    for y in 0..height {
        for (ox, taps) in xt.iter().enumerate() {
            for c in 0..channels {
                let at = |x: usize| data[(y * width + x) * channels + c];
                rows[(y * new_width + ox) * channels + c] = weighted(taps, at);
            }
        }
    }
    let mut out = vec![0.0; new_width * new_height * channels];
    for (oy, taps) in yt.iter().enumerate() {
        for x in 0..new_width {
            for c in 0..channels {
                let at = |y: usize| rows[(y * new_width + x) * channels + c];
                out[(oy * new_width + x) * channels + c] = weighted(taps, at);
            }
        }
    }
    out
}

#[inline]
fn weighted(taps: &[(usize, f64)], at: impl Fn(usize) -> f64) -> f64 {
    let v0 = at(taps[0].0);
    let mut wsum = 0.0;
    let mut acc = 0.0;
    for &(j, w) in taps {
        wsum += w;
        acc += w * (at(j) - v0);
    }
    v0 + acc / wsum
}

/// Patch center at a given scale. `scale` is 1-based, 1 being the finest.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct PatchCoord {
    pub x: usize,
    pub y: usize,
    pub scale: usize,
}

impl PatchCoord {
    pub fn new(x: usize, y: usize) -> Self {
        Self { x, y, scale: 1 }
    }

    pub fn at_scale(x: usize, y: usize, scale: usize) -> Self {
        Self { x, y, scale }
    }
}

/// Clamps a coordinate so an `m`-wide footprint centered there fits in `dim`.
#[inline]
pub fn clamp_center(v: usize, dim: usize, m: usize) -> usize {
    let half = m / 2;
    v.clamp(half, dim - 1 - half)
}

/// Mean squared per-channel difference of two `m x m` patches. Centers are
/// clamped so the footprint lies inside each image.
pub fn patch_ssd(
    a: &RasterImage,
    pa: PatchCoord,
    b: &RasterImage,
    pb: PatchCoord,
    m: usize,
) -> Result<f64> {
    if a.channels != b.channels {
        return Err(TexfxError::ChannelMismatch {
            left: a.channels,
            right: b.channels,
        });
    }
    if m == 0 || m % 2 == 0 {
        return Err(TexfxError::InvalidArgument(format!(
            "patch side must be odd, got {m}"
        )));
    }
    for img in [a, b] {
        if img.width < m || img.height < m {
            return Err(TexfxError::InvalidArgument(format!(
                "{}x{} image cannot hold a {m}x{m} patch",
                img.width, img.height
            )));
        }
    }
    let ax = clamp_center(pa.x.min(a.width - 1), a.width, m);
    let ay = clamp_center(pa.y.min(a.height - 1), a.height, m);
    let bx = clamp_center(pb.x.min(b.width - 1), b.width, m);
    let by = clamp_center(pb.y.min(b.height - 1), b.height, m);
    Ok(ssd_at(a, ax, ay, b, bx, by, m))
}

/// Mean SSD for centers already known to be valid.
#[inline]
pub(crate) fn ssd_at(
    a: &RasterImage,
    ax: usize,
    ay: usize,
    b: &RasterImage,
    bx: usize,
    by: usize,
    m: usize,
) -> f64 {
    let half = m / 2;
    let ch = a.channels;
    let row_len = m * ch;
    let mut sum = 0.0;
    for dy in 0..m {
        let ra = ((ay + dy - half) * a.width + ax - half) * ch;
        let rb = ((by + dy - half) * b.width + bx - half) * ch;
        let sa = &a.data[ra..ra + row_len];
        let sb = &b.data[rb..rb + row_len];
        for (u, v) in sa.iter().zip(sb) {
            let d = u - v;
            sum += d * d;
        }
    }
    sum / (m * m * ch) as f64
}

/// Population variance over every sample of the patch at a valid center.
pub(crate) fn patch_variance(img: &RasterImage, cx: usize, cy: usize, m: usize) -> f64 {
    let half = m / 2;
    let ch = img.channels;
    let n = (m * m * ch) as f64;
    let mut sum = 0.0;
    let mut sq = 0.0;
    for dy in 0..m {
        let r = ((cy + dy - half) * img.width + cx - half) * ch;
        for &v in &img.data[r..r + m * ch] {
            sum += v;
            sq += v * v;
        }
    }
    let mean = sum / n;
    (sq / n - mean * mean).max(0.0)
}

/// Peak signal-to-noise ratio in dB for images in `[0, 1]`.
pub fn psnr(a: &RasterImage, b: &RasterImage) -> Result<f64> {
    if a.dims() != b.dims() || a.channels != b.channels {
        return Err(TexfxError::SizeMismatch(format!(
            "{}x{}x{} vs {}x{}x{}",
            a.width, a.height, a.channels, b.width, b.height, b.channels
        )));
    }
    let mse = a
        .data
        .iter()
        .zip(&b.data)
        .map(|(u, v)| (u - v) * (u - v))
        .sum::<f64>()
        / a.data.len() as f64;
    Ok(if mse == 0.0 {
        f64::INFINITY
    } else {
        10.0 * (1.0 / mse).log10()
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn noise(w: usize, h: usize, c: usize, seed: u64) -> RasterImage {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
        RasterImage::from_fn(w, h, c, |_, _, _| rng.gen())
    }

    #[test]
    fn rejects_out_of_range_samples() {
        assert!(RasterImage::new(1, 1, 1, vec![1.5]).is_err());
        assert!(RasterImage::new(2, 1, 1, vec![0.5]).is_err());
        assert!(RasterImage::new(1, 1, 2, vec![0.5, 0.5]).is_err());
    }

    #[test]
    fn png_gray_bytes_scale_to_unit_range() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("g.png");
        GrayImage::from_raw(2, 2, vec![0, 255, 128, 64])
            .unwrap()
            .save(&path)
            .unwrap();
        let img = load_image(&path).unwrap();
        assert_eq!(img.channels(), 1);
        assert_eq!(img.data(), &[0.0, 1.0, 128.0 / 255.0, 64.0 / 255.0]);
    }

    #[test]
    fn missing_file_is_reported_with_path() {
        let err = load_image("/definitely/not/here.png").unwrap_err();
        match err {
            TexfxError::FileNotFound { path } => assert!(path.ends_with("here.png")),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn garbage_file_fails_to_decode() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("bad.png");
        std::fs::write(&path, b"\x89PNG\r\n\x1a\nnot really").unwrap();
        assert!(matches!(
            load_image(&path),
            Err(TexfxError::Decode { .. })
        ));
    }

    #[test]
    fn sixteen_bit_png_is_unsupported() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("deep.png");
        let buf: image::ImageBuffer<image::Luma<u16>, Vec<u16>> =
            image::ImageBuffer::from_raw(2, 1, vec![0u16, 65535]).unwrap();
        buf.save(&path).unwrap();
        assert!(matches!(
            load_image(&path),
            Err(TexfxError::UnsupportedFormat { .. })
        ));
    }

    #[test]
    fn png_round_trip_is_identity() {
        let dir = tempfile::tempdir().unwrap();
        for channels in [1, 3] {
            let path = dir.path().join(format!("rt{channels}.png"));
            let mut k = 0u32;
            let img = RasterImage::from_fn(7, 5, channels, |_, _, _| {
                k = (k * 37 + 11) % 256;
                f64::from(k) / 255.0
            });
            save_png(&img, &path).unwrap();
            assert_eq!(load_image(&path).unwrap(), img);
        }
    }

    #[test]
    fn downsample_keeps_constants_exact() {
        for &f in &[1.3, 2.0, 2.7, 5.0] {
            let img = RasterImage::filled(23, 17, 3, 0.3141);
            let out = downsample(&img, f).unwrap();
            assert!(out.data().iter().all(|&v| v == 0.3141));
        }
    }

    #[test]
    fn downsample_by_two_is_block_mean() {
        let img = noise(4, 4, 1, 3);
        let out = downsample(&img, 2.0).unwrap();
        assert_eq!(out.dims(), (2, 2));
        for by in 0..2 {
            for bx in 0..2 {
                let mean = (img.get(2 * bx, 2 * by, 0)
                    + img.get(2 * bx + 1, 2 * by, 0)
                    + img.get(2 * bx, 2 * by + 1, 0)
                    + img.get(2 * bx + 1, 2 * by + 1, 0))
                    / 4.0;
                assert!((out.get(bx, by, 0) - mean).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn downsample_rejects_non_shrinking_factor() {
        let img = RasterImage::filled(4, 4, 1, 0.0);
        assert!(downsample(&img, 1.0).is_err());
        assert!(downsample(&img, 0.5).is_err());
        assert!(downsample(&img, 100.0).is_err());
    }

    #[test]
    fn ssd_of_opposite_extremes_is_one() {
        for m in [1, 3, 5, 9] {
            let zeros = RasterImage::filled(11, 11, 3, 0.0);
            let ones = RasterImage::filled(11, 11, 3, 1.0);
            let p = PatchCoord::new(5, 5);
            assert_eq!(patch_ssd(&zeros, p, &ones, p, m).unwrap(), 1.0);
        }
    }

    #[test]
    fn ssd_channel_mismatch_is_an_error() {
        let a = RasterImage::filled(8, 8, 1, 0.0);
        let b = RasterImage::filled(8, 8, 3, 0.0);
        let p = PatchCoord::new(4, 4);
        assert!(matches!(
            patch_ssd(&a, p, &b, p, 3),
            Err(TexfxError::ChannelMismatch { left: 1, right: 3 })
        ));
    }

    #[test]
    fn border_centers_are_clamped() {
        let img = noise(9, 9, 1, 8);
        let corner = patch_ssd(&img, PatchCoord::new(0, 0), &img, PatchCoord::new(2, 2), 5);
        assert_eq!(corner.unwrap(), 0.0);
    }

    #[test]
    fn psnr_of_identical_images_is_infinite() {
        let img = noise(4, 4, 3, 1);
        assert!(psnr(&img, &img).unwrap().is_infinite());
    }
}
