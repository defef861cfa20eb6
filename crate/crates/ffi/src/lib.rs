//! C interface to texfx.
//!
//! Objects are opaque heap handles released with their `_free` function.
//! Fallible calls return a [`TexfxStatus`]; on failure the message is kept
//! per thread and read back with [`texfx_last_error`].

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use texfx::synthesis::{Mode, SourceContext, SynthesisParams};
use texfx::{ErrorKind, RasterImage, TexfxError};

/// Result of a fallible call. The first four values match the CLI exit codes.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TexfxStatus {
    Ok = 0,
    Usage = 1,
    Io = 2,
    Degenerate = 3,
    NullPointer = 4,
    Panic = 5,
}

/// Appearance model selector for [`texfx_params_set_mode`].
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TexfxMode {
    Baseline = 0,
    Full = 1,
}

/// Image with `f64` samples in `[0, 1]`, row-major, channels interleaved.
pub struct TexfxImage(RasterImage);

/// Synthesis parameters, initialized to the library defaults.
pub struct TexfxParams(SynthesisParams);

/// Preprocessed source pair, reusable across targets.
pub struct TexfxSource {
    ctx: SourceContext,
    params: SynthesisParams,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: String) {
    let msg = CString::new(msg.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(msg));
}

fn fail(err: TexfxError) -> TexfxStatus {
    let status = match err.kind() {
        ErrorKind::Usage => TexfxStatus::Usage,
        ErrorKind::Io => TexfxStatus::Io,
        ErrorKind::Degenerate => TexfxStatus::Degenerate,
    };
    set_error(err.to_string());
    status
}

fn guard(f: impl FnOnce() -> TexfxStatus) -> TexfxStatus {
    LAST_ERROR.with(|e| *e.borrow_mut() = None);
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(s) => s,
        Err(_) => {
            set_error("internal panic".into());
            TexfxStatus::Panic
        }
    }
}

fn null(what: &str) -> TexfxStatus {
    set_error(format!("null pointer: {what}"));
    TexfxStatus::NullPointer
}

unsafe fn path_arg(p: *const c_char) -> Option<String> {
    if p.is_null() {
        return None;
    }
    Some(CStr::from_ptr(p).to_string_lossy().into_owned())
}

/// Message of the last failed call on this thread, or NULL. Valid until the
/// next call into the library on the same thread.
#[no_mangle]
pub extern "C" fn texfx_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |s| s.as_ptr()))
}

/// Library version as a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn texfx_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

/// Copies `width * height * channels` samples into a new image.
///
/// # Safety
/// `data` must point to that many readable `f64` values; `out` must be valid
/// for writing.
#[no_mangle]
pub unsafe extern "C" fn texfx_image_new(
    width: usize,
    height: usize,
    channels: usize,
    data: *const f64,
    out: *mut *mut TexfxImage,
) -> TexfxStatus {
    guard(|| {
        if data.is_null() || out.is_null() {
            return null("data or out");
        }
        let Some(len) = width.checked_mul(height).and_then(|n| n.checked_mul(channels)) else {
            return fail(TexfxError::InvalidArgument("image size overflows".into()));
        };
        let samples = std::slice::from_raw_parts(data, len).to_vec();
        match RasterImage::new(width, height, channels, samples) {
            Ok(img) => {
                *out = Box::into_raw(Box::new(TexfxImage(img)));
                TexfxStatus::Ok
            }
            Err(e) => fail(e),
        }
    })
}

/// Decodes a PNG or other supported file.
///
/// # Safety
/// `path` must be a NUL-terminated string; `out` must be valid for writing.
#[no_mangle]
pub unsafe extern "C" fn texfx_image_load(path: *const c_char, out: *mut *mut TexfxImage) -> TexfxStatus {
    guard(|| {
        let Some(path) = path_arg(path) else { return null("path") };
        if out.is_null() {
            return null("out");
        }
        match texfx::load_image(path) {
            Ok(img) => {
                *out = Box::into_raw(Box::new(TexfxImage(img)));
                TexfxStatus::Ok
            }
            Err(e) => fail(e),
        }
    })
}

/// # Safety
/// `img` must be a live image handle and `path` a NUL-terminated string.
#[no_mangle]
pub unsafe extern "C" fn texfx_image_save_png(img: *const TexfxImage, path: *const c_char) -> TexfxStatus {
    guard(|| {
        let Some(path) = path_arg(path) else { return null("path") };
        let Some(img) = img.as_ref() else { return null("image") };
        match texfx::save_png(&img.0, path) {
            Ok(()) => TexfxStatus::Ok,
            Err(e) => fail(e),
        }
    })
}

/// # Safety
/// `img` must be NULL or a live image handle.
#[no_mangle]
pub unsafe extern "C" fn texfx_image_width(img: *const TexfxImage) -> usize {
    img.as_ref().map_or(0, |i| i.0.width())
}

/// # Safety
/// `img` must be NULL or a live image handle.
#[no_mangle]
pub unsafe extern "C" fn texfx_image_height(img: *const TexfxImage) -> usize {
    img.as_ref().map_or(0, |i| i.0.height())
}

/// # Safety
/// `img` must be NULL or a live image handle.
#[no_mangle]
pub unsafe extern "C" fn texfx_image_channels(img: *const TexfxImage) -> usize {
    img.as_ref().map_or(0, |i| i.0.channels())
}

/// Borrowed view of the samples, valid while the handle lives.
///
/// # Safety
/// `img` must be NULL or a live image handle.
#[no_mangle]
pub unsafe extern "C" fn texfx_image_data(img: *const TexfxImage) -> *const f64 {
    img.as_ref().map_or(ptr::null(), |i| i.0.data().as_ptr())
}

/// # Safety
/// `img` must be NULL or a handle not yet freed.
#[no_mangle]
pub unsafe extern "C" fn texfx_image_free(img: *mut TexfxImage) {
    if !img.is_null() {
        drop(Box::from_raw(img));
    }
}

/// New parameter set with default values.
#[no_mangle]
pub extern "C" fn texfx_params_new() -> *mut TexfxParams {
    Box::into_raw(Box::new(TexfxParams(SynthesisParams::default())))
}

/// # Safety
/// `params` must be NULL or a handle not yet freed.
#[no_mangle]
pub unsafe extern "C" fn texfx_params_free(params: *mut TexfxParams) {
    if !params.is_null() {
        drop(Box::from_raw(params));
    }
}

unsafe fn set(params: *mut TexfxParams, f: impl FnOnce(&mut SynthesisParams)) -> TexfxStatus {
    match params.as_mut() {
        Some(p) => {
            f(&mut p.0);
            TexfxStatus::Ok
        }
        None => null("params"),
    }
}

/// # Safety
/// `params` must be a live parameter handle.
#[no_mangle]
pub unsafe extern "C" fn texfx_params_set_seed(params: *mut TexfxParams, value: u64) -> TexfxStatus {
    set(params, |p| p.seed = value)
}

/// Patch side; odd, at least 3.
///
/// # Safety
/// `params` must be a live parameter handle.
#[no_mangle]
pub unsafe extern "C" fn texfx_params_set_patch_size(params: *mut TexfxParams, value: usize) -> TexfxStatus {
    set(params, |p| p.patch_size = value)
}

/// Scales examined by scale detection.
///
/// # Safety
/// `params` must be a live parameter handle.
#[no_mangle]
pub unsafe extern "C" fn texfx_params_set_scales(params: *mut TexfxParams, value: usize) -> TexfxStatus {
    set(params, |p| p.scales = value)
}

/// Weight of the distribution term.
///
/// # Safety
/// `params` must be a live parameter handle.
#[no_mangle]
pub unsafe extern "C" fn texfx_params_set_lambda1(params: *mut TexfxParams, value: f64) -> TexfxStatus {
    set(params, |p| p.lambda1 = value)
}

/// Weight of the repetition penalty.
///
/// # Safety
/// `params` must be a live parameter handle.
#[no_mangle]
pub unsafe extern "C" fn texfx_params_set_lambda2(params: *mut TexfxParams, value: f64) -> TexfxStatus {
    set(params, |p| p.lambda2 = value)
}

/// Weight of the text channel in appearance matching.
///
/// # Safety
/// `params` must be a live parameter handle.
#[no_mangle]
pub unsafe extern "C" fn texfx_params_set_lambda3(params: *mut TexfxParams, value: f64) -> TexfxStatus {
    set(params, |p| p.lambda3 = value)
}

/// Scale detection threshold.
///
/// # Safety
/// `params` must be a live parameter handle.
#[no_mangle]
pub unsafe extern "C" fn texfx_params_set_omega(params: *mut TexfxParams, value: f64) -> TexfxStatus {
    set(params, |p| p.omega = value)
}

/// # Safety
/// `params` must be a live parameter handle.
#[no_mangle]
pub unsafe extern "C" fn texfx_params_set_pyramid_depth(params: *mut TexfxParams, value: usize) -> TexfxStatus {
    set(params, |p| p.pyramid_depth = value)
}

/// Side of the coarsest pyramid level in pixels.
///
/// # Safety
/// `params` must be a live parameter handle.
#[no_mangle]
pub unsafe extern "C" fn texfx_params_set_coarsest(params: *mut TexfxParams, value: usize) -> TexfxStatus {
    set(params, |p| p.coarsest = value)
}

/// Search and vote rounds per pyramid level.
///
/// # Safety
/// `params` must be a live parameter handle.
#[no_mangle]
pub unsafe extern "C" fn texfx_params_set_iterations(params: *mut TexfxParams, value: usize) -> TexfxStatus {
    set(params, |p| p.iterations = value)
}

/// # Safety
/// `params` must be a live parameter handle.
#[no_mangle]
pub unsafe extern "C" fn texfx_params_set_mode(params: *mut TexfxParams, mode: TexfxMode) -> TexfxStatus {
    set(params, |p| {
        p.mode = match mode {
            TexfxMode::Baseline => Mode::Baseline,
            TexfxMode::Full => Mode::Full,
        }
    })
}

/// Checks the parameter set without running anything.
///
/// # Safety
/// `params` must be a live parameter handle.
#[no_mangle]
pub unsafe extern "C" fn texfx_params_validate(params: *const TexfxParams) -> TexfxStatus {
    guard(|| match params.as_ref() {
        Some(p) => p.0.validate().map_or_else(fail, |_| TexfxStatus::Ok),
        None => null("params"),
    })
}

/// Preprocesses a source text/style pair. The parameters are copied; later
/// transfers must use matching patch size, threshold and outlier fraction.
///
/// # Safety
/// All pointers must be live handles; `out` must be valid for writing.
#[no_mangle]
pub unsafe extern "C" fn texfx_source_prepare(
    text: *const TexfxImage,
    style: *const TexfxImage,
    params: *const TexfxParams,
    out: *mut *mut TexfxSource,
) -> TexfxStatus {
    guard(|| {
        let (Some(text), Some(style), Some(params)) = (text.as_ref(), style.as_ref(), params.as_ref()) else {
            return null("text, style or params");
        };
        if out.is_null() {
            return null("out");
        }
        match texfx::prepare_source(&text.0, &style.0, &params.0) {
            Ok(ctx) => {
                *out = Box::into_raw(Box::new(TexfxSource {
                    ctx,
                    params: params.0.clone(),
                }));
                TexfxStatus::Ok
            }
            Err(e) => fail(e),
        }
    })
}

/// # Safety
/// `src` must be NULL or a handle not yet freed.
#[no_mangle]
pub unsafe extern "C" fn texfx_source_free(src: *mut TexfxSource) {
    if !src.is_null() {
        drop(Box::from_raw(src));
    }
}

/// Stylizes `target_text` from a prepared source. `params` may be NULL to
/// reuse the parameters the source was prepared with.
///
/// # Safety
/// `src` and `target_text` must be live handles, `params` NULL or live, and
/// `out` valid for writing.
#[no_mangle]
pub unsafe extern "C" fn texfx_transfer(
    src: *const TexfxSource,
    target_text: *const TexfxImage,
    params: *const TexfxParams,
    out: *mut *mut TexfxImage,
) -> TexfxStatus {
    guard(|| {
        let (Some(src), Some(target)) = (src.as_ref(), target_text.as_ref()) else {
            return null("source or target");
        };
        if out.is_null() {
            return null("out");
        }
        let params = params.as_ref().map_or(&src.params, |p| &p.0);
        match texfx::transfer_with(&src.ctx, &target.0, params) {
            Ok(r) => {
                *out = Box::into_raw(Box::new(TexfxImage(r.image)));
                TexfxStatus::Ok
            }
            Err(e) => fail(e),
        }
    })
}
