#ifndef TEXFX_H
#define TEXFX_H

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

// Result of a fallible call. The first four values match the CLI exit codes.
typedef enum TexfxStatus {
  TEXFX_STATUS_OK = 0,
  TEXFX_STATUS_USAGE = 1,
  TEXFX_STATUS_IO = 2,
  TEXFX_STATUS_DEGENERATE = 3,
  TEXFX_STATUS_NULL_POINTER = 4,
  TEXFX_STATUS_PANIC = 5,
} TexfxStatus;

// Appearance model selector for [`texfx_params_set_mode`].
typedef enum TexfxMode {
  TEXFX_MODE_BASELINE = 0,
  TEXFX_MODE_FULL = 1,
} TexfxMode;

// Image with `f64` samples in `[0, 1]`, row-major, channels interleaved.
typedef struct TexfxImage TexfxImage;

// Synthesis parameters, initialized to the library defaults.
typedef struct TexfxParams TexfxParams;

// Preprocessed source pair, reusable across targets.
typedef struct TexfxSource TexfxSource;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

// Message of the last failed call on this thread, or NULL. Valid until the
// next call into the library on the same thread.
const char *texfx_last_error(void);

// Library version as a static NUL-terminated string.
const char *texfx_version(void);

// Copies `width * height * channels` samples into a new image.
//
// # Safety
// `data` must point to that many readable `f64` values; `out` must be valid
// for writing.
enum TexfxStatus texfx_image_new(size_t width,
                                 size_t height,
                                 size_t channels,
                                 const double *data,
                                 struct TexfxImage **out);

// Decodes a PNG or other supported file.
//
// # Safety
// `path` must be a NUL-terminated string; `out` must be valid for writing.
enum TexfxStatus texfx_image_load(const char *path, struct TexfxImage **out);

// # Safety
// `img` must be a live image handle and `path` a NUL-terminated string.
enum TexfxStatus texfx_image_save_png(const struct TexfxImage *img, const char *path);

// # Safety
// `img` must be NULL or a live image handle.
size_t texfx_image_width(const struct TexfxImage *img);

// # Safety
// `img` must be NULL or a live image handle.
size_t texfx_image_height(const struct TexfxImage *img);

// # Safety
// `img` must be NULL or a live image handle.
size_t texfx_image_channels(const struct TexfxImage *img);

// Borrowed view of the samples, valid while the handle lives.
//
// # Safety
// `img` must be NULL or a live image handle.
const double *texfx_image_data(const struct TexfxImage *img);

// # Safety
// `img` must be NULL or a handle not yet freed.
void texfx_image_free(struct TexfxImage *img);

// New parameter set with default values.
struct TexfxParams *texfx_params_new(void);

// # Safety
// `params` must be NULL or a handle not yet freed.
void texfx_params_free(struct TexfxParams *params);

// # Safety
// `params` must be a live parameter handle.
enum TexfxStatus texfx_params_set_seed(struct TexfxParams *params, uint64_t value);

// Patch side; odd, at least 3.
//
// # Safety
// `params` must be a live parameter handle.
enum TexfxStatus texfx_params_set_patch_size(struct TexfxParams *params, size_t value);

// Scales examined by scale detection.
//
// # Safety
// `params` must be a live parameter handle.
enum TexfxStatus texfx_params_set_scales(struct TexfxParams *params, size_t value);

// Weight of the distribution term.
//
// # Safety
// `params` must be a live parameter handle.
enum TexfxStatus texfx_params_set_lambda1(struct TexfxParams *params, double value);

// Weight of the repetition penalty.
//
// # Safety
// `params` must be a live parameter handle.
enum TexfxStatus texfx_params_set_lambda2(struct TexfxParams *params, double value);

// Weight of the text channel in appearance matching.
//
// # Safety
// `params` must be a live parameter handle.
enum TexfxStatus texfx_params_set_lambda3(struct TexfxParams *params, double value);

// Scale detection threshold.
//
// # Safety
// `params` must be a live parameter handle.
enum TexfxStatus texfx_params_set_omega(struct TexfxParams *params, double value);

// # Safety
// `params` must be a live parameter handle.
enum TexfxStatus texfx_params_set_pyramid_depth(struct TexfxParams *params, size_t value);

// Side of the coarsest pyramid level in pixels.
//
// # Safety
// `params` must be a live parameter handle.
enum TexfxStatus texfx_params_set_coarsest(struct TexfxParams *params, size_t value);

// Search and vote rounds per pyramid level.
//
// # Safety
// `params` must be a live parameter handle.
enum TexfxStatus texfx_params_set_iterations(struct TexfxParams *params, size_t value);

// # Safety
// `params` must be a live parameter handle.
enum TexfxStatus texfx_params_set_mode(struct TexfxParams *params, enum TexfxMode mode);

// Checks the parameter set without running anything.
//
// # Safety
// `params` must be a live parameter handle.
enum TexfxStatus texfx_params_validate(const struct TexfxParams *params);

// Preprocesses a source text/style pair. The parameters are copied; later
// transfers must use matching patch size, threshold and outlier fraction.
//
// # Safety
// All pointers must be live handles; `out` must be valid for writing.
enum TexfxStatus texfx_source_prepare(const struct TexfxImage *text,
                                      const struct TexfxImage *style,
                                      const struct TexfxParams *params,
                                      struct TexfxSource **out);

// # Safety
// `src` must be NULL or a handle not yet freed.
void texfx_source_free(struct TexfxSource *src);

// Stylizes `target_text` from a prepared source. `params` may be NULL to
// reuse the parameters the source was prepared with.
//
// # Safety
// `src` and `target_text` must be live handles, `params` NULL or live, and
// `out` valid for writing.
enum TexfxStatus texfx_transfer(const struct TexfxSource *src,
                                const struct TexfxImage *target_text,
                                const struct TexfxParams *params,
                                struct TexfxImage **out);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* TEXFX_H */
