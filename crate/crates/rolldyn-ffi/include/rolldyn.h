#ifndef ROLLDYN_H
#define ROLLDYN_H

/* Generated from the rolldyn-ffi crate; do not edit by hand. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

/**
 * Status code returned by every fallible call.
 */
enum RolldynStatus
#if defined(__cplusplus) || __STDC_VERSION__ >= 202311L
  : int32_t
#endif // defined(__cplusplus) || __STDC_VERSION__ >= 202311L
 {
  ROLLDYN_STATUS_OK = 0,
  /**
   * A required pointer argument was null.
   */
  ROLLDYN_STATUS_NULL_ARG = 1,
  /**
   * A string argument was not valid UTF-8.
   */
  ROLLDYN_STATUS_UTF8 = 2,
  /**
   * Malformed file or key text.
   */
  ROLLDYN_STATUS_PARSE = 3,
  ROLLDYN_STATUS_IO = 4,
  /**
   * Input rejected by a validity rule (bad preset, short run, ...).
   */
  ROLLDYN_STATUS_INVALID = 5,
  /**
   * A prediction model range could not be resolved.
   */
  ROLLDYN_STATUS_BINDING = 6,
  /**
   * The requested element does not exist.
   */
  ROLLDYN_STATUS_NOT_FOUND = 7,
};
#ifndef __cplusplus
#if __STDC_VERSION__ >= 202311L
typedef enum RolldynStatus RolldynStatus;
#else
typedef int32_t RolldynStatus;
#endif // __STDC_VERSION__ >= 202311L
#endif // __cplusplus

/**
 * Characteristic values extracted from one run.
 */
typedef struct RolldynCvs RolldynCvs;

/**
 * An estimated frequency response.
 */
typedef struct RolldynFr RolldynFr;

/**
 * A loaded or synthesized measurement run.
 */
typedef struct RolldynRun RolldynRun;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Copies the message of the most recent error on this thread into `buf`
 * (NUL-terminated, truncated to `cap` bytes) and returns the full
 * message length in bytes, excluding the terminator. `buf` may be null
 * to query the length alone. The message is empty unless the latest
 * fallible call on this thread failed.
 */
size_t rolldyn_last_error(char *buf, size_t cap);

/**
 * Reads a measurement run from a CSV file.
 *
 * # Safety
 * `path` must be a valid NUL-terminated string and `out` a valid
 * pointer; on `ROLLDYN_STATUS_OK` it receives a handle to release with
 * [`rolldyn_run_free`].
 */
RolldynStatus rolldyn_run_load(const char *path, struct RolldynRun **out);

/**
 * Writes a measurement run to a CSV file.
 *
 * # Safety
 * `run` must be a live handle from this library and `path` a valid
 * NUL-terminated string.
 */
RolldynStatus rolldyn_run_save(const struct RolldynRun *run, const char *path);

/**
 * Synthesizes a continuous-sine-steer run for a named preset vehicle
 * (`sports-car`, `sports-suv`, `coupe`, `rv-like`, `luxury-sedan`)
 * using the default sweep. `noise_std` adds seeded Gaussian sensor
 * noise as a fraction of each channel's RMS; pass 0 for a clean run.
 *
 * # Safety
 * `name` must be a valid NUL-terminated string and `out` a valid
 * pointer; on `ROLLDYN_STATUS_OK` it receives a handle to release with
 * [`rolldyn_run_free`].
 */
RolldynStatus rolldyn_run_synth_preset(const char *name,
                                       uint64_t seed,
                                       double noise_std,
                                       struct RolldynRun **out);

/**
 * Releases a run handle. Null is ignored.
 *
 * # Safety
 * `run` must be a handle returned by this library that has not been
 * freed before.
 */
void rolldyn_run_free(struct RolldynRun *run);

/**
 * Number of samples in the run, or -1 for a null handle.
 *
 * # Safety
 * `run` must be null or a live handle from this library.
 */
ptrdiff_t rolldyn_run_len(const struct RolldynRun *run);

/**
 * Sample rate of the run in Hz, or 0 for a null handle.
 *
 * # Safety
 * `run` must be null or a live handle from this library.
 */
double rolldyn_run_sample_rate(const struct RolldynRun *run);

/**
 * Estimates the frequency response from one input channel (`mh`, `dh`
 * or `ay`) to the roll angle derived `order` times (0, 1 or 2), using
 * the default spectral settings for the run's sample rate.
 *
 * # Safety
 * `run` must be a live handle, `input` a valid NUL-terminated string
 * and `out` a valid pointer; on `ROLLDYN_STATUS_OK` it receives a
 * handle to release with [`rolldyn_fr_free`].
 */
RolldynStatus rolldyn_fr_estimate(const struct RolldynRun *run,
                                  const char *input,
                                  uint8_t order,
                                  struct RolldynFr **out);

/**
 * Releases a frequency-response handle. Null is ignored.
 *
 * # Safety
 * `fr` must be a handle returned by this library that has not been
 * freed before.
 */
void rolldyn_fr_free(struct RolldynFr *fr);

/**
 * Number of frequency bins, or -1 for a null handle.
 *
 * # Safety
 * `fr` must be null or a live handle from this library.
 */
ptrdiff_t rolldyn_fr_len(const struct RolldynFr *fr);

/**
 * Copies bin `index` into the non-null output pointers: frequency in
 * Hz, complex response parts, and coherence (-1 when the response
 * carries none).
 *
 * # Safety
 * `fr` must be a live handle; each output pointer must be null or
 * valid for one `double`.
 */
RolldynStatus rolldyn_fr_bin(const struct RolldynFr *fr,
                             size_t index,
                             double *freq,
                             double *re,
                             double *im,
                             double *coherence);

/**
 * Evaluates the response at `freq` Hz by linear interpolation between
 * bins, writing the complex parts to the non-null output pointers.
 *
 * # Safety
 * `fr` must be a live handle; `re` and `im` must each be null or valid
 * for one `double`.
 */
RolldynStatus rolldyn_fr_eval(const struct RolldynFr *fr, double freq, double *re, double *im);

/**
 * Extracts the full characteristic-value catalog from a run: the nine
 * responses are estimated with default settings, then reduced to
 * scalar values.
 *
 * # Safety
 * `run` must be a live handle and `out` a valid pointer; on
 * `ROLLDYN_STATUS_OK` it receives a handle to release with
 * [`rolldyn_cvs_free`].
 */
RolldynStatus rolldyn_cvs_extract(const struct RolldynRun *run, struct RolldynCvs **out);

/**
 * Releases a characteristic-value handle. Null is ignored.
 *
 * # Safety
 * `cvs` must be a handle returned by this library that has not been
 * freed before.
 */
void rolldyn_cvs_free(struct RolldynCvs *cvs);

/**
 * Number of stored characteristic values, or -1 for a null handle.
 *
 * # Safety
 * `cvs` must be null or a live handle from this library.
 */
ptrdiff_t rolldyn_cvs_len(const struct RolldynCvs *cvs);

/**
 * Looks up one characteristic value by its key text, e.g.
 * `ay/0/beta`, `mh/1/vmax` or `dh/0/phase@1.5`.
 *
 * # Safety
 * `cvs` must be a live handle, `key` a valid NUL-terminated string and
 * `value` null or valid for one `double`.
 */
RolldynStatus rolldyn_cvs_get(const struct RolldynCvs *cvs, const char *key, double *value);

/**
 * Predicts the seven subjective ratings with the builtin models.
 * `values` receives the predictions in the order RAL, RAH, TDL, TDH,
 * IRM, ROS, OR; `in_range` (optional) receives 1 where every model
 * term stayed inside its calibrated range and 0 otherwise.
 *
 * # Safety
 * `cvs` must be a live handle, `values` valid for seven `double`s and
 * `in_range` null or valid for seven `uint8_t`s.
 */
RolldynStatus rolldyn_predict_builtin(const struct RolldynCvs *cvs,
                                      double *values,
                                      uint8_t *in_range);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* ROLLDYN_H */
