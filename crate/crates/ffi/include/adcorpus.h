/* C interface to the adcorpus audio-description corpus toolkit. */

#ifndef ADCORPUS_H
#define ADCORPUS_H

/* This file is generated by cbindgen from crates/ffi; do not edit by hand. */

#include <stdarg.h>
#include <stdbool.h>
#include <stdint.h>
#include <stdlib.h>

/**
 * Result of an FFI call; mirrors the CLI exit-code contract.
 */
typedef enum {
  ADC_STATUS_OK = 0,
  ADC_STATUS_USAGE_ERROR = 1,
  ADC_STATUS_INPUT_ERROR = 2,
  ADC_STATUS_PROCESSING_ERROR = 3,
  /**
   * A panic was caught at the boundary.
   */
  ADC_STATUS_INTERNAL_ERROR = 4,
} AdcStatus;

/**
 * Opaque pipeline configuration handle.
 */
typedef struct AdcConfig AdcConfig;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Library version as a static string; do not free.
 */
const char *adc_version(void);

/**
 * A configuration with all documented defaults.
 */
AdcConfig *adc_config_default(void);

/**
 * Load a TOML configuration file; returns NULL on error (see
 * [`adc_last_error`]).
 *
 * # Safety
 * `path` must be NULL or a valid NUL-terminated string.
 */
AdcConfig *adc_config_load(const char *path);

/**
 * Release a configuration handle. NULL is ignored.
 *
 * # Safety
 * `cfg` must be NULL or a pointer returned by `adc_config_default` or
 * `adc_config_load` that has not been freed yet.
 */
void adc_config_free(AdcConfig *cfg);

/**
 * Detect AD narration segments with the fully automatic (NLMS residual)
 * path; `out_json` receives the segment list JSON.
 *
 * # Safety
 * `cfg` must be NULL or a live configuration handle; the path arguments
 * must be NULL or valid NUL-terminated strings; `out_json` must be a valid
 * pointer to a `char *`.
 */
AdcStatus adc_segment_auto(const AdcConfig *cfg,
                           const char *movie_wav,
                           const char *ad_wav,
                           char **out_json);

/**
 * Detect AD narration segments with the semi-automatic (spectrogram
 * difference) path.
 *
 * # Safety
 * As for [`adc_segment_auto`].
 */
AdcStatus adc_segment_semi(const AdcConfig *cfg,
                           const char *movie_wav,
                           const char *ad_wav,
                           char **out_json);

/**
 * Parse an SRT file; `out_json` receives `{"subtitles": [...],
 * "warnings": [...]}`.
 *
 * # Safety
 * `path` must be NULL or a valid NUL-terminated string; `out_json` must be
 * a valid pointer to a `char *`.
 */
AdcStatus adc_parse_srt_file(const char *path, char **out_json);

/**
 * Evaluate a COCO-style submission file against a reference corpus split
 * (JSON Lines); `out_json` receives the metric report.
 *
 * # Safety
 * The path arguments must be NULL or valid NUL-terminated strings;
 * `out_json` must be a valid pointer to a `char *`.
 */
AdcStatus adc_eval_files(const char *submission_path,
                         const char *refs_path,
                         bool per_sentence,
                         char **out_json);

/**
 * The most recent error message on this thread as a malloc'd string, or
 * NULL when the last call succeeded. Free with [`adc_string_free`].
 */
char *adc_last_error(void);

/**
 * Free a string returned by this library. NULL is ignored.
 *
 * # Safety
 * `s` must be NULL or a pointer obtained from this library that has not
 * been freed yet.
 */
void adc_string_free(char *s);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* ADCORPUS_H */
