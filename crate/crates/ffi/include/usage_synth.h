#ifndef USAGE_SYNTH_H
#define USAGE_SYNTH_H

/* Generated by cbindgen; do not edit by hand. */

#include <stdarg.h>
#include <stdbool.h>
#include <stdint.h>
#include <stdlib.h>

// Status codes returned by every fallible function.
typedef enum UsStatus {
  US_STATUS_OK = 0,
  // A pointer argument was null or a value argument was out of range.
  US_STATUS_INVALID_ARGUMENT = 1,
  // The CSV could not be parsed into a dataset at all.
  US_STATUS_PARSE_FATAL = 2,
  // Filesystem problem.
  US_STATUS_IO = 3,
  // The requested quantity is not assessable for this dataset
  // (for example session grouping over date-only timestamps).
  US_STATUS_NOT_ASSESSABLE = 4,
  // Any other failure; see `us_last_error_message`.
  US_STATUS_INTERNAL = 5,
} UsStatus;

// Opaque dataset handle.
typedef struct UsDataset UsDataset;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

// Library version as a static string; do not free.
const char *us_version(void);

// Description of the last error on this thread, or null. Do not free; the
// buffer is invalidated by the next failing call on the same thread.
const char *us_last_error_message(void);

// Parse a CSV dataset from a NUL-terminated UTF-8 buffer.
//
// # Safety
// `csv_text` must be a valid NUL-terminated string and `out_dataset` a valid
// pointer. On success `*out_dataset` owns a dataset that must be released
// with `us_dataset_free`.
enum UsStatus us_dataset_parse(const char *csv_text, struct UsDataset **out_dataset);

// Parse a CSV dataset from a file path.
//
// # Safety
// Same contract as [`us_dataset_parse`].
enum UsStatus us_dataset_parse_file(const char *path, struct UsDataset **out_dataset);

// Release a dataset handle. Null is a no-op.
//
// # Safety
// `dataset` must be null or a pointer obtained from a parse function that
// has not been freed yet.
void us_dataset_free(struct UsDataset *dataset);

// Number of usage logs in the dataset; 0 for null.
//
// # Safety
// `dataset` must be null or a live dataset handle.
uint64_t us_dataset_log_count(const struct UsDataset *dataset);

// Number of structural findings recorded while parsing; 0 for null.
//
// # Safety
// `dataset` must be null or a live dataset handle.
uint64_t us_dataset_finding_count(const struct UsDataset *dataset);

// Total usage in hours; NaN for null.
//
// # Safety
// `dataset` must be null or a live dataset handle.
double us_dataset_total_usage_hours(const struct UsDataset *dataset);

// Number of sessions under the given gap threshold.
//
// # Safety
// `dataset` must be a live dataset handle, `out_count` a valid pointer.
enum UsStatus us_dataset_session_count(const struct UsDataset *dataset,
                                       int64_t gap_threshold_s,
                                       uint64_t *out_count);

// Serialize a dataset to canonical CSV. The returned string must be freed
// with `us_string_free`.
//
// # Safety
// `dataset` must be a live dataset handle, `out_csv` a valid pointer.
enum UsStatus us_dataset_write_csv(const struct UsDataset *dataset, char **out_csv);

// Evaluate a dataset (optionally against a seed) and return the full report
// as a JSON string. `ks_fail_threshold` below 0 leaves B4/B5 report-only.
// The returned string must be freed with `us_string_free`.
//
// # Safety
// `dataset` must be a live dataset handle; `seed` may be null; `out_json`
// must be a valid pointer.
enum UsStatus us_evaluate_json(const struct UsDataset *dataset,
                               const struct UsDataset *seed,
                               int64_t gap_threshold_s,
                               uint64_t top_k,
                               double ks_fail_threshold,
                               char **out_json);

// Generate one synthetic day by resampling the seed dataset and return the
// canonical CSV. `date_iso` is YYYY-MM-DD. The returned string must be
// freed with `us_string_free`.
//
// # Safety
// `seed` must be a live dataset handle; `date_iso` a valid NUL-terminated
// string; `out_csv` a valid pointer.
enum UsStatus us_generate_baseline_csv(const struct UsDataset *seed,
                                       const char *date_iso,
                                       uint64_t seed_value,
                                       char **out_csv);

// Release a string returned by this library. Null is a no-op.
//
// # Safety
// `text` must be null or a string pointer returned by this library that has
// not been freed yet.
void us_string_free(char *text);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* USAGE_SYNTH_H */
