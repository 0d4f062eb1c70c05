/* C ABI for the skelscan density-scan skeleton library. */

#ifndef SKELSCAN_H
#define SKELSCAN_H

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

// How retained centers are chained.
typedef enum SkelscanChainMode {
  SKELSCAN_CHAIN_MODE_RANK = 0,
  SKELSCAN_CHAIN_MODE_GREEDY = 1,
} SkelscanChainMode;

// Outcome of a fallible call.
typedef enum SkelscanStatus {
  SKELSCAN_STATUS_OK = 0,
  // A required pointer argument was NULL.
  SKELSCAN_STATUS_NULL_POINTER = 1,
  // Text crossing the boundary was not valid UTF-8.
  SKELSCAN_STATUS_INVALID_UTF8 = 2,
  // Malformed input data (CSV syntax, ragged rows, bad numbers).
  SKELSCAN_STATUS_PARSE_ERROR = 3,
  // A parameter was out of its domain.
  SKELSCAN_STATUS_INVALID_ARGUMENT = 4,
  // A pipeline stage failed; see `skelscan_last_error`.
  SKELSCAN_STATUS_STAGE_ERROR = 5,
} SkelscanStatus;

// Opaque parsed dataset.
typedef struct SkelscanDataset SkelscanDataset;

// Opaque pipeline report.
typedef struct SkelscanReport SkelscanReport;

// Pipeline parameters; get defaults from [`skelscan_run_params_default`]
// and override what you need.
typedef struct SkelscanRunParams {
  // Grid step.
  double r;
  // Count threshold; balls with counts strictly above it are retained.
  size_t nu;
  // Counting radius as a multiple of `r`.
  double radius_scale;
  // Component-splitting gap as a multiple of `r` (greedy mode).
  double gap_factor;
  // Simplex dimension of the emitted strip (1 = segments).
  size_t s;
  enum SkelscanChainMode chain_mode;
  // Scan every grid node in the bounding box (dimension <= 3 only).
  bool dense_nodes;
  // Keep the whole density table in the report.
  bool full_table;
} SkelscanRunParams;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

// Last error message on this thread; empty string when no call has failed.
// The pointer stays valid until the next failing call on the same thread.
const char *skelscan_last_error(void);

// Library version as a static NUL-terminated string.
const char *skelscan_version(void);

// Default pipeline parameters (r = 1, nu = 1, greedy chaining).
struct SkelscanRunParams skelscan_run_params_default(void);

// Parse points CSV (N comma-separated numbers per line, `#` comments) into
// a dataset handle written to `out`.
//
// # Safety
// `text` must be a valid NUL-terminated string and `out` a valid pointer.
enum SkelscanStatus skelscan_dataset_from_csv(const char *text, struct SkelscanDataset **out);

// Number of points in the dataset; 0 for NULL.
//
// # Safety
// `dataset` must be NULL or a live handle from this library.
size_t skelscan_dataset_len(const struct SkelscanDataset *dataset);

// Dimension of the dataset's points; 0 for NULL.
//
// # Safety
// `dataset` must be NULL or a live handle from this library.
size_t skelscan_dataset_dim(const struct SkelscanDataset *dataset);

// Free a dataset handle; NULL is a no-op.
//
// # Safety
// `dataset` must be NULL or a handle not freed before.
void skelscan_dataset_free(struct SkelscanDataset *dataset);

// Run the scan -> threshold -> chain -> metrics pipeline, writing a report
// handle to `out`.
//
// # Safety
// All pointers must be valid; `dataset` must be a live handle.
enum SkelscanStatus skelscan_pipeline_run(const struct SkelscanDataset *dataset,
                                          const struct SkelscanRunParams *params,
                                          struct SkelscanReport **out);

// Number of retained centers in the report; 0 for NULL.
//
// # Safety
// `report` must be NULL or a live handle.
size_t skelscan_report_k(const struct SkelscanReport *report);

// Skeleton vertex count; 0 for NULL.
//
// # Safety
// `report` must be NULL or a live handle.
size_t skelscan_report_vertex_count(const struct SkelscanReport *report);

// Fraction of points within the counting radius of a skeleton vertex;
// NaN for NULL.
//
// # Safety
// `report` must be NULL or a live handle.
double skelscan_report_coverage(const struct SkelscanReport *report);

// Serialize the report as canonical JSON into a newly allocated string
// written to `out`; free it with [`skelscan_string_free`].
//
// # Safety
// `report` must be a live handle and `out` a valid pointer.
enum SkelscanStatus skelscan_report_to_json(const struct SkelscanReport *report, char **out);

// Free a report handle; NULL is a no-op.
//
// # Safety
// `report` must be NULL or a handle not freed before.
void skelscan_report_free(struct SkelscanReport *report);

// Free a string returned by this library; NULL is a no-op.
//
// # Safety
// `s` must be NULL or a string returned through an out-pointer here, not
// freed before.
void skelscan_string_free(char *s);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* SKELSCAN_H */
