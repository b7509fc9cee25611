#ifndef SIC_H
#define SIC_H

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum SicStatus {
  SIC_STATUS_OK = 0,
  SIC_STATUS_NULL_POINTER = 1,
  SIC_STATUS_INVALID_ARGUMENT = 2,
  SIC_STATUS_CAPACITY = 3,
  SIC_STATUS_NOT_FOUND = 4,
  SIC_STATUS_INTERNAL = 5,
} SicStatus;

// Opaque search configuration.
typedef struct SicSearchConfig SicSearchConfig;

// Opaque search results, in trial order.
typedef struct SicSearchResults SicSearchResults;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

// Message for the last failed call on this thread, or null. Valid until the
// next call into this library on the same thread.
const char *sic_last_error_message(void);

// Order of the projective extended Clifford group in dimension `d`.
//
// # Safety
// `out` must be writable.
enum SicStatus sic_pec_order(int64_t d, uint64_t *out);

// Welch functional of the normalized vector; zero exactly at fiducials.
//
// # Safety
// `v` must hold `2 * d` doubles; `out` must be writable.
enum SicStatus sic_welch_functional(const double *v, size_t d, double *out);

// Gradient of the functional in the interleaved real coordinates.
//
// # Safety
// `v` must hold `2 * d` doubles; `grad` must have room for `2 * d`.
enum SicStatus sic_welch_gradient(const double *v, size_t d, double *grad);

// Direct equiangularity check. `max_dev` receives the largest overlap
// deviation and `pass` whether it is within `tol`.
//
// # Safety
// `v` must hold `2 * d` doubles; `max_dev` and `pass` must be writable.
enum SicStatus sic_verify(const double *v, size_t d, double tol, double *max_dev, bool *pass);

// Order of the extended-Clifford stabiliser of a fiducial (`d <= 12`).
//
// # Safety
// `v` must hold `2 * d` doubles; `out` must be writable.
enum SicStatus sic_stabiliser_order(const double *v, size_t d, double tol, uint64_t *out);

// New configuration with default settings for dimension `d`.
//
// # Safety
// `out` must be writable. Free the handle with [`sic_search_config_free`].
enum SicStatus sic_search_config_new(int64_t d, struct SicSearchConfig **out);

// # Safety
// `config` must be null or a handle from [`sic_search_config_new`] not yet freed.
void sic_search_config_free(struct SicSearchConfig *config);

// # Safety
// `config` must be a live handle.
enum SicStatus sic_search_config_set_trials(struct SicSearchConfig *config, uint64_t trials);

// # Safety
// `config` must be a live handle.
enum SicStatus sic_search_config_set_seed(struct SicSearchConfig *config, uint64_t seed);

// Worker threads; results do not depend on this value.
//
// # Safety
// `config` must be a live handle.
enum SicStatus sic_search_config_set_workers(struct SicSearchConfig *config, size_t workers);

// Restrict the search to the eigenvalue sector `eigenvalue` of the named
// symmetry (`fz`, `fa`, `fb`, `fc`, `fd`, `fe`, `fep`, `j`), or
// lift the restriction with `none`.
//
// # Safety
// `config` must be a live handle; `name` a nul-terminated string.
enum SicStatus sic_search_config_set_symmetry(struct SicSearchConfig *config,
                                              const char *name,
                                              uint64_t eigenvalue);

// Run the multi-start search. Returns `NotFound` (with `*out` still set)
// when no trial converged to a fiducial.
//
// # Safety
// `config` must be a live handle; `out` writable. Free the results with
// [`sic_search_results_free`].
enum SicStatus sic_search_run(const struct SicSearchConfig *config, struct SicSearchResults **out);

// # Safety
// `results` must be null or a handle from [`sic_search_run`] not yet freed.
void sic_search_results_free(struct SicSearchResults *results);

// Number of trials in `results`, or 0 for a null handle.
//
// # Safety
// `results` must be null or a live handle.
size_t sic_search_results_count(const struct SicSearchResults *results);

// Trial `index`: its final vector (`2 * d` doubles into `v`), trial number,
// objective gap and whether it verified as a fiducial.
//
// # Safety
// `results` must be a live handle; `v` must have room for `v_len` doubles;
// the remaining out-pointers must be writable or null.
enum SicStatus sic_search_results_get(const struct SicSearchResults *results,
                                      size_t index,
                                      double *v,
                                      size_t v_len,
                                      uint64_t *trial,
                                      double *gap,
                                      bool *is_fiducial);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* SIC_H */
