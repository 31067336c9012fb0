#ifndef HAUV_IPP_H
#define HAUV_IPP_H

/* Generated by cbindgen from crates/ffi/src/lib.rs. Do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum HauvStatus {
  HAUV_STATUS_OK = 0,
  HAUV_STATUS_NULL_POINTER = 1,
  HAUV_STATUS_INVALID_ARGUMENT = 2,
  HAUV_STATUS_IO = 3,
  HAUV_STATUS_PLANNER = 4,
  HAUV_STATUS_PANIC = 5,
} HauvStatus;

typedef enum HauvAlgorithm {
  HAUV_ALGORITHM_RAST_IE = 0,
  HAUV_ALGORITHM_RAST_I = 1,
  HAUV_ALGORITHM_RAST = 2,
  HAUV_ALGORITHM_RRST = 3,
  HAUV_ALGORITHM_RIGT = 4,
  HAUV_ALGORITHM_PSO = 5,
} HauvAlgorithm;

/**
 * A planning environment.
 */
typedef struct HauvEnvironment HauvEnvironment;

/**
 * The outcome of one planner run.
 */
typedef struct HauvPlanResult HauvPlanResult;

/**
 * Planner run parameters. Zero `max_it` or `it_stop` keep the defaults;
 * `t_max` may be `INFINITY`.
 */
typedef struct HauvPlanRequest {
  enum HauvAlgorithm algorithm;
  double start[3];
  double goal[3];
  double t_max;
  uint64_t seed;
  uint32_t max_it;
  uint32_t it_stop;
} HauvPlanRequest;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message for the last failed call on this thread, or an empty string. The
 * pointer stays valid until the next call on the same thread.
 */
const char *hauv_last_error(void);

/**
 * Library version as a static NUL-terminated string.
 */
const char *hauv_version(void);

/**
 * Builds the environment of built-in scenario `id` (1 to 5).
 *
 * # Safety
 * `out` must be a valid pointer to writable storage for one handle.
 */
enum HauvStatus hauv_environment_from_scenario(uint32_t id, struct HauvEnvironment **out);

/**
 * Builds an environment from an IPGRID file on the standard workspace,
 * without obstacles.
 *
 * # Safety
 * `path` must be a NUL-terminated string and `out` writable.
 */
enum HauvStatus hauv_environment_from_ipgrid(const char *path,
                                             double kappa_air,
                                             double kappa_sea,
                                             struct HauvEnvironment **out);

/**
 * Hash of the environment contents.
 *
 * # Safety
 * `env` must be null or a live handle.
 */
uint64_t hauv_environment_fingerprint(const struct HauvEnvironment *env);

/**
 * # Safety
 * `env` must be null or a handle not yet freed.
 */
void hauv_environment_free(struct HauvEnvironment *env);

/**
 * Runs one planner with the default vehicle. A run that finds no feasible
 * path still succeeds, with `hauv_result_best_ig` returning 0.
 *
 * # Safety
 * `env` must be a live handle, `request` and `out` valid pointers.
 */
enum HauvStatus hauv_plan(const struct HauvEnvironment *env,
                          const struct HauvPlanRequest *request,
                          struct HauvPlanResult **out);

/**
 * # Safety
 * `r` must be null or a live handle.
 */
double hauv_result_best_ig(const struct HauvPlanResult *r);

/**
 * # Safety
 * `r` must be null or a live handle.
 */
uintptr_t hauv_result_iterations(const struct HauvPlanResult *r);

/**
 * Energy and mission time of the best path; NaN without one.
 *
 * # Safety
 * `r` must be null or a live handle; `energy` and `time` null or writable.
 */
void hauv_result_budget(const struct HauvPlanResult *r, double *energy, double *time);

/**
 * Number of samples on the best path (0 without one).
 *
 * # Safety
 * `r` must be null or a live handle.
 */
uintptr_t hauv_result_path_len(const struct HauvPlanResult *r);

/**
 * Copies up to `cap` path samples as x, y, z triples into `xyz` (room for
 * `3 * cap` doubles) and returns how many were written.
 *
 * # Safety
 * `r` must be a live handle and `xyz` valid for `3 * cap` writes.
 */
uintptr_t hauv_result_path(const struct HauvPlanResult *r, double *xyz, uintptr_t cap);

/**
 * Copies up to `cap` entries of the best-so-far series and returns how many
 * were written. Pass a null buffer to query the length.
 *
 * # Safety
 * `r` must be a live handle; `out` null or valid for `cap` writes.
 */
uintptr_t hauv_result_bestsol(const struct HauvPlanResult *r, double *out, uintptr_t cap);

/**
 * # Safety
 * `r` must be null or a handle not yet freed.
 */
void hauv_result_free(struct HauvPlanResult *r);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* HAUV_IPP_H */
