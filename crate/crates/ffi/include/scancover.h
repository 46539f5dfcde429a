#ifndef SCANCOVER_H
#define SCANCOVER_H

/* Generated by cbindgen from crates/ffi/src/lib.rs. Do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum ScObjective {
  SC_OBJECTIVE_MAKESPAN = 0,
  SC_OBJECTIVE_TOTAL_ENERGY = 1,
  SC_OBJECTIVE_BOTTLENECK_ENERGY = 2,
} ScObjective;

typedef enum ScStatus {
  SC_STATUS_OK = 0,
  SC_STATUS_NULL_POINTER = 1,
  SC_STATUS_INVALID_ARGUMENT = 2,
  SC_STATUS_PARSE = 3,
  SC_STATUS_DOMAIN = 4,
  SC_STATUS_BUDGET_EXHAUSTED = 5,
  SC_STATUS_NOT_BIPARTITE = 6,
  SC_STATUS_IO = 7,
  SC_STATUS_INTERNAL = 99,
} ScStatus;

/**
 * Opaque instance handle.
 */
typedef struct ScInstance ScInstance;

/**
 * Opaque schedule handle.
 */
typedef struct ScSchedule ScSchedule;

typedef struct ScEvaluation {
  double makespan;
  double total_energy;
  double bottleneck_energy;
} ScEvaluation;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message of the last failed call on this thread; empty if none. Valid until the next failure.
 */
const char *sc_last_error(void);

/**
 * Library version as a static NUL-terminated string.
 */
const char *sc_version(void);

/**
 * Parses the plain-text instance format.
 *
 * # Safety
 * `text` must be a NUL-terminated string and `out` a writable pointer.
 */
enum ScStatus sc_instance_parse(const char *text, struct ScInstance **out);

/**
 * Builds a planar instance from `n` points (`xy` holds `2n` doubles) and
 * `m` edges (`edges` holds `2m` vertex ids).
 *
 * # Safety
 * `xy` and `edges` must point to arrays of the stated lengths.
 */
enum ScStatus sc_instance_plane(const double *xy,
                                size_t n,
                                const size_t *edges,
                                size_t m,
                                struct ScInstance **out);

/**
 * # Safety
 * `out` must be a writable pointer.
 */
enum ScStatus sc_instance_random(size_t n, double p, uint64_t seed, struct ScInstance **out);

/**
 * Celestial instance with unit orbit and obstacle radius 0.5.
 *
 * # Safety
 * `out` must be a writable pointer.
 */
enum ScStatus sc_instance_celestial(size_t n, uint64_t seed, struct ScInstance **out);

/**
 * # Safety
 * `inst` must come from an `sc_instance_*` constructor and not be used afterwards.
 */
void sc_instance_free(struct ScInstance *inst);

/**
 * # Safety
 * `inst` must be a live handle or null.
 */
size_t sc_instance_num_vertices(const struct ScInstance *inst);

/**
 * # Safety
 * `inst` must be a live handle or null.
 */
size_t sc_instance_num_edges(const struct ScInstance *inst);

/**
 * Serialises an instance; release the string with [`sc_string_free`].
 *
 * # Safety
 * `inst` must be a live handle and `out` writable.
 */
enum ScStatus sc_instance_write(const struct ScInstance *inst, char **out);

/**
 * # Safety
 * `s` must come from this library or be null.
 */
void sc_string_free(char *s);

/**
 * Λ(v) in degrees.
 *
 * # Safety
 * `inst` must be a live handle and `out` writable.
 */
enum ScStatus sc_lambda(const struct ScInstance *inst, size_t v, double *out);

/**
 * Runs an algorithm by name (`oned`, `bf`, `bnb`, `two-approx`, `log-k`,
 * `greedy`, `ils`, `sa`, `ga`). `node_budget == 0` keeps the default
 * budget; otherwise the run is deterministic with that many search nodes.
 *
 * # Safety
 * `inst` must be a live handle, `algorithm` NUL-terminated, `out` writable;
 * `value` may be null.
 */
enum ScStatus sc_solve(const struct ScInstance *inst,
                       const char *algorithm,
                       enum ScObjective objective,
                       uint64_t seed,
                       uint64_t node_budget,
                       struct ScSchedule **out,
                       double *value);

/**
 * Schedule from `m` scan times, one per edge in instance order.
 *
 * # Safety
 * `times` must hold `m` doubles and `out` be writable.
 */
enum ScStatus sc_schedule_from_times(const double *times, size_t m, struct ScSchedule **out);

/**
 * # Safety
 * `s` must be a live handle or null.
 */
size_t sc_schedule_len(const struct ScSchedule *s);

/**
 * Copies up to `cap` times into `buf`.
 *
 * # Safety
 * `s` must be a live handle and `buf` hold `cap` doubles.
 */
enum ScStatus sc_schedule_times(const struct ScSchedule *s, double *buf, size_t cap);

/**
 * # Safety
 * `s` must come from this library and not be used afterwards.
 */
void sc_schedule_free(struct ScSchedule *s);

/**
 * Number of violated separation constraints (0 means valid).
 *
 * # Safety
 * Both handles must be live and `violations` writable.
 */
enum ScStatus sc_validate(const struct ScInstance *inst,
                          const struct ScSchedule *s,
                          size_t *violations);

/**
 * Objective values of a valid schedule.
 *
 * # Safety
 * Both handles must be live and `out` writable.
 */
enum ScStatus sc_evaluate(const struct ScInstance *inst,
                          const struct ScSchedule *s,
                          struct ScEvaluation *out);

#ifdef __cplusplus
} // extern "C"
#endif // __cplusplus

#endif /* SCANCOVER_H */
