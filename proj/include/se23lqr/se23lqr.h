/* C interface to the SE2(3) finite-horizon LQR library.
 *
 * All functions return an se23_status; on failure se23_last_error() holds a
 * thread-local diagnostic until the next call on the same thread. Handles are
 * opaque and owned by the caller once returned.
 */
#ifndef SE23LQR_H
#define SE23LQR_H

#include <stddef.h>
#include <stdint.h>

#if defined(SE23LQR_BUILDING)
#define SE23_API __attribute__((visibility("default")))
#else
#define SE23_API
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum se23_status {
  SE23_OK = 0,
  SE23_INVALID_ARGUMENT = 1,
  SE23_NOT_ORTHONORMAL = 2,
  SE23_ANGLE_AMBIGUITY = 3,
  SE23_DEGENERATE_REFERENCE = 4,
  SE23_NOT_CONVERGED = 5,
  SE23_SINGULAR_MATRIX = 6,
  SE23_DIMENSION_MISMATCH = 7,
  SE23_IO = 8,
  SE23_CONFIG = 9,
  SE23_DIVERGED = 10,
  SE23_INTERNAL = 99
} se23_status;

typedef struct se23_config se23_config;
typedef struct se23_result se23_result;

SE23_API const char* se23_version(void);
SE23_API const char* se23_last_error(void);

/* Parses a JSON experiment configuration; NULL or "" gives the defaults. */
SE23_API se23_status se23_config_parse(const char* json, se23_config** out);
SE23_API void se23_config_free(se23_config* cfg);
/* Overrides the scenario seed and the Monte-Carlo master seed. */
SE23_API se23_status se23_config_set_seed(se23_config* cfg, uint64_t seed);
/* Variant tag: se23-drag, se23-nodrag, conv-drag, conv-nodrag. */
SE23_API se23_status se23_config_set_variant(se23_config* cfg, const char* variant);
/* Serialised effective configuration; valid until the handle is modified or freed. */
SE23_API const char* se23_config_json(const se23_config* cfg);

/* Single closed-loop run of the configured scenario. */
SE23_API se23_status se23_simulate(const se23_config* cfg, se23_result** out);
SE23_API void se23_result_free(se23_result* result);
/* rmse[0..2] = attitude (rad), velocity (m/s), position (m). */
SE23_API se23_status se23_result_rmse(const se23_result* result, double rmse[3]);
SE23_API se23_status se23_result_final_position_error(const se23_result* result, double* out);
SE23_API size_t se23_result_tick_count(const se23_result* result);
/* row[0] = t, row[1..12] = error state, row[13] = thrust, row[14..16] = rate
 * command, row[17..19] = moment. */
SE23_API se23_status se23_result_tick(const se23_result* result, size_t index, double row[20]);

/* Batch experiments writing CSV + manifest.json into out_dir:
 *   "simulate"      ticks.csv, summary.csv
 *   "sweep-heading" summary.csv
 *   "uncertainty"   summary.csv, ticks_<label>_<variant>.csv
 *   "monte-carlo"   trials.csv, aggregate.csv
 *   "gains"         gains.csv, reference.csv
 */
SE23_API se23_status se23_run_experiment(const se23_config* cfg, const char* experiment,
                                         const char* out_dir);

#ifdef __cplusplus
}
#endif

#endif /* SE23LQR_H */
