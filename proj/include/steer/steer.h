#ifndef STEER_H
#define STEER_H

/* C interface to the opinion-steering solver library.
 *
 * Every function that can fail returns a steer_status: STEER_OK (0) on
 * success, a negative code otherwise. steer_last_error() returns a
 * thread-local message describing the most recent failure on the calling
 * thread. Out-parameters are written only on success. Every handle returned
 * through an out-parameter must be released with the matching free function;
 * passing NULL to a free function is a no-op.
 */

#include <stddef.h>
#include <stdint.h>

#if defined(_WIN32)
#define STEER_API __declspec(dllexport)
#else
#define STEER_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum steer_status {
  STEER_OK = 0,
  STEER_ERR_IO = -1,
  STEER_ERR_PARSE = -2,
  STEER_ERR_INVALID_ARGUMENT = -3,
  STEER_ERR_EMPTY_ROW = -4,
  STEER_ERR_NON_POSITIVE_WEIGHT = -5,
  STEER_ERR_DISCONNECTED = -6,
  STEER_ERR_DIMENSION_MISMATCH = -7,
  STEER_ERR_TOO_LARGE = -8,
  STEER_ERR_SINGULAR_SYSTEM = -9,
  STEER_ERR_ITERATION_BUDGET = -10,
  STEER_ERR_INCONCLUSIVE = -11,
  STEER_ERR_PRECONDITION_UNMET = -12,
  STEER_ERR_VERIFICATION_FAILED = -13,
  STEER_ERR_INTERNAL = -14
} steer_status;

typedef struct steer_instance steer_instance;
typedef struct steer_result steer_result;
typedef struct steer_budget_result steer_budget_result;
typedef struct steer_verify_report steer_verify_report;
typedef struct steer_result_file steer_result_file;

STEER_API const char* steer_version(void);
STEER_API const char* steer_status_name(steer_status status);

/* Message for the most recent failure on this thread; empty string if none. */
STEER_API const char* steer_last_error(void);

/* ------------------------------------------------------------------ */
/* Instances                                                           */

/* Builds an instance from raw arrays. edges are (u, v, w) triples over node
 * ids in [0, n); symmetrize nonzero inserts the reverse of every edge.
 * alpha0 may be NULL. All per-agent arrays have length n. */
STEER_API steer_status steer_instance_create(
    uint32_t n, const uint32_t* edge_u, const uint32_t* edge_v,
    const double* edge_w, size_t edge_count, int symmetrize, const double* s,
    const double* lower, const double* upper, const double* alpha0,
    uint64_t seed, steer_instance** out);

/* Reads a whitespace edge-list file (`u v [w]`, `#` comments), densifies the
 * ids, optionally symmetrizes and randomizes weights, then draws s, bounds,
 * and (profile != "none") alpha0 from the named substreams of seed.
 * profile is one of "none", "uniform", "plow", "phigh". When node_map_path
 * is non-NULL, writes one `dense_id original_id` line per node there. */
STEER_API steer_status steer_instance_generate(const char* edge_list_path,
                                               int symmetrize,
                                               int randomize_weights,
                                               uint64_t seed,
                                               const char* profile,
                                               const char* node_map_path,
                                               steer_instance** out);

/* Instance file round-trip (bit-exact; see README for the format). */
STEER_API steer_status steer_instance_read(const char* path,
                                           steer_instance** out);
STEER_API steer_status steer_instance_write(const steer_instance* inst,
                                            const char* path);

STEER_API uint32_t steer_instance_size(const steer_instance* inst);
STEER_API uint64_t steer_instance_edge_entries(const steer_instance* inst);
STEER_API int steer_instance_has_alpha0(const steer_instance* inst);
STEER_API const double* steer_instance_innate(const steer_instance* inst);
STEER_API const double* steer_instance_lower(const steer_instance* inst);
STEER_API const double* steer_instance_upper(const steer_instance* inst);
/* NULL when the instance has no alpha0. */
STEER_API const double* steer_instance_alpha0(const steer_instance* inst);

STEER_API void steer_instance_free(steer_instance* inst);

/* ------------------------------------------------------------------ */
/* Unbudgeted solve                                                    */

typedef struct steer_solve_config {
  const char* strategy;     /* "conservative" | "opportunistic" | "optimistic" */
  int threads;              /* <= 0 selects hardware concurrency */
  uint64_t seed;            /* perturbation substream */
  double perturb_magnitude; /* 0 disables tie-breaking noise; must be < 1e-6 */
  uint64_t slope_window;    /* opportunistic: iterations per progress window */
  double slope_factor;      /* opportunistic: early-phase-end threshold */
  uint32_t opportunistic_phase_limit;
  uint64_t iteration_cap;   /* per phase; 0 derives a cap from eps_alpha */
  int record_trace;
} steer_solve_config;

STEER_API void steer_solve_config_init(steer_solve_config* cfg);

STEER_API steer_status steer_solve(const steer_instance* inst,
                                   const steer_solve_config* cfg,
                                   steer_result** out);

STEER_API uint32_t steer_result_size(const steer_result* res);
STEER_API const double* steer_result_alpha(const steer_result* res);
STEER_API const uint8_t* steer_result_flipped(const steer_result* res);
STEER_API double steer_result_objective(const steer_result* res);
STEER_API double steer_result_objective_err(const steer_result* res);
STEER_API uint64_t steer_result_iterations(const steer_result* res);
STEER_API uint32_t steer_result_phases(const steer_result* res);
STEER_API uint64_t steer_result_mistakes(const steer_result* res);
STEER_API double steer_result_wall_seconds(const steer_result* res);
STEER_API size_t steer_result_trace_length(const steer_result* res);
STEER_API steer_status steer_result_trace_row(const steer_result* res,
                                              size_t index, uint64_t* iter,
                                              double* ratio_lower,
                                              uint32_t* phase);

STEER_API steer_status steer_result_write(const steer_result* res,
                                          const char* path);
STEER_API steer_status steer_result_trace_write(const steer_result* res,
                                                const char* path);

STEER_API void steer_result_free(steer_result* res);

/* ------------------------------------------------------------------ */
/* Budgeted solve                                                      */

typedef struct steer_budget_config {
  const char* strategy;     /* "marginal" | "bgg" | "random" */
  uint32_t k;               /* budget, in [1, n] */
  double batch;             /* >= 1 absolute, < 1 fraction of k (bgg only) */
  int threads;
  uint64_t seed;
  double perturb_magnitude;
  uint64_t iteration_cap;
  int record_sweep;
} steer_budget_config;

STEER_API void steer_budget_config_init(steer_budget_config* cfg);

STEER_API steer_status steer_budget_solve(const steer_instance* inst,
                                          const steer_budget_config* cfg,
                                          steer_budget_result** out);

STEER_API uint32_t steer_budget_result_size(const steer_budget_result* res);
STEER_API const double* steer_budget_result_alpha(const steer_budget_result* res);
STEER_API const uint8_t* steer_budget_result_selected(
    const steer_budget_result* res);
STEER_API const uint8_t* steer_budget_result_flipped(
    const steer_budget_result* res);
STEER_API double steer_budget_result_objective(const steer_budget_result* res);
STEER_API double steer_budget_result_objective_err(
    const steer_budget_result* res);
STEER_API uint64_t steer_budget_result_iterations(
    const steer_budget_result* res);
STEER_API uint64_t steer_budget_result_mistakes(const steer_budget_result* res);
STEER_API int steer_budget_result_stalled(const steer_budget_result* res);
STEER_API double steer_budget_result_wall_seconds(
    const steer_budget_result* res);
STEER_API size_t steer_budget_result_sweep_length(
    const steer_budget_result* res);
STEER_API steer_status steer_budget_result_sweep_row(
    const steer_budget_result* res, size_t index, double* ratio_selected,
    double* avg_equilibrium);

STEER_API steer_status steer_budget_result_write(const steer_budget_result* res,
                                                 const char* path);

STEER_API void steer_budget_result_free(steer_budget_result* res);

/* Writes the selection-sweep CSV (`ratio_selected,avg_equilibrium,strategy,
 * seed`) for one or more budgeted runs, in the order given. seeds[i] labels
 * results[i]'s rows. */
STEER_API steer_status steer_sweep_csv_write(
    const steer_budget_result* const* results, const uint64_t* seeds,
    size_t count, const char* path);

/* ------------------------------------------------------------------ */
/* Result files on disk                                                */

/* Parses a result file written by steer_result_write or
 * steer_budget_result_write; the budgeted accessors report zero/NULL for
 * unbudgeted files. */
STEER_API steer_status steer_result_file_read(const char* path,
                                              steer_result_file** out);
STEER_API uint32_t steer_result_file_size(const steer_result_file* file);
STEER_API const double* steer_result_file_alpha(const steer_result_file* file);
STEER_API const uint8_t* steer_result_file_flipped(
    const steer_result_file* file);
STEER_API double steer_result_file_objective(const steer_result_file* file);
STEER_API double steer_result_file_objective_err(const steer_result_file* file);
STEER_API uint64_t steer_result_file_iterations(const steer_result_file* file);
STEER_API uint64_t steer_result_file_mistakes(const steer_result_file* file);
STEER_API int steer_result_file_is_budgeted(const steer_result_file* file);
STEER_API const uint8_t* steer_result_file_selected(
    const steer_result_file* file);
STEER_API uint32_t steer_result_file_k(const steer_result_file* file);
STEER_API const char* steer_result_file_strategy(const steer_result_file* file);
STEER_API int steer_result_file_stalled(const steer_result_file* file);
STEER_API void steer_result_file_free(steer_result_file* file);

/* ------------------------------------------------------------------ */
/* Objective evaluation                                                */

/* Dense direct solve; fails with STEER_ERR_TOO_LARGE past dense_limit
 * (pass 0 for the built-in default). */
STEER_API steer_status steer_objective_exact(const steer_instance* inst,
                                             const double* alpha,
                                             uint32_t dense_limit,
                                             double* value);

/* Certified iteration to per-coordinate tolerance coord_tol; err receives
 * the objective-level bound n * err(t). */
STEER_API steer_status steer_objective_iterative(const steer_instance* inst,
                                                 const double* alpha,
                                                 double coord_tol, int threads,
                                                 double* value, double* err,
                                                 uint64_t* iterations);

/* ------------------------------------------------------------------ */
/* Optimality audit                                                    */

/* Checks that flipping any of the given coordinates (all n when coords is
 * NULL) to its opposite bound does not improve the objective by more than
 * tol. Pass 0 for dense_limit / tol / spot_coord_tol to get the defaults. */
STEER_API steer_status steer_verify(const steer_instance* inst,
                                    const double* alpha,
                                    const uint32_t* coords, size_t coord_count,
                                    int threads, uint32_t dense_limit,
                                    double tol, double spot_coord_tol,
                                    steer_verify_report** out);

STEER_API int steer_verify_report_optimal(const steer_verify_report* rep);
STEER_API double steer_verify_report_base_objective(
    const steer_verify_report* rep);
STEER_API size_t steer_verify_report_violator_count(
    const steer_verify_report* rep);
STEER_API const uint32_t* steer_verify_report_violators(
    const steer_verify_report* rep);
STEER_API size_t steer_verify_report_inconclusive_count(
    const steer_verify_report* rep);
STEER_API const uint32_t* steer_verify_report_inconclusive(
    const steer_verify_report* rep);

STEER_API void steer_verify_report_free(steer_verify_report* rep);

/* ------------------------------------------------------------------ */
/* Desk-scale exact oracle                                             */

/* Enumerates all 2^n bound assignments by dense solves (n <= 20). Bit i set
 * in *best_mask means alpha_i ended at its lower bound. */
STEER_API steer_status steer_brute_force(const steer_instance* inst,
                                         uint64_t* best_mask,
                                         double* best_objective);

#ifdef __cplusplus
}
#endif

#endif /* STEER_H */
