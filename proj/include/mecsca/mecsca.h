/* Copyright 2026 The mecsca Authors
 * SPDX-License-Identifier: Apache-2.0
 *
 * C interface of libmecsca.
 *
 * Every object is an opaque handle released with its *_free function
 * (NULL is accepted). Functions returning mecsca_status report details of
 * the most recent failure on the calling thread through mecsca_last_error().
 * Strings returned through char** out-parameters are heap-allocated and must
 * be released with mecsca_string_free(). Borrowed const char* results stay
 * valid until the owning handle is freed.
 */

#ifndef MECSCA_MECSCA_H_
#define MECSCA_MECSCA_H_

#include <stddef.h>
#include <stdint.h>

#if defined(_WIN32)
#define MECSCA_API __declspec(dllexport)
#else
#define MECSCA_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum mecsca_status {
  MECSCA_OK = 0,
  MECSCA_ERR_INVALID_ARGUMENT = 1, /* malformed input or out-of-range setting */
  MECSCA_ERR_INTERNAL = 2
} mecsca_status;

typedef struct mecsca_config mecsca_config;
typedef struct mecsca_problem mecsca_problem;
typedef struct mecsca_solution mecsca_solution;
typedef struct mecsca_sweep mecsca_sweep;
typedef struct mecsca_oracle mecsca_oracle;
typedef struct mecsca_validation mecsca_validation;

MECSCA_API const char* mecsca_version(void);
/* Message of the last failed call on this thread; "" if none. */
MECSCA_API const char* mecsca_last_error(void);
MECSCA_API void mecsca_string_free(char* s);

/* ---- configuration ---------------------------------------------------- */

/* json may be NULL or empty for defaults. */
MECSCA_API mecsca_status mecsca_config_from_json(const char* json, mecsca_config** out);
MECSCA_API void mecsca_config_free(mecsca_config* config);
/* Override one setting by name: seed, drops, drop_index, jobs, out, users,
 * eta, mode, tmax, suite, mutation, problem. Lists are comma-separated. */
MECSCA_API mecsca_status mecsca_config_set(mecsca_config* config, const char* key,
                                           const char* value);
/* Apply the defaults of command "solve", "sweep", "oracle" or "validate". */
MECSCA_API mecsca_status mecsca_config_resolve(mecsca_config* config, const char* command);
MECSCA_API mecsca_status mecsca_config_to_json(const mecsca_config* config, char** out);
/* 16 hex digits. */
MECSCA_API mecsca_status mecsca_config_hash(const mecsca_config* config, char** out);
MECSCA_API uint64_t mecsca_config_seed(const mecsca_config* config);
/* Borrowed; the output directory. */
MECSCA_API const char* mecsca_config_out_dir(const mecsca_config* config);

/* ---- problems --------------------------------------------------------- */

MECSCA_API mecsca_status mecsca_problem_from_json(const char* json, mecsca_problem** out);
/* Explicit problem of a resolved configuration, else its seeded drop. */
MECSCA_API mecsca_status mecsca_problem_from_config(const mecsca_config* config,
                                                    mecsca_problem** out);
MECSCA_API mecsca_status mecsca_problem_to_json(const mecsca_problem* problem, char** out);
MECSCA_API size_t mecsca_problem_num_users(const mecsca_problem* problem);
MECSCA_API void mecsca_problem_free(mecsca_problem* problem);

/* ---- single solve ----------------------------------------------------- */

typedef struct mecsca_solve_summary {
  const char* status; /* stationary, max_iters, stalled, infeasible_scenario, inner_failure */
  int feasible;       /* final point passes the feasibility check */
  int iterations;
  double initial_objective; /* J */
  double objective;         /* J */
  double final_residual;
  double max_iterate_violation;
} mecsca_solve_summary;

/* config may be NULL for default solver settings. An infeasible scenario is
 * not an error of this call; inspect the summary. */
MECSCA_API mecsca_status mecsca_solve(const mecsca_problem* problem, const mecsca_config* config,
                                      mecsca_solution** out);
MECSCA_API mecsca_status mecsca_solution_summary(const mecsca_solution* solution,
                                                 mecsca_solve_summary* out);
/* Columns: iter,objective_J,residual,delta,inner_iters,worst_violation */
MECSCA_API mecsca_status mecsca_solution_trace_csv(const mecsca_solution* solution, char** out);
MECSCA_API mecsca_status mecsca_solution_allocation_json(const mecsca_solution* solution,
                                                         char** out);
MECSCA_API void mecsca_solution_free(mecsca_solution* solution);

/* ---- Monte-Carlo sweep ------------------------------------------------ */

/* config must be resolved for "sweep". */
MECSCA_API mecsca_status mecsca_sweep_run(const mecsca_config* config, mecsca_sweep** out);
/* Columns: eta,mode,drop,seed,sum_energy_J,iterations,status,infeasible_flag */
MECSCA_API mecsca_status mecsca_sweep_records_csv(const mecsca_sweep* sweep, char** out);
/* Columns: eta,mode,mean_J,median_J,stderr_J,n_feasible */
MECSCA_API mecsca_status mecsca_sweep_aggregate_csv(const mecsca_sweep* sweep, char** out);
/* Paired saving 1 - sum E_mode / sum E_separate; *available = 0 when no drop
 * was solved in both modes. */
MECSCA_API mecsca_status mecsca_sweep_saving(const mecsca_sweep* sweep, double eta,
                                             const char* mode, double* saving, int* available);
/* Human-readable savings table. */
MECSCA_API mecsca_status mecsca_sweep_summary(const mecsca_sweep* sweep, char** out);
MECSCA_API void mecsca_sweep_free(mecsca_sweep* sweep);

/* ---- grid oracle ------------------------------------------------------ */

typedef struct mecsca_oracle_summary {
  int found;
  double objective; /* J; +inf when nothing is feasible */
  uint64_t evaluated;
  uint64_t verified;
} mecsca_oracle_summary;

/* Grid settings come from config (may be NULL for the defaults). */
MECSCA_API mecsca_status mecsca_oracle_run(const mecsca_problem* problem,
                                           const mecsca_config* config, mecsca_oracle** out);
MECSCA_API mecsca_status mecsca_oracle_summary_get(const mecsca_oracle* oracle,
                                                   mecsca_oracle_summary* out);
/* Columns: rank,objective_J followed by the allocation fields. */
MECSCA_API mecsca_status mecsca_oracle_leaders_csv(const mecsca_oracle* oracle, char** out);
MECSCA_API void mecsca_oracle_free(mecsca_oracle* oracle);

/* ---- validation suites ------------------------------------------------ */

typedef struct mecsca_suite_report {
  const char* suite; /* borrowed */
  int passed;
  long checks;
  long failures;
  double worst;
  const char* detail; /* borrowed */
} mecsca_suite_report;

MECSCA_API mecsca_status mecsca_validate_run(const mecsca_config* config,
                                             mecsca_validation** out);
MECSCA_API size_t mecsca_validation_count(const mecsca_validation* validation);
MECSCA_API mecsca_status mecsca_validation_report(const mecsca_validation* validation,
                                                  size_t index, mecsca_suite_report* out);
MECSCA_API int mecsca_validation_passed(const mecsca_validation* validation);
MECSCA_API void mecsca_validation_free(mecsca_validation* validation);

#ifdef __cplusplus
}
#endif

#endif /* MECSCA_MECSCA_H_ */
