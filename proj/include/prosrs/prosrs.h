#ifndef PROSRS_PROSRS_H
#define PROSRS_PROSRS_H

#include <stddef.h>
#include <stdint.h>

#ifdef __cplusplus
extern "C" {
#endif

#if defined(_WIN32)
#define PROSRS_API __declspec(dllexport)
#else
#define PROSRS_API __attribute__((visibility("default")))
#endif

typedef enum prosrs_status {
  PROSRS_OK = 0,
  PROSRS_ERR_INVALID_ARGUMENT = 1,
  PROSRS_ERR_CONFIG = 2,
  PROSRS_ERR_EVALUATOR = 3,
  PROSRS_ERR_INSUFFICIENT_DATA = 4,
  PROSRS_ERR_IO = 5,
  PROSRS_ERR_INTERNAL = 6
} prosrs_status;

typedef struct prosrs_config prosrs_config;
typedef struct prosrs_objective prosrs_objective;
typedef struct prosrs_result prosrs_result;
typedef struct prosrs_experiment prosrs_experiment;

/* Returns nonzero to signal failure; *y must be finite on success. */
typedef int (*prosrs_eval_fn)(const double* x, size_t dim, uint64_t seed, double* y, void* user);
typedef int (*prosrs_mean_fn)(const double* x, size_t dim, double* y, void* user);

/* Message of the last failed call on this thread; "" if none. */
PROSRS_API const char* prosrs_last_error(void);
PROSRS_API const char* prosrs_version(void);

/* Configuration */
PROSRS_API prosrs_status prosrs_config_create_default(size_t dim, size_t n_par, prosrs_config** out);
PROSRS_API void prosrs_config_destroy(prosrs_config* config);
/* Real fields: sigma_crit, beta_init, beta_min, rho, r_resolution, delta_gamma,
   s_init.gamma, s_init.p, s_init.sigma. */
PROSRS_API prosrs_status prosrs_config_set_real(prosrs_config* config, const char* key, double value);
PROSRS_API prosrs_status prosrs_config_get_real(const prosrs_config* config, const char* key, double* value);
/* Integer fields: n_par, n_iterations, m_doe, c_fail, n_candidates_per_dim,
   doe_restarts, seed. */
PROSRS_API prosrs_status prosrs_config_set_uint(prosrs_config* config, const char* key, uint64_t value);
PROSRS_API prosrs_status prosrs_config_get_uint(const prosrs_config* config, const char* key, uint64_t* value);
PROSRS_API prosrs_status prosrs_config_apply_json(prosrs_config* config, const char* json);
/* Writes a NUL-terminated JSON document. *needed receives the full length
   including the terminator; the call fails with INVALID_ARGUMENT if it does
   not fit in `capacity`. */
PROSRS_API prosrs_status prosrs_config_to_json(const prosrs_config* config, char* buffer, size_t capacity,
                                               size_t* needed);

/* Objectives */
PROSRS_API prosrs_status prosrs_objective_benchmark(const char* name, prosrs_objective** out);
PROSRS_API prosrs_status prosrs_objective_callback(size_t dim, const double* lower, const double* upper,
                                                   prosrs_eval_fn eval, void* user, prosrs_objective** out);
/* Optional noise-free mean, used for reporting only. */
PROSRS_API prosrs_status prosrs_objective_set_true_mean(prosrs_objective* objective, prosrs_mean_fn mean,
                                                        void* user);
PROSRS_API prosrs_status prosrs_objective_dimension(const prosrs_objective* objective, size_t* dim);
PROSRS_API prosrs_status prosrs_objective_bounds(const prosrs_objective* objective, double* lower,
                                                 double* upper);
PROSRS_API prosrs_status prosrs_objective_evaluate(const prosrs_objective* objective, const double* x,
                                                   uint64_t seed, double* y);
PROSRS_API prosrs_status prosrs_objective_true_mean(const prosrs_objective* objective, const double* x,
                                                    double* y);
PROSRS_API void prosrs_objective_destroy(prosrs_objective* objective);

/* Runs. algo is "prosrs" or "random". n_threads <= 1 evaluates serially. */
PROSRS_API prosrs_status prosrs_run(const prosrs_objective* objective, const prosrs_config* config,
                                    const char* algo, size_t n_threads, prosrs_result** out);
PROSRS_API void prosrs_result_destroy(prosrs_result* result);
PROSRS_API prosrs_status prosrs_result_best(const prosrs_result* result, double* x_best, double* y_best);
PROSRS_API size_t prosrs_result_n_logs(const prosrs_result* result);
PROSRS_API size_t prosrs_result_n_evaluations(const prosrs_result* result);
PROSRS_API size_t prosrs_result_n_restarts(const prosrs_result* result);
PROSRS_API size_t prosrs_result_deepest_zoom_level(const prosrs_result* result);

typedef struct prosrs_log_record {
  uint64_t iteration;
  /* "doe", "normal", "zoom_in", "zoom_out", "restart"; static storage. */
  const char* event;
  uint64_t node_id;
  uint64_t zoom_level;
  uint64_t node_size;
  double gamma;
  double p;
  double sigma;
  uint64_t batch_size;
  double best_y;
  double algo_time_s;
  double eval_time_s;
} prosrs_log_record;

PROSRS_API prosrs_status prosrs_result_log(const prosrs_result* result, size_t index, prosrs_log_record* record);
/* Copies the batch of log `index` (batch_size * dim doubles, row major) and its values. */
PROSRS_API prosrs_status prosrs_result_log_batch(const prosrs_result* result, size_t index, double* points,
                                                 double* values);
PROSRS_API prosrs_status prosrs_result_log_x_best(const prosrs_result* result, size_t index, double* x_best);

/* Experiments: the command-line layer. spec_json follows the configuration
   file format; problems named in it are benchmarks. */
PROSRS_API prosrs_status prosrs_experiment_create(const char* spec_json, prosrs_experiment** out);
/* Adds a named objective to the experiment's problem list. */
PROSRS_API prosrs_status prosrs_experiment_add_objective(prosrs_experiment* experiment, const char* name,
                                                         const prosrs_objective* objective);
PROSRS_API prosrs_status prosrs_experiment_run(prosrs_experiment* experiment);
/* Summary of the last successful run; same buffer contract as prosrs_config_to_json. */
PROSRS_API prosrs_status prosrs_experiment_summary_json(const prosrs_experiment* experiment, char* buffer,
                                                        size_t capacity, size_t* needed);
PROSRS_API void prosrs_experiment_destroy(prosrs_experiment* experiment);

#ifdef __cplusplus
}
#endif

#endif
