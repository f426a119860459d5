/* C interface to the lra-noise library. */
#ifndef LRA_NOISE_H
#define LRA_NOISE_H

#include <stddef.h>
#include <stdint.h>

#if defined(_WIN32)
#if defined(LRA_BUILDING_LIBRARY)
#define LRA_API __declspec(dllexport)
#else
#define LRA_API __declspec(dllimport)
#endif
#else
#define LRA_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum lra_status {
  LRA_OK = 0,
  LRA_ERR_INVALID_ARGUMENT = 1,
  LRA_ERR_DOMAIN = 2,
  LRA_ERR_CONVERGENCE = 3,
  LRA_ERR_IO = 4,
  LRA_ERR_CONFIG = 5,
  LRA_ERR_INTERNAL = 6
} lra_status;

typedef enum lra_command {
  LRA_CMD_KERNEL_CHECK = 0,
  LRA_CMD_PREDICT = 1,
  LRA_CMD_SIMULATE = 2,
  LRA_CMD_VALIDATE = 3,
  LRA_CMD_SWEEP = 4
} lra_command;

typedef struct lra_kernel lra_kernel;
typedef struct lra_table lra_table;
typedef struct lra_experiment lra_experiment;

LRA_API const char* lra_version(void);
/* Message of the last failed call on this thread; empty after success. */
LRA_API const char* lra_last_error(void);
/* Frees strings returned through char** out-parameters. */
LRA_API void lra_string_free(char* s);

LRA_API lra_status lra_kernel_create_keys(double a, lra_kernel** out);
LRA_API lra_status lra_kernel_create_bspline3(lra_kernel** out);
LRA_API lra_status lra_kernel_from_json(const char* json, lra_kernel** out);
LRA_API lra_status lra_kernel_to_json(const lra_kernel* k, char** out);
LRA_API lra_status lra_kernel_eval(const lra_kernel* k, double t, int derivative_order, double* out);
LRA_API lra_status lra_kernel_spectrum(const lra_kernel* k, double lambda, double* re, double* im);
LRA_API void lra_kernel_destroy(lra_kernel* k);

/* Filtered kernel table (Hilbert transform of phi'). */
LRA_API lra_status lra_table_build(const lra_kernel* k, double grid_step, double half_range, lra_table** out);
LRA_API lra_status lra_table_from_json(const char* json, lra_table** out);
LRA_API lra_status lra_table_to_json(const lra_table* t, char** out);
LRA_API lra_status lra_table_value(const lra_table* t, double x, double* out);
LRA_API void lra_table_destroy(lra_table* t);

LRA_API lra_status lra_experiment_create(const char* config_json, lra_experiment** out);
LRA_API lra_status lra_experiment_load(const char* path, lra_experiment** out);
LRA_API lra_status lra_experiment_set_seed(lra_experiment* e, uint64_t seed);
LRA_API lra_status lra_experiment_set_threads(lra_experiment* e, unsigned threads);
LRA_API lra_status lra_experiment_set_plots(lra_experiment* e, int enabled);
LRA_API lra_status lra_experiment_set_output_dir(lra_experiment* e, const char* dir);
LRA_API lra_status lra_experiment_config_json(const lra_experiment* e, char** out);
/* Predicted covariance, row-major into matrix[capacity]; *n receives the offset count. */
LRA_API lra_status lra_experiment_predict(const lra_experiment* e, double* matrix, size_t capacity, size_t* n);
/* Runs a command and writes its artifacts; *passed is 1 when all thresholds hold.
   summary may be null; otherwise it receives a string to release with lra_string_free. */
LRA_API lra_status lra_experiment_run(const lra_experiment* e, lra_command cmd, int* passed, char** summary);
LRA_API void lra_experiment_destroy(lra_experiment* e);

LRA_API lra_status lra_command_from_name(const char* name, lra_command* out);

#ifdef __cplusplus
}
#endif

#endif
