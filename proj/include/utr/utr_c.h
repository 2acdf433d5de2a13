/* C interface to the UTR solver library. Every call returns a utr_status;
 * on failure utr_last_error() holds a message for the calling thread.
 * Strings returned through char** are owned by the caller and released with
 * utr_string_free. */
#ifndef UTR_C_H
#define UTR_C_H

#ifdef __cplusplus
extern "C" {
#endif

#if defined(_WIN32)
#define UTR_API __declspec(dllexport)
#else
#define UTR_API __attribute__((visibility("default")))
#endif

typedef enum utr_status {
  UTR_OK = 0,
  UTR_ERR_CONFIG = 1,
  UTR_ERR_PARSE = 2,
  UTR_ERR_DATA = 3,
  UTR_ERR_NUMERICAL = 4,
  UTR_ERR_CONTRACT = 5,
  UTR_ERR_INVARIANT = 6,
  UTR_ERR_IO = 7,
  UTR_ERR_INVALID_ARGUMENT = 8,
  UTR_ERR_INTERNAL = 9
} utr_status;

/* Terminal run status, matching the report JSON "status" strings. */
typedef enum utr_run_status {
  UTR_RUN_FOSP = 0,
  UTR_RUN_SOSP = 1,
  UTR_RUN_MAX_ITER = 2,
  UTR_RUN_FAILURE = 3
} utr_run_status;

typedef struct utr_problem utr_problem;
typedef struct utr_report utr_report;
typedef struct utr_experiment utr_experiment;

UTR_API const char* utr_version(void);
UTR_API const char* utr_last_error(void);
UTR_API void utr_string_free(char* s);

/* JSON array of built-in problem names. */
UTR_API utr_status utr_builtin_problems(char** json_out);

/* name: built-in name or "libsvm:<path>". */
UTR_API utr_status utr_problem_create(const char* name, utr_problem** out);
UTR_API void utr_problem_destroy(utr_problem* p);
UTR_API utr_status utr_problem_dimension(const utr_problem* p, int* n);
UTR_API utr_status utr_problem_start(const utr_problem* p, double* x, int n);
/* grad may be NULL. */
UTR_API utr_status utr_problem_evaluate(utr_problem* p, const double* x, int n,
                                        double* f, double* grad);
UTR_API utr_status utr_problem_fd_check(utr_problem* p, const double* x, int n,
                                        double h, double* grad_err,
                                        double* hess_err);

/* solver_json: {"kind": ..., "name": ..., "params": {...}, "eps": ...,
 * "max_iter": ..., "time_limit": ...}. */
UTR_API utr_status utr_solve(const char* problem, const char* solver_json,
                             utr_report** out);
UTR_API void utr_report_destroy(utr_report* r);
UTR_API utr_status utr_report_status(const utr_report* r, utr_run_status* s);
UTR_API utr_status utr_report_values(const utr_report* r, double* f,
                                     double* grad_norm, int* iterations);
UTR_API utr_status utr_report_to_json(const utr_report* r, char** json_out);
UTR_API utr_status utr_report_trace_csv(const utr_report* r, char** csv_out);

UTR_API utr_status utr_experiment_create(const char* config_json,
                                         utr_experiment** out);
UTR_API void utr_experiment_destroy(utr_experiment* e);
UTR_API utr_status utr_experiment_run(utr_experiment* e, int* failures);
UTR_API utr_status utr_experiment_write(const utr_experiment* e,
                                        const char* out_dir);
UTR_API utr_status utr_experiment_summary_csv(const utr_experiment* e,
                                              char** csv_out);

UTR_API utr_status utr_summarize_dir(const char* dir, double failure_sentinel,
                                     char** csv_out);

/* problems_json: JSON array of names (may contain "builtin"). Writes a JSON
 * array of {problem, grad_err, hess_err, pass}. */
UTR_API utr_status utr_check_oracles(const char* problems_json,
                                     unsigned long long seed, char** json_out,
                                     int* failures);

#ifdef __cplusplus
}
#endif

#endif
