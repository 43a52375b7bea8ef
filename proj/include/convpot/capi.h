#ifndef CONVPOT_CAPI_H
#define CONVPOT_CAPI_H

/* C interface to the convpot library. Every object is an opaque handle owned
 * by the caller and released with its *_free function. Functions return a
 * cp_status; on failure cp_last_error() holds a message for the calling
 * thread. Strings returned through char** are freed with cp_string_free. */

#include <stddef.h>

#if defined(_WIN32)
#  define CP_API __declspec(dllexport)
#else
#  define CP_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum cp_status {
  CP_OK = 0,
  CP_INVALID_ARGUMENT = 1,
  CP_NON_CONVEX = 2,
  CP_DEGENERATE = 3,
  CP_NO_CONVERGENCE = 4,
  CP_PARAMETER_SOLVE_FAILED = 5,
  CP_OUTSIDE_DOMAIN_OF_DEFINITION = 6,
  CP_QUADRATURE_BUDGET_EXCEEDED = 7,
  CP_BREAKDOWN_AT_DEGREE = 8,
  CP_EIGEN_FAILURE = 9,
  CP_EXTERIOR_ZERO = 10,
  CP_GRID_MISMATCH = 11,
  CP_SINGULAR_EVALUATION = 12,
  CP_LAWSON_STALL = 13,
  CP_INSUFFICIENT_DATA = 14,
  CP_CONFIG_ERROR = 15,
  CP_IO_ERROR = 16,
  CP_INTERNAL = 99
} cp_status;

typedef enum cp_location { CP_INTERIOR = 0, CP_BOUNDARY = 1, CP_EXTERIOR = 2 } cp_location;

typedef struct cp_domain cp_domain;
typedef struct cp_exterior_map cp_exterior_map;
typedef struct cp_interior_map cp_interior_map;
typedef struct cp_ortho cp_ortho;
typedef struct cp_zeros cp_zeros;

CP_API const char* cp_version(void);
CP_API const char* cp_status_name(int status);
CP_API const char* cp_last_error(void);
CP_API void cp_string_free(char* s);

/* Domains. The literal is JSON, e.g. {"kind":"regular_polygon","n":4}. */
CP_API int cp_domain_from_json(const char* literal, cp_domain** out);
CP_API void cp_domain_free(cp_domain* d);
CP_API int cp_domain_contains(const cp_domain* d, double re, double im, int* location);
CP_API int cp_domain_perimeter(const cp_domain* d, double* out);

/* Exterior map Phi onto |w| > 1. */
CP_API int cp_exterior_map_build(const cp_domain* d, cp_exterior_map** out);
CP_API int cp_exterior_map_from_json(const char* text, cp_exterior_map** out);
CP_API int cp_exterior_map_to_json(const cp_exterior_map* m, char** out);
CP_API int cp_exterior_map_capacity(const cp_exterior_map* m, double* out);
CP_API int cp_exterior_map_eval(const cp_exterior_map* m, double re, double im, double* out_re, double* out_im);
CP_API int cp_exterior_map_eval_inverse(const cp_exterior_map* m, double re, double im, double* out_re,
                                        double* out_im);
CP_API void cp_exterior_map_free(cp_exterior_map* m);

/* Interior map phi onto the unit disk, phi(centroid) = 0. */
CP_API int cp_interior_map_build(const cp_domain* d, cp_interior_map** out);
CP_API int cp_interior_map_from_json(const char* text, cp_interior_map** out);
CP_API int cp_interior_map_to_json(const cp_interior_map* m, char** out);
CP_API int cp_interior_map_eval(const cp_interior_map* m, double re, double im, double* out_re, double* out_im);
CP_API void cp_interior_map_free(cp_interior_map* m);

/* Orthonormal polynomials for the weight dist(z, L)^m (m = 0: area measure). */
CP_API int cp_ortho_build(const cp_domain* d, double m, int n_max, int extra_degree, cp_ortho** out);
CP_API int cp_ortho_from_json(const char* text, cp_ortho** out);
CP_API int cp_ortho_to_json(const cp_ortho* s, char** out);
CP_API int cp_ortho_degree(const cp_ortho* s, int* out);
CP_API int cp_ortho_log_lambda(const cp_ortho* s, int n, double* out);
CP_API int cp_ortho_eval(const cp_ortho* s, int n, double re, double im, double* out_re, double* out_im);
CP_API void cp_ortho_free(cp_ortho* s);

/* Zeros of Q_n. */
CP_API int cp_zeros_compute(const cp_ortho* s, const cp_domain* d, int n, cp_zeros** out);
CP_API size_t cp_zeros_count(const cp_zeros* z);
CP_API int cp_zeros_get(const cp_zeros* z, size_t i, double* re, double* im, int* location);
CP_API void cp_zeros_free(cp_zeros* z);

/* Experiment runner behind the command-line tool. Negative or zero n_max and
 * jobs keep the config values; out_dir may be NULL. On failure *stage names
 * the pipeline stage (free with cp_string_free). */
typedef struct cp_run_options {
  const char* out_dir;
  int n_max;
  int jobs;
  int no_cache;
} cp_run_options;

CP_API int cp_run(const char* command, const char* config_json, const cp_run_options* options, char** summary_json,
                  char** stage);

#ifdef __cplusplus
}
#endif

#endif
