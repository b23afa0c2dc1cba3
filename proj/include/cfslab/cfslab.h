/* C interface to the cfslab library.
 *
 * Every function returns a cfs_status; on failure a message is available from
 * cfs_last_error() on the same thread until the next failing call. Objects are
 * opaque and owned by the caller, release them with the matching *_free.
 * Strings handed out by the library are released with cfs_string_free.
 */
#ifndef CFSLAB_CFSLAB_H
#define CFSLAB_CFSLAB_H

#include <stddef.h>

#if defined(_WIN32)
#  if defined(CFS_BUILDING_LIBRARY)
#    define CFS_API __declspec(dllexport)
#  else
#    define CFS_API __declspec(dllimport)
#  endif
#else
#  define CFS_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum {
  CFS_OK = 0,
  CFS_ERR_STRUCTURAL = 1,
  CFS_ERR_NUMERIC = 2,
  CFS_ERR_DOMAIN = 3,
  CFS_ERR_RESOURCE = 4,
  CFS_ERR_PARSE = 5,
  CFS_ERR_IO = 6,
  CFS_ERR_NULL = 7,
  CFS_ERR_INTERNAL = 8
} cfs_status;

typedef enum { CFS_SPACELIKE = 0, CFS_TIMELIKE = 1, CFS_LIGHTLIKE = 2 } cfs_class;

typedef struct { double re, im; } cfs_complex;

typedef struct {
  double rel_eq, rel_real, tol_rank, tol_herm;
} cfs_tolerances;

typedef struct {
  double action, volume, trace, boundedness;
} cfs_action_report;

typedef struct {
  double kappa, r_tr, s_vol;
} cfs_el_params;

typedef struct {
  double t, r, eps;
  cfs_complex alpha, beta;
  double b, x_dot_x;
  int cls; /* cfs_class */
  double lagrangian;
} cfs_kernel_row;

typedef struct {
  double m_eps, l_eps, est_rel_err;
  size_t n_evals;
  double seconds;
  int ok;
} cfs_sweep_row;

typedef struct {
  double a, b, stderr_b, r2;
  size_t used;
} cfs_fit;

typedef struct cfs_system cfs_system;
typedef struct cfs_sweep_config cfs_sweep_config;
typedef struct cfs_sweep_result cfs_sweep_result;

CFS_API const char* cfs_last_error(void);
CFS_API const char* cfs_version(void);
CFS_API void cfs_string_free(char* s);
CFS_API cfs_tolerances cfs_default_tolerances(void);
CFS_API const char* cfs_class_name(int cls);

/* --- systems ------------------------------------------------------------ */

/* psi holds npoints blocks of 2n x N entries, each row-major. tol may be NULL. */
CFS_API cfs_status cfs_system_create(int n, int N, size_t npoints, const cfs_complex* psi, const double* weights,
                                     const cfs_tolerances* tol, cfs_system** out);
CFS_API cfs_status cfs_system_load(const char* path, cfs_system** out);
CFS_API cfs_status cfs_system_parse(const char* text, cfs_system** out);
CFS_API cfs_status cfs_system_save(const cfs_system* sys, const char* path);
CFS_API cfs_status cfs_system_format(const cfs_system* sys, char** out);
CFS_API void cfs_system_free(cfs_system* sys);

CFS_API cfs_status cfs_system_info(const cfs_system* sys, int* n, int* N, size_t* npoints);
CFS_API cfs_status cfs_system_weights(const cfs_system* sys, double* out);
CFS_API cfs_status cfs_system_tolerances(const cfs_system* sys, cfs_tolerances* out);
CFS_API cfs_status cfs_system_with_tolerances(const cfs_system* sys, const cfs_tolerances* tol, cfs_system** out);
CFS_API cfs_status cfs_system_with_weights(const cfs_system* sys, const double* weights, cfs_system** out);
CFS_API cfs_status cfs_point_inertia(const cfs_system* sys, size_t i, int* positive, int* negative);

/* --- causal structure and action ---------------------------------------- */

/* out receives 2n values */
CFS_API cfs_status cfs_pair_spectrum(const cfs_system* sys, size_t i, size_t j, cfs_complex* out);
CFS_API cfs_status cfs_pair_classify(const cfs_system* sys, size_t i, size_t j, int* cls);
CFS_API cfs_status cfs_pair_lagrangian(const cfs_system* sys, size_t i, size_t j, double* out);
/* All ordered pairs, row-major m x m arrays; any output may be NULL. */
CFS_API cfs_status cfs_pair_table(const cfs_system* sys, unsigned threads, int* cls, double* lagrangian,
                                  double* b_total);
CFS_API cfs_status cfs_action(const cfs_system* sys, unsigned threads, cfs_action_report* out);
CFS_API cfs_status cfs_el_function(const cfs_system* sys, size_t i, const cfs_el_params* p, double* out);
/* out receives one residual per point */
CFS_API cfs_status cfs_el_residuals(const cfs_system* sys, const cfs_el_params* p, unsigned threads, double* out);

/* --- observables --------------------------------------------------------- */

/* u has N entries; region lists point indices (nreg may be 0). */
CFS_API cfs_status cfs_one_particle_measure(const cfs_system* sys, const cfs_complex* u, const size_t* region,
                                            size_t nreg, double* out);
/* mask receives one byte per point */
CFS_API cfs_status cfs_one_particle_support(const cfs_system* sys, const cfs_complex* u, unsigned char* mask);
CFS_API cfs_status cfs_is_localized(const cfs_system* sys, const cfs_complex* u, const size_t* region, size_t nreg,
                                    int* out);
CFS_API cfs_status cfs_is_delocalized(const cfs_system* sys, const cfs_complex* u, int* out);
/* <O(U)> for the total system, (1/2n) tr O(U) */
CFS_API cfs_status cfs_region_expectation(const cfs_system* sys, const size_t* region, size_t nreg, double* out);
/* <u|omega u> for the subsystem spanned by k orthonormal columns of basis (N x k, column-major);
 * u has dim >= N entries. */
CFS_API cfs_status cfs_occupation(const cfs_complex* u, size_t dim, const cfs_complex* basis, size_t N, size_t k,
                                  double* out);
CFS_API cfs_status cfs_correlation_one(const cfs_system* sys, const cfs_complex* u, size_t i, size_t j,
                                       cfs_complex* out);
CFS_API cfs_status cfs_correlation_total(const cfs_system* sys, size_t i, size_t j, double* out);

/* --- Minkowski kernel ---------------------------------------------------- */

CFS_API cfs_status cfs_bessel_k(int nu, cfs_complex z, cfs_complex* out, int* underflow);
CFS_API cfs_status cfs_kernel_eval(double t, double r, double m, double eps, cfs_kernel_row* out);
CFS_API const char* cfs_kernel_csv_header(void);
CFS_API cfs_status cfs_kernel_csv_line(const cfs_kernel_row* row, char** out);
CFS_API cfs_status cfs_count_sea_modes(double box_len, double k_cut, size_t* out);
/* config is the sea-sampler JSON text */
CFS_API cfs_status cfs_sea_sample(const char* config, cfs_system** out);

/* --- sweep --------------------------------------------------------------- */

CFS_API cfs_status cfs_sweep_config_default(cfs_sweep_config** out);
CFS_API cfs_status cfs_sweep_config_parse(const char* text, cfs_sweep_config** out);
CFS_API cfs_status cfs_sweep_config_set_eps_list(cfs_sweep_config* cfg, const double* eps, size_t n);
CFS_API cfs_status cfs_sweep_config_set_box_len(cfs_sweep_config* cfg, double box_len);
CFS_API cfs_status cfs_sweep_config_set_threads(cfs_sweep_config* cfg, unsigned threads);
CFS_API cfs_status cfs_sweep_config_validate(const cfs_sweep_config* cfg);
CFS_API cfs_status cfs_sweep_config_format(const cfs_sweep_config* cfg, char** out);
CFS_API void cfs_sweep_config_free(cfs_sweep_config* cfg);

CFS_API cfs_status cfs_sweep_run(const cfs_sweep_config* cfg, cfs_sweep_result** out);
CFS_API cfs_status cfs_sweep_result_parse_csv(const char* text, cfs_sweep_result** out);
CFS_API size_t cfs_sweep_result_rows(const cfs_sweep_result* res);
CFS_API cfs_status cfs_sweep_result_row(const cfs_sweep_result* res, size_t k, cfs_sweep_row* out);
CFS_API cfs_status cfs_sweep_result_csv(const cfs_sweep_result* res, int with_seconds, char** out);
CFS_API cfs_status cfs_sweep_fit(const cfs_sweep_result* res, cfs_fit* out);
/* fit summary JSON; cfg may be NULL */
CFS_API cfs_status cfs_sweep_fit_json(const cfs_sweep_result* res, const cfs_sweep_config* cfg, char** out);
CFS_API cfs_status cfs_sweep_svg(const cfs_sweep_result* res, int with_fit, char** out);
CFS_API void cfs_sweep_result_free(cfs_sweep_result* res);

#ifdef __cplusplus
}
#endif

#endif
