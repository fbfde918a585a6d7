#ifndef QLEVY_H
#define QLEVY_H

/* C interface to the iterated-stochastic-integral sampler. All entry points
 * return a status code; out-parameters are written only on QLEVY_OK unless
 * stated otherwise. Handles are opaque and freed with qlevy_model_free. */

#include <stddef.h>
#include <stdint.h>

#ifdef __cplusplus
extern "C" {
#endif

typedef enum qlevy_status {
    QLEVY_OK = 0,
    QLEVY_ERR_INVALID_ARGUMENT = 1,
    QLEVY_ERR_SPECTRUM = 2,       /* spectrum not positive / nonincreasing / trace class */
    QLEVY_ERR_CAPACITY = 3,       /* basis count beyond the dense pair-matrix limit */
    QLEVY_ERR_NOT_PSD = 4,        /* matrix square root of an indefinite input */
    QLEVY_ERR_BUFFER_TOO_SMALL = 5,
    QLEVY_ERR_INTERNAL = 6
} qlevy_status;

const char* qlevy_status_string(qlevy_status status);

/* --- covariance spectrum ------------------------------------------------ */

typedef struct qlevy_model qlevy_model;

/* spec is "pow:<c>:<rho>" or "list:<v1>,<v2>,...". */
qlevy_status qlevy_model_parse(const char* spec, int basis_count, qlevy_model** out);
qlevy_status qlevy_model_from_list(const double* eigenvalues, int basis_count, qlevy_model** out);
void qlevy_model_free(qlevy_model* model);

int qlevy_model_basis_count(const qlevy_model* model);
/* 1-based j; power-law spectra extend past the basis count. */
qlevy_status qlevy_model_eigenvalue(const qlevy_model* model, int j, double* out);
double qlevy_model_trace(const qlevy_model* model);

/* --- pair bookkeeping ---------------------------------------------------- */

/* K(K-1)/2; the strict upper triangle enumerated row-major,
 * (1,2),(1,3),...,(1,K),(2,3),... */
int qlevy_pair_count(int basis_count);
/* 1-based position -> 1-based (i, j). */
qlevy_status qlevy_pair_at(int basis_count, int position, int* i, int* j);

/* --- truncation selection ------------------------------------------------ */

typedef enum qlevy_d_rule {
    QLEVY_D_SERIES = 1,          /* series only: ceil(h^(1-2*gamma)) */
    QLEVY_D_TAIL_BASIS = 2,      /* tail-corrected: ceil(h^(1/2-gamma) sqrt(K^2(K-1))) */
    QLEVY_D_TAIL_SPECTRUM = 3    /* tail-corrected: ceil(h^(1/2-gamma) / sqrt(min eta)) */
} qlevy_d_rule;

qlevy_status qlevy_choose_d(const qlevy_model* model, qlevy_d_rule rule, double h, double gamma,
                            int* out);

/* --- sampling ------------------------------------------------------------ */

/* Draws one step for (seed, replicate). algorithm is 1 (truncated series) or
 * 2 (series plus Gaussian tail correction). Output buffers may be NULL to
 * skip: dw has K entries, areas has K(K-1)/2 entries in pair order, and
 * integrals has K*K entries in row-major order. */
qlevy_status qlevy_sample_step(const qlevy_model* model, double h, int algorithm, int truncation,
                               uint64_t seed, uint64_t replicate, double* dw, double* areas,
                               double* integrals);

/* --- Monte Carlo studies -------------------------------------------------- */

/* Mean-square truncation error over a grid of levels, emitted as CSV with
 * header algorithm,K,h,D,N,mse,stderr,analytic,slope_group,seed. On return
 * *csv_len holds the text length excluding the terminator (also when the
 * buffer is NULL or too small, so a two-call pattern works). slope may be
 * NULL; it receives the fitted log-log slope, or NaN for short grids. */
qlevy_status qlevy_convergence_csv(const qlevy_model* model, double h, int algorithm,
                                   const int* d_grid, int d_count, int replicates, uint64_t seed,
                                   int workers, char* buffer, size_t buffer_size, size_t* csv_len,
                                   double* slope);

/* Moment and identity verification of assembled integral matrices. *pass is
 * always written. The plain-text report (one line per check) follows the
 * same buffer protocol as qlevy_convergence_csv; buffer may be NULL. */
qlevy_status qlevy_moment_report(const qlevy_model* model, double h, int algorithm,
                                 int truncation, int replicates, uint64_t seed, int* pass,
                                 char* buffer, size_t buffer_size, size_t* report_len);

/* Closed-form tail-covariance factor check over `increments` random draws:
 * passes when max ||S S^T - Sigma||_F <= 1e-10 ||Sigma||_F and the smallest
 * eigenvalue of Sigma stays at or above 2 * eta_{K-1} * eta_K. Requires
 * K >= 2. *pass is always written; buffer protocol as above. */
qlevy_status qlevy_factor_report(const qlevy_model* model, double h, int increments,
                                 uint64_t seed, int* pass, char* buffer, size_t buffer_size,
                                 size_t* report_len);

#ifdef __cplusplus
}
#endif

#endif
