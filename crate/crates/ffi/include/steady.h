#ifndef STEADY_H
#define STEADY_H

/* Generated by cbindgen from crates/ffi/src/lib.rs. Do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum SteadyMethod {
  STEADY_METHOD_DIRECT = 0,
  STEADY_METHOD_GMRES = 1,
  STEADY_METHOD_BICGSTAB = 2,
  STEADY_METHOD_POWER = 3,
  STEADY_METHOD_POWER_GMRES = 4,
  STEADY_METHOD_POWER_BICGSTAB = 5,
} SteadyMethod;

typedef enum SteadyOrdering {
  STEADY_ORDERING_NATURAL = 0,
  STEADY_ORDERING_RCM = 1,
  STEADY_ORDERING_CMD = 2,
} SteadyOrdering;

typedef enum SteadyStatus {
  STEADY_STATUS_OK = 0,
  STEADY_STATUS_NULL_POINTER = 1,
  STEADY_STATUS_INVALID_ARGUMENT = 2,
  STEADY_STATUS_IO = 3,
  STEADY_STATUS_PARSE = 4,
  STEADY_STATUS_SINGULAR = 5,
  STEADY_STATUS_BREAKDOWN = 6,
  STEADY_STATUS_MEMORY_LIMIT = 7,
  STEADY_STATUS_NOT_UNIQUE = 8,
  STEADY_STATUS_NOT_CONVERGED = 9,
  STEADY_STATUS_DIMENSION_TOO_LARGE = 10,
  STEADY_STATUS_PANIC = 11,
} SteadyStatus;

/*
 Plain Liouvillian of a model.
 */
typedef struct SteadyLiouvillian SteadyLiouvillian;

/*
 Sparse complex matrix.
 */
typedef struct SteadyMatrix SteadyMatrix;

/*
 Steady state and diagnostics.
 */
typedef struct SteadyResult SteadyResult;

typedef struct SteadyBandProfile {
  size_t upper_bandwidth;
  size_t lower_bandwidth;
  size_t bandwidth;
  size_t upper_profile;
  size_t lower_profile;
  size_t profile;
} SteadyBandProfile;

/*
 Solver settings. Start from [`steady_options_default`].
 */
typedef struct SteadyOptions {
  enum SteadyOrdering ordering;
  double tol;
  double drop_tol;
  double fill;
  size_t restart;
  size_t max_iter;
  double sigma;
  /*
   Trace weight; NaN selects the default derived from the diagonal.
   */
  double weight;
  uint64_t seed;
  size_t max_outer;
} SteadyOptions;

/*
 Scalar diagnostics of a solve. `condest` is NaN when no preconditioner
 was built.
 */
typedef struct SteadyDiagnostics {
  double residual;
  size_t iterations;
  size_t outer_iterations;
  bool converged;
  bool breakdown;
  double fill_factor;
  size_t factor_nnz;
  double condest;
  struct SteadyBandProfile band_before;
  struct SteadyBandProfile band_after;
  double build_time;
  double factor_time;
  double solve_time;
} SteadyDiagnostics;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/*
 Message of the last failed call on this thread, or null. The pointer is
 valid until the next failing call on the same thread.
 */
const char *steady_last_error(void);

/*
 Library version as a static NUL-terminated string.
 */
const char *steady_version(void);

/*
 Reads a Matrix Market coordinate file.
 */
enum SteadyStatus steady_matrix_read_mtx(const char *path, struct SteadyMatrix **out);

enum SteadyStatus steady_matrix_write_mtx(const struct SteadyMatrix *m, const char *path);

/*
 Builds a matrix from coordinate triplets; duplicates are summed.
 */
enum SteadyStatus steady_matrix_from_triplets(size_t nrows,
                                              size_t ncols,
                                              const size_t *rows,
                                              const size_t *cols,
                                              const double *re,
                                              const double *im,
                                              size_t len,
                                              struct SteadyMatrix **out);

void steady_matrix_free(struct SteadyMatrix *m);

/*
 Number of rows; 0 for a null handle.
 */
size_t steady_matrix_nrows(const struct SteadyMatrix *m);

/*
 Number of columns; 0 for a null handle.
 */
size_t steady_matrix_ncols(const struct SteadyMatrix *m);

/*
 Stored entries; 0 for a null handle.
 */
size_t steady_matrix_nnz(const struct SteadyMatrix *m);

enum SteadyStatus steady_matrix_band_profile(const struct SteadyMatrix *m,
                                             struct SteadyBandProfile *out);

/*
 Builds the plain Liouvillian of a model system (`"jc"`, `"spin"` or
 `"optomech"`). `names`/`values` hold `n_params` parameter overrides and
 may be null when `n_params` is 0.
 */
enum SteadyStatus steady_liouvillian_build(const char *system,
                                           size_t size,
                                           const char *const *names,
                                           const double *values,
                                           size_t n_params,
                                           struct SteadyLiouvillian **out);

/*
 Wraps a square matrix as a plain Liouvillian on a Hilbert space of
 dimension `hilbert_dim` (the matrix must be `hilbert_dim²` square).
 */
enum SteadyStatus steady_liouvillian_from_matrix(const struct SteadyMatrix *m,
                                                 size_t hilbert_dim,
                                                 struct SteadyLiouvillian **out);

void steady_liouvillian_free(struct SteadyLiouvillian *l);

/*
 Hilbert-space dimension; 0 for a null handle.
 */
size_t steady_liouvillian_hilbert_dim(const struct SteadyLiouvillian *l);

/*
 Copies the superoperator matrix into a new matrix handle.
 */
enum SteadyStatus steady_liouvillian_matrix(const struct SteadyLiouvillian *l,
                                            struct SteadyMatrix **out);

struct SteadyOptions steady_options_default(void);

/*
 Computes the steady state. `opts` may be null for the defaults. A
 Krylov solve that stops without converging still returns `STEADY_STATUS_OK`;
 check `converged` in the diagnostics.
 */
enum SteadyStatus steady_solve(const struct SteadyLiouvillian *l,
                               enum SteadyMethod method,
                               const struct SteadyOptions *opts,
                               struct SteadyResult **out);

void steady_result_free(struct SteadyResult *r);

/*
 Side of the density matrix; 0 for a null handle.
 */
size_t steady_result_dim(const struct SteadyResult *r);

/*
 Copies the density matrix in column-major order into `re` and `im`,
 each of length `len = dim²`.
 */
enum SteadyStatus steady_result_rho(const struct SteadyResult *r,
                                    double *re,
                                    double *im,
                                    size_t len);

enum SteadyStatus steady_result_diagnostics(const struct SteadyResult *r,
                                            struct SteadyDiagnostics *out);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* STEADY_H */
