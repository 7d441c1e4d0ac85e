/* C interface to the Laplacian-smoothing Langevin sampling library.
 *
 * All functions returning lssgld_status set a thread-local error message
 * retrievable via lssgld_last_error() on failure. Objects returned through
 * out-parameters are owned by the caller and released with the matching
 * _destroy function. Buffers passed in must be at least as large as the
 * documented extent; the library never retains pointers to caller memory.
 */
#ifndef LSSGLD_H_
#define LSSGLD_H_

#include <stddef.h>
#include <stdint.h>

#ifdef __cplusplus
extern "C" {
#endif

typedef enum {
  LSSGLD_OK = 0,
  LSSGLD_ERR_INVALID_ARGUMENT = 1, /* bad input; message explains which */
  LSSGLD_ERR_RUNTIME = 2,          /* numerical or internal failure */
  LSSGLD_ERR_IO = 3                /* file could not be read or written */
} lssgld_status;

/* Message describing the most recent failure on this thread ("" if none). */
const char* lssgld_last_error(void);
const char* lssgld_version(void);

typedef struct lssgld_operator lssgld_operator;
typedef struct lssgld_target lssgld_target;
typedef struct lssgld_chain lssgld_chain;

/* ---- circulant smoothing operator I - sigma L -------------------------- */

lssgld_status lssgld_operator_create(size_t dim, double sigma, lssgld_operator** out);
void lssgld_operator_destroy(lssgld_operator* op);
size_t lssgld_operator_dim(const lssgld_operator* op);
double lssgld_operator_sigma(const lssgld_operator* op);
/* out buffers hold dim doubles; in == out is allowed. */
lssgld_status lssgld_operator_apply_inverse(const lssgld_operator* op, const double* in,
                                            double* out);
lssgld_status lssgld_operator_apply_inverse_sqrt(const lssgld_operator* op,
                                                 const double* in, double* out);
lssgld_status lssgld_operator_spectrum(const lssgld_operator* op, double* out);
/* Spectral averages of 1/lambda and 1/lambda^2, and max lambda. Any output
 * pointer may be NULL. */
lssgld_status lssgld_operator_stats(const lssgld_operator* op, double* inv_mean,
                                    double* inv_sq_mean, double* spectral_norm);

/* ---- target distributions --------------------------------------------- */

lssgld_status lssgld_target_gaussian(size_t dim, const double* mean,
                                     const double* cov_row_major, lssgld_target** out);
/* centers_xy: n_centers (x, y) pairs. */
lssgld_status lssgld_target_mixture_pair(const double* centers_xy, size_t n_centers,
                                         lssgld_target** out);
lssgld_status lssgld_target_mixture_sampled(uint64_t seed, size_t n_centers,
                                            lssgld_target** out);
/* libsvm text format; declared_dim 0 infers the dimension. */
lssgld_status lssgld_target_logistic_file(const char* path, size_t declared_dim,
                                          lssgld_target** out);
lssgld_status lssgld_target_logistic_synthetic(size_t n, size_t dim, uint64_t seed,
                                               lssgld_target** out);
void lssgld_target_destroy(lssgld_target* target);
size_t lssgld_target_dim(const lssgld_target* target);
size_t lssgld_target_components(const lssgld_target* target);
lssgld_status lssgld_target_full_grad(const lssgld_target* target, const double* x,
                                      double* out);

/* ---- samplers ---------------------------------------------------------- */

typedef struct {
  const char* kind; /* sgld | ls_sgld | psgld | ls_psgld | ld_reference |
                       ls_ld_reference | mh_reference */
  double eta;       /* step size (proposal scale for mh) */
  size_t batch_size;
  double beta;
  double sigma; /* smoothing strength; ls_* kinds only */
  double precond_alpha;
  double precond_eps;
  size_t burn_in;
  size_t thin;
  size_t iterations;
  uint64_t seed;
  const double* x0; /* NULL starts at the origin */
} lssgld_sampler_config;

/* Fills every field with its default (kind = "sgld", thin = 1, ...). */
void lssgld_sampler_config_init(lssgld_sampler_config* config);

lssgld_status lssgld_chain_run(const lssgld_target* target,
                               const lssgld_sampler_config* config,
                               lssgld_chain** out);
void lssgld_chain_destroy(lssgld_chain* chain);
size_t lssgld_chain_count(const lssgld_chain* chain);
size_t lssgld_chain_dim(const lssgld_chain* chain);
/* count x dim row-major, valid until the chain is destroyed. */
const double* lssgld_chain_samples(const lssgld_chain* chain);
double lssgld_chain_acceptance_rate(const lssgld_chain* chain);
lssgld_status lssgld_chain_write_csv(const lssgld_chain* chain, const char* path);

/* ---- diagnostics -------------------------------------------------------- */

/* Integrated autocorrelation time of a scalar series (needs >= 100 points). */
lssgld_status lssgld_autocorrelation_time(const double* values, size_t count,
                                          double* out);
/* Mean squared / mean absolute error of empirical moments vs a reference.
 * samples: count x dim row-major; true_cov: dim x dim. Either output
 * pointer may be NULL. */
lssgld_status lssgld_mean_error(const double* samples, size_t count, size_t dim,
                                const double* true_mean, double* mse, double* mae);
lssgld_status lssgld_covariance_error(const double* samples, size_t count, size_t dim,
                                      const double* true_cov, double* mse, double* mae);
/* Exact empirical 2-Wasserstein distance; point sets are subsampled to
 * max_points with `seed` when larger. */
lssgld_status lssgld_wasserstein2(const double* a, size_t na, const double* b, size_t nb,
                                  size_t dim, size_t max_points, uint64_t seed,
                                  double* out);
/* Max over path points and coordinates of the mini-batch gradient variance,
 * smoothed with strength sigma (0 = none). path: points x dim row-major. */
lssgld_status lssgld_gradient_variance(const lssgld_target* target, const double* path,
                                       size_t points, double sigma, size_t batch_size,
                                       size_t repeats, uint64_t seed, double* out);

/* ---- Wasserstein error bounds ------------------------------------------ */

typedef struct {
  size_t iterations; /* K */
  double eta;
  double beta;
  size_t dim;
  double omega; /* gradient-noise scale */
  size_t batch_size;
  double lambda_sobolev;
  double c0;
  double gamma1;
  double gamma2;
  double f0_beta_log_lambda;
  double b_dissip;   /* nonconvex bound only */
  double smoothness; /* M, nonconvex bound only */
} lssgld_bound_inputs;

typedef struct {
  double stochastic_term;
  double discretization_term;
  double ergodicity_term;
  double total;
} lssgld_bound_breakdown;

void lssgld_bound_inputs_init(lssgld_bound_inputs* in);
/* Fills c0, gamma1, gamma2 from the operator's spectrum. */
lssgld_status lssgld_bound_inputs_from_operator(lssgld_bound_inputs* in,
                                                const lssgld_operator* op);
lssgld_status lssgld_bound_convex(const lssgld_bound_inputs* in,
                                  lssgld_bound_breakdown* out);
lssgld_status lssgld_bound_convex_sgld(const lssgld_bound_inputs* in,
                                       lssgld_bound_breakdown* out);
lssgld_status lssgld_bound_nonconvex(const lssgld_bound_inputs* in,
                                     lssgld_bound_breakdown* out);

/* ---- experiment harness ------------------------------------------------- */

/* Validates a JSON experiment config. On problems, returns
 * LSSGLD_ERR_INVALID_ARGUMENT and, when report != NULL, stores a
 * newline-separated list there (free with lssgld_string_free). */
lssgld_status lssgld_config_validate(const char* json_text, char** report);
/* Runs the experiment in config_path, writing artifacts to output_dir.
 * threads = 0 uses all cores. seed_override, when non-NULL, replaces the
 * config's seed list with that one seed. files_report, when non-NULL,
 * receives a newline-separated list of the files written. */
lssgld_status lssgld_run_experiment(const char* config_path, const char* output_dir,
                                    unsigned threads, const uint64_t* seed_override,
                                    char** files_report);
void lssgld_string_free(char* s);

#ifdef __cplusplus
} /* extern "C" */
#endif

#endif /* LSSGLD_H_ */
