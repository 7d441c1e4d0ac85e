#include "lssgld.h"

#include <cstdlib>
#include <cstring>
#include <exception>
#include <memory>
#include <new>
#include <stdexcept>
#include <string>
#include <vector>

#include "lssgld/diagnostics.hpp"
#include "lssgld/experiments.hpp"
#include "lssgld/samplers.hpp"
#include "lssgld/smoothing_operator.hpp"
#include "lssgld/targets.hpp"
#include "lssgld/theory_bounds.hpp"

struct lssgld_operator {
  lssgld::LaplacianOperator op;
};

struct lssgld_target {
  std::unique_ptr<lssgld::TargetModel> model;
};

struct lssgld_chain {
  lssgld::SampleChain chain;
};

namespace {

thread_local std::string g_last_error;

void set_error(const std::string& msg) { g_last_error = msg; }

// Runs fn, translating exceptions into status codes + the thread-local
// message. std::invalid_argument maps to the argument error; everything
// else (including bad_alloc) to the runtime error.
template <typename Fn>
lssgld_status guarded(Fn&& fn) {
  try {
    return fn();
  } catch (const std::invalid_argument& e) {
    set_error(e.what());
    return LSSGLD_ERR_INVALID_ARGUMENT;
  } catch (const std::exception& e) {
    set_error(e.what());
    return LSSGLD_ERR_RUNTIME;
  } catch (...) {
    set_error("unknown error");
    return LSSGLD_ERR_RUNTIME;
  }
}

lssgld_status require(bool ok, const char* what) {
  if (ok) return LSSGLD_OK;
  set_error(std::string("null or invalid argument: ") + what);
  return LSSGLD_ERR_INVALID_ARGUMENT;
}

char* dup_string(const std::string& s) {
  char* out = static_cast<char*>(std::malloc(s.size() + 1));
  if (out) std::memcpy(out, s.c_str(), s.size() + 1);
  return out;
}

std::string join_lines(const std::vector<std::string>& lines) {
  std::string out;
  for (std::size_t i = 0; i < lines.size(); ++i) {
    if (i) out += '\n';
    out += lines[i];
  }
  return out;
}

}  // namespace

extern "C" {

const char* lssgld_last_error(void) { return g_last_error.c_str(); }

const char* lssgld_version(void) { return "1.0.0"; }

/* ---- operator ---------------------------------------------------------- */

lssgld_status lssgld_operator_create(size_t dim, double sigma, lssgld_operator** out) {
  if (lssgld_status s = require(out != nullptr, "out"); s != LSSGLD_OK) return s;
  return guarded([&] {
    *out = new lssgld_operator{lssgld::LaplacianOperator(dim, sigma)};
    return LSSGLD_OK;
  });
}

void lssgld_operator_destroy(lssgld_operator* op) { delete op; }

size_t lssgld_operator_dim(const lssgld_operator* op) { return op ? op->op.dim() : 0; }

double lssgld_operator_sigma(const lssgld_operator* op) {
  return op ? op->op.sigma() : 0.0;
}

lssgld_status lssgld_operator_apply_inverse(const lssgld_operator* op, const double* in,
                                            double* out) {
  if (lssgld_status s = require(op && in && out, "operator/in/out"); s != LSSGLD_OK)
    return s;
  return guarded([&] {
    const std::vector<double> y = op->op.apply_inverse({in, op->op.dim()});
    std::memcpy(out, y.data(), y.size() * sizeof(double));
    return LSSGLD_OK;
  });
}

lssgld_status lssgld_operator_apply_inverse_sqrt(const lssgld_operator* op,
                                                 const double* in, double* out) {
  if (lssgld_status s = require(op && in && out, "operator/in/out"); s != LSSGLD_OK)
    return s;
  return guarded([&] {
    const std::vector<double> y = op->op.apply_inverse_sqrt({in, op->op.dim()});
    std::memcpy(out, y.data(), y.size() * sizeof(double));
    return LSSGLD_OK;
  });
}

lssgld_status lssgld_operator_spectrum(const lssgld_operator* op, double* out) {
  if (lssgld_status s = require(op && out, "operator/out"); s != LSSGLD_OK) return s;
  return guarded([&] {
    const std::vector<double>& spec = op->op.spectrum();
    std::memcpy(out, spec.data(), spec.size() * sizeof(double));
    return LSSGLD_OK;
  });
}

lssgld_status lssgld_operator_stats(const lssgld_operator* op, double* inv_mean,
                                    double* inv_sq_mean, double* spectral_norm) {
  if (lssgld_status s = require(op != nullptr, "operator"); s != LSSGLD_OK) return s;
  return guarded([&] {
    if (inv_mean) *inv_mean = op->op.gamma2();
    if (inv_sq_mean) *inv_sq_mean = op->op.inv_spectrum_sq_mean();
    if (spectral_norm) *spectral_norm = op->op.spectral_norm();
    return LSSGLD_OK;
  });
}

/* ---- targets ----------------------------------------------------------- */

lssgld_status lssgld_target_gaussian(size_t dim, const double* mean,
                                     const double* cov_row_major, lssgld_target** out) {
  if (lssgld_status s = require(mean && cov_row_major && out, "mean/cov/out");
      s != LSSGLD_OK)
    return s;
  return guarded([&] {
    *out = new lssgld_target{std::make_unique<lssgld::GaussianTarget>(
        std::vector<double>(mean, mean + dim),
        std::vector<double>(cov_row_major, cov_row_major + dim * dim))};
    return LSSGLD_OK;
  });
}

lssgld_status lssgld_target_mixture_pair(const double* centers_xy, size_t n_centers,
                                         lssgld_target** out) {
  if (lssgld_status s = require(centers_xy && out, "centers/out"); s != LSSGLD_OK)
    return s;
  return guarded([&] {
    std::vector<std::pair<double, double>> centers(n_centers);
    for (size_t i = 0; i < n_centers; ++i)
      centers[i] = {centers_xy[2 * i], centers_xy[2 * i + 1]};
    *out = new lssgld_target{
        std::make_unique<lssgld::MixturePairTarget>(std::move(centers))};
    return LSSGLD_OK;
  });
}

lssgld_status lssgld_target_mixture_sampled(uint64_t seed, size_t n_centers,
                                            lssgld_target** out) {
  if (lssgld_status s = require(out != nullptr, "out"); s != LSSGLD_OK) return s;
  return guarded([&] {
    *out = new lssgld_target{std::make_unique<lssgld::MixturePairTarget>(
        lssgld::sample_mixture_centers(seed, n_centers))};
    return LSSGLD_OK;
  });
}

lssgld_status lssgld_target_logistic_file(const char* path, size_t declared_dim,
                                          lssgld_target** out) {
  if (lssgld_status s = require(path && out, "path/out"); s != LSSGLD_OK) return s;
  return guarded([&]() -> lssgld_status {
    try {
      *out = new lssgld_target{std::make_unique<lssgld::BlrTarget>(
          lssgld::load_libsvm(path, declared_dim))};
    } catch (const std::runtime_error& e) {
      set_error(e.what());
      return LSSGLD_ERR_IO;
    }
    return LSSGLD_OK;
  });
}

lssgld_status lssgld_target_logistic_synthetic(size_t n, size_t dim, uint64_t seed,
                                               lssgld_target** out) {
  if (lssgld_status s = require(out != nullptr, "out"); s != LSSGLD_OK) return s;
  return guarded([&] {
    *out = new lssgld_target{std::make_unique<lssgld::BlrTarget>(
        lssgld::make_synthetic_logistic(n, dim, seed))};
    return LSSGLD_OK;
  });
}

void lssgld_target_destroy(lssgld_target* target) { delete target; }

size_t lssgld_target_dim(const lssgld_target* target) {
  return target ? target->model->dim() : 0;
}

size_t lssgld_target_components(const lssgld_target* target) {
  return target ? target->model->components() : 0;
}

lssgld_status lssgld_target_full_grad(const lssgld_target* target, const double* x,
                                      double* out) {
  if (lssgld_status s = require(target && x && out, "target/x/out"); s != LSSGLD_OK)
    return s;
  return guarded([&] {
    const size_t d = target->model->dim();
    target->model->full_grad({x, d}, {out, d});
    return LSSGLD_OK;
  });
}

/* ---- samplers ---------------------------------------------------------- */

void lssgld_sampler_config_init(lssgld_sampler_config* config) {
  if (!config) return;
  config->kind = "sgld";
  config->eta = 0.0;
  config->batch_size = 1;
  config->beta = 1.0;
  config->sigma = 0.0;
  config->precond_alpha = 0.99;
  config->precond_eps = 1e-5;
  config->burn_in = 0;
  config->thin = 1;
  config->iterations = 0;
  config->seed = 0;
  config->x0 = nullptr;
}

lssgld_status lssgld_chain_run(const lssgld_target* target,
                               const lssgld_sampler_config* config,
                               lssgld_chain** out) {
  if (lssgld_status s = require(target && config && out, "target/config/out");
      s != LSSGLD_OK)
    return s;
  if (lssgld_status s = require(config->kind != nullptr, "config->kind");
      s != LSSGLD_OK)
    return s;
  return guarded([&]() -> lssgld_status {
    const auto kind = lssgld::sampler_kind_from_string(config->kind);
    if (!kind) {
      set_error(std::string("unknown sampler kind: ") + config->kind);
      return LSSGLD_ERR_INVALID_ARGUMENT;
    }
    lssgld::SamplerSpec spec;
    spec.kind = *kind;
    spec.eta = config->eta;
    spec.batch_size = config->batch_size;
    spec.beta = config->beta;
    spec.sigma = config->sigma;
    spec.precond_alpha = config->precond_alpha;
    spec.precond_eps = config->precond_eps;
    spec.burn_in = config->burn_in;
    spec.thin = config->thin;
    spec.iterations = config->iterations;
    spec.seed = config->seed;
    if (config->x0)
      spec.x0.assign(config->x0, config->x0 + target->model->dim());
    *out = new lssgld_chain{lssgld::run_chain(spec, *target->model)};
    return LSSGLD_OK;
  });
}

void lssgld_chain_destroy(lssgld_chain* chain) { delete chain; }

size_t lssgld_chain_count(const lssgld_chain* chain) {
  return chain ? chain->chain.count() : 0;
}

size_t lssgld_chain_dim(const lssgld_chain* chain) { return chain ? chain->chain.dim : 0; }

const double* lssgld_chain_samples(const lssgld_chain* chain) {
  return chain ? chain->chain.samples.data() : nullptr;
}

double lssgld_chain_acceptance_rate(const lssgld_chain* chain) {
  return chain ? chain->chain.acceptance_rate : 0.0;
}

lssgld_status lssgld_chain_write_csv(const lssgld_chain* chain, const char* path) {
  if (lssgld_status s = require(chain && path, "chain/path"); s != LSSGLD_OK) return s;
  return guarded([&]() -> lssgld_status {
    try {
      chain->chain.write_csv(path);
    } catch (const std::runtime_error& e) {
      set_error(e.what());
      return LSSGLD_ERR_IO;
    }
    return LSSGLD_OK;
  });
}

/* ---- diagnostics ------------------------------------------------------- */

lssgld_status lssgld_autocorrelation_time(const double* values, size_t count,
                                          double* out) {
  if (lssgld_status s = require(values && out, "values/out"); s != LSSGLD_OK) return s;
  return guarded([&] {
    *out = lssgld::autocorrelation_time({values, count});
    return LSSGLD_OK;
  });
}

lssgld_status lssgld_mean_error(const double* samples, size_t count, size_t dim,
                                const double* true_mean, double* mse, double* mae) {
  if (lssgld_status s = require(samples && true_mean, "samples/true_mean");
      s != LSSGLD_OK)
    return s;
  return guarded([&] {
    const lssgld::MomentErrors err =
        lssgld::mean_error({samples, count * dim}, dim, {true_mean, dim});
    if (mse) *mse = err.mse;
    if (mae) *mae = err.mean_abs;
    return LSSGLD_OK;
  });
}

lssgld_status lssgld_covariance_error(const double* samples, size_t count, size_t dim,
                                      const double* true_cov, double* mse, double* mae) {
  if (lssgld_status s = require(samples && true_cov, "samples/true_cov");
      s != LSSGLD_OK)
    return s;
  return guarded([&] {
    const lssgld::MomentErrors err =
        lssgld::covariance_error({samples, count * dim}, dim, {true_cov, dim * dim});
    if (mse) *mse = err.mse;
    if (mae) *mae = err.mean_abs;
    return LSSGLD_OK;
  });
}

lssgld_status lssgld_wasserstein2(const double* a, size_t na, const double* b, size_t nb,
                                  size_t dim, size_t max_points, uint64_t seed,
                                  double* out) {
  if (lssgld_status s = require(a && b && out, "a/b/out"); s != LSSGLD_OK) return s;
  return guarded([&] {
    *out = lssgld::wasserstein2({a, na * dim}, na, {b, nb * dim}, nb, dim, max_points,
                                seed);
    return LSSGLD_OK;
  });
}

lssgld_status lssgld_gradient_variance(const lssgld_target* target, const double* path,
                                       size_t points, double sigma, size_t batch_size,
                                       size_t repeats, uint64_t seed, double* out) {
  if (lssgld_status s = require(target && path && out, "target/path/out");
      s != LSSGLD_OK)
    return s;
  return guarded([&]() -> lssgld_status {
    if (sigma < 0.0) {
      set_error("sigma must be nonnegative");
      return LSSGLD_ERR_INVALID_ARGUMENT;
    }
    std::unique_ptr<lssgld::LaplacianOperator> op;
    if (sigma > 0.0)
      op = std::make_unique<lssgld::LaplacianOperator>(target->model->dim(), sigma);
    *out = lssgld::gradient_variance_profile(*target->model,
                                             {path, points * target->model->dim()},
                                             points, op.get(), batch_size, repeats, seed);
    return LSSGLD_OK;
  });
}

/* ---- bounds ------------------------------------------------------------ */

void lssgld_bound_inputs_init(lssgld_bound_inputs* in) {
  if (!in) return;
  const lssgld::BoundInputs defaults;
  in->iterations = defaults.iterations;
  in->eta = defaults.eta;
  in->beta = defaults.beta;
  in->dim = defaults.dim;
  in->omega = defaults.omega;
  in->batch_size = defaults.batch_size;
  in->lambda_sobolev = defaults.lambda_sobolev;
  in->c0 = defaults.c0;
  in->gamma1 = defaults.gamma1;
  in->gamma2 = defaults.gamma2;
  in->f0_beta_log_lambda = defaults.f0_beta_log_lambda;
  in->b_dissip = defaults.b_dissip;
  in->smoothness = defaults.smoothness;
}

namespace {

lssgld::BoundInputs to_cpp(const lssgld_bound_inputs& in) {
  lssgld::BoundInputs out;
  out.iterations = in.iterations;
  out.eta = in.eta;
  out.beta = in.beta;
  out.dim = in.dim;
  out.omega = in.omega;
  out.batch_size = in.batch_size;
  out.lambda_sobolev = in.lambda_sobolev;
  out.c0 = in.c0;
  out.gamma1 = in.gamma1;
  out.gamma2 = in.gamma2;
  out.f0_beta_log_lambda = in.f0_beta_log_lambda;
  out.b_dissip = in.b_dissip;
  out.smoothness = in.smoothness;
  return out;
}

void from_cpp(const lssgld::BoundBreakdown& in, lssgld_bound_breakdown* out) {
  out->stochastic_term = in.stochastic_term;
  out->discretization_term = in.discretization_term;
  out->ergodicity_term = in.ergodicity_term;
  out->total = in.total;
}

}  // namespace

lssgld_status lssgld_bound_inputs_from_operator(lssgld_bound_inputs* in,
                                                const lssgld_operator* op) {
  if (lssgld_status s = require(in && op, "inputs/operator"); s != LSSGLD_OK) return s;
  return guarded([&] {
    lssgld::BoundInputs cpp = to_cpp(*in);
    cpp.with_operator_constants(op->op);
    in->c0 = cpp.c0;
    in->gamma1 = cpp.gamma1;
    in->gamma2 = cpp.gamma2;
    return LSSGLD_OK;
  });
}

lssgld_status lssgld_bound_convex(const lssgld_bound_inputs* in,
                                  lssgld_bound_breakdown* out) {
  if (lssgld_status s = require(in && out, "inputs/out"); s != LSSGLD_OK) return s;
  return guarded([&] {
    from_cpp(lssgld::convex_bound(to_cpp(*in)), out);
    return LSSGLD_OK;
  });
}

lssgld_status lssgld_bound_convex_sgld(const lssgld_bound_inputs* in,
                                       lssgld_bound_breakdown* out) {
  if (lssgld_status s = require(in && out, "inputs/out"); s != LSSGLD_OK) return s;
  return guarded([&] {
    from_cpp(lssgld::convex_bound_sgld(to_cpp(*in)), out);
    return LSSGLD_OK;
  });
}

lssgld_status lssgld_bound_nonconvex(const lssgld_bound_inputs* in,
                                     lssgld_bound_breakdown* out) {
  if (lssgld_status s = require(in && out, "inputs/out"); s != LSSGLD_OK) return s;
  return guarded([&] {
    from_cpp(lssgld::nonconvex_bound(to_cpp(*in)), out);
    return LSSGLD_OK;
  });
}

/* ---- harness ----------------------------------------------------------- */

lssgld_status lssgld_config_validate(const char* json_text, char** report) {
  if (report) *report = nullptr;
  if (lssgld_status s = require(json_text != nullptr, "json_text"); s != LSSGLD_OK)
    return s;
  return guarded([&]() -> lssgld_status {
    const std::vector<std::string> errs = lssgld::validate_config_text(json_text);
    if (errs.empty()) return LSSGLD_OK;
    const std::string joined = join_lines(errs);
    set_error(joined);
    if (report) *report = dup_string(joined);
    return LSSGLD_ERR_INVALID_ARGUMENT;
  });
}

lssgld_status lssgld_run_experiment(const char* config_path, const char* output_dir,
                                    unsigned threads, const uint64_t* seed_override,
                                    char** files_report) {
  if (files_report) *files_report = nullptr;
  if (lssgld_status s = require(config_path && output_dir, "config_path/output_dir");
      s != LSSGLD_OK)
    return s;
  return guarded([&]() -> lssgld_status {
    lssgld::RunOptions options;
    options.output_dir = output_dir;
    options.threads = threads;
    if (seed_override) options.seed_override = *seed_override;
    try {
      const lssgld::ExperimentResult result =
          lssgld::run_experiment_file(config_path, options);
      if (files_report) *files_report = dup_string(join_lines(result.files_written));
    } catch (const std::runtime_error& e) {
      set_error(e.what());
      return LSSGLD_ERR_IO;
    }
    return LSSGLD_OK;
  });
}

void lssgld_string_free(char* s) { std::free(s); }

} /* extern "C" */
