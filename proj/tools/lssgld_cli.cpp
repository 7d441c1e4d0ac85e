// Command-line front end. Talks to the library exclusively through the C
// surface in lssgld.h, so it doubles as a living example of that API.

#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "lssgld.h"

namespace {

int fail(lssgld_status status) {
  std::cerr << "error: " << lssgld_last_error() << '\n';
  return status == LSSGLD_ERR_INVALID_ARGUMENT ? 2 : 1;
}

int cmd_validate(const std::string& config_path) {
  std::ifstream in(config_path);
  if (!in) {
    std::cerr << "error: cannot open " << config_path << '\n';
    return 1;
  }
  std::ostringstream buf;
  buf << in.rdbuf();
  char* report = nullptr;
  const lssgld_status status = lssgld_config_validate(buf.str().c_str(), &report);
  if (status == LSSGLD_OK) {
    std::cout << "ok\n";
    return 0;
  }
  if (report) {
    std::cerr << report << '\n';
    lssgld_string_free(report);
  } else {
    std::cerr << lssgld_last_error() << '\n';
  }
  return 2;
}

int cmd_run(const std::string& config_path, const std::string& out_dir,
            unsigned threads, bool quiet, long long seed_override) {
  const uint64_t seed = seed_override >= 0 ? static_cast<uint64_t>(seed_override) : 0;
  char* files = nullptr;
  const lssgld_status status =
      lssgld_run_experiment(config_path.c_str(), out_dir.c_str(), threads,
                            seed_override >= 0 ? &seed : nullptr, &files);
  if (status != LSSGLD_OK) return fail(status);
  if (!quiet && files) std::cout << files << '\n';
  lssgld_string_free(files);
  return 0;
}

int cmd_sample(const std::string& kind, double eta, double sigma, double beta,
               std::size_t iterations, std::size_t burn_in, std::size_t thin,
               std::size_t batch, std::uint64_t seed, std::size_t dim,
               const std::string& out_csv) {
  // Sampling demo on a standard gaussian of the requested dimension.
  std::vector<double> mean(dim, 0.0), cov(dim * dim, 0.0);
  for (std::size_t i = 0; i < dim; ++i) cov[i * dim + i] = 1.0;
  lssgld_target* target = nullptr;
  lssgld_status status = lssgld_target_gaussian(dim, mean.data(), cov.data(), &target);
  if (status != LSSGLD_OK) return fail(status);

  lssgld_sampler_config config;
  lssgld_sampler_config_init(&config);
  config.kind = kind.c_str();
  config.eta = eta;
  config.sigma = sigma;
  config.beta = beta;
  config.iterations = iterations;
  config.burn_in = burn_in;
  config.thin = thin;
  config.batch_size = batch;
  config.seed = seed;

  lssgld_chain* chain = nullptr;
  status = lssgld_chain_run(target, &config, &chain);
  if (status != LSSGLD_OK) {
    lssgld_target_destroy(target);
    return fail(status);
  }
  status = lssgld_chain_write_csv(chain, out_csv.c_str());
  const std::size_t count = lssgld_chain_count(chain);
  lssgld_chain_destroy(chain);
  lssgld_target_destroy(target);
  if (status != LSSGLD_OK) return fail(status);
  std::cout << "wrote " << count << " samples to " << out_csv << '\n';
  return 0;
}

int cmd_gamma_table(const std::vector<double>& sigmas, const std::vector<std::size_t>& dims) {
  std::printf("d,sigma,inv_spectrum_sq_mean,inv_spectrum_mean\n");
  for (std::size_t d : dims) {
    for (double sigma : sigmas) {
      lssgld_operator* op = nullptr;
      const lssgld_status status = lssgld_operator_create(d, sigma, &op);
      if (status != LSSGLD_OK) return fail(status);
      double inv_mean = 0.0, inv_sq_mean = 0.0;
      lssgld_operator_stats(op, &inv_mean, &inv_sq_mean, nullptr);
      lssgld_operator_destroy(op);
      std::printf("%zu,%.17g,%.17g,%.17g\n", d, sigma, inv_sq_mean, inv_mean);
    }
  }
  return 0;
}

int cmd_bounds(const std::string& mode, std::size_t iterations, double eta, double beta,
               std::size_t dim, double omega, std::size_t batch, double sobolev,
               double f0_term, double b_dissip, double smoothness, double sigma) {
  lssgld_bound_inputs in;
  lssgld_bound_inputs_init(&in);
  in.iterations = iterations;
  in.eta = eta;
  in.beta = beta;
  in.dim = dim;
  in.omega = omega;
  in.batch_size = batch;
  in.lambda_sobolev = sobolev;
  in.f0_beta_log_lambda = f0_term;
  in.b_dissip = b_dissip;
  in.smoothness = smoothness;

  lssgld_operator* op = nullptr;
  lssgld_status status = lssgld_operator_create(dim, sigma, &op);
  if (status != LSSGLD_OK) return fail(status);
  status = lssgld_bound_inputs_from_operator(&in, op);
  lssgld_operator_destroy(op);
  if (status != LSSGLD_OK) return fail(status);

  lssgld_bound_breakdown out;
  if (mode == "convex") status = lssgld_bound_convex(&in, &out);
  else if (mode == "sgld") status = lssgld_bound_convex_sgld(&in, &out);
  else status = lssgld_bound_nonconvex(&in, &out);
  if (status != LSSGLD_OK) return fail(status);

  std::printf("stochastic,%.17g\n", out.stochastic_term);
  std::printf("discretization,%.17g\n", out.discretization_term);
  std::printf("ergodicity,%.17g\n", out.ergodicity_term);
  std::printf("total,%.17g\n", out.total);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Laplacian-smoothing Langevin sampling toolkit"};
  app.require_subcommand(1);
  app.set_version_flag("--version", std::string(lssgld_version()));

  // run
  std::string config_path, out_dir = ".";
  unsigned threads = 0;
  bool quiet = false;
  long long run_seed = -1;
  auto* run = app.add_subcommand("run", "Run an experiment described by a JSON config");
  run->add_option("config", config_path, "config file")->required();
  run->add_option("-o,--output-dir", out_dir, "directory for the CSV artifacts");
  run->add_option("-j,--threads", threads, "worker threads (0 = all cores)");
  run->add_option("--seed", run_seed, "replace the config's seed list with one seed");
  run->add_flag("-q,--quiet", quiet, "suppress the file listing");

  // validate
  std::string validate_path;
  auto* validate = app.add_subcommand("validate", "Check a config without running it");
  validate->add_option("config", validate_path, "config file")->required();

  // sample
  std::string kind = "sgld", sample_out = "chain.csv";
  double eta = 0.01, sigma = 0.0, beta = 1.0;
  std::size_t iterations = 10000, burn_in = 0, thin = 1, batch = 1, dim = 2;
  std::uint64_t seed = 1;
  auto* sample = app.add_subcommand("sample", "Sample a standard gaussian and write the chain");
  sample->add_option("-k,--kind", kind, "sampler kind");
  sample->add_option("--eta", eta, "step size");
  sample->add_option("--sigma", sigma, "smoothing strength");
  sample->add_option("--beta", beta, "inverse temperature");
  sample->add_option("-n,--iterations", iterations, "iterations");
  sample->add_option("--burn-in", burn_in, "discarded iterations");
  sample->add_option("--thin", thin, "record every thin-th iterate");
  sample->add_option("-B,--batch", batch, "mini-batch size");
  sample->add_option("--seed", seed, "random seed");
  sample->add_option("-d,--dim", dim, "dimension");
  sample->add_option("-o,--output", sample_out, "output CSV");

  // gamma-table
  std::vector<double> gt_sigmas{1, 2, 3, 4, 5};
  std::vector<std::size_t> gt_dims{1000, 10000, 100000};
  auto* gamma = app.add_subcommand("gamma-table",
                                   "Print spectral averages of the smoothing operator");
  gamma->add_option("--sigmas", gt_sigmas, "smoothing strengths");
  gamma->add_option("--dims", gt_dims, "dimensions");

  // bounds
  std::string mode = "convex";
  std::size_t b_iterations = 10000, b_dim = 100, b_batch = 10;
  double b_eta = 1e-3, b_beta = 1.0, b_omega = 1.0, b_sobolev = 1.0, b_f0 = 1.0;
  double b_dissip = 1.0, b_smooth = 1.0, b_sigma = 1.0;
  auto* bounds = app.add_subcommand("bounds", "Evaluate a Wasserstein error bound");
  bounds->add_option("-m,--mode", mode, "convex | sgld | nonconvex")
      ->check(CLI::IsMember({"convex", "sgld", "nonconvex"}));
  bounds->add_option("-K,--iterations", b_iterations, "iteration count");
  bounds->add_option("--eta", b_eta, "step size");
  bounds->add_option("--beta", b_beta, "inverse temperature");
  bounds->add_option("-d,--dim", b_dim, "dimension");
  bounds->add_option("--omega", b_omega, "gradient-noise scale");
  bounds->add_option("-B,--batch", b_batch, "mini-batch size");
  bounds->add_option("--sobolev", b_sobolev, "log-Sobolev constant");
  bounds->add_option("--f0-term", b_f0, "beta f(0) + log Lambda");
  bounds->add_option("--dissipativity", b_dissip, "dissipativity offset b");
  bounds->add_option("--smoothness", b_smooth, "gradient Lipschitz constant");
  bounds->add_option("--sigma", b_sigma, "smoothing strength");

  CLI11_PARSE(app, argc, argv);

  if (run->parsed()) return cmd_run(config_path, out_dir, threads, quiet, run_seed);
  if (validate->parsed()) return cmd_validate(validate_path);
  if (sample->parsed())
    return cmd_sample(kind, eta, sigma, beta, iterations, burn_in, thin, batch, seed,
                      dim, sample_out);
  if (gamma->parsed()) return cmd_gamma_table(gt_sigmas, gt_dims);
  if (bounds->parsed())
    return cmd_bounds(mode, b_iterations, b_eta, b_beta, b_dim, b_omega, b_batch,
                      b_sobolev, b_f0, b_dissip, b_smooth, b_sigma);
  return 0;
}
