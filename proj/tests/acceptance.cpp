// Acceptance gate: one self-contained check per release criterion, one
// PASS/FAIL line each, nonzero exit if any criterion fails.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "lssgld/diagnostics.hpp"
#include "lssgld/experiments.hpp"
#include "lssgld/rng.hpp"
#include "lssgld/samplers.hpp"
#include "lssgld/smoothing_operator.hpp"
#include "lssgld/targets.hpp"
#include "lssgld/theory_bounds.hpp"

using namespace lssgld;
namespace fs = std::filesystem;

namespace {

struct Timer {
  std::chrono::steady_clock::time_point start = std::chrono::steady_clock::now();
  double seconds() const {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start)
        .count();
  }
};

std::string slurp(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

fs::path fresh_dir(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / name;
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

// Parsed rows of a comma-separated artifact, header skipped.
std::vector<std::vector<std::string>> read_csv(const fs::path& path) {
  std::vector<std::vector<std::string>> rows;
  std::ifstream in(path);
  std::string line;
  std::getline(in, line);
  while (std::getline(in, line)) {
    std::vector<std::string> fields;
    std::istringstream ss(line);
    std::string f;
    while (std::getline(ss, f, ',')) fields.push_back(f);
    rows.push_back(std::move(fields));
  }
  return rows;
}

// --- criterion 1: reference spectral table ------------------------------

bool spectral_table(std::string& detail) {
  Timer timer;
  const fs::path dir = fresh_dir("lssgld_accept_c1");
  write_gamma_table_csv((dir / "gamma_table.csv").string());
  const std::map<int, double> expected{
      {1, 0.268}, {2, 0.185}, {3, 0.149}, {4, 0.128}, {5, 0.114}};
  const auto rows = read_csv(dir / "gamma_table.csv");
  fs::remove_all(dir);
  if (rows.size() != 15) {
    detail = "expected 15 rows, got " + std::to_string(rows.size());
    return false;
  }
  double worst = 0.0;
  for (const auto& row : rows) {
    const int sigma = static_cast<int>(std::lround(std::stod(row[1])));
    worst = std::max(worst, std::abs(std::stod(row[2]) - expected.at(sigma)));
  }
  const double elapsed = timer.seconds();
  char buf[128];
  std::snprintf(buf, sizeof(buf), "max deviation %.2g (cap 0.001), %.2fs (cap 1s)",
                worst, elapsed);
  detail = buf;
  return worst <= 0.001 && elapsed < 1.0;
}

// --- criterion 2: FFT solver vs dense LU --------------------------------

bool fft_operator(std::string& detail) {
  Timer timer;
  double worst = 0.0;
  for (std::size_t d : {1u, 2u, 3u, 4u, 7u, 64u, 122u, 512u}) {
    for (double sigma : {0.0, 0.1, 0.5, 1.0, 2.0, 5.0}) {
      const LaplacianOperator op(d, sigma);
      RngStream rng(1000 + d);
      std::vector<double> v(d);
      rng.gaussian_fill(v);

      const auto flat = op.dense_materialize();
      Eigen::MatrixXd a(d, d);
      for (std::size_t i = 0; i < d; ++i)
        for (std::size_t j = 0; j < d; ++j)
          a(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = flat[i * d + j];
      const Eigen::VectorXd oracle =
          a.partialPivLu().solve(Eigen::Map<const Eigen::VectorXd>(v.data(), d));

      const auto inv = op.apply_inverse(v);
      const auto twice = op.apply_inverse_sqrt(op.apply_inverse_sqrt(v));
      double err_lu = 0.0, err_sq = 0.0, norm = 0.0;
      for (std::size_t i = 0; i < d; ++i) {
        const double o = oracle(static_cast<Eigen::Index>(i));
        err_lu += (inv[i] - o) * (inv[i] - o);
        err_sq += (inv[i] - twice[i]) * (inv[i] - twice[i]);
        norm += o * o;
      }
      worst = std::max(worst, std::sqrt(err_lu / norm));
      worst = std::max(worst, std::sqrt(err_sq / norm));
    }
  }
  const double elapsed = timer.seconds();
  char buf[128];
  std::snprintf(buf, sizeof(buf), "max rel. error %.2g (cap 1e-10), %.2fs (cap 10s)",
                worst, elapsed);
  detail = buf;
  return worst <= 1e-10 && elapsed < 10.0;
}

// --- criterion 3: gaussian norm identities ------------------------------

bool norm_identities(std::string& detail) {
  const std::size_t d = 100, draws = 100000;
  double worst = 0.0;
  for (double sigma : {1.0, 2.0}) {
    const LaplacianOperator op(d, sigma);
    RngStream rng(2024);
    std::vector<double> eps(d);
    double sum_half = 0.0, sum_full = 0.0;
    for (std::size_t k = 0; k < draws; ++k) {
      rng.gaussian_fill(eps);
      for (double y : op.apply_inverse_sqrt(eps)) sum_half += y * y;
      for (double y : op.apply_inverse(eps)) sum_full += y * y;
    }
    const double half_target = static_cast<double>(d) * op.gamma2();
    const double full_target = static_cast<double>(d) * op.inv_spectrum_sq_mean();
    worst = std::max(worst, std::abs(sum_half / draws - half_target) / half_target);
    worst = std::max(worst, std::abs(sum_full / draws - full_target) / full_target);
  }
  char buf[96];
  std::snprintf(buf, sizeof(buf), "max rel. deviation %.3f (cap 0.02)", worst);
  detail = buf;
  return worst <= 0.02;
}

// --- criterion 4: stationarity of full-batch smoothed Langevin ----------

bool stationarity(std::string& detail) {
  Timer timer;
  GaussianTarget target({0.0, 0.0}, {1.0, 0.9, 0.9, 1.0});
  const double true_cov[4] = {1.0, 0.9, 0.9, 1.0};
  double worst = 0.0;
  for (double sigma_paper : {0.0, 0.1}) {
    SamplerSpec spec;
    spec.kind = sigma_paper > 0.0 ? SamplerKind::kLsLdReference
                                  : SamplerKind::kLdReference;
    spec.sigma = circulant_sigma_from_paper_2d(sigma_paper);
    spec.eta = 1e-3;
    spec.beta = 1.0;
    spec.iterations = 200000;
    spec.seed = 31;
    const SampleChain chain = run_chain(spec, target);
    const std::size_t n = chain.count();

    double m[2] = {0.0, 0.0};
    for (std::size_t i = 0; i < n; ++i) {
      m[0] += chain.samples[2 * i];
      m[1] += chain.samples[2 * i + 1];
    }
    m[0] /= static_cast<double>(n);
    m[1] /= static_cast<double>(n);
    double c[4] = {0.0, 0.0, 0.0, 0.0};
    for (std::size_t i = 0; i < n; ++i) {
      const double a = chain.samples[2 * i] - m[0];
      const double b = chain.samples[2 * i + 1] - m[1];
      c[0] += a * a;
      c[1] += a * b;
      c[2] += a * b;
      c[3] += b * b;
    }
    for (int j = 0; j < 2; ++j) worst = std::max(worst, std::abs(m[j]));
    for (int j = 0; j < 4; ++j)
      worst = std::max(worst,
                       std::abs(c[j] / static_cast<double>(n - 1) - true_cov[j]));
  }
  const double elapsed = timer.seconds();
  char buf[128];
  std::snprintf(buf, sizeof(buf),
                "max moment deviation %.4f (cap 0.05), %.1fs (cap 120s)", worst,
                elapsed);
  detail = buf;
  return worst <= 0.05 && elapsed < 120.0;
}

// --- criterion 5: gradient variance trends ------------------------------

bool variance_trends(std::string& detail) {
  Timer timer;
  const fs::path dir = fresh_dir("lssgld_accept_c5");
  RunOptions options;
  options.output_dir = dir.string();
  run_experiment_file(std::string(CONFIG_DIR) + "/variance_table.json", options);
  const auto rows = read_csv(dir / "variance_table.csv");
  fs::remove_all(dir);

  // rows: sigma,batch_size,max_variance
  std::map<std::pair<double, std::size_t>, double> cell;
  for (const auto& row : rows)
    cell[{std::stod(row[0]), static_cast<std::size_t>(std::stoul(row[1]))}] =
        std::stod(row[2]);
  const std::vector<double> sigmas{0.0, 0.5, 1.0, 2.0};
  const std::vector<std::size_t> batches{10, 15, 50};
  bool ok = cell.size() == sigmas.size() * batches.size();
  for (std::size_t b : batches)
    for (std::size_t i = 1; i < sigmas.size() && ok; ++i)
      ok = cell[{sigmas[i], b}] < cell[{sigmas[i - 1], b}];
  for (double s : sigmas)
    for (std::size_t i = 1; i < batches.size() && ok; ++i)
      ok = cell[{s, batches[i]}] < cell[{s, batches[i - 1]}];

  const double elapsed = timer.seconds();
  char buf[160];
  std::snprintf(buf, sizeof(buf),
                "monotone in sigma and batch size%s, %.1fs (cap 300s); absolute-value "
                "comparison skipped (reference dataset not bundled)",
                ok ? "" : " VIOLATED", elapsed);
  detail = buf;
  return ok && elapsed < 300.0;
}

// --- criterion 6: mixture sample quality --------------------------------

bool mixture_quality(std::string& detail) {
  Timer timer;
  const MixturePairTarget target(sample_mixture_centers(42, 500));

  SamplerSpec mh;
  mh.kind = SamplerKind::kMhReference;
  mh.eta = 0.8;
  mh.iterations = 100000;
  mh.burn_in = 1000;
  mh.seed = 99;
  const SampleChain reference = run_chain(mh, target);

  auto gradient_chain = [&](bool smoothed) {
    SamplerSpec spec;
    spec.kind = smoothed ? SamplerKind::kLsSgld : SamplerKind::kSgld;
    const double sigma_paper = smoothed ? 1.0 : 0.0;
    spec.sigma = circulant_sigma_from_paper_2d(sigma_paper);
    spec.eta = 0.05 * (smoothed ? step_multiplier(sigma_paper) : 1.0);
    spec.batch_size = 10;
    spec.iterations = 101000;
    spec.burn_in = 1000;
    spec.seed = 1;
    return run_chain(spec, target);
  };
  const SampleChain plain = gradient_chain(false);
  const SampleChain smoothed = gradient_chain(true);

  const double w2_plain = wasserstein2(plain.samples, plain.count(), reference.samples,
                                       reference.count(), 2, 1000, 7);
  const double w2_smoothed =
      wasserstein2(smoothed.samples, smoothed.count(), reference.samples,
                   reference.count(), 2, 1000, 7);
  const double elapsed = timer.seconds();
  char buf[160];
  std::snprintf(buf, sizeof(buf),
                "W2 smoothed %.3f (cap 0.6) vs unsmoothed %.3f, %.1fs (cap 600s)",
                w2_smoothed, w2_plain, elapsed);
  detail = buf;
  return w2_smoothed <= 0.6 && w2_smoothed <= w2_plain && elapsed < 600.0;
}

// --- criterion 7: mixing comparison -------------------------------------

bool mixing_comparison(std::string& detail) {
  Timer timer;
  const fs::path dir = fresh_dir("lssgld_accept_c7");
  RunOptions options;
  options.output_dir = dir.string();
  run_experiment_file(std::string(CONFIG_DIR) + "/mixing.json", options);
  const auto rows = read_csv(dir / "mixing_summary.csv");
  fs::remove_all(dir);

  // rows: samples,ld_mean_mse,ls_ld_mean_mse,ratio
  bool ok = !rows.empty();
  double worst = 1.0;
  for (const auto& row : rows) {
    const double ratio = std::stod(row[3]);
    worst = std::max({worst, ratio, 1.0 / ratio});
    ok = ok && ratio >= 0.5 && ratio <= 2.0;
  }
  const double elapsed = timer.seconds();
  char buf[128];
  std::snprintf(buf, sizeof(buf), "worst error ratio %.2f (cap 2), %.1fs (cap 300s)",
                worst, elapsed);
  detail = buf;
  return ok && elapsed < 300.0;
}

// --- criterion 8: autocorrelation sanity --------------------------------

bool act_sanity(std::string& detail) {
  RngStream rng(12);
  std::vector<double> iid(1000000);
  for (double& x : iid) x = rng.gaussian();
  const double tau_iid = autocorrelation_time(iid);

  std::vector<double> ar(1000000);
  double x = 0.0;
  const double rho = 0.5;
  for (double& v : ar) {
    x = rho * x + std::sqrt(1.0 - rho * rho) * rng.gaussian();
    v = x;
  }
  const double tau_ar = autocorrelation_time(ar);
  char buf[96];
  std::snprintf(buf, sizeof(buf), "iid %.3f (0.5+-0.05), AR(1) %.3f (1.5+-0.1)",
                tau_iid, tau_ar);
  detail = buf;
  return std::abs(tau_iid - 0.5) <= 0.05 && std::abs(tau_ar - 1.5) <= 0.1;
}

// --- criterion 9: smoothing trade-off in the error bounds ---------------

bool bound_tradeoff(std::string& detail) {
  BoundInputs in;
  in.iterations = 10000;
  in.eta = 1e-3;
  in.beta = 1.0;
  in.dim = 100;
  in.omega = 1.0;
  in.batch_size = 10;
  in.lambda_sobolev = 1.0;
  in.f0_beta_log_lambda = 1.0;

  bool ok = true;
  double prev_sd = 1e300, prev_ergo = 0.0;
  for (double sigma : {0.0, 0.5, 1.0, 2.0}) {
    const LaplacianOperator op(100, sigma);
    in.with_operator_constants(op);
    const BoundBreakdown out = convex_bound(in);
    const double sd = out.stochastic_term + out.discretization_term;
    ok = ok && sd < prev_sd && out.ergodicity_term > prev_ergo;
    prev_sd = sd;
    prev_ergo = out.ergodicity_term;
  }
  detail = ok ? "stochastic+discretization strictly decrease, ergodicity strictly "
                "increases over sigma 0..2"
              : "monotonicity violated over sigma 0..2";
  return ok;
}

// --- criterion 10: byte-level determinism -------------------------------

bool determinism(std::string& detail) {
  bool ok = true;
  std::string checked;
  for (const char* cfg : {"mixing.json", "variance_table.json"}) {
    const fs::path dir1 = fresh_dir("lssgld_accept_c10a");
    const fs::path dir2 = fresh_dir("lssgld_accept_c10b");
    RunOptions a, b;
    a.output_dir = dir1.string();
    b.output_dir = dir2.string();
    const std::string path = std::string(CONFIG_DIR) + "/" + cfg;
    const ExperimentResult r1 = run_experiment_file(path, a);
    const ExperimentResult r2 = run_experiment_file(path, b);
    ok = ok && r1.files_written == r2.files_written;
    for (const std::string& f : r1.files_written)
      ok = ok && slurp(dir1 / f) == slurp(dir2 / f);
    fs::remove_all(dir1);
    fs::remove_all(dir2);
    if (!checked.empty()) checked += ", ";
    checked += cfg;
  }
  detail = (ok ? "reruns byte-identical for " : "rerun mismatch for ") + checked;
  return ok;
}

}  // namespace

int main() {
  struct Criterion {
    const char* description;
    bool (*check)(std::string&);
  };
  const Criterion criteria[] = {
      {"spectral average table reproduces all 15 reference entries", spectral_table},
      {"FFT inverse and inverse-sqrt match dense oracles", fft_operator},
      {"smoothed gaussian norm identities hold empirically", norm_identities},
      {"full-batch smoothed Langevin preserves the target moments", stationarity},
      {"gradient variance decreases with smoothing and batch size", variance_trends},
      {"smoothed mixture samples are closer to the MH reference", mixture_quality},
      {"plain and smoothed Langevin mix at comparable rates", mixing_comparison},
      {"autocorrelation time matches closed forms", act_sanity},
      {"bounds trade discretization error against ergodicity", bound_tradeoff},
      {"experiment reruns are byte-identical", determinism},
  };

  int failures = 0;
  int index = 0;
  for (const Criterion& c : criteria) {
    ++index;
    std::string detail;
    bool ok = false;
    try {
      ok = c.check(detail);
    } catch (const std::exception& e) {
      detail = std::string("exception: ") + e.what();
    }
    std::printf("%s criterion %d: %s (%s)\n", ok ? "PASS" : "FAIL", index,
                c.description, detail.c_str());
    std::fflush(stdout);
    if (!ok) ++failures;
  }
  return failures == 0 ? 0 : 1;
}
