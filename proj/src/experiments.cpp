#include "lssgld/experiments.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <memory>
#include <mutex>
#include <set>
#include <sstream>
#include <stdexcept>
#include <thread>
#include <tuple>

#include "json.hpp"
#include "lssgld/diagnostics.hpp"
#include "lssgld/rng.hpp"
#include "lssgld/samplers.hpp"
#include "lssgld/smoothing_operator.hpp"
#include "lssgld/targets.hpp"
#include "lssgld/theory_bounds.hpp"

namespace lssgld {

double step_multiplier(double sigma_paper) {
  return std::pow(1.0 + 4.0 * sigma_paper, 0.25);
}

namespace {

using nlohmann::json;

std::string num(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string num(std::size_t v) { return std::to_string(v); }

// Runs fn(0..n-1) on up to `threads` workers; results must be written into
// preassigned slots so output order never depends on scheduling.
void parallel_for(std::size_t n, unsigned threads, const std::function<void(std::size_t)>& fn) {
  if (threads == 0) threads = std::max(1u, std::thread::hardware_concurrency());
  threads = static_cast<unsigned>(std::min<std::size_t>(threads, n));
  if (threads <= 1) {
    for (std::size_t i = 0; i < n; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr error;
  std::mutex error_mutex;
  std::vector<std::thread> pool;
  pool.reserve(threads);
  for (unsigned t = 0; t < threads; ++t) {
    pool.emplace_back([&] {
      for (;;) {
        const std::size_t i = next.fetch_add(1);
        if (i >= n) return;
        try {
          fn(i);
        } catch (...) {
          std::lock_guard<std::mutex> lock(error_mutex);
          if (!error) error = std::current_exception();
          return;
        }
      }
    });
  }
  for (auto& th : pool) th.join();
  if (error) std::rethrow_exception(error);
}

class CsvWriter {
 public:
  CsvWriter(const std::filesystem::path& path, const std::string& header) : out_(path) {
    if (!out_) throw std::runtime_error("cannot open output file: " + path.string());
    out_ << header << '\n';
  }
  void row(const std::vector<std::string>& cells) {
    for (std::size_t i = 0; i < cells.size(); ++i) {
      if (i) out_ << ',';
      out_ << cells[i];
    }
    out_ << '\n';
  }

 private:
  std::ofstream out_;
};

// ----- config reading ------------------------------------------------------

struct Reader {
  const json& j;
  std::string where;
  std::vector<std::string>& errs;
  std::set<std::string> seen;

  void fail(const std::string& msg) { errs.push_back(where + ": " + msg); }

  const json* look(const std::string& key, bool required) {
    seen.insert(key);
    auto it = j.find(key);
    if (it == j.end()) {
      if (required) fail("missing required field '" + key + "'");
      return nullptr;
    }
    return &*it;
  }

  double get_double(const std::string& key, double fallback, bool required = false) {
    const json* v = look(key, required);
    if (!v) return fallback;
    if (!v->is_number()) {
      fail("field '" + key + "' must be a number");
      return fallback;
    }
    return v->get<double>();
  }

  std::size_t get_size(const std::string& key, std::size_t fallback, bool required = false) {
    const json* v = look(key, required);
    if (!v) return fallback;
    if (!v->is_number_unsigned()) {
      fail("field '" + key + "' must be a nonnegative integer");
      return fallback;
    }
    return v->get<std::size_t>();
  }

  bool get_bool(const std::string& key, bool fallback) {
    const json* v = look(key, false);
    if (!v) return fallback;
    if (!v->is_boolean()) {
      fail("field '" + key + "' must be a boolean");
      return fallback;
    }
    return v->get<bool>();
  }

  std::string get_string(const std::string& key, std::string fallback, bool required = false) {
    const json* v = look(key, required);
    if (!v) return fallback;
    if (!v->is_string()) {
      fail("field '" + key + "' must be a string");
      return fallback;
    }
    return v->get<std::string>();
  }

  std::vector<double> get_doubles(const std::string& key, std::vector<double> fallback) {
    const json* v = look(key, false);
    if (!v) return fallback;
    if (!v->is_array()) {
      fail("field '" + key + "' must be an array of numbers");
      return fallback;
    }
    std::vector<double> out;
    for (const auto& e : *v) {
      if (!e.is_number()) {
        fail("field '" + key + "' must contain only numbers");
        return fallback;
      }
      out.push_back(e.get<double>());
    }
    return out;
  }

  std::vector<std::size_t> get_sizes(const std::string& key, std::vector<std::size_t> fallback) {
    const json* v = look(key, false);
    if (!v) return fallback;
    if (!v->is_array()) {
      fail("field '" + key + "' must be an array of nonnegative integers");
      return fallback;
    }
    std::vector<std::size_t> out;
    for (const auto& e : *v) {
      if (!e.is_number_unsigned()) {
        fail("field '" + key + "' must contain only nonnegative integers");
        return fallback;
      }
      out.push_back(e.get<std::size_t>());
    }
    return out;
  }

  std::vector<std::uint64_t> get_seeds(const std::string& key,
                                       std::vector<std::uint64_t> fallback) {
    const json* v = look(key, false);
    if (!v) return fallback;
    if (v->is_number_unsigned()) return {v->get<std::uint64_t>()};
    if (!v->is_array()) {
      fail("field '" + key + "' must be a seed or an array of seeds");
      return fallback;
    }
    std::vector<std::uint64_t> out;
    for (const auto& e : *v) {
      if (!e.is_number_unsigned()) {
        fail("field '" + key + "' must contain only nonnegative integers");
        return fallback;
      }
      out.push_back(e.get<std::uint64_t>());
    }
    if (out.empty()) fail("field '" + key + "' must not be empty");
    return out;
  }

  void finish() {
    for (auto it = j.begin(); it != j.end(); ++it)
      if (!seen.count(it.key())) fail("unknown field '" + it.key() + "'");
  }
};

// One algorithm column of an experiment. `sigma_paper` uses the paper's 2D
// convention for the two-dimensional targets and the plain circulant
// convention elsewhere (the run functions convert).
struct SamplerEntry {
  SamplerKind kind = SamplerKind::kSgld;
  std::string label;
  double sigma_paper = 0.0;
  double eta_scale = 1.0;  // extra per-entry multiplier on the base step
  bool smooth_before_precond = false;
};

std::vector<SamplerEntry> parse_samplers(Reader& r, const std::string& key,
                                         double default_sigma,
                                         std::vector<std::string> fallback_kinds) {
  const json* v = r.look(key, false);
  std::vector<SamplerEntry> out;
  auto add = [&](const std::string& kind_name, const json* obj) {
    auto kind = sampler_kind_from_string(kind_name);
    if (!kind) {
      r.fail("unknown sampler kind '" + kind_name + "'");
      return;
    }
    SamplerEntry e;
    e.kind = *kind;
    e.label = kind_name;
    e.sigma_paper = is_smoothing_kind(*kind) ? default_sigma : 0.0;
    if (obj) {
      Reader sub{*obj, r.where + ".samplers[" + kind_name + "]", r.errs, {}};
      sub.seen.insert("kind");
      e.sigma_paper = sub.get_double("sigma", e.sigma_paper);
      e.eta_scale = sub.get_double("eta_scale", 1.0);
      e.label = sub.get_string("label", e.label);
      e.smooth_before_precond = sub.get_bool("smooth_before_precond", false);
      sub.finish();
    }
    if (e.sigma_paper < 0.0) r.fail("sampler '" + kind_name + "': sigma must be nonnegative");
    if (e.sigma_paper > 0.0 && !is_smoothing_kind(*kind))
      r.fail("sampler '" + kind_name + "': positive sigma requires a smoothing kind");
    if (e.eta_scale <= 0.0) r.fail("sampler '" + kind_name + "': eta_scale must be positive");
    out.push_back(std::move(e));
  };
  if (!v) {
    for (const auto& name : fallback_kinds) add(name, nullptr);
    return out;
  }
  if (!v->is_array()) {
    r.fail("field '" + key + "' must be an array");
    return out;
  }
  for (const auto& e : *v) {
    if (e.is_string()) {
      add(e.get<std::string>(), nullptr);
    } else if (e.is_object()) {
      if (!e.contains("kind") || !e["kind"].is_string()) {
        r.fail("sampler entries need a string 'kind'");
        continue;
      }
      add(e["kind"].get<std::string>(), &e);
    } else {
      r.fail("sampler entries must be strings or objects");
    }
  }
  if (out.empty()) r.fail("field '" + key + "' must name at least one sampler");
  std::set<std::string> labels;
  for (const auto& e : out)
    if (!labels.insert(e.label).second)
      r.fail("duplicate sampler label '" + e.label + "' (set 'label' to disambiguate)");
  return out;
}

// Dataset block shared by the logistic-regression experiments.
struct DatasetConfig {
  std::string type = "synthetic";  // synthetic | libsvm
  std::size_t n = 3000;
  std::size_t dim = 122;
  std::uint64_t seed = 7;
  std::string path;
  double prior_theta = 1e-2;
};

DatasetConfig parse_dataset(Reader& r, const std::string& key) {
  DatasetConfig d;
  const json* v = r.look(key, false);
  if (!v) return d;
  if (!v->is_object()) {
    r.fail("field '" + key + "' must be an object");
    return d;
  }
  Reader sub{*v, r.where + "." + key, r.errs, {}};
  d.type = sub.get_string("type", "synthetic");
  if (d.type == "synthetic") {
    d.n = sub.get_size("n", d.n);
    d.dim = sub.get_size("dim", d.dim);
    d.seed = sub.get_size("seed", d.seed);
    if (d.n == 0) sub.fail("n must be positive");
    if (d.dim == 0) sub.fail("dim must be positive");
  } else if (d.type == "libsvm") {
    d.path = sub.get_string("path", "", true);
    d.dim = sub.get_size("dim", 0);
  } else {
    sub.fail("type must be 'synthetic' or 'libsvm'");
  }
  d.prior_theta = sub.get_double("prior_theta", d.prior_theta);
  sub.finish();
  return d;
}

std::unique_ptr<BlrTarget> build_dataset(const DatasetConfig& d) {
  if (d.type == "libsvm")
    return std::make_unique<BlrTarget>(load_libsvm(d.path, d.dim, 1.0, d.prior_theta));
  return std::make_unique<BlrTarget>(
      make_synthetic_logistic(d.n, d.dim, d.seed, d.prior_theta));
}

// ----- per-experiment configs ---------------------------------------------

struct Gauss2dConfig {
  std::vector<std::uint64_t> seeds{1};
  std::size_t iterations = 200000;
  std::size_t burn_in = 0;
  std::size_t record_first = 600;
  std::vector<double> eta_grid;
  double sigma = 0.1;
  bool use_step_multiplier = true;
  std::vector<SamplerEntry> samplers;
  std::vector<double> mean{0.0, 0.0};
  std::vector<double> cov{1.0, 0.9, 0.9, 1.0};
};

Gauss2dConfig parse_gauss2d(Reader& r) {
  Gauss2dConfig c;
  c.seeds = r.get_seeds("seeds", c.seeds);
  c.iterations = r.get_size("iterations", c.iterations);
  c.burn_in = r.get_size("burn_in", c.burn_in);
  c.record_first = r.get_size("record_first", c.record_first);
  std::vector<double> default_grid;
  for (int k = 0; k < 5; ++k) default_grid.push_back(0.19 * std::pow(0.8, k));
  c.eta_grid = r.get_doubles("eta_grid", default_grid);
  c.sigma = r.get_double("sigma", c.sigma);
  c.use_step_multiplier = r.get_bool("use_step_multiplier", c.use_step_multiplier);
  c.samplers = parse_samplers(r, "samplers", c.sigma,
                              {"sgld", "psgld", "ls_sgld", "ls_psgld"});
  c.mean = r.get_doubles("mean", c.mean);
  c.cov = r.get_doubles("cov", c.cov);
  if (c.iterations == 0) r.fail("iterations must be positive");
  if (c.burn_in + 100 > c.iterations)
    r.fail("iterations must exceed burn_in by at least 100 (autocorrelation needs samples)");
  for (double e : c.eta_grid)
    if (e <= 0.0) r.fail("eta_grid entries must be positive");
  if (c.eta_grid.empty()) r.fail("eta_grid must not be empty");
  if (c.sigma < 0.0) r.fail("sigma must be nonnegative");
  if (c.mean.size() != 2) r.fail("mean must have 2 entries");
  if (c.cov.size() != 4) r.fail("cov must have 4 entries (row-major 2x2)");
  return c;
}

struct MixtureConfig {
  std::vector<std::uint64_t> seeds{1};
  std::size_t n_centers = 500;
  std::uint64_t centers_seed = 42;
  std::vector<std::size_t> sample_counts{100000, 500000, 1000000};
  std::size_t burn_in = 1000;
  std::size_t w2_window = 10000;  // W2 uses the last w2_window samples
  std::size_t batch_size = 10;
  double eta = 0.05;
  double sigma = 1.0;
  bool use_step_multiplier = true;
  std::size_t mh_iterations = 100000;
  std::size_t mh_burn_in = 1000;
  double mh_proposal = 0.8;
  std::uint64_t mh_seed = 99;
  std::size_t w2_max_points = 1000;
  std::size_t kde_grid = 64;
  bool write_chains = true;
  std::size_t chain_thin = 10;
  std::vector<SamplerEntry> samplers;
};

MixtureConfig parse_mixture(Reader& r) {
  MixtureConfig c;
  c.seeds = r.get_seeds("seeds", c.seeds);
  c.n_centers = r.get_size("n_centers", c.n_centers);
  c.centers_seed = r.get_size("centers_seed", c.centers_seed);
  c.sample_counts = r.get_sizes("sample_counts", c.sample_counts);
  c.burn_in = r.get_size("burn_in", c.burn_in);
  c.batch_size = r.get_size("batch_size", c.batch_size);
  c.eta = r.get_double("eta", c.eta);
  c.sigma = r.get_double("sigma", c.sigma);
  c.use_step_multiplier = r.get_bool("use_step_multiplier", c.use_step_multiplier);
  if (const json* mh = r.look("mh", false)) {
    if (!mh->is_object()) {
      r.fail("field 'mh' must be an object");
    } else {
      Reader sub{*mh, r.where + ".mh", r.errs, {}};
      c.mh_iterations = sub.get_size("iterations", c.mh_iterations);
      c.mh_burn_in = sub.get_size("burn_in", c.mh_burn_in);
      c.mh_proposal = sub.get_double("proposal_scale", c.mh_proposal);
      c.mh_seed = sub.get_size("seed", c.mh_seed);
      sub.finish();
    }
  }
  c.w2_window = r.get_size("w2_window", c.w2_window);
  c.w2_max_points = r.get_size("w2_max_points", c.w2_max_points);
  c.kde_grid = r.get_size("kde_grid", c.kde_grid);
  c.write_chains = r.get_bool("write_chains", c.write_chains);
  c.chain_thin = r.get_size("chain_thin", c.chain_thin);
  c.samplers = parse_samplers(r, "samplers", c.sigma, {"sgld", "psgld", "ls_sgld"});
  if (c.n_centers == 0) r.fail("n_centers must be positive");
  if (c.batch_size == 0 || c.batch_size > c.n_centers)
    r.fail("batch_size must lie in [1, n_centers]");
  if (c.eta <= 0.0) r.fail("eta must be positive");
  if (c.sigma < 0.0) r.fail("sigma must be nonnegative");
  if (c.sample_counts.empty()) r.fail("sample_counts must not be empty");
  for (std::size_t s : c.sample_counts)
    if (s == 0) r.fail("sample_counts entries must be positive");
  if (c.mh_iterations <= c.mh_burn_in) r.fail("mh.iterations must exceed mh.burn_in");
  if (c.mh_proposal <= 0.0) r.fail("mh.proposal_scale must be positive");
  if (c.w2_max_points == 0) r.fail("w2_max_points must be positive");
  if (c.w2_window == 0) r.fail("w2_window must be positive");
  if (c.kde_grid < 2) r.fail("kde_grid must be at least 2");
  if (c.chain_thin == 0) r.fail("chain_thin must be positive");
  return c;
}

struct MixingConfig {
  std::vector<std::uint64_t> seeds{1, 2, 3, 4, 5, 6, 7, 8, 9, 10};
  double eta = 1e-3;
  std::size_t iterations = 20000;
  std::size_t burn_in = 0;
  std::vector<std::size_t> checkpoints{1000, 2000, 5000, 10000, 20000};
  double sigma = 1.0;
  bool use_step_multiplier = false;
  std::vector<double> mean{1.0, 2.0};
  double cov_scale = 4.5;
};

MixingConfig parse_mixing(Reader& r) {
  MixingConfig c;
  c.seeds = r.get_seeds("seeds", c.seeds);
  c.eta = r.get_double("eta", c.eta);
  c.iterations = r.get_size("iterations", c.iterations);
  c.burn_in = r.get_size("burn_in", c.burn_in);
  c.checkpoints = r.get_sizes("checkpoints", c.checkpoints);
  c.sigma = r.get_double("sigma", c.sigma);
  c.use_step_multiplier = r.get_bool("use_step_multiplier", c.use_step_multiplier);
  c.mean = r.get_doubles("mean", c.mean);
  c.cov_scale = r.get_double("cov_scale", c.cov_scale);
  if (c.eta <= 0.0) r.fail("eta must be positive");
  if (c.iterations == 0) r.fail("iterations must be positive");
  if (c.sigma < 0.0) r.fail("sigma must be nonnegative");
  if (c.cov_scale <= 0.0) r.fail("cov_scale must be positive");
  if (c.mean.size() != 2) r.fail("mean must have 2 entries");
  if (c.checkpoints.empty()) r.fail("checkpoints must not be empty");
  const std::size_t recorded = c.iterations > c.burn_in ? c.iterations - c.burn_in : 0;
  for (std::size_t cp : c.checkpoints)
    if (cp == 0 || cp > recorded)
      r.fail("checkpoints must lie in [1, iterations - burn_in]");
  return c;
}

struct BlrConfig {
  DatasetConfig dataset;
  DatasetConfig eval_dataset;
  bool has_eval = false;
  std::vector<std::uint64_t> seeds{1};
  std::size_t iterations = 5000;
  std::size_t burn_in = 1000;
  std::size_t batch_size = 5;
  double eta_sgld = 1e-3;
  double eta_psgld = 2e-3;
  double sigma = 1.0;
  bool use_step_multiplier = true;
  std::size_t eval_every = 100;
  std::size_t average_window = 0;  // 0 = cumulative mean of recorded iterates
  std::vector<SamplerEntry> samplers;
};

BlrConfig parse_blr(Reader& r) {
  BlrConfig c;
  c.dataset = parse_dataset(r, "dataset");
  if (r.j.contains("eval_dataset")) {
    c.eval_dataset = parse_dataset(r, "eval_dataset");
    c.has_eval = true;
  } else {
    r.seen.insert("eval_dataset");
  }
  c.seeds = r.get_seeds("seeds", c.seeds);
  c.iterations = r.get_size("iterations", c.iterations);
  c.burn_in = r.get_size("burn_in", c.burn_in);
  c.batch_size = r.get_size("batch_size", c.batch_size);
  if (const json* eta = r.look("eta", false)) {
    if (eta->is_number()) {
      c.eta_sgld = c.eta_psgld = eta->get<double>();
    } else if (eta->is_object()) {
      Reader sub{*eta, r.where + ".eta", r.errs, {}};
      c.eta_sgld = sub.get_double("sgld", c.eta_sgld);
      c.eta_psgld = sub.get_double("psgld", c.eta_psgld);
      sub.finish();
    } else {
      r.fail("field 'eta' must be a number or an object {sgld, psgld}");
    }
  }
  c.sigma = r.get_double("sigma", c.sigma);
  c.use_step_multiplier = r.get_bool("use_step_multiplier", c.use_step_multiplier);
  c.eval_every = r.get_size("eval_every", c.eval_every);
  c.average_window = r.get_size("average_window", c.average_window);
  c.samplers = parse_samplers(r, "samplers", c.sigma,
                              {"sgld", "psgld", "ls_sgld", "ls_psgld"});
  if (c.iterations == 0) r.fail("iterations must be positive");
  if (c.burn_in >= c.iterations) r.fail("burn_in must be smaller than iterations");
  if (c.batch_size == 0) r.fail("batch_size must be positive");
  if (c.dataset.type == "synthetic" && c.batch_size > c.dataset.n)
    r.fail("batch_size must not exceed the dataset size");
  if (c.eta_sgld <= 0.0 || c.eta_psgld <= 0.0) r.fail("step sizes must be positive");
  if (c.sigma < 0.0) r.fail("sigma must be nonnegative");
  if (c.eval_every == 0) r.fail("eval_every must be positive");
  return c;
}

struct VarianceTableConfig {
  DatasetConfig dataset;
  double path_eta = 1e-3;
  std::size_t path_steps = 1000;
  std::size_t path_stride = 50;
  std::uint64_t path_seed = 3;
  std::vector<double> sigmas{0.0, 0.5, 1.0, 2.0};
  std::vector<std::size_t> batch_sizes{10, 15, 50};
  std::size_t repeats = 100;
  std::uint64_t seed = 1;
};

VarianceTableConfig parse_variance_table(Reader& r) {
  VarianceTableConfig c;
  c.dataset = parse_dataset(r, "dataset");
  if (const json* p = r.look("path", false)) {
    if (!p->is_object()) {
      r.fail("field 'path' must be an object");
    } else {
      Reader sub{*p, r.where + ".path", r.errs, {}};
      c.path_eta = sub.get_double("eta", c.path_eta);
      c.path_steps = sub.get_size("steps", c.path_steps);
      c.path_stride = sub.get_size("stride", c.path_stride);
      c.path_seed = sub.get_size("seed", c.path_seed);
      sub.finish();
    }
  }
  c.sigmas = r.get_doubles("sigmas", c.sigmas);
  c.batch_sizes = r.get_sizes("batch_sizes", c.batch_sizes);
  c.repeats = r.get_size("repeats", c.repeats);
  c.seed = r.get_size("seed", c.seed);
  if (c.path_eta <= 0.0) r.fail("path.eta must be positive");
  if (c.path_steps == 0 || c.path_stride == 0 || c.path_stride > c.path_steps)
    r.fail("path.stride must lie in [1, path.steps]");
  if (c.sigmas.empty()) r.fail("sigmas must not be empty");
  for (double s : c.sigmas)
    if (s < 0.0) r.fail("sigmas entries must be nonnegative");
  if (c.batch_sizes.empty()) r.fail("batch_sizes must not be empty");
  for (std::size_t b : c.batch_sizes) {
    if (b == 0) r.fail("batch_sizes entries must be positive");
    if (c.dataset.type == "synthetic" && b > c.dataset.n)
      r.fail("batch_sizes entries must not exceed the dataset size");
  }
  if (c.repeats < 2) r.fail("repeats must be at least 2");
  return c;
}

struct GammaTableConfig {
  std::vector<double> sigmas{1.0, 2.0, 3.0, 4.0, 5.0};
  std::vector<std::size_t> dims{1000, 10000, 100000};
};

GammaTableConfig parse_gamma_table(Reader& r) {
  GammaTableConfig c;
  c.sigmas = r.get_doubles("sigmas", c.sigmas);
  c.dims = r.get_sizes("dims", c.dims);
  if (c.sigmas.empty()) r.fail("sigmas must not be empty");
  for (double s : c.sigmas)
    if (s < 0.0) r.fail("sigmas entries must be nonnegative");
  if (c.dims.empty()) r.fail("dims must not be empty");
  for (std::size_t d : c.dims)
    if (d == 0) r.fail("dims entries must be positive");
  return c;
}

struct BoundsSweepConfig {
  std::string mode = "convex";  // convex | sgld | nonconvex
  std::size_t iterations = 10000;
  double eta = 1e-3;
  double beta = 1.0;
  std::size_t dim = 100;
  double omega = 1.0;
  std::size_t batch_size = 10;
  double lambda_sobolev = 1.0;
  double f0_term = 1.0;
  double b_dissip = 1.0;
  double smoothness = 1.0;
  bool scale_eta_with_sigma = false;
  std::vector<double> sigmas{0.0, 0.5, 1.0, 2.0, 5.0};
};

BoundsSweepConfig parse_bounds_sweep(Reader& r) {
  BoundsSweepConfig c;
  c.mode = r.get_string("mode", c.mode);
  c.iterations = r.get_size("iterations", c.iterations);
  c.eta = r.get_double("eta", c.eta);
  c.beta = r.get_double("beta", c.beta);
  c.dim = r.get_size("dim", c.dim);
  c.omega = r.get_double("omega", c.omega);
  c.batch_size = r.get_size("batch_size", c.batch_size);
  c.lambda_sobolev = r.get_double("lambda_sobolev", c.lambda_sobolev);
  c.f0_term = r.get_double("f0_term", c.f0_term);
  c.b_dissip = r.get_double("b_dissip", c.b_dissip);
  c.smoothness = r.get_double("smoothness", c.smoothness);
  c.scale_eta_with_sigma = r.get_bool("scale_eta_with_sigma", c.scale_eta_with_sigma);
  c.sigmas = r.get_doubles("sigmas", c.sigmas);
  if (c.mode != "convex" && c.mode != "sgld" && c.mode != "nonconvex")
    r.fail("mode must be 'convex', 'sgld' or 'nonconvex'");
  if (c.iterations == 0) r.fail("iterations must be positive");
  if (c.eta <= 0.0) r.fail("eta must be positive");
  if (c.beta <= 0.0) r.fail("beta must be positive");
  if (c.dim == 0) r.fail("dim must be positive");
  if (c.omega < 0.0) r.fail("omega must be nonnegative");
  if (c.batch_size == 0) r.fail("batch_size must be positive");
  if (c.lambda_sobolev <= 0.0) r.fail("lambda_sobolev must be positive");
  if (c.f0_term <= 0.0) r.fail("f0_term must be positive");
  if (c.sigmas.empty()) r.fail("sigmas must not be empty");
  for (double s : c.sigmas)
    if (s < 0.0) r.fail("sigmas entries must be nonnegative");
  return c;
}

const std::set<std::string> kExperiments = {
    "gauss2d", "mixture", "mixing", "blr", "variance_table", "gamma_table", "bounds_sweep"};

json parse_json_text(const std::string& text, std::vector<std::string>& errs) {
  json j = json::parse(text, nullptr, false);
  if (j.is_discarded()) {
    errs.push_back("config is not valid JSON");
    return json::object();
  }
  if (!j.is_object()) {
    errs.push_back("config must be a JSON object");
    return json::object();
  }
  return j;
}

std::vector<std::string> validate_json(const json& j) {
  std::vector<std::string> errs;
  if (!j.is_object()) {
    errs.push_back("config must be a JSON object");
    return errs;
  }
  Reader r{j, "config", errs, {}};
  const std::string exp = r.get_string("experiment", "", true);
  if (!exp.empty() && !kExperiments.count(exp)) {
    r.fail("unknown experiment '" + exp + "'");
    return errs;
  }
  if (exp == "gauss2d") parse_gauss2d(r);
  else if (exp == "mixture") parse_mixture(r);
  else if (exp == "mixing") parse_mixing(r);
  else if (exp == "blr") parse_blr(r);
  else if (exp == "variance_table") parse_variance_table(r);
  else if (exp == "gamma_table") parse_gamma_table(r);
  else if (exp == "bounds_sweep") parse_bounds_sweep(r);
  if (!exp.empty()) r.finish();
  return errs;
}

// ----- runners -------------------------------------------------------------

struct RunContext {
  std::filesystem::path out_dir;
  unsigned threads = 0;
  std::vector<std::string> files;

  std::filesystem::path file(const std::string& name) {
    files.push_back(name);
    return out_dir / name;
  }
};

SamplerSpec base_spec(const SamplerEntry& e, double eta, double sigma_circ,
                      bool use_multiplier, std::size_t iterations, std::size_t burn_in,
                      std::size_t batch_size, std::uint64_t seed) {
  SamplerSpec spec;
  spec.kind = e.kind;
  spec.eta = eta * e.eta_scale;
  spec.smooth_before_precond = e.smooth_before_precond;
  if (is_smoothing_kind(e.kind)) {
    spec.sigma = sigma_circ;
    if (use_multiplier) spec.eta *= step_multiplier(e.sigma_paper);
  }
  spec.iterations = iterations;
  spec.burn_in = burn_in;
  spec.batch_size = batch_size;
  spec.seed = seed;
  return spec;
}

void run_gauss2d(const Gauss2dConfig& c, RunContext& ctx) {
  const GaussianTarget target(c.mean, c.cov, 1);
  struct Cell {
    std::size_t sampler, eta_idx, seed_idx;
    double eta_used = 0.0;
    double act0 = 0.0, act1 = 0.0;
    MomentErrors cov_err, mean_err;
    std::vector<double> head;  // first record_first samples, flattened
    std::vector<std::size_t> head_steps;
  };
  std::vector<Cell> cells;
  for (std::size_t s = 0; s < c.samplers.size(); ++s)
    for (std::size_t e = 0; e < c.eta_grid.size(); ++e)
      for (std::size_t k = 0; k < c.seeds.size(); ++k)
        cells.push_back({s, e, k});

  parallel_for(cells.size(), ctx.threads, [&](std::size_t i) {
    Cell& cell = cells[i];
    const SamplerEntry& entry = c.samplers[cell.sampler];
    SamplerSpec spec = base_spec(entry, c.eta_grid[cell.eta_idx],
                                 circulant_sigma_from_paper_2d(entry.sigma_paper),
                                 c.use_step_multiplier, c.iterations, c.burn_in, 1,
                                 c.seeds[cell.seed_idx]);
    const SampleChain chain = run_chain(spec, target);
    cell.eta_used = spec.eta;
    cell.act0 = autocorrelation_time(chain.coordinate(0));
    cell.act1 = autocorrelation_time(chain.coordinate(1));
    cell.cov_err = covariance_error(chain.samples, 2, c.cov);
    cell.mean_err = mean_error(chain.samples, 2, c.mean);
    if (cell.eta_idx == 0 && cell.seed_idx == 0) {
      const std::size_t head = std::min<std::size_t>(c.record_first, chain.count());
      cell.head.assign(chain.samples.begin(), chain.samples.begin() + 2 * head);
      cell.head_steps.assign(chain.steps.begin(), chain.steps.begin() + head);
    }
  });

  CsvWriter metrics(ctx.file("gauss2d_metrics.csv"),
                    "sampler,eta_base,eta,seed,act_x0,act_x1,cov_mse,cov_mae,mean_mse");
  for (const Cell& cell : cells) {
    metrics.row({c.samplers[cell.sampler].label, num(c.eta_grid[cell.eta_idx]),
                 num(cell.eta_used), std::to_string(c.seeds[cell.seed_idx]),
                 num(cell.act0), num(cell.act1), num(cell.cov_err.mse),
                 num(cell.cov_err.mean_abs), num(cell.mean_err.mse)});
  }
  for (const Cell& cell : cells) {
    if (cell.head.empty()) continue;
    CsvWriter samples(ctx.file("gauss2d_samples_" + c.samplers[cell.sampler].label + ".csv"),
                      "step,x_0,x_1");
    for (std::size_t i = 0; i < cell.head_steps.size(); ++i)
      samples.row({num(cell.head_steps[i]), num(cell.head[2 * i]), num(cell.head[2 * i + 1])});
  }
}

void write_kde(const std::filesystem::path& path, const KdeGrid& grid) {
  CsvWriter out(path, "x,y,density");
  const auto& s = grid.spec;
  const double dx = (s.xmax - s.xmin) / static_cast<double>(s.nx - 1);
  const double dy = (s.ymax - s.ymin) / static_cast<double>(s.ny - 1);
  for (std::size_t iy = 0; iy < s.ny; ++iy)
    for (std::size_t ix = 0; ix < s.nx; ++ix)
      out.row({num(s.xmin + dx * static_cast<double>(ix)),
               num(s.ymin + dy * static_cast<double>(iy)),
               num(grid.density[iy * s.nx + ix])});
}

void run_mixture(const MixtureConfig& c, RunContext& ctx) {
  const MixturePairTarget target(sample_mixture_centers(c.centers_seed, c.n_centers));
  const std::size_t max_count = *std::max_element(c.sample_counts.begin(),
                                                  c.sample_counts.end());

  SamplerSpec mh;
  mh.kind = SamplerKind::kMhReference;
  mh.eta = c.mh_proposal;
  mh.iterations = c.mh_iterations;
  mh.burn_in = c.mh_burn_in;
  mh.seed = c.mh_seed;
  const SampleChain reference = run_chain(mh, target);

  struct Cell {
    std::size_t sampler, seed_idx;
    SampleChain chain;
    std::vector<double> w2;              // per sample count
    std::vector<std::size_t> w2_points;  // matched set sizes
  };
  std::vector<Cell> cells;
  for (std::size_t s = 0; s < c.samplers.size(); ++s)
    for (std::size_t k = 0; k < c.seeds.size(); ++k)
      cells.push_back({s, k, {}, {}, {}});

  parallel_for(cells.size(), ctx.threads, [&](std::size_t i) {
    Cell& cell = cells[i];
    const SamplerEntry& entry = c.samplers[cell.sampler];
    SamplerSpec spec = base_spec(entry, c.eta,
                                 circulant_sigma_from_paper_2d(entry.sigma_paper),
                                 c.use_step_multiplier, c.burn_in + max_count, c.burn_in,
                                 c.batch_size, c.seeds[cell.seed_idx]);
    cell.chain = run_chain(spec, target);
    for (std::size_t count : c.sample_counts) {
      // Trailing window of the first `count` samples.
      const std::size_t window = std::min(c.w2_window, count);
      const double* tail = cell.chain.samples.data() + 2 * (count - window);
      std::size_t used = 0;
      const double w2 = wasserstein2({tail, 2 * window}, window, reference.samples,
                                     reference.count(), 2, c.w2_max_points,
                                     /*seed=*/7, &used);
      cell.w2.push_back(w2);
      cell.w2_points.push_back(used);
    }
  });

  CsvWriter table(ctx.file("mixture_w2.csv"), "sampler,seed,samples,w2,matched_points");
  for (const Cell& cell : cells)
    for (std::size_t i = 0; i < c.sample_counts.size(); ++i)
      table.row({c.samplers[cell.sampler].label, std::to_string(c.seeds[cell.seed_idx]),
                 num(c.sample_counts[i]), num(cell.w2[i]), num(cell.w2_points[i])});

  // One common grid and bandwidth (from the reference chain) so the density
  // files are directly comparable.
  const double bw = scott_bandwidth(reference.samples, reference.count());
  const KdeGridSpec grid_spec = kde_grid_cover(reference.samples, reference.count(), bw,
                                               c.kde_grid, c.kde_grid);
  write_kde(ctx.file("mixture_kde_mh_reference.csv"),
            kde_grid(reference.samples, reference.count(), bw, grid_spec));
  for (const Cell& cell : cells) {
    if (cell.seed_idx != 0) continue;
    write_kde(ctx.file("mixture_kde_" + c.samplers[cell.sampler].label + ".csv"),
              kde_grid(cell.chain.samples, cell.chain.count(), bw, grid_spec));
  }

  if (c.write_chains) {
    for (const Cell& cell : cells) {
      if (cell.seed_idx != 0) continue;
      CsvWriter out(ctx.file("mixture_chain_" + c.samplers[cell.sampler].label + ".csv"),
                    "step,x_0,x_1");
      for (std::size_t i = 0; i < cell.chain.count(); i += c.chain_thin)
        out.row({num(cell.chain.steps[i]), num(cell.chain.samples[2 * i]),
                 num(cell.chain.samples[2 * i + 1])});
    }
  }
}

void run_mixing(const MixingConfig& c, RunContext& ctx) {
  const GaussianTarget target(c.mean, {c.cov_scale, 0.0, 0.0, c.cov_scale}, 1);
  const SamplerEntry entries[2] = {
      {SamplerKind::kLdReference, "ld", 0.0, 1.0},
      {SamplerKind::kLsLdReference, "ls_ld", c.sigma, 1.0},
  };
  struct Cell {
    std::size_t entry, seed_idx;
    std::vector<double> mse;  // per checkpoint
  };
  std::vector<Cell> cells;
  for (std::size_t e = 0; e < 2; ++e)
    for (std::size_t k = 0; k < c.seeds.size(); ++k)
      cells.push_back({e, k, {}});

  parallel_for(cells.size(), ctx.threads, [&](std::size_t i) {
    Cell& cell = cells[i];
    SamplerSpec spec = base_spec(entries[cell.entry], c.eta,
                                 circulant_sigma_from_paper_2d(entries[cell.entry].sigma_paper),
                                 c.use_step_multiplier, c.burn_in + c.iterations, c.burn_in,
                                 1, c.seeds[cell.seed_idx]);
    const SampleChain chain = run_chain(spec, target);
    for (std::size_t cp : c.checkpoints) {
      const MomentErrors err = mean_error({chain.samples.data(), 2 * cp}, 2, c.mean);
      cell.mse.push_back(err.mse);
    }
  });

  CsvWriter curves(ctx.file("mixing_curves.csv"), "sampler,seed,samples,mean_mse");
  for (const Cell& cell : cells)
    for (std::size_t i = 0; i < c.checkpoints.size(); ++i)
      curves.row({entries[cell.entry].label, std::to_string(c.seeds[cell.seed_idx]),
                  num(c.checkpoints[i]), num(cell.mse[i])});

  // Seed-averaged curves and their ratio; common noise streams across the
  // two samplers keep the ratio estimate tight.
  CsvWriter summary(ctx.file("mixing_summary.csv"),
                    "samples,ld_mean_mse,ls_ld_mean_mse,ratio");
  for (std::size_t i = 0; i < c.checkpoints.size(); ++i) {
    double acc[2] = {0.0, 0.0};
    for (const Cell& cell : cells) acc[cell.entry] += cell.mse[i];
    const double ld = acc[0] / static_cast<double>(c.seeds.size());
    const double ls = acc[1] / static_cast<double>(c.seeds.size());
    summary.row({num(c.checkpoints[i]), num(ld), num(ls), num(ls / ld)});
  }
}

void run_blr(const BlrConfig& c, RunContext& ctx) {
  const std::unique_ptr<BlrTarget> train = build_dataset(c.dataset);
  std::unique_ptr<BlrTarget> eval;
  if (c.has_eval) eval = build_dataset(c.eval_dataset);
  if (c.batch_size > train->components())
    throw std::invalid_argument("blr: batch_size exceeds the dataset size");

  struct Point {
    std::size_t iteration;
    double train_nll, train_acc, eval_nll, eval_acc;
  };
  struct Cell {
    std::size_t sampler, seed_idx;
    std::vector<Point> trace;
  };
  std::vector<Cell> cells;
  for (std::size_t s = 0; s < c.samplers.size(); ++s)
    for (std::size_t k = 0; k < c.seeds.size(); ++k)
      cells.push_back({s, k, {}});

  parallel_for(cells.size(), ctx.threads, [&](std::size_t i) {
    Cell& cell = cells[i];
    const SamplerEntry& entry = c.samplers[cell.sampler];
    const bool precond =
        entry.kind == SamplerKind::kPsgld || entry.kind == SamplerKind::kLsPsgld;
    SamplerSpec spec = base_spec(entry, precond ? c.eta_psgld : c.eta_sgld,
                                 entry.sigma_paper, c.use_step_multiplier, c.iterations,
                                 c.burn_in, c.batch_size, c.seeds[cell.seed_idx]);
    const SampleChain chain = run_chain(spec, *train);
    const std::size_t d = chain.dim;
    std::vector<double> acc(d, 0.0), mean(d);
    for (std::size_t s = 0; s < chain.count(); ++s) {
      const auto x = chain.sample(s);
      for (std::size_t j = 0; j < d; ++j) acc[j] += x[j];
      std::size_t n_used = s + 1;
      if (c.average_window > 0 && n_used > c.average_window) {
        const auto old = chain.sample(s - c.average_window);
        for (std::size_t j = 0; j < d; ++j) acc[j] -= old[j];
        n_used = c.average_window;
      }
      if ((s + 1) % c.eval_every != 0 && s + 1 != chain.count()) continue;
      for (std::size_t j = 0; j < d; ++j) mean[j] = acc[j] / static_cast<double>(n_used);
      Point p{};
      p.iteration = chain.steps[s];
      std::tie(p.train_nll, p.train_acc) = nll_accuracy(*train, mean);
      if (eval) std::tie(p.eval_nll, p.eval_acc) = nll_accuracy(*eval, mean);
      cell.trace.push_back(p);
    }
  });

  std::string header = "sampler,seed,iteration,train_nll,train_accuracy";
  if (eval) header += ",eval_nll,eval_accuracy";
  CsvWriter trace(ctx.file("blr_trace.csv"), header);
  for (const Cell& cell : cells) {
    for (const Point& p : cell.trace) {
      std::vector<std::string> row = {c.samplers[cell.sampler].label,
                                      std::to_string(c.seeds[cell.seed_idx]),
                                      num(p.iteration), num(p.train_nll), num(p.train_acc)};
      if (eval) {
        row.push_back(num(p.eval_nll));
        row.push_back(num(p.eval_acc));
      }
      trace.row(row);
    }
  }
}

void run_variance_table(const VarianceTableConfig& c, RunContext& ctx) {
  const std::unique_ptr<BlrTarget> target = build_dataset(c.dataset);
  for (std::size_t b : c.batch_sizes)
    if (b > target->components())
      throw std::invalid_argument("variance_table: batch size exceeds the dataset size");

  // Optimization-style path the variances are probed along.
  SamplerSpec path_spec;
  path_spec.kind = SamplerKind::kLdReference;
  path_spec.eta = c.path_eta;
  path_spec.iterations = c.path_steps;
  path_spec.thin = c.path_stride;
  path_spec.seed = c.path_seed;
  const SampleChain path = run_chain(path_spec, *target);

  struct Cell {
    std::size_t sigma_idx, batch_idx;
    double value = 0.0;
  };
  std::vector<Cell> cells;
  for (std::size_t s = 0; s < c.sigmas.size(); ++s)
    for (std::size_t b = 0; b < c.batch_sizes.size(); ++b)
      cells.push_back({s, b});

  parallel_for(cells.size(), ctx.threads, [&](std::size_t i) {
    Cell& cell = cells[i];
    const double sigma = c.sigmas[cell.sigma_idx];
    std::unique_ptr<LaplacianOperator> op;
    if (sigma > 0.0) op = std::make_unique<LaplacianOperator>(target->dim(), sigma);
    // Same batch stream for every sigma at a given batch size, so rows are
    // directly comparable down a column.
    const std::uint64_t seed = substream_seed(c.seed, 1 + cell.batch_idx);
    cell.value = gradient_variance_profile(*target, path.samples, path.count(), op.get(),
                                           c.batch_sizes[cell.batch_idx], c.repeats, seed);
  });

  CsvWriter table(ctx.file("variance_table.csv"), "sigma,batch_size,max_variance");
  for (const Cell& cell : cells)
    table.row({num(c.sigmas[cell.sigma_idx]), num(c.batch_sizes[cell.batch_idx]),
               num(cell.value)});
}

void run_gamma_table(const GammaTableConfig& c, RunContext& ctx) {
  CsvWriter table(ctx.file("gamma_table.csv"),
                  "d,sigma,inv_spectrum_sq_mean,inv_spectrum_mean");
  for (std::size_t d : c.dims) {
    for (double sigma : c.sigmas) {
      const LaplacianOperator op(d, sigma);
      table.row({num(d), num(sigma), num(op.inv_spectrum_sq_mean()), num(op.gamma2())});
    }
  }
}

void run_bounds_sweep(const BoundsSweepConfig& c, RunContext& ctx) {
  CsvWriter table(ctx.file("bounds_sweep.csv"),
                  "sigma,eta,c0,gamma1,gamma2,stochastic,discretization,ergodicity,total");
  for (double sigma : c.sigmas) {
    BoundInputs in;
    in.iterations = c.iterations;
    in.eta = c.scale_eta_with_sigma ? c.eta * step_multiplier(sigma) : c.eta;
    in.beta = c.beta;
    in.dim = c.dim;
    in.omega = c.omega;
    in.batch_size = c.batch_size;
    in.lambda_sobolev = c.lambda_sobolev;
    in.f0_beta_log_lambda = c.f0_term;
    in.b_dissip = c.b_dissip;
    in.smoothness = c.smoothness;
    const LaplacianOperator op(c.dim, sigma);
    in.with_operator_constants(op);
    BoundBreakdown out;
    if (c.mode == "convex") out = convex_bound(in);
    else if (c.mode == "sgld") out = convex_bound_sgld(in);
    else out = nonconvex_bound(in);
    table.row({num(sigma), num(in.eta), num(in.c0), num(in.gamma1), num(in.gamma2),
               num(out.stochastic_term), num(out.discretization_term),
               num(out.ergodicity_term), num(out.total)});
  }
}

}  // namespace

std::vector<std::string> validate_config_text(const std::string& text) {
  std::vector<std::string> errs;
  const json j = parse_json_text(text, errs);
  if (!errs.empty()) return errs;
  return validate_json(j);
}

std::vector<std::string> validate_config_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) return {"cannot open config file: " + path};
  std::ostringstream buf;
  buf << in.rdbuf();
  return validate_config_text(buf.str());
}

ExperimentResult run_experiment_file(const std::string& path, const RunOptions& options) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open config file: " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  const std::string text = buf.str();

  std::vector<std::string> errs;
  json j = parse_json_text(text, errs);
  if (errs.empty()) errs = validate_json(j);
  if (!errs.empty()) {
    std::string msg = "invalid config:";
    for (const auto& e : errs) msg += "\n  " + e;
    throw std::invalid_argument(msg);
  }
  if (options.seed_override) j["seeds"] = {*options.seed_override};

  RunContext ctx;
  ctx.out_dir = options.output_dir.empty() ? "." : options.output_dir;
  ctx.threads = options.threads;
  std::filesystem::create_directories(ctx.out_dir);

  const std::string exp = j["experiment"].get<std::string>();
  std::vector<std::string> dummy;
  Reader r{j, "config", dummy, {}};
  r.look("experiment", true);
  if (exp == "gauss2d") run_gauss2d(parse_gauss2d(r), ctx);
  else if (exp == "mixture") run_mixture(parse_mixture(r), ctx);
  else if (exp == "mixing") run_mixing(parse_mixing(r), ctx);
  else if (exp == "blr") run_blr(parse_blr(r), ctx);
  else if (exp == "variance_table") run_variance_table(parse_variance_table(r), ctx);
  else if (exp == "gamma_table") run_gamma_table(parse_gamma_table(r), ctx);
  else if (exp == "bounds_sweep") run_bounds_sweep(parse_bounds_sweep(r), ctx);

  json summary;
  summary["experiment"] = exp;
  summary["config"] = j;
  summary["files"] = ctx.files;
  std::ofstream sum(ctx.out_dir / "summary.json");
  sum << summary.dump(2) << '\n';
  ctx.files.push_back("summary.json");

  ExperimentResult result;
  result.experiment = exp;
  result.files_written = std::move(ctx.files);
  return result;
}

void write_gamma_table_csv(const std::string& path) {
  const GammaTableConfig c;
  CsvWriter table(path, "d,sigma,inv_spectrum_sq_mean,inv_spectrum_mean");
  for (std::size_t d : c.dims)
    for (double sigma : c.sigmas) {
      const LaplacianOperator op(d, sigma);
      table.row({num(d), num(sigma), num(op.inv_spectrum_sq_mean()), num(op.gamma2())});
    }
}

}  // namespace lssgld
