// Sampler transition-kernel tests: hand-computed single steps, exact
// reductions between variants, noise-law checks, and chain bookkeeping.

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <vector>

#include "doctest.h"
#include "lssgld/diagnostics.hpp"
#include "lssgld/rng.hpp"
#include "lssgld/samplers.hpp"
#include "lssgld/smoothing_operator.hpp"
#include "lssgld/targets.hpp"

using namespace lssgld;

namespace {

GaussianTarget std_normal(std::size_t d, std::size_t n_components = 1) {
  std::vector<double> mean(d, 0.0), cov(d * d, 0.0);
  for (std::size_t i = 0; i < d; ++i) cov[i * d + i] = 1.0;
  return GaussianTarget(std::move(mean), std::move(cov), n_components);
}

SamplerSpec base_spec(SamplerKind kind, double eta, std::size_t iterations,
                      std::uint64_t seed) {
  SamplerSpec spec;
  spec.kind = kind;
  spec.eta = eta;
  spec.iterations = iterations;
  spec.seed = seed;
  return spec;
}

}  // namespace

TEST_CASE("kind names round-trip and smoothing kinds are classified") {
  for (SamplerKind k : {SamplerKind::kSgld, SamplerKind::kLsSgld, SamplerKind::kPsgld,
                        SamplerKind::kLsPsgld, SamplerKind::kLdReference,
                        SamplerKind::kLsLdReference, SamplerKind::kMhReference})
    CHECK(sampler_kind_from_string(to_string(k)) == k);
  CHECK_FALSE(sampler_kind_from_string("nope").has_value());
  CHECK(is_smoothing_kind(SamplerKind::kLsSgld));
  CHECK(is_smoothing_kind(SamplerKind::kLsPsgld));
  CHECK(is_smoothing_kind(SamplerKind::kLsLdReference));
  CHECK_FALSE(is_smoothing_kind(SamplerKind::kSgld));
  CHECK_FALSE(is_smoothing_kind(SamplerKind::kMhReference));
}

TEST_CASE("single full-batch step matches a hand-rolled update") {
  // x' = x - eta * grad + sqrt(2 eta / beta) * eps with the library's own
  // noise stream replayed independently.
  GaussianTarget target = std_normal(3);
  SamplerSpec spec = base_spec(SamplerKind::kLdReference, 0.01, 1, 5);
  spec.beta = 2.0;
  spec.x0 = {1.0, -2.0, 0.5};
  const SampleChain chain = run_chain(spec, target);
  REQUIRE(chain.count() == 1);

  RngStream noise(substream_seed(5, 2));
  std::vector<double> eps(3);
  noise.gaussian_fill(eps);
  const double coeff = std::sqrt(2.0 * 0.01 / 2.0);
  const std::vector<double> x{1.0, -2.0, 0.5};
  for (std::size_t j = 0; j < 3; ++j) {
    // grad of ||x||^2 / 2 is x itself.
    const double expected = x[j] + (-0.01 * x[j] + coeff * eps[j]);
    CHECK(chain.samples[j] == doctest::Approx(expected).epsilon(1e-14));
  }
}

TEST_CASE("smoothed full-batch step matches a dense-operator oracle") {
  GaussianTarget target = std_normal(4);
  LaplacianOperator op(4, 1.0);
  SamplerSpec spec = base_spec(SamplerKind::kLsLdReference, 0.05, 1, 11);
  spec.sigma = 1.0;
  spec.x0 = {0.2, -0.1, 0.4, -0.3};
  const SampleChain chain = run_chain(spec, target, &op);
  REQUIRE(chain.count() == 1);

  RngStream noise(substream_seed(11, 2));
  std::vector<double> eps(4);
  noise.gaussian_fill(eps);
  const auto smoothed_grad = op.apply_inverse(spec.x0);
  const auto smoothed_eps = op.apply_inverse_sqrt(eps);
  const double coeff = std::sqrt(2.0 * 0.05);
  for (std::size_t j = 0; j < 4; ++j) {
    const double expected =
        spec.x0[j] - 0.05 * smoothed_grad[j] + coeff * smoothed_eps[j];
    CHECK(chain.samples[j] == doctest::Approx(expected).epsilon(1e-14));
  }
}

TEST_CASE("sigma = 0 smoothing kinds reproduce the plain kinds bit for bit") {
  GaussianTarget target = std_normal(4, 50);
  const auto pairs = {
      std::pair{SamplerKind::kSgld, SamplerKind::kLsSgld},
      std::pair{SamplerKind::kPsgld, SamplerKind::kLsPsgld},
      std::pair{SamplerKind::kLdReference, SamplerKind::kLsLdReference},
  };
  for (const auto& [plain, smoothed] : pairs) {
    CAPTURE(to_string(plain));
    SamplerSpec a = base_spec(plain, 0.01, 300, 9);
    SamplerSpec b = base_spec(smoothed, 0.01, 300, 9);
    a.batch_size = b.batch_size = 10;
    const SampleChain ca = run_chain(a, target);
    const SampleChain cb = run_chain(b, target);
    REQUIRE(ca.samples.size() == cb.samples.size());
    for (std::size_t i = 0; i < ca.samples.size(); ++i)
      CHECK(ca.samples[i] == cb.samples[i]);
  }
}

TEST_CASE("unit preconditioner reduces the preconditioned kinds to the plain ones") {
  GaussianTarget target = std_normal(3, 20);
  SamplerSpec a = base_spec(SamplerKind::kSgld, 0.02, 200, 13);
  SamplerSpec b = base_spec(SamplerKind::kPsgld, 0.02, 200, 13);
  a.batch_size = b.batch_size = 5;
  b.unit_precond = true;
  const SampleChain ca = run_chain(a, target);
  const SampleChain cb = run_chain(b, target);
  REQUIRE(ca.samples.size() == cb.samples.size());
  for (std::size_t i = 0; i < ca.samples.size(); ++i)
    CHECK(ca.samples[i] == cb.samples[i]);
}

TEST_CASE("preconditioning order switch changes the smoothed trajectory") {
  GaussianTarget target = std_normal(6, 30);
  SamplerSpec a = base_spec(SamplerKind::kLsPsgld, 0.02, 100, 3);
  a.sigma = 1.0;
  a.batch_size = 10;
  SamplerSpec b = a;
  b.smooth_before_precond = true;
  const SampleChain ca = run_chain(a, target);
  const SampleChain cb = run_chain(b, target);
  bool differ = false;
  for (std::size_t i = 0; i < ca.samples.size() && !differ; ++i)
    differ = (ca.samples[i] != cb.samples[i]);
  CHECK(differ);

  // At sigma = 0 the order is irrelevant and both reduce to plain psgld.
  a.sigma = b.sigma = 0.0;
  const SampleChain za = run_chain(a, target);
  const SampleChain zb = run_chain(b, target);
  for (std::size_t i = 0; i < za.samples.size(); ++i)
    CHECK(za.samples[i] == zb.samples[i]);
}

TEST_CASE("injected noise follows the smoothed covariance law") {
  // With a zero gradient and no thinning, successive increments are i.i.d.
  // N(0, (2 eta / beta) A^{-1}); check the empirical covariance.
  const std::size_t d = 8;
  const double eta = 0.3, beta = 2.0, sigma = 1.5;
  GaussianTarget flat(std::vector<double>(d, 0.0),
                      [] {
                        std::vector<double> cov(8 * 8, 0.0);
                        for (int i = 0; i < 8; ++i) cov[i * 8 + i] = 1e12;
                        return cov;
                      }());
  LaplacianOperator op(d, sigma);
  SamplerSpec spec = base_spec(SamplerKind::kLsLdReference, eta, 200000, 21);
  spec.sigma = sigma;
  spec.beta = beta;
  const SampleChain chain = run_chain(spec, flat, &op);

  // Dense A^{-1} via the operator itself.
  std::vector<std::vector<double>> ainv(d);
  for (std::size_t j = 0; j < d; ++j) {
    std::vector<double> e(d, 0.0);
    e[j] = 1.0;
    ainv[j] = op.apply_inverse(e);
  }
  const double scale = 2.0 * eta / beta;

  std::vector<double> prev(d, 0.0);
  std::vector<std::vector<double>> acc(d, std::vector<double>(d, 0.0));
  const std::size_t n = chain.count();
  for (std::size_t i = 0; i < n; ++i) {
    std::vector<double> inc(d);
    for (std::size_t j = 0; j < d; ++j) inc[j] = chain.samples[i * d + j] - prev[j];
    for (std::size_t j = 0; j < d; ++j) prev[j] = chain.samples[i * d + j];
    for (std::size_t r = 0; r < d; ++r)
      for (std::size_t c = 0; c < d; ++c) acc[r][c] += inc[r] * inc[c];
  }
  double num = 0.0, den = 0.0;
  for (std::size_t r = 0; r < d; ++r)
    for (std::size_t c = 0; c < d; ++c) {
      const double expected = scale * ainv[r][c];
      const double got = acc[r][c] / static_cast<double>(n);
      num += (got - expected) * (got - expected);
      den += expected * expected;
    }
  CHECK(std::sqrt(num / den) < 0.03);  // relative Frobenius error
}

TEST_CASE("silenced noise turns the sampler into plain gradient descent") {
  GaussianTarget target = std_normal(2);
  SamplerSpec spec = base_spec(SamplerKind::kLdReference, 0.1, 50, 1);
  spec.noise_scale = 0.0;
  spec.x0 = {4.0, -4.0};
  const SampleChain chain = run_chain(spec, target);
  double x = 4.0;
  for (std::size_t i = 0; i < chain.count(); ++i) {
    x *= (1.0 - 0.1);
    CHECK(chain.samples[i * 2] == doctest::Approx(x).epsilon(1e-12));
  }
}

TEST_CASE("burn-in and thinning bookkeeping") {
  GaussianTarget target = std_normal(2);
  SamplerSpec spec = base_spec(SamplerKind::kLdReference, 0.01, 100, 2);
  spec.burn_in = 99;
  CHECK(run_chain(spec, target).count() == 1);

  spec.burn_in = 10;
  spec.thin = 7;
  const SampleChain chain = run_chain(spec, target);
  CHECK(chain.count() == (100 - 10 + 6) / 7);
  CHECK(chain.steps.front() == 11);
  for (std::size_t i = 1; i < chain.steps.size(); ++i)
    CHECK(chain.steps[i] - chain.steps[i - 1] == 7);
}

TEST_CASE("per-step schedule overrides the flat step size") {
  GaussianTarget target = std_normal(1);
  SamplerSpec spec = base_spec(SamplerKind::kLdReference, 0.0, 3, 6);
  spec.eta_schedule = {0.1, 0.2, 0.3};
  spec.noise_scale = 0.0;
  spec.x0 = {1.0};
  const SampleChain chain = run_chain(spec, target);
  CHECK(chain.samples[0] == doctest::Approx(0.9));
  CHECK(chain.samples[1] == doctest::Approx(0.9 * 0.8));
  CHECK(chain.samples[2] == doctest::Approx(0.9 * 0.8 * 0.7));
  CHECK(chain.etas == std::vector<double>{0.1, 0.2, 0.3});
}

TEST_CASE("chains are deterministic and CSV output is byte-stable") {
  GaussianTarget target = std_normal(2, 10);
  SamplerSpec spec = base_spec(SamplerKind::kSgld, 0.05, 500, 77);
  spec.batch_size = 3;
  const SampleChain a = run_chain(spec, target);
  const SampleChain b = run_chain(spec, target);
  CHECK(a.samples == b.samples);

  const std::string p1 = "/tmp/lssgld_test_chain1.csv";
  const std::string p2 = "/tmp/lssgld_test_chain2.csv";
  a.write_csv(p1);
  b.write_csv(p2);
  std::ifstream f1(p1), f2(p2);
  std::stringstream s1, s2;
  s1 << f1.rdbuf();
  s2 << f2.rdbuf();
  CHECK(s1.str() == s2.str());
  CHECK(s1.str().starts_with("step,eta,x_0,x_1\n"));
  std::remove(p1.c_str());
  std::remove(p2.c_str());

  SamplerSpec other = spec;
  other.seed = 78;
  CHECK(run_chain(other, target).samples != a.samples);
}

TEST_CASE("random-walk reference behaves like a correct MH kernel") {
  GaussianTarget target = std_normal(2);
  SamplerSpec spec = base_spec(SamplerKind::kMhReference, 0.5, 100000, 31);
  spec.burn_in = 1000;
  const SampleChain chain = run_chain(spec, target);
  CHECK(chain.acceptance_rate > 0.5);
  CHECK(chain.acceptance_rate < 0.95);

  // Equilibrium second moments of the standard normal.
  const auto xs = chain.coordinate(0);
  double m2 = 0.0;
  for (double v : xs) m2 += v * v;
  CHECK(m2 / xs.size() == doctest::Approx(1.0).epsilon(0.05));

  // Detailed balance for the symmetric proposal: the log acceptance ratio
  // is antisymmetric in (x, y).
  MixturePairTarget mix({{2.0, 2.0}});
  const std::vector<double> x{0.3, -0.7}, y{1.4, 0.2};
  const double fwd = mix.log_density_unnormalized(y) - mix.log_density_unnormalized(x);
  const double bwd = mix.log_density_unnormalized(x) - mix.log_density_unnormalized(y);
  CHECK(std::abs(fwd + bwd) <= 1e-12);
}

TEST_CASE("sgld equilibrates on a correlated gaussian") {
  GaussianTarget target({0.0, 0.0}, {1.0, 0.9, 0.9, 1.0}, 100);
  SamplerSpec spec = base_spec(SamplerKind::kSgld, 5e-3, 200000, 4);
  spec.batch_size = 100;  // identical components; full batch = exact gradient
  spec.burn_in = 5000;
  const SampleChain chain = run_chain(spec, target);
  const auto err = covariance_error(chain.samples, 2, target.covariance());
  CHECK(err.mse < 0.02);
}

TEST_CASE("spec validation rejects inconsistent settings") {
  GaussianTarget target = std_normal(2, 10);
  SamplerSpec ok = base_spec(SamplerKind::kSgld, 0.01, 10, 1);
  CHECK_NOTHROW(ok.validate(target));

  SamplerSpec s = ok;
  s.iterations = 0;
  CHECK_THROWS_AS(s.validate(target), std::invalid_argument);
  s = ok;
  s.eta = 0.0;
  CHECK_THROWS_AS(s.validate(target), std::invalid_argument);
  s = ok;
  s.beta = -1.0;
  CHECK_THROWS_AS(s.validate(target), std::invalid_argument);
  s = ok;
  s.batch_size = 11;
  CHECK_THROWS_AS(s.validate(target), std::invalid_argument);
  s = ok;
  s.sigma = 1.0;  // smoothing strength on a non-smoothing kind
  CHECK_THROWS_AS(s.validate(target), std::invalid_argument);
  s = ok;
  s.burn_in = 10;
  CHECK_THROWS_AS(s.validate(target), std::invalid_argument);
  s = ok;
  s.thin = 0;
  CHECK_THROWS_AS(s.validate(target), std::invalid_argument);
  s = ok;
  s.x0 = {1.0};
  CHECK_THROWS_AS(s.validate(target), std::invalid_argument);
  s = ok;
  s.eta_schedule = {0.1, 0.2};
  CHECK_THROWS_AS(s.validate(target), std::invalid_argument);

  // MH needs a log-density; the logistic target has none.
  BlrTarget blr = make_synthetic_logistic(10, 3, 1);
  SamplerSpec mh = base_spec(SamplerKind::kMhReference, 0.5, 10, 1);
  CHECK_THROWS_AS(mh.validate(blr), std::invalid_argument);

  // Smoothing kinds demand a matching operator when one is passed.
  SamplerSpec ls = base_spec(SamplerKind::kLsSgld, 0.01, 10, 1);
  ls.batch_size = 10;
  CHECK_THROWS_AS(run_chain(ls, target, nullptr), std::invalid_argument);
  LaplacianOperator wrong(3, 0.0);
  CHECK_THROWS_AS(run_chain(ls, target, &wrong), std::invalid_argument);
}
