// Circulant smoothing-operator tests against dense linear-algebra oracles.

#include <cmath>
#include <stdexcept>
#include <vector>

#include <Eigen/Dense>

#include "doctest.h"
#include "lssgld/rng.hpp"
#include "lssgld/smoothing_operator.hpp"

using lssgld::LaplacianOperator;
using lssgld::RngStream;

namespace {

Eigen::MatrixXd dense_of(const LaplacianOperator& op) {
  const auto flat = op.dense_materialize();
  const auto d = static_cast<Eigen::Index>(op.dim());
  Eigen::MatrixXd m(d, d);
  for (Eigen::Index i = 0; i < d; ++i)
    for (Eigen::Index j = 0; j < d; ++j) m(i, j) = flat[i * d + j];
  return m;
}

}  // namespace

TEST_CASE("spectrum and dense form for d = 4, sigma = 1") {
  LaplacianOperator op(4, 1.0);
  // lambda_j = 3 - 2 cos(pi j / 2), j = 0..3.
  const std::vector<double> expected{1.0, 3.0, 5.0, 3.0};
  REQUIRE(op.spectrum().size() == 4);
  for (std::size_t j = 0; j < 4; ++j)
    CHECK(op.spectrum()[j] == doctest::Approx(expected[j]).epsilon(1e-12));

  const Eigen::MatrixXd a = dense_of(op);
  CHECK(a(0, 0) == doctest::Approx(3.0));
  CHECK(a(0, 1) == doctest::Approx(-1.0));
  CHECK(a(0, 2) == doctest::Approx(0.0).epsilon(1e-12));
  CHECK(a(0, 3) == doctest::Approx(-1.0));
  // Circulant: every row is a rotation of the first.
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 4; ++j) CHECK(a(i, j) == doctest::Approx(a(0, (j - i + 4) % 4)));
}

TEST_CASE("inverse of the first basis vector, d = 4, sigma = 1") {
  LaplacianOperator op(4, 1.0);
  const std::vector<double> e1{1.0, 0.0, 0.0, 0.0};
  const auto u = op.apply_inverse(e1);
  CHECK(u[0] == doctest::Approx(7.0 / 15.0).epsilon(1e-12));
  CHECK(u[1] == doctest::Approx(1.0 / 5.0).epsilon(1e-12));
  CHECK(u[2] == doctest::Approx(2.0 / 15.0).epsilon(1e-12));
  CHECK(u[3] == doctest::Approx(1.0 / 5.0).epsilon(1e-12));
}

TEST_CASE("inverse square root of the first basis vector, d = 4, sigma = 1") {
  LaplacianOperator op(4, 1.0);
  const std::vector<double> e1{1.0, 0.0, 0.0, 0.0};
  const auto u = op.apply_inverse_sqrt(e1);
  // Average of 1/sqrt(lambda_j) over the DFT modes hitting entry 0.
  const double expected = 0.25 * (1.0 + 2.0 / std::sqrt(3.0) + 1.0 / std::sqrt(5.0));
  CHECK(u[0] == doctest::Approx(expected).epsilon(1e-12));
}

TEST_CASE("d = 2 aliases both off-diagonal couplings") {
  LaplacianOperator op(2, 0.05);
  CHECK(op.spectrum()[0] == doctest::Approx(1.0));
  CHECK(op.spectrum()[1] == doctest::Approx(1.2));
  const Eigen::MatrixXd a = dense_of(op);
  CHECK(a(0, 0) == doctest::Approx(1.1));
  CHECK(a(0, 1) == doctest::Approx(-0.1));
  CHECK(a(1, 0) == doctest::Approx(-0.1));
  CHECK(a(1, 1) == doctest::Approx(1.1));
}

TEST_CASE("inverse matches a dense LU oracle across dims and sigmas") {
  for (std::size_t d : {1u, 2u, 3u, 4u, 7u, 64u, 122u, 512u}) {
    for (double sigma : {0.0, 0.1, 0.5, 1.0, 2.0, 5.0}) {
      CAPTURE(d);
      CAPTURE(sigma);
      LaplacianOperator op(d, sigma);
      RngStream rng(1234 + d);
      std::vector<double> v(d);
      rng.gaussian_fill(v);

      const Eigen::MatrixXd a = dense_of(op);
      const Eigen::VectorXd rhs = Eigen::Map<const Eigen::VectorXd>(v.data(), d);
      const Eigen::VectorXd oracle = a.partialPivLu().solve(rhs);

      const auto u = op.apply_inverse(v);
      double err = 0.0, norm = 0.0;
      for (std::size_t i = 0; i < d; ++i) {
        err += (u[i] - oracle(static_cast<Eigen::Index>(i))) *
               (u[i] - oracle(static_cast<Eigen::Index>(i)));
        norm += oracle(static_cast<Eigen::Index>(i)) * oracle(static_cast<Eigen::Index>(i));
      }
      CHECK(std::sqrt(err) <= 1e-10 * std::sqrt(norm));
    }
  }
}

TEST_CASE("inverse sqrt composed twice equals the inverse") {
  for (std::size_t d : {3u, 64u, 122u}) {
    for (double sigma : {0.0, 0.5, 2.0}) {
      CAPTURE(d);
      CAPTURE(sigma);
      LaplacianOperator op(d, sigma);
      RngStream rng(77 + d);
      std::vector<double> v(d);
      rng.gaussian_fill(v);
      const auto once = op.apply_inverse(v);
      const auto twice = op.apply_inverse_sqrt(op.apply_inverse_sqrt(v));
      double err = 0.0, norm = 0.0;
      for (std::size_t i = 0; i < d; ++i) {
        err += (once[i] - twice[i]) * (once[i] - twice[i]);
        norm += once[i] * once[i];
      }
      CHECK(std::sqrt(err) <= 1e-10 * std::sqrt(norm));
    }
  }
}

TEST_CASE("inverse sqrt matches a dense eigendecomposition oracle") {
  const std::size_t d = 48;
  const double sigma = 1.7;
  LaplacianOperator op(d, sigma);
  const Eigen::MatrixXd a = dense_of(op);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(a);
  const Eigen::MatrixXd inv_sqrt = es.operatorInverseSqrt();

  RngStream rng(9);
  std::vector<double> v(d);
  rng.gaussian_fill(v);
  const Eigen::VectorXd oracle = inv_sqrt * Eigen::Map<const Eigen::VectorXd>(v.data(), d);
  const auto u = op.apply_inverse_sqrt(v);
  for (std::size_t i = 0; i < d; ++i)
    CHECK(u[i] == doctest::Approx(oracle(static_cast<Eigen::Index>(i))).epsilon(1e-10));
}

TEST_CASE("sigma = 0 is the identity, bit for bit") {
  LaplacianOperator op(16, 0.0);
  RngStream rng(5);
  std::vector<double> v(16);
  rng.gaussian_fill(v);
  const auto u = op.apply_inverse(v);
  const auto w = op.apply_inverse_sqrt(v);
  for (std::size_t i = 0; i < 16; ++i) {
    CHECK(u[i] == v[i]);
    CHECK(w[i] == v[i]);
  }
}

TEST_CASE("d = 1 operator is the identity for any sigma") {
  LaplacianOperator op(1, 3.0);
  CHECK(op.spectrum()[0] == doctest::Approx(1.0));
  const std::vector<double> v{2.5};
  CHECK(op.apply_inverse(v)[0] == doctest::Approx(2.5));
}

TEST_CASE("spectral averages") {
  // Closed forms: mean of 1/lambda_j and 1/lambda_j^2 with
  // lambda_j = a - b cos(2 pi j / d), a = 1 + 2 sigma, b = 2 sigma; as
  // d -> inf these tend to 1/sqrt(a^2 - b^2) and a/(a^2 - b^2)^{3/2}.
  LaplacianOperator op(100000, 1.0);
  CHECK(op.gamma2() == doctest::Approx(1.0 / std::sqrt(5.0)).epsilon(1e-4));
  CHECK(op.inv_spectrum_sq_mean() == doctest::Approx(3.0 / std::pow(5.0, 1.5)).epsilon(1e-4));
  CHECK(op.spectral_norm() == doctest::Approx(5.0).epsilon(1e-9));

  // gamma2 decreases as sigma grows; always within (0, 1].
  double prev = 1.0 + 1e-12;
  for (double sigma : {0.0, 0.5, 1.0, 2.0, 5.0}) {
    LaplacianOperator o(64, sigma);
    CHECK(o.gamma2() <= prev);
    CHECK(o.gamma2() > 0.0);
    CHECK(o.gamma2() <= 1.0);
    prev = o.gamma2();
  }
}

TEST_CASE("inverse preserves constants (rows of the inverse sum to 1)") {
  LaplacianOperator op(37, 2.5);
  const std::vector<double> ones(37, 1.0);
  for (double y : op.apply_inverse(ones)) CHECK(y == doctest::Approx(1.0).epsilon(1e-12));
  for (double y : op.apply_inverse_sqrt(ones)) CHECK(y == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("gaussian norm identities") {
  // E ||A^{-1/2} eps||^2 = d * gamma2 and E ||A^{-1} eps||^2 = sum lambda^-2.
  const std::size_t d = 100, draws = 100000;
  for (double sigma : {1.0, 2.0}) {
    CAPTURE(sigma);
    LaplacianOperator op(d, sigma);
    RngStream rng(321);
    std::vector<double> eps(d);
    double sum_half = 0.0, sum_full = 0.0;
    for (std::size_t k = 0; k < draws; ++k) {
      rng.gaussian_fill(eps);
      for (double y : op.apply_inverse_sqrt(eps)) sum_half += y * y;
      for (double y : op.apply_inverse(eps)) sum_full += y * y;
    }
    const double mean_half = sum_half / draws;
    const double mean_full = sum_full / draws;
    CHECK(mean_half == doctest::Approx(d * op.gamma2()).epsilon(0.02));
    CHECK(mean_full == doctest::Approx(d * op.inv_spectrum_sq_mean()).epsilon(0.02));
  }
}

TEST_CASE("construction and guard errors") {
  CHECK_THROWS_AS(LaplacianOperator(0, 1.0), std::invalid_argument);
  CHECK_THROWS_AS(LaplacianOperator(4, -0.1), std::invalid_argument);
  LaplacianOperator big(8192, 1.0);
  CHECK_THROWS_AS(big.dense_materialize(), std::invalid_argument);
  LaplacianOperator ok(8, 1.0);
  const std::vector<double> wrong(7, 0.0);
  CHECK_THROWS_AS(ok.apply_inverse(wrong), std::invalid_argument);
}
