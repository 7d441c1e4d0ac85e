#include "lssgld/theory_bounds.hpp"

#include <cmath>
#include <stdexcept>

namespace lssgld {

BoundInputs& BoundInputs::with_operator_constants(const LaplacianOperator& op) {
  const double norm = op.spectral_norm();
  c0 = 1.0 / norm;
  gamma1 = 1.0 / (norm * norm);
  gamma2 = op.gamma2();
  return *this;
}

void BoundInputs::validate(bool nonconvex) const {
  if (iterations == 0) throw std::invalid_argument("bounds: K must be positive");
  if (eta <= 0.0) throw std::invalid_argument("bounds: eta must be positive");
  if (beta <= 0.0) throw std::invalid_argument("bounds: beta must be positive");
  if (dim == 0) throw std::invalid_argument("bounds: d must be positive");
  if (omega < 0.0) throw std::invalid_argument("bounds: omega must be nonnegative");
  if (batch_size == 0) throw std::invalid_argument("bounds: B must be positive");
  if (lambda_sobolev <= 0.0) throw std::invalid_argument("bounds: sobolev constant must be positive");
  if (c0 <= 0.0 || c0 > 1.0) throw std::invalid_argument("bounds: c0 must lie in (0, 1]");
  if (gamma1 <= 0.0 || gamma1 > 1.0) throw std::invalid_argument("bounds: gamma1 must lie in (0, 1]");
  if (gamma2 <= 0.0 || gamma2 > 1.0) throw std::invalid_argument("bounds: gamma2 must lie in (0, 1]");
  if (f0_beta_log_lambda <= 0.0)
    throw std::invalid_argument("bounds: beta f(0) + log Lambda must be positive");
  if (nonconvex) {
    if (b_dissip < 0.0) throw std::invalid_argument("bounds: b must be nonnegative");
    if (smoothness < 0.0) throw std::invalid_argument("bounds: M must be nonnegative");
  }
}

namespace {

double ergodicity(const BoundInputs& in) {
  const double k_eta = static_cast<double>(in.iterations) * in.eta;
  return std::sqrt(2.0 * in.lambda_sobolev * in.f0_beta_log_lambda) *
         std::exp(-in.c0 * k_eta / (2.0 * in.beta * in.lambda_sobolev));
}

BoundBreakdown assemble(double stoch, double disc, double ergo) {
  BoundBreakdown out;
  out.stochastic_term = stoch;
  out.discretization_term = disc;
  out.ergodicity_term = ergo;
  out.total = stoch + disc + ergo;
  return out;
}

}  // namespace

BoundBreakdown convex_bound(const BoundInputs& in) {
  in.validate(false);
  const double K = static_cast<double>(in.iterations);
  const double d = static_cast<double>(in.dim);
  const double stoch = std::sqrt(2.0 * in.gamma1 * K * in.eta * in.eta * in.beta * d *
                                 in.omega * in.omega / static_cast<double>(in.batch_size));
  const double disc =
      std::sqrt(8.0 * in.gamma2 * K * in.eta * in.eta * (K + 1.0) * in.beta * d * in.eta);
  return assemble(stoch, disc, ergodicity(in));
}

BoundBreakdown convex_bound_sgld(const BoundInputs& in) {
  in.validate(false);
  const double K = static_cast<double>(in.iterations);
  const double d = static_cast<double>(in.dim);
  const double stoch = std::sqrt(2.0 * K * in.eta * in.eta * d * in.omega * in.omega /
                                 static_cast<double>(in.batch_size));
  const double disc =
      std::sqrt(8.0 * K * in.eta * in.eta * (K + 1.0) * d * in.eta / in.beta);
  return assemble(stoch, disc, ergodicity(in));
}

BoundBreakdown nonconvex_bound(const BoundInputs& in) {
  in.validate(true);
  const double K = static_cast<double>(in.iterations);
  const double d = static_cast<double>(in.dim);
  const double k_eta = K * in.eta;
  const double gamma_bar = std::sqrt(1.5 + 2.0 * (in.b_dissip + d / in.beta));
  const double inner =
      in.gamma1 * in.beta * d * in.omega * in.omega * k_eta / static_cast<double>(in.batch_size) +
      2.0 * in.gamma2 * in.smoothness * in.smoothness * d * K * in.eta * in.eta;
  const double bracket =
      gamma_bar * std::sqrt(k_eta) * (std::sqrt(inner) + std::pow(inner, 0.25));
  return assemble(0.0, bracket, ergodicity(in));
}

}  // namespace lssgld
