#ifndef LSSGLD_THEORY_BOUNDS_HPP_
#define LSSGLD_THEORY_BOUNDS_HPP_

#include <cstddef>

#include "lssgld/smoothing_operator.hpp"

namespace lssgld {

// Constants feeding the Wasserstein error decompositions. The analytic
// constants (sobolev constant, f0 term, dissipativity offset, smoothness)
// are user inputs; the spectral constants default to the conservative
// bracket endpoints and can be filled from an operator.
struct BoundInputs {
  std::size_t iterations = 0;     // K
  double eta = 0.0;
  double beta = 1.0;
  std::size_t dim = 0;
  double omega = 0.0;             // gradient-noise scale
  std::size_t batch_size = 1;     // B
  double lambda_sobolev = 1.0;
  double c0 = 1.0;                // in [1/||A||, 1]
  double gamma1 = 1.0;            // in [1/||A||^2, 1]
  double gamma2 = 1.0;            // spectral average of 1/lambda
  double f0_beta_log_lambda = 1.0;  // beta f(0) + log Lambda
  double b_dissip = 0.0;          // nonconvex bound only
  double smoothness = 0.0;        // M, nonconvex bound only

  // Conservative endpoints c0 = 1/||A||, gamma1 = 1/||A||^2 and the exact
  // spectral average gamma2, derived from the operator.
  BoundInputs& with_operator_constants(const LaplacianOperator& op);
  void validate(bool nonconvex) const;  // throws on nonpositive inputs
};

struct BoundBreakdown {
  double stochastic_term = 0.0;      // gradient-noise part of the discretization error
  double discretization_term = 0.0;  // numerical-integrator part
  double ergodicity_term = 0.0;      // continuous-time mixing part
  double total = 0.0;                // sum of the three
};

// Log-concave error decomposition:
//   W2 <= (2 g1 K eta^2 beta d w^2 / B)^{1/2}
//       + (8 g2 K eta^2 (K+1) beta d eta)^{1/2}
//       + (2 lam (beta f0 + log Lambda))^{1/2} exp(-c0 K eta / (2 beta lam))
BoundBreakdown convex_bound(const BoundInputs& in);

// The sigma = 0 specialization as printed (beta placement differs from the
// smoothed bound; both forms are kept verbatim):
//   W2 <= (2 K eta^2 d w^2 / B)^{1/2} + (8 K eta^2 (K+1) beta^{-1} d eta)^{1/2} + ...
BoundBreakdown convex_bound_sgld(const BoundInputs& in);

// Non-log-concave decomposition with Gamma = (3/2 + 2(b + d/beta))^{1/2} and
// inner = g1 beta d w^2 K eta / B + 2 g2 M^2 d K eta^2:
//   W2 <= Gamma (K eta)^{1/2} (inner^{1/2} + inner^{1/4}) + ergodicity term.
// The whole bracket is reported as discretization_term.
BoundBreakdown nonconvex_bound(const BoundInputs& in);

}  // namespace lssgld

#endif  // LSSGLD_THEORY_BOUNDS_HPP_
