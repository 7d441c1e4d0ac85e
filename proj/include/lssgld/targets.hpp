#ifndef LSSGLD_TARGETS_HPP_
#define LSSGLD_TARGETS_HPP_

#include <cstdint>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "lssgld/smoothing_operator.hpp"

namespace lssgld {

// A finite-sum target f(x) = (1/n) sum_i f_i(x) whose density is
// pi propto exp(-beta f). Implementations are immutable after
// construction; gradient evaluation is reentrant.
class TargetModel {
 public:
  virtual ~TargetModel() = default;

  virtual std::size_t dim() const = 0;
  virtual std::size_t components() const = 0;

  virtual void component_grad(std::size_t i, std::span<const double> x,
                              std::span<double> out) const = 0;

  // (1/n) sum_i component_grad(i, x). Overridden where a closed form is cheaper.
  virtual void full_grad(std::span<const double> x, std::span<double> out) const;

  virtual bool has_log_density() const { return false; }
  // Unnormalized log pi at beta = 1, i.e. -f(x). Throws if unsupported.
  virtual double log_density_unnormalized(std::span<const double> x) const;
};

// Multivariate Gaussian N(mean, covariance) presented as n identical
// components so it can drive mini-batch samplers unchanged.
class GaussianTarget : public TargetModel {
 public:
  GaussianTarget(std::vector<double> mean, std::vector<double> covariance_row_major,
                 std::size_t n_components = 1);

  std::size_t dim() const override { return mean_.size(); }
  std::size_t components() const override { return n_; }
  void component_grad(std::size_t i, std::span<const double> x,
                      std::span<double> out) const override;
  void full_grad(std::span<const double> x, std::span<double> out) const override;
  bool has_log_density() const override { return true; }
  double log_density_unnormalized(std::span<const double> x) const override;

  const std::vector<double>& mean() const { return mean_; }
  const std::vector<double>& covariance() const { return cov_; }
  const std::vector<double>& precision() const { return precision_; }

 private:
  std::vector<double> mean_;
  std::vector<double> cov_;        // row-major d x d
  std::vector<double> precision_;  // row-major d x d
  std::size_t n_;
};

// 2D mixture-pair target: exp(-f_i) = (2/3) N(a_i, I) + (1/3) N(-a_i, I)
// up to normalization, with
//   f_i(x)      = ||x - a_i||^2 / 2 - log(2/3 + (1/3) exp(-2 <a_i, x>))
//   grad f_i(x) = x - a_i + 2 a_i / (1 + 2 exp(2 <x, a_i>))
class MixturePairTarget : public TargetModel {
 public:
  explicit MixturePairTarget(std::vector<std::pair<double, double>> centers);

  std::size_t dim() const override { return 2; }
  std::size_t components() const override { return centers_.size(); }
  void component_grad(std::size_t i, std::span<const double> x,
                      std::span<double> out) const override;
  bool has_log_density() const override { return true; }
  double log_density_unnormalized(std::span<const double> x) const override;

  // f_i(x), overflow-safe for large |<a_i, x>|.
  double component_logf(std::size_t i, std::span<const double> x) const;

  const std::vector<std::pair<double, double>>& centers() const { return centers_; }

 private:
  std::vector<std::pair<double, double>> centers_;
};

// Draws n mixture centers from N((2,2), 2I), reproducible from the seed.
std::vector<std::pair<double, double>> sample_mixture_centers(std::uint64_t seed,
                                                              std::size_t n);

// Bayesian logistic regression with a Gamma prior:
//   f_i(x) = n log(1 + exp(-y_i <d_i, x>)) + lambda log||x|| + theta ||x||
// The prior terms are guarded by epsilon_norm so chains can start at 0.
class BlrTarget : public TargetModel {
 public:
  struct Row {
    std::vector<std::pair<std::size_t, double>> features;  // 0-based index, value
    int label;                                             // -1 or +1
  };

  BlrTarget(std::vector<Row> rows, std::size_t dim, double prior_lambda = 1.0,
            double prior_theta = 1e-2, double epsilon_norm = 1e-8);

  std::size_t dim() const override { return d_; }
  std::size_t components() const override { return rows_.size(); }
  void component_grad(std::size_t i, std::span<const double> x,
                      std::span<double> out) const override;

  double component_logf(std::size_t i, std::span<const double> x) const;

  const std::vector<Row>& rows() const { return rows_; }
  double margin(std::size_t i, std::span<const double> x) const;  // y_i <d_i, x>
  double dot(std::size_t i, std::span<const double> x) const;

 private:
  std::vector<Row> rows_;
  std::size_t d_;
  double lambda_;
  double theta_;
  double eps_;
};

// Parses the sparse libsvm text format ("label idx:val ...", 1-based
// indices). declared_dim = 0 infers the dimension from the data. Labels
// map as: +1 stays +1, everything else becomes -1.
BlrTarget load_libsvm(const std::string& path, std::size_t declared_dim = 0,
                      double prior_lambda = 1.0, double prior_theta = 1e-2);

// Seeded stand-in for the a3a dataset: binary sparse features, labels from
// a ground-truth logistic model.
BlrTarget make_synthetic_logistic(std::size_t n, std::size_t dim, std::uint64_t seed,
                                  double prior_theta = 1e-2);

// Mini-batch mean of component gradients; smoothed through op when given.
std::vector<double> stochastic_gradient(const TargetModel& model,
                                        std::span<const double> x,
                                        std::span<const std::size_t> batch,
                                        const LaplacianOperator* op = nullptr);

// Numerically stable log(1 + exp(z)) and 1 / (1 + exp(-z)).
double log1p_exp(double z);
double logistic(double z);

}  // namespace lssgld

#endif  // LSSGLD_TARGETS_HPP_
