#ifndef LSSGLD_SAMPLERS_HPP_
#define LSSGLD_SAMPLERS_HPP_

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "lssgld/rng.hpp"
#include "lssgld/smoothing_operator.hpp"
#include "lssgld/targets.hpp"

namespace lssgld {

enum class SamplerKind {
  kSgld,
  kLsSgld,
  kPsgld,
  kLsPsgld,
  kLdReference,    // full-batch Euler-Maruyama, small step
  kLsLdReference,
  kMhReference,    // random-walk Metropolis-Hastings ground truth
};

const char* to_string(SamplerKind kind);
std::optional<SamplerKind> sampler_kind_from_string(const std::string& name);
bool is_smoothing_kind(SamplerKind kind);

struct SamplerSpec {
  SamplerKind kind = SamplerKind::kSgld;
  double eta = 0.0;                    // step size (proposal scale for MH)
  std::vector<double> eta_schedule;    // optional per-step sizes; overrides eta
  std::size_t batch_size = 1;
  double beta = 1.0;                   // inverse temperature
  double sigma = 0.0;                  // circulant smoothing strength
  double precond_alpha = 0.99;
  double precond_eps = 1e-5;
  std::size_t burn_in = 0;
  std::size_t thin = 1;
  std::size_t iterations = 0;
  std::uint64_t seed = 0;
  std::vector<double> x0;              // empty = origin
  // Smoothed preconditioned kinds: false = smooth the preconditioned
  // gradient/noise (default), true = precondition the smoothed ones.
  bool smooth_before_precond = false;

  // Test-only knobs.
  double noise_scale = 1.0;            // 0 silences the injected noise
  bool unit_precond = false;           // forces G = 1 in preconditioned kinds

  double eta_at(std::size_t k) const {
    return eta_schedule.empty() ? eta : eta_schedule[k];
  }
  // Throws std::invalid_argument describing the first violated constraint.
  void validate(const TargetModel& model) const;
};

struct ChainState {
  std::vector<double> x;
  std::vector<double> v_acc;  // preconditioner accumulator (pSGLD kinds)
  std::size_t k = 0;
  RngStream noise_rng;
  RngStream batch_rng;
  std::size_t accepted = 0;   // MH only

  ChainState(std::vector<double> x0, std::uint64_t seed);
};

// Post-burn-in, thinned record of one chain.
struct SampleChain {
  std::size_t dim = 0;
  std::vector<double> samples;     // count x dim, row-major
  std::vector<std::size_t> steps;  // iterate index of each row
  std::vector<double> etas;        // step size used at each recorded step
  std::size_t burn_in = 0;
  std::uint64_t seed = 0;
  SamplerSpec spec;
  double acceptance_rate = 0.0;    // MH only

  std::size_t count() const { return dim == 0 ? 0 : samples.size() / dim; }
  std::span<const double> sample(std::size_t i) const {
    return {samples.data() + i * dim, dim};
  }
  // One series of a scalar statistic (coordinate `coord`).
  std::vector<double> coordinate(std::size_t coord) const;
  // Header "step,eta,x_0,...,x_{d-1}"; %.17g values, byte-stable given a seed.
  void write_csv(const std::string& path) const;
};

// Single transition kernels. The LS variants consume exactly one batch
// draw and one d-dimensional gaussian per step in the same order as their
// plain counterparts, so sigma = 0 reproduces them bit-for-bit.
void sgld_step(ChainState& state, const TargetModel& model, const SamplerSpec& spec);
void ls_sgld_step(ChainState& state, const TargetModel& model, const SamplerSpec& spec,
                  const LaplacianOperator& op);
void psgld_step(ChainState& state, const TargetModel& model, const SamplerSpec& spec);
void ls_psgld_step(ChainState& state, const TargetModel& model, const SamplerSpec& spec,
                   const LaplacianOperator& op);
void mh_reference_step(ChainState& state, const TargetModel& model,
                       const SamplerSpec& spec);

// Runs spec.iterations steps from x0 (origin by default) and records the
// post-burn-in iterates with stride spec.thin. Fully deterministic in
// (spec, model, seed). Builds the smoothing operator from spec.sigma for
// LS kinds; pass a prebuilt one to share across chains.
SampleChain run_chain(const SamplerSpec& spec, const TargetModel& model);
SampleChain run_chain(const SamplerSpec& spec, const TargetModel& model,
                      const LaplacianOperator* op);

}  // namespace lssgld

#endif  // LSSGLD_SAMPLERS_HPP_
