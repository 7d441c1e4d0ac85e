#include "lssgld/samplers.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <stdexcept>

namespace lssgld {

namespace {
constexpr std::uint64_t kBatchStream = 1;
constexpr std::uint64_t kNoiseStream = 2;
}

const char* to_string(SamplerKind kind) {
  switch (kind) {
    case SamplerKind::kSgld: return "sgld";
    case SamplerKind::kLsSgld: return "ls_sgld";
    case SamplerKind::kPsgld: return "psgld";
    case SamplerKind::kLsPsgld: return "ls_psgld";
    case SamplerKind::kLdReference: return "ld_reference";
    case SamplerKind::kLsLdReference: return "ls_ld_reference";
    case SamplerKind::kMhReference: return "mh_reference";
  }
  return "unknown";
}

std::optional<SamplerKind> sampler_kind_from_string(const std::string& name) {
  for (SamplerKind k : {SamplerKind::kSgld, SamplerKind::kLsSgld, SamplerKind::kPsgld,
                        SamplerKind::kLsPsgld, SamplerKind::kLdReference,
                        SamplerKind::kLsLdReference, SamplerKind::kMhReference})
    if (name == to_string(k)) return k;
  return std::nullopt;
}

bool is_smoothing_kind(SamplerKind kind) {
  return kind == SamplerKind::kLsSgld || kind == SamplerKind::kLsPsgld ||
         kind == SamplerKind::kLsLdReference;
}

void SamplerSpec::validate(const TargetModel& model) const {
  if (iterations == 0) throw std::invalid_argument("spec: iterations must be positive");
  if (eta_schedule.empty() && eta <= 0.0)
    throw std::invalid_argument("spec: eta must be positive");
  if (!eta_schedule.empty() && eta_schedule.size() != iterations)
    throw std::invalid_argument("spec: eta_schedule length must equal iterations");
  if (beta <= 0.0) throw std::invalid_argument("spec: beta must be positive");
  if (batch_size == 0 || batch_size > model.components())
    throw std::invalid_argument("spec: batch_size must lie in [1, n]");
  if (sigma < 0.0) throw std::invalid_argument("spec: sigma must be nonnegative");
  if (sigma > 0.0 && !is_smoothing_kind(kind))
    throw std::invalid_argument("spec: sigma > 0 requires a smoothing kind");
  if (burn_in >= iterations)
    throw std::invalid_argument("spec: burn_in must be smaller than iterations");
  if (thin == 0) throw std::invalid_argument("spec: thin must be positive");
  if (!x0.empty() && x0.size() != model.dim())
    throw std::invalid_argument("spec: x0 dimension mismatch");
  if (kind == SamplerKind::kMhReference && !model.has_log_density())
    throw std::invalid_argument("spec: MH reference needs a target log-density");
}

ChainState::ChainState(std::vector<double> x0, std::uint64_t seed)
    : x(std::move(x0)),
      noise_rng(substream_seed(seed, kNoiseStream)),
      batch_rng(substream_seed(seed, kBatchStream)) {}

namespace {

std::vector<std::size_t> draw_batch(ChainState& state, const TargetModel& model,
                                    const SamplerSpec& spec) {
  const std::size_t n = model.components();
  if (spec.batch_size >= n) {
    std::vector<std::size_t> all(n);
    for (std::size_t i = 0; i < n; ++i) all[i] = i;
    return all;
  }
  return state.batch_rng.sample_without_replacement(n, spec.batch_size);
}

// Shared Langevin transition. op == nullptr means no smoothing;
// precondition == true enables the RMSProp-style diagonal scaling.
void langevin_step(ChainState& state, const TargetModel& model, const SamplerSpec& spec,
                   const LaplacianOperator* op, bool precondition, bool full_batch) {
  const std::size_t d = model.dim();
  if (op && op->dim() != d)
    throw std::invalid_argument("langevin_step: operator/target dimension mismatch");
  const double eta = spec.eta_at(state.k);

  std::vector<double> g(d);
  if (full_batch) {
    model.full_grad(state.x, g);
  } else {
    const auto batch = draw_batch(state, model, spec);
    g = stochastic_gradient(model, state.x, batch);
  }

  std::vector<double> noise(d);
  state.noise_rng.gaussian_fill(noise);

  // Default composition smooths the preconditioned quantities; the
  // alternative order preconditions the smoothed ones instead.
  const bool smooth_first = op && precondition && spec.smooth_before_precond;
  if (smooth_first) {
    g = op->apply_inverse(g);
    noise = op->apply_inverse_sqrt(noise);
  }

  if (precondition) {
    if (state.v_acc.empty()) state.v_acc.assign(d, 0.0);
    for (std::size_t j = 0; j < d; ++j)
      state.v_acc[j] = spec.precond_alpha * state.v_acc[j] +
                       (1.0 - spec.precond_alpha) * g[j] * g[j];
    for (std::size_t j = 0; j < d; ++j) {
      const double G = spec.unit_precond
                           ? 1.0
                           : 1.0 / (spec.precond_eps + std::sqrt(state.v_acc[j]));
      g[j] *= G;
      noise[j] *= std::sqrt(G);
    }
  }

  if (op && !smooth_first) {
    g = op->apply_inverse(g);
    noise = op->apply_inverse_sqrt(noise);
  }

  const double noise_coeff = spec.noise_scale * std::sqrt(2.0 * eta / spec.beta);
  for (std::size_t j = 0; j < d; ++j)
    state.x[j] += -eta * g[j] + noise_coeff * noise[j];
  ++state.k;
}

}  // namespace

void sgld_step(ChainState& state, const TargetModel& model, const SamplerSpec& spec) {
  langevin_step(state, model, spec, nullptr, false, false);
}

void ls_sgld_step(ChainState& state, const TargetModel& model, const SamplerSpec& spec,
                  const LaplacianOperator& op) {
  langevin_step(state, model, spec, &op, false, false);
}

void psgld_step(ChainState& state, const TargetModel& model, const SamplerSpec& spec) {
  langevin_step(state, model, spec, nullptr, true, false);
}

void ls_psgld_step(ChainState& state, const TargetModel& model, const SamplerSpec& spec,
                   const LaplacianOperator& op) {
  langevin_step(state, model, spec, &op, true, false);
}

void mh_reference_step(ChainState& state, const TargetModel& model,
                       const SamplerSpec& spec) {
  const std::size_t d = model.dim();
  const double s = spec.eta_at(state.k);
  std::vector<double> proposal(d);
  state.noise_rng.gaussian_fill(proposal);
  for (std::size_t j = 0; j < d; ++j) proposal[j] = state.x[j] + s * proposal[j];
  const double log_ratio = spec.beta * (model.log_density_unnormalized(proposal) -
                                        model.log_density_unnormalized(state.x));
  // One uniform per step regardless of acceptance keeps the stream aligned.
  const double u = state.noise_rng.uniform();
  if (std::log(u) < log_ratio) {
    state.x = std::move(proposal);
    ++state.accepted;
  }
  ++state.k;
}

std::vector<double> SampleChain::coordinate(std::size_t coord) const {
  if (coord >= dim) throw std::out_of_range("SampleChain: coordinate index");
  std::vector<double> out(count());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = samples[i * dim + coord];
  return out;
}

void SampleChain::write_csv(const std::string& path) const {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("SampleChain: cannot write " + path);
  out << "step,eta";
  for (std::size_t j = 0; j < dim; ++j) out << ",x_" << j;
  out << "\n";
  char buf[32];
  for (std::size_t i = 0; i < count(); ++i) {
    out << steps[i];
    std::snprintf(buf, sizeof(buf), "%.17g", etas[i]);
    out << ',' << buf;
    for (std::size_t j = 0; j < dim; ++j) {
      std::snprintf(buf, sizeof(buf), "%.17g", samples[i * dim + j]);
      out << ',' << buf;
    }
    out << "\n";
  }
}

SampleChain run_chain(const SamplerSpec& spec, const TargetModel& model) {
  if (is_smoothing_kind(spec.kind)) {
    LaplacianOperator op(model.dim(), spec.sigma);
    return run_chain(spec, model, &op);
  }
  return run_chain(spec, model, nullptr);
}

SampleChain run_chain(const SamplerSpec& spec, const TargetModel& model,
                      const LaplacianOperator* op) {
  spec.validate(model);
  const std::size_t d = model.dim();
  if (is_smoothing_kind(spec.kind)) {
    if (!op) throw std::invalid_argument("run_chain: smoothing kind needs an operator");
    if (op->dim() != d)
      throw std::invalid_argument("run_chain: operator/target dimension mismatch");
  }

  std::vector<double> x0 = spec.x0.empty() ? std::vector<double>(d, 0.0) : spec.x0;
  ChainState state(std::move(x0), spec.seed);

  SampleChain chain;
  chain.dim = d;
  chain.burn_in = spec.burn_in;
  chain.seed = spec.seed;
  chain.spec = spec;
  const std::size_t expected = (spec.iterations - spec.burn_in + spec.thin - 1) / spec.thin;
  chain.samples.reserve(expected * d);
  chain.steps.reserve(expected);
  chain.etas.reserve(expected);

  for (std::size_t k = 0; k < spec.iterations; ++k) {
    const double eta = spec.eta_at(k);
    switch (spec.kind) {
      case SamplerKind::kSgld:
        sgld_step(state, model, spec);
        break;
      case SamplerKind::kLsSgld:
        ls_sgld_step(state, model, spec, *op);
        break;
      case SamplerKind::kPsgld:
        psgld_step(state, model, spec);
        break;
      case SamplerKind::kLsPsgld:
        ls_psgld_step(state, model, spec, *op);
        break;
      case SamplerKind::kLdReference:
        langevin_step(state, model, spec, nullptr, false, true);
        break;
      case SamplerKind::kLsLdReference:
        langevin_step(state, model, spec, op, false, true);
        break;
      case SamplerKind::kMhReference:
        mh_reference_step(state, model, spec);
        break;
    }
    const std::size_t produced = k + 1;  // iterate index after this step
    if (produced > spec.burn_in && (produced - spec.burn_in - 1) % spec.thin == 0) {
      chain.samples.insert(chain.samples.end(), state.x.begin(), state.x.end());
      chain.steps.push_back(produced);
      chain.etas.push_back(eta);
    }
  }
  if (spec.kind == SamplerKind::kMhReference)
    chain.acceptance_rate =
        static_cast<double>(state.accepted) / static_cast<double>(spec.iterations);
  return chain;
}

}  // namespace lssgld
