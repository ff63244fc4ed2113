#include "chainreg/multivar_eg.hpp"

#include <cmath>
#include <stdexcept>

namespace chainreg {

BlockSpec BlockSpec::fixed(std::size_t n, double g, double eta) {
  BlockSpec s;
  s.size = n;
  s.gradient_bound = g;
  s.eta = eta;
  s.adaptive = false;
  return s;
}

BlockSpec BlockSpec::adaptive_block(std::size_t n, double g) {
  BlockSpec s;
  s.size = n;
  s.gradient_bound = g;
  s.adaptive = true;
  return s;
}

namespace {

void validate_spec(const BlockSpec& spec) {
  if (spec.size == 0) throw std::invalid_argument("meg: block size must be >= 1");
  if (!(spec.gradient_bound > 0.0))
    throw std::invalid_argument("meg: gradient bound must be positive");
  if (!spec.adaptive && (spec.eta < 0.0 || !std::isfinite(spec.eta)))
    throw std::invalid_argument("meg: fixed eta must be finite and >= 0");
}

}  // namespace

MegState meg_init(std::vector<BlockSpec> specs) {
  if (specs.empty()) throw std::invalid_argument("meg_init: need at least one block");
  for (const BlockSpec& spec : specs) validate_spec(spec);
  MegState state;
  state.blocks.resize(specs.size());
  for (std::size_t k = 0; k < specs.size(); ++k)
    state.blocks[k].gradient_sum.assign(specs[k].size, 0.0);
  state.specs = std::move(specs);
  return state;
}

double meg_block_eta(const MegState& state, std::size_t k) {
  const BlockSpec& spec = state.specs.at(k);
  if (!spec.adaptive) return spec.eta;
  const double log_n = std::log(static_cast<double>(spec.size));
  const double t_k = static_cast<double>(state.blocks[k].active_rounds);
  return std::sqrt(log_n / (1.0 + t_k)) / spec.gradient_bound;
}

WeightVector meg_block_weights(const MegState& state, std::size_t k) {
  return gibbs_weights(state.blocks.at(k).gradient_sum, meg_block_eta(state, k));
}

std::vector<WeightVector> meg_weights(const MegState& state) {
  std::vector<WeightVector> out;
  out.reserve(state.blocks.size());
  for (std::size_t k = 0; k < state.blocks.size(); ++k) out.push_back(meg_block_weights(state, k));
  return out;
}

void meg_observe(MegState& state, const std::vector<std::vector<double>>& gradients) {
  if (gradients.size() != state.blocks.size())
    throw std::invalid_argument("meg_observe: block count mismatch");
  for (std::size_t k = 0; k < gradients.size(); ++k) {
    if (gradients[k].size() != state.blocks[k].gradient_sum.size())
      throw std::invalid_argument("meg_observe: gradient dimension mismatch");
    for (double g : gradients[k]) {
      if (!std::isfinite(g)) throw std::invalid_argument("meg_observe: non-finite gradient");
    }
  }
  for (std::size_t k = 0; k < gradients.size(); ++k) {
    MegBlockState& block = state.blocks[k];
    double sup = 0.0;
    for (std::size_t i = 0; i < gradients[k].size(); ++i) {
      block.gradient_sum[i] += gradients[k][i];
      sup = std::max(sup, std::abs(gradients[k][i]));
    }
    if (sup > 0.0) ++block.active_rounds;
    block.max_observed_grad = std::max(block.max_observed_grad, sup);
  }
}

double fixed_eta(std::size_t n, std::size_t horizon, double g) {
  if (n == 0 || horizon == 0) throw std::invalid_argument("fixed_eta: n and horizon must be >= 1");
  if (!(g > 0.0)) throw std::invalid_argument("fixed_eta: g must be positive");
  return std::sqrt(2.0 * std::log(static_cast<double>(n)) / static_cast<double>(horizon)) / g;
}

double meg_regret_bound(const std::vector<BlockSpec>& specs, std::size_t horizon) {
  double sum = 0.0;
  for (const BlockSpec& spec : specs)
    sum += spec.gradient_bound * std::sqrt(std::log(static_cast<double>(spec.size)));
  return std::sqrt(2.0 * static_cast<double>(horizon)) * sum;
}

double adaptive_regret_bound(const std::vector<BlockSpec>& specs,
                             const std::vector<std::size_t>& active_counts) {
  if (specs.size() != active_counts.size())
    throw std::invalid_argument("adaptive_regret_bound: count per block required");
  double sum = 0.0;
  for (std::size_t k = 0; k < specs.size(); ++k) {
    sum += specs[k].gradient_bound *
           std::sqrt(static_cast<double>(active_counts[k]) *
                     std::log(static_cast<double>(specs[k].size)));
  }
  return 2.0 * sum;
}

}  // namespace chainreg
