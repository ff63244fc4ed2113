#ifndef CHAINREG_MULTIVAR_EG_HPP
#define CHAINREG_MULTIVAR_EG_HPP

#include <cstddef>
#include <vector>

#include "chainreg/simplex.hpp"

namespace chainreg {

// One simplex block of a multi-variable exponentiated-gradient learner:
// N_k coordinates, gradient sup-norm cap G^(k), and either a fixed learning
// rate or the horizon-free adaptive schedule.
struct BlockSpec {
  std::size_t size = 0;         // N_k
  double gradient_bound = 0.0;  // G^(k)
  double eta = 0.0;             // used when adaptive == false
  bool adaptive = false;

  static BlockSpec fixed(std::size_t n, double g, double eta);
  static BlockSpec adaptive_block(std::size_t n, double g);
};

struct MegBlockState {
  CumulativeVector gradient_sum;
  std::size_t active_rounds = 0;   // rounds with a nonzero gradient in this block
  double max_observed_grad = 0.0;  // diagnostic: sup-norm seen so far
};

// Weights are recomputed from the cumulative gradients each round, so the
// adaptive learning-rate changes are exact rather than approximated by
// incremental multiplicative updates.
struct MegState {
  std::vector<BlockSpec> specs;
  std::vector<MegBlockState> blocks;
};

// Zero gradients and counters; meg_weights then returns uniform weights.
// Throws std::invalid_argument on an empty spec list or a bad spec.
MegState meg_init(std::vector<BlockSpec> specs);

// Learning rate currently in force for block k. Fixed blocks return the
// configured eta; adaptive blocks return
//   (1/G^(k)) * sqrt(log(N_k) / (1 + active_rounds_k)).
double meg_block_eta(const MegState& state, std::size_t k);

WeightVector meg_block_weights(const MegState& state, std::size_t k);
std::vector<WeightVector> meg_weights(const MegState& state);

// Adds one round of per-block gradient vectors. A block's active-round
// counter advances only when its gradient has a nonzero entry. Gradients
// beyond the declared bound are accepted; the diagnostic max records them.
void meg_observe(MegState& state, const std::vector<std::vector<double>>& gradients);

// sqrt(2 log(n) / horizon) / g — the horizon-tuned learning rate.
double fixed_eta(std::size_t n, std::size_t horizon, double g);

// sqrt(2T) * sum_k G^(k) sqrt(log N_k)
double meg_regret_bound(const std::vector<BlockSpec>& specs, std::size_t horizon);

// 2 * sum_k G^(k) sqrt(T^(k) log N_k)
double adaptive_regret_bound(const std::vector<BlockSpec>& specs,
                             const std::vector<std::size_t>& active_counts);

}  // namespace chainreg

#endif
