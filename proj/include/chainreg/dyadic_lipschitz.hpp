#ifndef CHAINREG_DYADIC_LIPSCHITZ_HPP
#define CHAINREG_DYADIC_LIPSCHITZ_HPP

#include <cstddef>
#include <cstdint>
#include <unordered_map>
#include <vector>

#include "chainreg/ewa.hpp"
#include "chainreg/function_nets.hpp"

namespace chainreg {

struct DyadicConfig {
  double b = 0.0;
  std::size_t horizon = 0;
  double gamma = 0.0;         // b * horizon^(-1/3)
  int levels = 0;             // M = ceil(log2(gamma*horizon/b))
  std::size_t experts = 0;    // J = ceil(2b/gamma) + 1
  std::size_t intervals = 0;  // ceil(1/gamma)
  double ewa_eta = 0.0;       // 1/(32 b^2)
  LipschitzNetConfig net;     // partition geometry and the expert value grid
};

DyadicConfig make_dyadic_config(double b, std::size_t horizon);

// Explicit bound chain with gamma = b T^(-1/3):
//   32 b^2/g log(2b/g + 1) + 32 b (1+sqrt 2) sqrt(g T log 2) + 2 b^2 + b^2/(4T).
double dyadic_regret_bound(double b, std::size_t horizon);

// Per-cell state of one interval instance. One gradient-sum scalar per expert
// suffices: the two-point simplex gradient is antisymmetric, so weights are
// recovered as gibbs over (S, -S).
struct DyadicCellState {
  std::size_t visits = 0;          // T_a^(m,n), shared across experts
  std::vector<double> grad_sum;    // per expert j: cumulative d/du_1
};

struct DyadicIntervalState {
  std::size_t local_time = 0;
  EwaState ewa;  // over the J grid experts, local rounds only
  // cells[m-1]: level-m cells keyed by 1-based child index, allocated lazily.
  std::vector<std::unordered_map<std::uint64_t, DyadicCellState>> cells;
};

// Per-interval EWA over the value grid plus adaptive two-point EG over the
// dyadic increment cells; only the interval hit by x_t is touched each round.
class DyadicLipschitzForecaster {
 public:
  DyadicLipschitzForecaster(double b, std::size_t horizon);

  double predict(double x) const;
  void observe(double x, double y);

  const DyadicConfig& config() const { return config_; }
  const DyadicIntervalState* interval_state(std::size_t a) const;

  std::size_t last_touched_weights() const { return last_touched_; }
  std::size_t total_touched_weights() const { return total_touched_; }
  std::size_t allocated_intervals() const { return intervals_.size(); }
  std::size_t stored_scalars() const;
  double max_abs_intermediate() const { return max_abs_intermediate_; }
  const std::vector<double>& max_grad_by_level() const { return max_grad_by_level_; }
  std::size_t clamped_y_count() const { return clamped_y_count_; }
  double cumulative_loss() const { return cumulative_loss_; }

 private:
  // f_hat_{t,a,j}(x) for every j, from the current weights.
  std::vector<double> expert_predictions(const DyadicIntervalState* state, double x) const;
  double cell_eta(int m, std::size_t visits) const;

  DyadicConfig config_;
  std::vector<double> expert_values_;  // the grid constants -B + j*gamma
  std::unordered_map<std::size_t, DyadicIntervalState> intervals_;
  std::size_t last_touched_ = 0;
  std::size_t total_touched_ = 0;
  double max_abs_intermediate_ = 0.0;
  std::vector<double> max_grad_by_level_;
  std::size_t clamped_y_count_ = 0;
  double cumulative_loss_ = 0.0;
};

}  // namespace chainreg

#endif
