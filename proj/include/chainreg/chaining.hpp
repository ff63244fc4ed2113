#ifndef CHAINREG_CHAINING_HPP
#define CHAINREG_CHAINING_HPP

#include <cstddef>
#include <vector>

#include "chainreg/ewa.hpp"
#include "chainreg/function_nets.hpp"
#include "chainreg/multivar_eg.hpp"

namespace chainreg {

// Number of chaining levels so the lowest scale gamma/2^K is about B/horizon:
// ceil(log2(gamma*horizon/b)), never below 0.
int chaining_levels(double b, double gamma, std::size_t horizon);

struct ChainingConfig {
  double b = 0.0;
  double gamma = 0.0;
  std::size_t horizon = 0;
  int k_levels = 0;  // number of increment levels actually supplied
  FiniteFunctionClass f0;
  std::vector<FiniteFunctionClass> increments;
  double eta0 = 0.0;          // 1/(50 b^2)
  std::vector<double> etas;   // sqrt(2 log N_k / T) 2^k / (30 b gamma)
  bool gamma_clamped = false;
  bool levels_match_formula = true;  // k_levels == chaining_levels(...)
};

// Tunes eta0 and the per-level etas from the supplied nets. k_levels is the
// size of `increments` (which may differ from the formula value; the mismatch
// is recorded, not rejected, so degenerate configurations stay constructible).
// gamma outside (b/horizon, b] is clamped with the flag set.
ChainingConfig make_chaining_config(double b, double gamma, std::size_t horizon,
                                    FiniteFunctionClass f0,
                                    std::vector<FiniteFunctionClass> increments);

struct ChainingBoundQuantities {
  std::vector<double> grad_bounds;  // level k: 30 b gamma / 2^k
  double proof_bound = 0.0;
};

// Discrete proof-form bound:
//   sqrt(2T) sum_k (30 b g/2^k) sqrt(log N_k) + 50 b^2 log N_0 + 4 b^2 + b^2/T.
ChainingBoundQuantities chaining_regret_quantities(const ChainingConfig& config);

// High-scale EWA over the coarse net combined with one fixed-rate
// multi-variable EG instance per coarse expert over the increment nets.
class ChainingForecaster {
 public:
  explicit ChainingForecaster(ChainingConfig config);

  double predict(double x) const;
  void observe(double x, double y);

  const ChainingConfig& config() const { return config_; }
  const EwaState& high_state() const { return high_; }
  const MegState& low_state(std::size_t j) const { return low_.at(j); }
  WeightVector high_weights() const { return ewa_weights(high_); }

  // Diagnostics for the bound-compliance tests.
  double max_abs_intermediate() const { return max_abs_intermediate_; }
  const std::vector<double>& max_grad_by_level() const { return max_grad_by_level_; }
  std::size_t clamped_y_count() const { return clamped_y_count_; }
  double cumulative_loss() const { return cumulative_loss_; }

 private:
  // Round-t intermediate predictions f_hat_{t,j}(x), from the current weights.
  std::vector<double> intermediate_predictions(double x) const;

  ChainingConfig config_;
  EwaState high_;
  std::vector<MegState> low_;
  double max_abs_intermediate_ = 0.0;
  std::vector<double> max_grad_by_level_;
  std::size_t clamped_y_count_ = 0;
  double cumulative_loss_ = 0.0;
};

}  // namespace chainreg

#endif
