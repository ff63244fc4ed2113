#ifndef CHAINREG_NESTED_HOLDER_HPP
#define CHAINREG_NESTED_HOLDER_HPP

#include <cstddef>
#include <cstdint>
#include <memory>
#include <unordered_map>
#include <vector>

#include "chainreg/ewa.hpp"
#include "chainreg/function_nets.hpp"

namespace chainreg {

struct HolderForecasterConfig {
  HolderNetConfig net;
  std::size_t horizon = 0;
  double ewa_eta = 0.0;        // 1/(50 b^2)
  std::size_t q_set_cap = 0;   // per-cell cardinality guard
};

// Wraps a net configuration with the aggregation parameters. Fails with
// resource_error when the predicted per-cell increment-set cardinality at the
// deepest level exceeds q_set_cap.
HolderForecasterConfig make_holder_forecaster_config(HolderNetConfig net, std::size_t horizon,
                                                     std::size_t q_set_cap);

// Closed-form tuning: gamma = b T^(-beta/(2beta+1)), M = ceil(log2(gamma T / b)).
HolderForecasterConfig holder_tuned_config(int q, double alpha, double lambda, double b,
                                             std::size_t horizon, std::size_t q_set_cap);

// Explicit bound for the tuned forecaster:
//   25 b^2 (q+1) log(2eb/g+1) (q!g/(2l))^(-1/beta) + 4 b^2 + b^2/T
//   + 60 b g ceil(log2(gT/b)) sqrt((q+1) log(4eT+1) T (q!g/(2l))^(-1/beta)).
double holder_regret_bound(const HolderForecasterConfig& config);

// The increment experts of one cell: deduplicated clipped differences of
// consecutive-level clipped polynomials. Cells of the same level share the
// set when q == 0 (the set is then center-independent).
struct HolderQSet {
  std::vector<ClippedPolyDiff> functions;
};

struct HolderCellState {
  std::size_t visits = 0;
  std::shared_ptr<const HolderQSet> q_set;
  std::vector<std::vector<double>> grad_sums;  // [coarse expert j][increment k]
};

struct HolderIntervalState {
  std::size_t local_time = 0;
  EwaState ewa;                            // over the interval's P^(0) experts
  std::vector<ClippedPolynomial> experts;  // P^(0), coefficient tuples over Y^(0)
  std::vector<std::unordered_map<std::uint64_t, HolderCellState>> cells;  // [m-1][n]
};

class NestedHolderForecaster {
 public:
  explicit NestedHolderForecaster(HolderForecasterConfig config);

  double predict(double x) const;
  void observe(double x, double y);

  const HolderForecasterConfig& config() const { return config_; }
  const HolderIntervalState* interval_state(std::size_t a) const;
  std::size_t expert_count() const { return p0_size_; }  // |P^(0)| per interval

  std::size_t last_touched_weights() const { return last_touched_; }
  std::size_t total_touched_weights() const { return total_touched_; }
  std::size_t allocated_intervals() const { return intervals_.size(); }
  std::size_t stored_scalars() const;
  double max_abs_intermediate() const { return max_abs_intermediate_; }
  const std::vector<double>& max_grad_by_level() const { return max_grad_by_level_; }
  std::size_t clamped_y_count() const { return clamped_y_count_; }
  double cumulative_loss() const { return cumulative_loss_; }

  // Exposed for the complexity and cardinality tests.
  std::shared_ptr<const HolderQSet> q_set_for(int m, std::size_t a, std::size_t n) const;

 private:
  std::vector<ClippedPolynomial> build_p0(std::size_t a) const;
  std::shared_ptr<const HolderQSet> build_q_set(int m, std::size_t a, std::size_t n) const;
  std::vector<double> expert_predictions(const HolderIntervalState* state, double x) const;
  double cell_eta(int m, std::size_t visits, std::size_t card) const;

  HolderForecasterConfig config_;
  std::size_t p0_size_ = 0;
  std::unordered_map<std::size_t, HolderIntervalState> intervals_;
  mutable std::vector<std::shared_ptr<const HolderQSet>> shared_level_sets_;  // q == 0
  std::size_t last_touched_ = 0;
  std::size_t total_touched_ = 0;
  double max_abs_intermediate_ = 0.0;
  std::vector<double> max_grad_by_level_;
  std::size_t clamped_y_count_ = 0;
  double cumulative_loss_ = 0.0;
};

}  // namespace chainreg

#endif
