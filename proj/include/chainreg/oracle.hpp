#ifndef CHAINREG_ORACLE_HPP
#define CHAINREG_ORACLE_HPP

#include <cstddef>
#include <vector>

#include "chainreg/function_nets.hpp"

namespace chainreg {

struct Sample {
  double x = 0.0;
  double y = 0.0;
};

struct RoundData {
  std::vector<Sample> samples;
};

// Offline comparator output. certified_gap is zero for exact enumeration
// oracles; the DP oracle reports the additive error of its grid relaxation.
struct OracleResult {
  double best_loss = 0.0;
  double certified_gap = 0.0;
  std::vector<std::size_t> witness_indices;  // member choice per level (finite oracles)
  std::vector<double> witness_path;          // fitted values in x-sorted order (DP oracle)
};

// Exact minimum of the cumulative square loss over the class members;
// argmin ties go to the first index.
OracleResult best_finite(const FiniteFunctionClass& cls, const RoundData& data);

// Exact minimum over all sums f0 + g_1 + ... + g_K with one member per level.
// Throws resource_error when the tuple count exceeds cap.
OracleResult best_chained_finite(const FiniteFunctionClass& f0,
                                 const std::vector<FiniteFunctionClass>& increments,
                                 const RoundData& data, std::size_t cap);

// Best grid value path for an L-Lipschitz fit: minimizes sum (y_i - v_i)^2
// over paths on {-b, -b+h, ..} with |v_i - v_(i-1)| <= L*dx + h between
// x-consecutive points (equal x forces equal values — a function is
// single-valued). The +h slack guarantees some grid path within h of any true
// L-Lipschitz function, which certifies
//   best_loss - gap <= inf over the class,  gap = T*h*(4b + h).
OracleResult best_lipschitz_dp(const RoundData& data, double b, double lip, double grid_step);

// forecaster loss - (best_loss - certified_gap): an upper bound on the true
// regret whenever the oracle's certification holds.
double empirical_regret(double forecaster_cumulative_loss, const OracleResult& oracle);

}  // namespace chainreg

#endif
