#ifndef CHAINREG_EWA_HPP
#define CHAINREG_EWA_HPP

#include <cstddef>
#include <vector>

#include "chainreg/simplex.hpp"

namespace chainreg {

// Exponentially weighted average aggregation for exp-concave losses.
// The state owns only cumulative losses; mixture predictions are formed by
// the caller (the chaining forecasters mix function values, not losses).
struct EwaState {
  CumulativeVector cumulative_losses;
  double eta = 0.0;  // fixed for the lifetime of the state
  std::size_t rounds_seen = 0;
};

// Zero cumulative losses over n experts. Requires n >= 1, eta > 0.
EwaState ewa_init(std::size_t n, double eta);

// gibbs_weights(cumulative_losses, eta).
WeightVector ewa_weights(const EwaState& state);

// Adds one round of per-expert losses. Throws on dimension mismatch or
// non-finite entries.
void ewa_observe(EwaState& state, const std::vector<double>& losses);

// 1/(2*(range_factor*b)^2): the exp-concavity constant of the square loss
// when |y - prediction| <= range_factor*b. Only factors 4 and 5 arise here
// (predictions bounded by 3B resp. 4B against |y| <= B).
double square_loss_expconcave_eta(double b, int range_factor);

}  // namespace chainreg

#endif
