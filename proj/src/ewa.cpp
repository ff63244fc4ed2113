#include "chainreg/ewa.hpp"

#include <cmath>
#include <stdexcept>

namespace chainreg {

EwaState ewa_init(std::size_t n, double eta) {
  if (n == 0) throw std::invalid_argument("ewa_init: need at least one expert");
  if (!(eta > 0.0) || !std::isfinite(eta))
    throw std::invalid_argument("ewa_init: eta must be positive and finite");
  EwaState state;
  state.cumulative_losses.assign(n, 0.0);
  state.eta = eta;
  return state;
}

WeightVector ewa_weights(const EwaState& state) {
  return gibbs_weights(state.cumulative_losses, state.eta);
}

void ewa_observe(EwaState& state, const std::vector<double>& losses) {
  if (losses.size() != state.cumulative_losses.size())
    throw std::invalid_argument("ewa_observe: loss vector dimension mismatch");
  for (double l : losses) {
    if (!std::isfinite(l)) throw std::invalid_argument("ewa_observe: non-finite loss");
  }
  for (std::size_t i = 0; i < losses.size(); ++i) state.cumulative_losses[i] += losses[i];
  ++state.rounds_seen;
}

double square_loss_expconcave_eta(double b, int range_factor) {
  if (!(b > 0.0)) throw std::invalid_argument("square_loss_expconcave_eta: b must be positive");
  if (range_factor != 4 && range_factor != 5)
    throw std::invalid_argument("square_loss_expconcave_eta: range factor must be 4 or 5");
  const double r = static_cast<double>(range_factor) * b;
  return 1.0 / (2.0 * r * r);
}

}  // namespace chainreg
