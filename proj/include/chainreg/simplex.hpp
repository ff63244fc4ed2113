#ifndef CHAINREG_SIMPLEX_HPP
#define CHAINREG_SIMPLEX_HPP

#include <cstddef>
#include <vector>

namespace chainreg {

// A point on the probability simplex: entries >= 0, sum == 1 (within 1e-9).
using WeightVector = std::vector<double>;
// Accumulated gradients or losses; entries must stay finite.
using CumulativeVector = std::vector<double>;

// (1/n, ..., 1/n). Throws std::invalid_argument for n == 0.
WeightVector uniform_weights(std::size_t n);

// Entry i proportional to exp(-eta * sums[i]), computed with a max shift so
// no finite input can overflow. eta == 0 gives uniform weights.
// Throws std::invalid_argument on an empty vector, non-finite entries, or
// eta < 0 / non-finite eta.
WeightVector gibbs_weights(const CumulativeVector& sums, double eta);

// min(b, max(-b, x)). Requires b > 0.
double clip(double x, double b);

}  // namespace chainreg

#endif
