#include "chainreg/simplex.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace chainreg {

WeightVector uniform_weights(std::size_t n) {
  if (n == 0) throw std::invalid_argument("uniform_weights: dimension must be >= 1");
  return WeightVector(n, 1.0 / static_cast<double>(n));
}

WeightVector gibbs_weights(const CumulativeVector& sums, double eta) {
  if (sums.empty()) throw std::invalid_argument("gibbs_weights: empty cumulative vector");
  if (!std::isfinite(eta) || eta < 0.0)
    throw std::invalid_argument("gibbs_weights: eta must be finite and >= 0");
  for (double s : sums) {
    if (!std::isfinite(s)) throw std::invalid_argument("gibbs_weights: non-finite cumulative sum");
  }
  if (eta == 0.0) return uniform_weights(sums.size());

  // exp(-eta*(s - min)) keeps every exponent <= 0; the smallest sum carries
  // the largest weight.
  const double shift = *std::min_element(sums.begin(), sums.end());
  WeightVector w(sums.size());
  double total = 0.0;
  for (std::size_t i = 0; i < sums.size(); ++i) {
    w[i] = std::exp(-eta * (sums[i] - shift));
    total += w[i];
  }
  for (double& wi : w) wi /= total;
  return w;
}

double clip(double x, double b) {
  if (!(b > 0.0)) throw std::invalid_argument("clip: bound must be positive");
  return std::min(b, std::max(-b, x));
}

}  // namespace chainreg
