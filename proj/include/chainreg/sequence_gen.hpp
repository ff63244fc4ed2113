#ifndef CHAINREG_SEQUENCE_GEN_HPP
#define CHAINREG_SEQUENCE_GEN_HPP

#include <cstdint>
#include <string>
#include <vector>

#include "chainreg/oracle.hpp"
#include "chainreg/rng.hpp"

namespace chainreg {

enum class SequenceKind {
  lipschitz_signal_plus_noise,
  adversarial_bits,
  holder_signal,
  constant,
};

SequenceKind parse_sequence_kind(const std::string& name);
std::string to_string(SequenceKind kind);

struct GeneratorSpec {
  SequenceKind kind = SequenceKind::constant;
  std::uint64_t seed = 0;
  // holder_signal parameters
  int q = 0;
  double alpha = 1.0;
  double lambda = 1.0;
  double constant_value = 0.0;
};

// Piecewise polynomial on [0,1]: per segment, Taylor coefficients at the
// segment's left knot. Degree-1 segments model random Lipschitz targets;
// q-fold integration raises the degree for Hölder targets.
struct PiecewisePoly {
  std::vector<double> knot_x;                // size segments+1, first 0 last 1
  std::vector<std::vector<double>> coeffs;   // per segment: c_0..c_d

  double operator()(double x) const;
  // f(x), f'(x), ..., f^(up_to)(x) — the derivative provider for projections.
  std::vector<double> derivatives_at(double x, int up_to) const;

  PiecewisePoly integrated(double start_value) const;
  void scale(double factor);
  // Safe sup bound: per-segment sum |c_j| w^j maximized over segments.
  double sup_bound() const;
};

// Continuous piecewise-linear target with |slope| <= slope_bound and
// |values| <= b (knot values are clipped, which can only flatten slopes).
PiecewisePoly random_piecewise_linear(SplitMix64& rng, double b, double slope_bound,
                                      std::size_t segments);

// Noiseless target the generator samples from; consumes the same leading rng
// draws as generate_sequence, so tests can reconstruct it.
PiecewisePoly generator_target(const GeneratorSpec& spec, double b);

// Deterministic given (spec, t, b); all |y| <= b by construction.
RoundData generate_sequence(const GeneratorSpec& spec, std::size_t t, double b);

}  // namespace chainreg

#endif
