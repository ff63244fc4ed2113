#include "chainreg/sequence_gen.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "chainreg/simplex.hpp"

namespace chainreg {

SequenceKind parse_sequence_kind(const std::string& name) {
  if (name == "lipschitz_signal_plus_noise") return SequenceKind::lipschitz_signal_plus_noise;
  if (name == "adversarial_bits") return SequenceKind::adversarial_bits;
  if (name == "holder_signal") return SequenceKind::holder_signal;
  if (name == "constant") return SequenceKind::constant;
  throw std::invalid_argument("unknown sequence kind: " + name);
}

std::string to_string(SequenceKind kind) {
  switch (kind) {
    case SequenceKind::lipschitz_signal_plus_noise: return "lipschitz_signal_plus_noise";
    case SequenceKind::adversarial_bits: return "adversarial_bits";
    case SequenceKind::holder_signal: return "holder_signal";
    case SequenceKind::constant: return "constant";
  }
  throw std::invalid_argument("unknown sequence kind");
}

double PiecewisePoly::operator()(double x) const {
  const auto it = std::upper_bound(knot_x.begin(), knot_x.end(), x);
  std::size_t seg = it == knot_x.begin() ? 0 : static_cast<std::size_t>(it - knot_x.begin()) - 1;
  if (seg >= coeffs.size()) seg = coeffs.size() - 1;
  const double t = x - knot_x[seg];
  double acc = 0.0;
  for (std::size_t j = coeffs[seg].size(); j-- > 0;) acc = acc * t + coeffs[seg][j];
  return acc;
}

std::vector<double> PiecewisePoly::derivatives_at(double x, int up_to) const {
  const auto it = std::upper_bound(knot_x.begin(), knot_x.end(), x);
  std::size_t seg = it == knot_x.begin() ? 0 : static_cast<std::size_t>(it - knot_x.begin()) - 1;
  if (seg >= coeffs.size()) seg = coeffs.size() - 1;
  const double t = x - knot_x[seg];
  const std::vector<double>& c = coeffs[seg];
  std::vector<double> out(static_cast<std::size_t>(up_to) + 1, 0.0);
  for (int k = 0; k <= up_to; ++k) {
    double acc = 0.0;
    for (std::size_t j = c.size(); j-- > static_cast<std::size_t>(k);) {
      double fall = 1.0;  // j!/(j-k)!
      for (int i = 0; i < k; ++i) fall *= static_cast<double>(j - static_cast<std::size_t>(i));
      acc += c[j] * fall * std::pow(t, static_cast<double>(j - static_cast<std::size_t>(k)));
    }
    out[static_cast<std::size_t>(k)] = acc;
  }
  return out;
}

PiecewisePoly PiecewisePoly::integrated(double start_value) const {
  PiecewisePoly out;
  out.knot_x = knot_x;
  out.coeffs.resize(coeffs.size());
  double running = start_value;
  for (std::size_t seg = 0; seg < coeffs.size(); ++seg) {
    std::vector<double> c(coeffs[seg].size() + 1, 0.0);
    c[0] = running;
    for (std::size_t j = 0; j < coeffs[seg].size(); ++j)
      c[j + 1] = coeffs[seg][j] / static_cast<double>(j + 1);
    out.coeffs[seg] = std::move(c);
    const double w = knot_x[seg + 1] - knot_x[seg];
    double acc = 0.0;
    for (std::size_t j = out.coeffs[seg].size(); j-- > 0;) acc = acc * w + out.coeffs[seg][j];
    running = acc;
  }
  return out;
}

void PiecewisePoly::scale(double factor) {
  for (auto& c : coeffs)
    for (double& v : c) v *= factor;
}

double PiecewisePoly::sup_bound() const {
  double bound = 0.0;
  for (std::size_t seg = 0; seg < coeffs.size(); ++seg) {
    const double w = knot_x[seg + 1] - knot_x[seg];
    double s = 0.0, wpow = 1.0;
    for (std::size_t j = 0; j < coeffs[seg].size(); ++j) {
      s += std::abs(coeffs[seg][j]) * wpow;
      wpow *= w;
    }
    bound = std::max(bound, s);
  }
  return bound;
}

PiecewisePoly random_piecewise_linear(SplitMix64& rng, double b, double slope_bound,
                                      std::size_t segments) {
  PiecewisePoly f;
  f.knot_x.resize(segments + 1);
  for (std::size_t i = 0; i <= segments; ++i)
    f.knot_x[i] = static_cast<double>(i) / static_cast<double>(segments);
  std::vector<double> knot_y(segments + 1);
  knot_y[0] = rng.next_in(-0.5 * b, 0.5 * b);
  const double w = 1.0 / static_cast<double>(segments);
  for (std::size_t i = 0; i < segments; ++i) {
    const double slope = rng.next_in(-slope_bound, slope_bound);
    knot_y[i + 1] = clip(knot_y[i] + slope * w, b);  // clipping only flattens the slope
  }
  f.coeffs.resize(segments);
  for (std::size_t i = 0; i < segments; ++i)
    f.coeffs[i] = {knot_y[i], (knot_y[i + 1] - knot_y[i]) / w};
  return f;
}

namespace {

constexpr std::size_t kTargetSegments = 16;

PiecewisePoly build_target(const GeneratorSpec& spec, double b, SplitMix64& rng) {
  switch (spec.kind) {
    case SequenceKind::lipschitz_signal_plus_noise:
      return random_piecewise_linear(rng, b, 1.0, kTargetSegments);
    case SequenceKind::holder_signal: {
      if (spec.q < 0) throw std::invalid_argument("holder_signal: q must be >= 0");
      if (!(spec.lambda > 0.0)) throw std::invalid_argument("holder_signal: lambda must be > 0");
      // f^(q) is lambda-Lipschitz and b-bounded; integrate q times and rescale
      // so every derivative stays within b (scaling preserves the Hölder
      // property since the factor is <= 1).
      PiecewisePoly f = random_piecewise_linear(rng, b, spec.lambda, kTargetSegments);
      double worst = f.sup_bound();
      for (int k = 0; k < spec.q; ++k) {
        f = f.integrated(rng.next_in(-0.25 * b, 0.25 * b));
        worst = std::max(worst, f.sup_bound());
      }
      if (worst > b) f.scale(b / worst);
      return f;
    }
    case SequenceKind::adversarial_bits:
    case SequenceKind::constant: {
      PiecewisePoly f;
      f.knot_x = {0.0, 1.0};
      f.coeffs = {{0.0}};
      return f;
    }
  }
  throw std::invalid_argument("unknown sequence kind");
}

}  // namespace

PiecewisePoly generator_target(const GeneratorSpec& spec, double b) {
  SplitMix64 rng(spec.seed);
  return build_target(spec, b, rng);
}

RoundData generate_sequence(const GeneratorSpec& spec, std::size_t t, double b) {
  if (t == 0) throw std::invalid_argument("generate_sequence: horizon must be >= 1");
  if (!(b > 0.0)) throw std::invalid_argument("generate_sequence: b must be positive");
  SplitMix64 rng(spec.seed);
  const PiecewisePoly target = build_target(spec, b, rng);

  RoundData data;
  data.samples.resize(t);
  const double noise = 0.1 * b;
  for (std::size_t i = 0; i < t; ++i) {
    Sample& s = data.samples[i];
    s.x = rng.next_double();
    switch (spec.kind) {
      case SequenceKind::lipschitz_signal_plus_noise:
      case SequenceKind::holder_signal:
        s.y = clip(target(s.x) + rng.next_in(-noise, noise), b);
        break;
      case SequenceKind::adversarial_bits:
        s.y = rng.next_bool() ? b : -b;
        break;
      case SequenceKind::constant:
        s.y = clip(spec.constant_value, b);
        break;
    }
  }
  return data;
}

}  // namespace chainreg
