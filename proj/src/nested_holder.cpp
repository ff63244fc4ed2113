#include "chainreg/nested_holder.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <optional>
#include <stdexcept>

#include "chainreg/errors.hpp"
#include "chainreg/simplex.hpp"

namespace chainreg {

namespace {

double pow2d(int m) { return std::pow(2.0, static_cast<double>(m)); }

double factorial(int n) {
  double f = 1.0;
  for (int i = 2; i <= n; ++i) f *= static_cast<double>(i);
  return f;
}

struct Q0Entry {
  double value;   // clip(clip(f,B) - clip(c,B), cap)
  double fine;    // raw grid coefficients of a representative pair
  double coarse;
};

// Distinct constant increments for q = 0. Only coarse values within cap of
// each fine value produce interior differences, so the scan is windowed; the
// out-of-window pairs collapse onto the two saturated constants.
std::vector<Q0Entry> q0_distinct_values(const HolderNetConfig& net, int m) {
  const GridSpec fine = holder_value_grid(net, m);
  const GridSpec coarse = holder_value_grid(net, m - 1);
  const double cap = 3.0 * net.gamma / pow2d(m);
  const double coarse_max = std::min(coarse.value(coarse.count - 1), net.b);
  // Last index whose raw value is still within B (overhang points clip to B).
  std::size_t coarse_last_raw = coarse.count - 1;
  while (coarse_last_raw > 0 && coarse.value(coarse_last_raw) > net.b) --coarse_last_raw;

  std::vector<Q0Entry> entries;
  std::map<double, bool> seen;
  bool sat_plus = false, sat_minus = false;
  Q0Entry plus_rep{}, minus_rep{};
  for (std::size_t jf = 0; jf < fine.count; ++jf) {
    const double f = std::min(fine.value(jf), net.b);
    if (f + net.b > cap && !sat_plus) {
      sat_plus = true;
      plus_rep = {cap, fine.value(jf), coarse.value(0)};
    }
    if (coarse_max - f > cap && !sat_minus) {
      sat_minus = true;
      minus_rep = {-cap, fine.value(jf), coarse.value(coarse_last_raw)};
    }
    const double lo_idx = std::floor((f - cap - coarse.lo) / coarse.step);
    std::size_t jc = lo_idx < 0.0 ? 0 : static_cast<std::size_t>(lo_idx);
    for (; jc < coarse.count; ++jc) {
      const double c = std::min(coarse.value(jc), net.b);
      const double d = f - c;
      if (d > cap) continue;
      if (d < -cap) break;
      if (!seen.count(d)) {
        seen[d] = true;
        entries.push_back({d, fine.value(jf), coarse.value(jc)});
      }
    }
  }
  if (sat_plus && !seen.count(cap)) entries.push_back(plus_rep);
  if (sat_minus && !seen.count(-cap)) entries.push_back(minus_rep);
  return entries;
}

double raw_pair_product(const HolderNetConfig& net, int m) {
  const double nf = static_cast<double>(holder_value_grid(net, m).count);
  const double nc = static_cast<double>(holder_value_grid(net, m - 1).count);
  return std::pow(nf * nc, static_cast<double>(net.q + 1));
}

// sum |c_i|/i! r^i over the nonconstant terms.
double poly_wiggle(const std::vector<double>& coeffs, double radius) {
  double wiggle = 0.0, fact = 1.0, rpow = 1.0;
  for (std::size_t i = 1; i < coeffs.size(); ++i) {
    fact *= static_cast<double>(i);
    rpow *= radius;
    wiggle += std::abs(coeffs[i]) / fact * rpow;
  }
  return wiggle;
}

// The clipped polynomial restricted to |x - center| <= radius, when its shape
// is provable by interval arithmetic: unchanged coefficients if the clip is
// never active, a constant +/-B if it always is, nothing otherwise.
std::optional<std::vector<double>> effective_on_cell(const std::vector<double>& coeffs,
                                                     double radius, double b) {
  const double wiggle = poly_wiggle(coeffs, radius);
  const double lo = coeffs[0] - wiggle, hi = coeffs[0] + wiggle;
  if (lo >= -b && hi <= b) return coeffs;
  std::vector<double> constant(coeffs.size(), 0.0);
  if (lo >= b) {
    constant[0] = b;
    return constant;
  }
  if (hi <= -b) {
    constant[0] = -b;
    return constant;
  }
  return std::nullopt;
}

}  // namespace

HolderForecasterConfig make_holder_forecaster_config(HolderNetConfig net, std::size_t horizon,
                                                     std::size_t q_set_cap) {
  if (horizon == 0) throw std::invalid_argument("holder config: horizon must be >= 1");
  if (q_set_cap == 0) throw std::invalid_argument("holder config: q_set_cap must be >= 1");
  HolderForecasterConfig config;
  config.horizon = horizon;
  config.ewa_eta = square_loss_expconcave_eta(net.b, 5);
  config.q_set_cap = q_set_cap;
  if (net.levels >= 1) {
    const double predicted =
        net.q == 0 ? static_cast<double>(q0_distinct_values(net, net.levels).size())
                   : raw_pair_product(net, net.levels);
    if (predicted > static_cast<double>(q_set_cap))
      throw resource_error(
          "holder config: predicted per-cell increment-set cardinality at level " +
          std::to_string(net.levels) + " is " + std::to_string(predicted) + ", cap " +
          std::to_string(q_set_cap));
  }
  config.net = std::move(net);
  return config;
}

HolderForecasterConfig holder_tuned_config(int q, double alpha, double lambda, double b,
                                             std::size_t horizon, std::size_t q_set_cap) {
  if (horizon < 2) throw std::invalid_argument("holder tuned config: horizon must be >= 2");
  const double beta = static_cast<double>(q) + alpha;
  const double t = static_cast<double>(horizon);
  const double gamma = b * std::pow(t, -beta / (2.0 * beta + 1.0));
  int levels = static_cast<int>(std::ceil(std::log2(gamma * t / b)));
  if (levels < 0) levels = 0;
  return make_holder_forecaster_config(make_holder_net_config(q, alpha, lambda, b, gamma, levels),
                                       horizon, q_set_cap);
}

double holder_regret_bound(const HolderForecasterConfig& config) {
  const HolderNetConfig& net = config.net;
  const double b = net.b;
  const double t = static_cast<double>(config.horizon);
  const double e = std::exp(1.0);
  const double entropy_factor =
      std::pow(factorial(net.q) * net.gamma / (2.0 * net.lambda), -1.0 / net.beta);
  double m_formula = std::ceil(std::log2(net.gamma * t / b));
  if (m_formula < 0.0) m_formula = 0.0;
  const double q1 = static_cast<double>(net.q) + 1.0;
  return 25.0 * b * b * q1 * std::log(2.0 * e * b / net.gamma + 1.0) * entropy_factor +
         4.0 * b * b + b * b / t +
         60.0 * b * net.gamma * m_formula *
             std::sqrt(q1 * std::log(4.0 * e * t + 1.0) * t * entropy_factor);
}

NestedHolderForecaster::NestedHolderForecaster(HolderForecasterConfig config)
    : config_(std::move(config)) {
  const GridSpec y0 = holder_value_grid(config_.net, 0);
  p0_size_ = 1;
  for (int i = 0; i <= config_.net.q; ++i) p0_size_ *= y0.count;
  shared_level_sets_.assign(static_cast<std::size_t>(config_.net.levels), nullptr);
  max_grad_by_level_.assign(static_cast<std::size_t>(config_.net.levels), 0.0);
}

const HolderIntervalState* NestedHolderForecaster::interval_state(std::size_t a) const {
  auto it = intervals_.find(a);
  return it == intervals_.end() ? nullptr : &it->second;
}

std::vector<ClippedPolynomial> NestedHolderForecaster::build_p0(std::size_t a) const {
  const GridSpec grid = holder_value_grid(config_.net, 0);
  const double center = holder_cell_center(config_.net, 0, a, 1);
  const int q = config_.net.q;
  std::vector<ClippedPolynomial> experts;
  experts.reserve(p0_size_);
  std::vector<std::size_t> odo(static_cast<std::size_t>(q) + 1, 0);
  while (true) {
    ClippedPolynomial poly;
    poly.center = center;
    poly.clip_bound = config_.net.b;
    poly.coefficients.resize(odo.size());
    for (std::size_t i = 0; i < odo.size(); ++i) poly.coefficients[i] = grid.value(odo[i]);
    experts.push_back(std::move(poly));
    std::size_t pos = 0;
    while (pos < odo.size() && ++odo[pos] == grid.count) {
      odo[pos] = 0;
      ++pos;
    }
    if (pos == odo.size()) break;
  }
  return experts;
}

std::shared_ptr<const HolderQSet> NestedHolderForecaster::build_q_set(int m, std::size_t a,
                                                                      std::size_t n) const {
  const HolderNetConfig& net = config_.net;
  if (net.q == 0 && shared_level_sets_[static_cast<std::size_t>(m - 1)])
    return shared_level_sets_[static_cast<std::size_t>(m - 1)];

  const GridSpec fine = holder_value_grid(net, m);
  const GridSpec coarse = holder_value_grid(net, m - 1);
  const double cap = 3.0 * net.gamma / pow2d(m);
  const double fine_center = holder_cell_center(net, m, a, n);
  const double coarse_center = m == 1
                                   ? holder_cell_center(net, 0, a, 1)
                                   : holder_cell_center(net, m - 1, a, (n - 1) / 4 + 1);

  auto set = std::make_shared<HolderQSet>();
  auto make_diff = [&](const std::vector<double>& fc, const std::vector<double>& cc) {
    ClippedPolyDiff diff;
    diff.fine = ClippedPolynomial{fine_center, fc, net.b};
    diff.coarse = ClippedPolynomial{coarse_center, cc, net.b};
    diff.cap = cap;
    return diff;
  };

  if (net.q == 0) {
    for (const Q0Entry& entry : q0_distinct_values(net, m))
      set->functions.push_back(make_diff({entry.fine}, {entry.coarse}));
  } else {
    // Members are deduplicated as functions on this cell: where interval
    // arithmetic proves the B-clips inactive (or fully saturated) the
    // recentered difference polynomial is the identity of the member; the
    // rare unresolved pairs are kept apart by their raw coefficients.
    const double shift = fine_center - coarse_center;
    const double r_fine = net.delta_x / std::pow(4.0, static_cast<double>(m));
    const double r_coarse = std::abs(shift) + r_fine;
    const std::size_t dim = static_cast<std::size_t>(net.q) + 1;
    std::map<std::vector<double>, bool> seen;

    std::vector<std::size_t> odo_f(dim, 0);
    std::vector<double> fc(dim), cc(dim), shifted(dim), d(dim);
    while (true) {
      for (std::size_t i = 0; i < dim; ++i) fc[i] = fine.value(odo_f[i]);
      const auto fine_eff = effective_on_cell(fc, r_fine, net.b);
      std::vector<std::size_t> odo_c(dim, 0);
      while (true) {
        for (std::size_t i = 0; i < dim; ++i) cc[i] = coarse.value(odo_c[i]);
        const auto coarse_eff = effective_on_cell(cc, r_coarse, net.b);
        std::vector<double> key;
        if (fine_eff && coarse_eff) {
          // Taylor shift of the coarse polynomial to the fine center.
          for (std::size_t j = 0; j < dim; ++j) {
            double acc = 0.0, fact = 1.0, spow = 1.0;
            for (std::size_t i = j; i < dim; ++i) {
              if (i > j) {
                fact *= static_cast<double>(i - j);
                spow *= shift;
              }
              acc += (*coarse_eff)[i] * spow / fact;
            }
            shifted[j] = acc;
          }
          for (std::size_t i = 0; i < dim; ++i) d[i] = (*fine_eff)[i] - shifted[i];
          const double wiggle = poly_wiggle(d, r_fine);
          if (d[0] - wiggle >= cap) {
            key = {2.0};
          } else if (d[0] + wiggle <= -cap) {
            key = {3.0};
          } else {
            key = {1.0};
            key.insert(key.end(), d.begin(), d.end());
          }
        } else {
          key = {0.0};
          key.insert(key.end(), fc.begin(), fc.end());
          key.insert(key.end(), cc.begin(), cc.end());
        }
        if (!seen.count(key)) {
          seen[key] = true;
          set->functions.push_back(make_diff(fc, cc));
          if (set->functions.size() > config_.q_set_cap)
            throw resource_error("holder increment set at level " + std::to_string(m) +
                                 " exceeds cap " + std::to_string(config_.q_set_cap));
        }
        std::size_t pos = 0;
        while (pos < dim && ++odo_c[pos] == coarse.count) {
          odo_c[pos] = 0;
          ++pos;
        }
        if (pos == dim) break;
      }
      std::size_t pos = 0;
      while (pos < dim && ++odo_f[pos] == fine.count) {
        odo_f[pos] = 0;
        ++pos;
      }
      if (pos == dim) break;
    }
  }

  if (set->functions.size() > config_.q_set_cap)
    throw resource_error("holder increment set at level " + std::to_string(m) + " has " +
                         std::to_string(set->functions.size()) + " members, cap " +
                         std::to_string(config_.q_set_cap));
  if (net.q == 0) shared_level_sets_[static_cast<std::size_t>(m - 1)] = set;
  return set;
}

std::shared_ptr<const HolderQSet> NestedHolderForecaster::q_set_for(int m, std::size_t a,
                                                                    std::size_t n) const {
  const HolderIntervalState* state = interval_state(a);
  if (state != nullptr) {
    const auto& level = state->cells[static_cast<std::size_t>(m - 1)];
    auto it = level.find(n);
    if (it != level.end()) return it->second.q_set;
  }
  return build_q_set(m, a, n);
}

double NestedHolderForecaster::cell_eta(int m, std::size_t visits, std::size_t card) const {
  const double g = 30.0 * config_.net.b * config_.net.gamma / pow2d(m);
  return std::sqrt(std::log(static_cast<double>(card)) /
                   (1.0 + static_cast<double>(visits))) /
         g;
}

std::vector<double> NestedHolderForecaster::expert_predictions(const HolderIntervalState* state,
                                                               double x) const {
  const CellIndex base = holder_cell_index(x, config_.net, 0);
  std::vector<double> preds(p0_size_);
  if (state != nullptr) {
    for (std::size_t j = 0; j < p0_size_; ++j) preds[j] = state->experts[j](x);
  } else {
    const std::vector<ClippedPolynomial> experts = build_p0(base.interval);
    for (std::size_t j = 0; j < p0_size_; ++j) preds[j] = experts[j](x);
  }

  for (int m = 1; m <= config_.net.levels; ++m) {
    const CellIndex idx = holder_cell_index(x, config_.net, m);
    const HolderCellState* cell = nullptr;
    if (state != nullptr) {
      const auto& level = state->cells[static_cast<std::size_t>(m - 1)];
      auto it = level.find(idx.cell);
      if (it != level.end()) cell = &it->second;
    }
    if (cell == nullptr) {
      // Unvisited cell: uniform weights give the same contribution to all j.
      const auto set = build_q_set(m, base.interval, idx.cell);
      double mean = 0.0;
      for (const ClippedPolyDiff& fn : set->functions) mean += fn(x);
      mean /= static_cast<double>(set->functions.size());
      for (double& p : preds) p += mean;
      continue;
    }
    const std::size_t card = cell->q_set->functions.size();
    std::vector<double> q_values(card);
    for (std::size_t k = 0; k < card; ++k) q_values[k] = cell->q_set->functions[k](x);
    const double eta = cell_eta(m, cell->visits, card);
    for (std::size_t j = 0; j < p0_size_; ++j) {
      const WeightVector w = gibbs_weights(cell->grad_sums[j], eta);
      double mix = 0.0;
      for (std::size_t k = 0; k < card; ++k) mix += w[k] * q_values[k];
      preds[j] += mix;
    }
  }
  return preds;
}

double NestedHolderForecaster::predict(double x) const {
  const CellIndex base = holder_cell_index(x, config_.net, 0);
  const HolderIntervalState* state = interval_state(base.interval);
  const std::vector<double> preds = expert_predictions(state, x);
  const WeightVector w =
      state == nullptr ? uniform_weights(p0_size_) : ewa_weights(state->ewa);
  double y_hat = 0.0;
  for (std::size_t j = 0; j < preds.size(); ++j) y_hat += w[j] * preds[j];
  return y_hat;
}

void NestedHolderForecaster::observe(double x, double y) {
  if (std::abs(y) > config_.net.b) {
    y = clip(y, config_.net.b);
    ++clamped_y_count_;
  }
  const CellIndex base = holder_cell_index(x, config_.net, 0);
  auto [it, inserted] = intervals_.try_emplace(base.interval);
  HolderIntervalState& state = it->second;
  if (inserted) {
    state.ewa = ewa_init(p0_size_, config_.ewa_eta);
    state.experts = build_p0(base.interval);
    state.cells.resize(static_cast<std::size_t>(config_.net.levels));
  }

  const std::vector<double> preds = expert_predictions(&state, x);
  const WeightVector w = ewa_weights(state.ewa);
  double y_hat = 0.0;
  for (std::size_t j = 0; j < preds.size(); ++j) y_hat += w[j] * preds[j];
  cumulative_loss_ += (y - y_hat) * (y - y_hat);
  for (double p : preds) max_abs_intermediate_ = std::max(max_abs_intermediate_, std::abs(p));

  std::vector<double> residuals(preds.size()), losses(preds.size());
  for (std::size_t j = 0; j < preds.size(); ++j) {
    residuals[j] = y - preds[j];
    losses[j] = residuals[j] * residuals[j];
  }

  std::size_t touched = p0_size_;
  for (int m = 1; m <= config_.net.levels; ++m) {
    const CellIndex idx = holder_cell_index(x, config_.net, m);
    auto& level = state.cells[static_cast<std::size_t>(m - 1)];
    auto [cit, fresh] = level.try_emplace(idx.cell);
    HolderCellState& cell = cit->second;
    if (fresh) {
      cell.q_set = build_q_set(m, base.interval, idx.cell);
      cell.grad_sums.assign(p0_size_,
                            std::vector<double>(cell.q_set->functions.size(), 0.0));
    }
    const std::size_t card = cell.q_set->functions.size();
    std::vector<double> q_values(card);
    for (std::size_t k = 0; k < card; ++k) q_values[k] = cell.q_set->functions[k](x);
    double sup = 0.0;
    for (std::size_t j = 0; j < p0_size_; ++j) {
      for (std::size_t k = 0; k < card; ++k) {
        const double grad = -2.0 * residuals[j] * q_values[k];
        cell.grad_sums[j][k] += grad;
        sup = std::max(sup, std::abs(grad));
      }
    }
    max_grad_by_level_[static_cast<std::size_t>(m - 1)] =
        std::max(max_grad_by_level_[static_cast<std::size_t>(m - 1)], sup);
    ++cell.visits;
    touched += p0_size_ * card;
  }

  ewa_observe(state.ewa, losses);
  ++state.local_time;
  last_touched_ = touched;
  total_touched_ += touched;
}

std::size_t NestedHolderForecaster::stored_scalars() const {
  std::size_t total = 0;
  for (const auto& [a, state] : intervals_) {
    total += state.ewa.cumulative_losses.size();
    for (const auto& level : state.cells)
      for (const auto& [n, cell] : level)
        for (const auto& row : cell.grad_sums) total += row.size();
  }
  return total;
}

}  // namespace chainreg
