#include "chainreg/dyadic_lipschitz.hpp"

#include <cmath>
#include <stdexcept>

#include "chainreg/simplex.hpp"

namespace chainreg {

DyadicConfig make_dyadic_config(double b, std::size_t horizon) {
  if (!(b > 0.0)) throw std::invalid_argument("dyadic config: b must be positive");
  if (horizon < 2) throw std::invalid_argument("dyadic config: horizon must be >= 2");
  DyadicConfig config;
  config.b = b;
  config.horizon = horizon;
  config.gamma = b * std::pow(static_cast<double>(horizon), -1.0 / 3.0);
  config.levels = static_cast<int>(
      std::ceil(std::log2(config.gamma * static_cast<double>(horizon) / b)));
  if (config.levels < 1) config.levels = 1;
  config.net = make_lipschitz_net_config(b, config.gamma, config.levels);
  config.intervals = config.net.intervals;
  config.experts = config.net.value_grid.count;
  config.ewa_eta = square_loss_expconcave_eta(b, 4);
  return config;
}

double dyadic_regret_bound(double b, std::size_t horizon) {
  if (!(b > 0.0)) throw std::invalid_argument("dyadic_regret_bound: b must be positive");
  if (horizon < 2) throw std::invalid_argument("dyadic_regret_bound: horizon must be >= 2");
  const double t = static_cast<double>(horizon);
  const double gamma = b * std::pow(t, -1.0 / 3.0);
  return 32.0 * b * b / gamma * std::log(2.0 * b / gamma + 1.0) +
         32.0 * b * (1.0 + std::sqrt(2.0)) * std::sqrt(gamma * t * std::log(2.0)) +
         2.0 * b * b + b * b / (4.0 * t);
}

DyadicLipschitzForecaster::DyadicLipschitzForecaster(double b, std::size_t horizon)
    : config_(make_dyadic_config(b, horizon)) {
  expert_values_.resize(config_.experts);
  for (std::size_t j = 0; j < config_.experts; ++j)
    expert_values_[j] = config_.net.value_grid.value(j);
  max_grad_by_level_.assign(static_cast<std::size_t>(config_.levels), 0.0);
}

const DyadicIntervalState* DyadicLipschitzForecaster::interval_state(std::size_t a) const {
  auto it = intervals_.find(a);
  return it == intervals_.end() ? nullptr : &it->second;
}

double DyadicLipschitzForecaster::cell_eta(int m, std::size_t visits) const {
  const double g = 16.0 * config_.b * config_.gamma / std::pow(2.0, static_cast<double>(m));
  return std::sqrt(std::log(2.0) / (1.0 + static_cast<double>(visits))) / g;
}

std::vector<double> DyadicLipschitzForecaster::expert_predictions(
    const DyadicIntervalState* state, double x) const {
  std::vector<double> preds = expert_values_;
  if (state == nullptr) return preds;  // fresh interval: uniform cell weights cancel
  for (int m = 1; m <= config_.levels; ++m) {
    const CellIndex idx = lipschitz_cell_index(x, config_.net, m);
    const auto& level = state->cells[static_cast<std::size_t>(m - 1)];
    auto it = level.find(idx.cell);
    if (it == level.end()) continue;
    const DyadicCellState& cell = it->second;
    const double eta = cell_eta(m, cell.visits);
    const double scale = config_.gamma / std::pow(2.0, static_cast<double>(m - 1));
    for (std::size_t j = 0; j < preds.size(); ++j) {
      const WeightVector w = gibbs_weights({cell.grad_sum[j], -cell.grad_sum[j]}, eta);
      preds[j] += scale * (w[1] - w[0]);
    }
  }
  return preds;
}

double DyadicLipschitzForecaster::predict(double x) const {
  const CellIndex idx = lipschitz_cell_index(x, config_.net, 0);
  const DyadicIntervalState* state = interval_state(idx.interval);
  const std::vector<double> preds = expert_predictions(state, x);
  WeightVector w = state == nullptr ? uniform_weights(config_.experts)
                                    : ewa_weights(state->ewa);
  double y_hat = 0.0;
  for (std::size_t j = 0; j < preds.size(); ++j) y_hat += w[j] * preds[j];
  return y_hat;
}

void DyadicLipschitzForecaster::observe(double x, double y) {
  if (std::abs(y) > config_.b) {
    y = clip(y, config_.b);
    ++clamped_y_count_;
  }
  const CellIndex base = lipschitz_cell_index(x, config_.net, 0);
  auto [it, inserted] = intervals_.try_emplace(base.interval);
  DyadicIntervalState& state = it->second;
  if (inserted) {
    state.ewa = ewa_init(config_.experts, config_.ewa_eta);
    state.cells.resize(static_cast<std::size_t>(config_.levels));
  }

  const std::vector<double> preds = expert_predictions(&state, x);
  const WeightVector w = ewa_weights(state.ewa);
  double y_hat = 0.0;
  for (std::size_t j = 0; j < preds.size(); ++j) y_hat += w[j] * preds[j];
  cumulative_loss_ += (y - y_hat) * (y - y_hat);
  for (double p : preds) max_abs_intermediate_ = std::max(max_abs_intermediate_, std::abs(p));

  // All residuals are fixed before any state mutation.
  std::vector<double> residuals(preds.size());
  std::vector<double> losses(preds.size());
  for (std::size_t j = 0; j < preds.size(); ++j) {
    residuals[j] = y - preds[j];
    losses[j] = residuals[j] * residuals[j];
  }

  for (int m = 1; m <= config_.levels; ++m) {
    const CellIndex idx = lipschitz_cell_index(x, config_.net, m);
    auto& level = state.cells[static_cast<std::size_t>(m - 1)];
    auto [cit, fresh] = level.try_emplace(idx.cell);
    DyadicCellState& cell = cit->second;
    if (fresh) cell.grad_sum.assign(config_.experts, 0.0);
    const double scale = config_.gamma / std::pow(2.0, static_cast<double>(m - 1));
    double sup = 0.0;
    for (std::size_t j = 0; j < preds.size(); ++j) {
      const double grad = 2.0 * residuals[j] * scale;  // d/du_1; the u_2 partial is -grad
      cell.grad_sum[j] += grad;
      sup = std::max(sup, std::abs(grad));
    }
    max_grad_by_level_[static_cast<std::size_t>(m - 1)] =
        std::max(max_grad_by_level_[static_cast<std::size_t>(m - 1)], sup);
    ++cell.visits;
  }

  ewa_observe(state.ewa, losses);
  ++state.local_time;
  last_touched_ = config_.experts * (static_cast<std::size_t>(config_.levels) + 1);
  total_touched_ += last_touched_;
}

std::size_t DyadicLipschitzForecaster::stored_scalars() const {
  std::size_t total = 0;
  for (const auto& [a, state] : intervals_) {
    total += state.ewa.cumulative_losses.size();
    for (const auto& level : state.cells)
      for (const auto& [n, cell] : level) total += cell.grad_sum.size();
  }
  return total;
}

}  // namespace chainreg
