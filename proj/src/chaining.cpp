#include "chainreg/chaining.hpp"

#include <cmath>
#include <stdexcept>

namespace chainreg {

int chaining_levels(double b, double gamma, std::size_t horizon) {
  if (!(b > 0.0) || !(gamma > 0.0) || horizon == 0)
    throw std::invalid_argument("chaining_levels: need b > 0, gamma > 0, horizon >= 1");
  const int k = static_cast<int>(
      std::ceil(std::log2(gamma * static_cast<double>(horizon) / b)));
  return k < 0 ? 0 : k;
}

ChainingConfig make_chaining_config(double b, double gamma, std::size_t horizon,
                                    FiniteFunctionClass f0,
                                    std::vector<FiniteFunctionClass> increments) {
  if (!(b > 0.0)) throw std::invalid_argument("chaining config: b must be positive");
  if (horizon == 0) throw std::invalid_argument("chaining config: horizon must be >= 1");
  if (f0.functions.empty()) throw std::invalid_argument("chaining config: empty coarse net");
  for (const FiniteFunctionClass& level : increments)
    if (level.functions.empty())
      throw std::invalid_argument("chaining config: empty increment net");

  ChainingConfig config;
  config.b = b;
  config.horizon = horizon;
  config.gamma = gamma;
  const double lower = b / static_cast<double>(horizon);
  if (!(gamma > lower) || gamma > b) {
    config.gamma = std::min(std::max(gamma, std::min(2.0 * lower, b)), b);
    config.gamma_clamped = true;
  }
  config.k_levels = static_cast<int>(increments.size());
  config.levels_match_formula =
      config.k_levels == chaining_levels(b, config.gamma, horizon);
  config.eta0 = square_loss_expconcave_eta(b, 5);
  config.etas.resize(increments.size());
  for (std::size_t k = 1; k <= increments.size(); ++k) {
    const double n_k = static_cast<double>(increments[k - 1].functions.size());
    config.etas[k - 1] = std::sqrt(2.0 * std::log(n_k) / static_cast<double>(horizon)) *
                         std::pow(2.0, static_cast<double>(k)) / (30.0 * b * config.gamma);
  }
  config.f0 = std::move(f0);
  config.increments = std::move(increments);
  return config;
}

ChainingBoundQuantities chaining_regret_quantities(const ChainingConfig& config) {
  ChainingBoundQuantities out;
  const double b = config.b;
  const double t = static_cast<double>(config.horizon);
  double sum = 0.0;
  for (std::size_t k = 1; k <= config.increments.size(); ++k) {
    const double cap = 30.0 * b * config.gamma / std::pow(2.0, static_cast<double>(k));
    out.grad_bounds.push_back(cap);
    sum += cap * std::sqrt(std::log(static_cast<double>(config.increments[k - 1].functions.size())));
  }
  out.proof_bound = std::sqrt(2.0 * t) * sum +
                    50.0 * b * b * std::log(static_cast<double>(config.f0.functions.size())) +
                    4.0 * b * b + b * b / t;
  return out;
}

ChainingForecaster::ChainingForecaster(ChainingConfig config) : config_(std::move(config)) {
  const std::size_t n0 = config_.f0.functions.size();
  high_ = ewa_init(n0, config_.eta0);
  std::vector<BlockSpec> specs;
  for (std::size_t k = 1; k <= config_.increments.size(); ++k) {
    const double cap = 30.0 * config_.b * config_.gamma / std::pow(2.0, static_cast<double>(k));
    specs.push_back(BlockSpec::fixed(config_.increments[k - 1].functions.size(), cap,
                                     config_.etas[k - 1]));
  }
  if (!specs.empty()) {
    low_.reserve(n0);
    for (std::size_t j = 0; j < n0; ++j) low_.push_back(meg_init(specs));
  } else {
    low_.resize(n0);  // K = 0: plain EWA over the coarse net
  }
  max_grad_by_level_.assign(config_.increments.size(), 0.0);
}

std::vector<double> ChainingForecaster::intermediate_predictions(double x) const {
  const std::size_t n0 = config_.f0.functions.size();
  // g values do not depend on j; evaluate once and share.
  std::vector<double> base(n0);
  for (std::size_t j = 0; j < n0; ++j) base[j] = config_.f0.functions[j](x);
  if (config_.increments.empty()) return base;

  std::vector<std::vector<double>> g_values(config_.increments.size());
  for (std::size_t k = 0; k < config_.increments.size(); ++k) {
    const auto& fns = config_.increments[k].functions;
    g_values[k].resize(fns.size());
    for (std::size_t i = 0; i < fns.size(); ++i) g_values[k][i] = fns[i](x);
  }
  for (std::size_t j = 0; j < n0; ++j) {
    for (std::size_t k = 0; k < config_.increments.size(); ++k) {
      const WeightVector u = meg_block_weights(low_[j], k);
      double mix = 0.0;
      for (std::size_t i = 0; i < u.size(); ++i) mix += u[i] * g_values[k][i];
      base[j] += mix;
    }
  }
  return base;
}

double ChainingForecaster::predict(double x) const {
  const std::vector<double> preds = intermediate_predictions(x);
  const WeightVector w = ewa_weights(high_);
  double y_hat = 0.0;
  for (std::size_t j = 0; j < preds.size(); ++j) y_hat += w[j] * preds[j];
  return y_hat;
}

void ChainingForecaster::observe(double x, double y) {
  if (std::abs(y) > config_.b) {
    y = clip(y, config_.b);
    ++clamped_y_count_;
  }
  const std::vector<double> preds = intermediate_predictions(x);
  const WeightVector w = ewa_weights(high_);
  double y_hat = 0.0;
  for (std::size_t j = 0; j < preds.size(); ++j) y_hat += w[j] * preds[j];
  cumulative_loss_ += (y - y_hat) * (y - y_hat);
  for (double p : preds) max_abs_intermediate_ = std::max(max_abs_intermediate_, std::abs(p));

  // Low-scale then high-scale, both from the round-t predictions above.
  if (!config_.increments.empty()) {
    std::vector<std::vector<double>> g_values(config_.increments.size());
    for (std::size_t k = 0; k < config_.increments.size(); ++k) {
      const auto& fns = config_.increments[k].functions;
      g_values[k].resize(fns.size());
      for (std::size_t i = 0; i < fns.size(); ++i) g_values[k][i] = fns[i](x);
    }
    std::vector<std::vector<double>> grads(config_.increments.size());
    for (std::size_t j = 0; j < preds.size(); ++j) {
      const double residual = y - preds[j];
      for (std::size_t k = 0; k < grads.size(); ++k) {
        grads[k].assign(g_values[k].size(), 0.0);
        for (std::size_t i = 0; i < g_values[k].size(); ++i) {
          grads[k][i] = -2.0 * residual * g_values[k][i];
          max_grad_by_level_[k] = std::max(max_grad_by_level_[k], std::abs(grads[k][i]));
        }
      }
      meg_observe(low_[j], grads);
    }
  }
  std::vector<double> losses(preds.size());
  for (std::size_t j = 0; j < preds.size(); ++j) losses[j] = (y - preds[j]) * (y - preds[j]);
  ewa_observe(high_, losses);
}

}  // namespace chainreg
