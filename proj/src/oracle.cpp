#include "chainreg/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

#include "chainreg/errors.hpp"

namespace chainreg {

OracleResult best_finite(const FiniteFunctionClass& cls, const RoundData& data) {
  if (cls.functions.empty()) throw std::invalid_argument("best_finite: empty class");
  if (data.samples.empty()) throw std::invalid_argument("best_finite: empty data");
  OracleResult out;
  out.best_loss = std::numeric_limits<double>::infinity();
  for (std::size_t j = 0; j < cls.functions.size(); ++j) {
    double loss = 0.0;
    for (const Sample& s : data.samples) {
      const double r = s.y - cls.functions[j](s.x);
      loss += r * r;
    }
    if (loss < out.best_loss) {
      out.best_loss = loss;
      out.witness_indices = {j};
    }
  }
  return out;
}

OracleResult best_chained_finite(const FiniteFunctionClass& f0,
                                 const std::vector<FiniteFunctionClass>& increments,
                                 const RoundData& data, std::size_t cap) {
  if (f0.functions.empty()) throw std::invalid_argument("best_chained_finite: empty coarse net");
  if (data.samples.empty()) throw std::invalid_argument("best_chained_finite: empty data");
  double tuples = static_cast<double>(f0.functions.size());
  for (const FiniteFunctionClass& level : increments) {
    if (level.functions.empty())
      throw std::invalid_argument("best_chained_finite: empty increment net");
    tuples *= static_cast<double>(level.functions.size());
  }
  if (tuples > static_cast<double>(cap))
    throw resource_error("best_chained_finite: " + std::to_string(tuples) +
                         " tuples exceed cap " + std::to_string(cap));

  const std::size_t n = data.samples.size();
  // Member values per level, evaluated once.
  std::vector<std::vector<std::vector<double>>> values;  // [level][member][sample]
  auto evaluate = [&](const FiniteFunctionClass& cls) {
    std::vector<std::vector<double>> v(cls.functions.size(), std::vector<double>(n));
    for (std::size_t j = 0; j < cls.functions.size(); ++j)
      for (std::size_t i = 0; i < n; ++i) v[j][i] = cls.functions[j](data.samples[i].x);
    return v;
  };
  values.push_back(evaluate(f0));
  for (const FiniteFunctionClass& level : increments) values.push_back(evaluate(level));

  OracleResult out;
  out.best_loss = std::numeric_limits<double>::infinity();
  std::vector<std::size_t> choice(values.size(), 0);
  std::vector<double> acc(n, 0.0);
  // Depth-first walk accumulating the per-sample prediction sums.
  auto recurse = [&](auto&& self, std::size_t level) -> void {
    if (level == values.size()) {
      double loss = 0.0;
      for (std::size_t i = 0; i < n; ++i) {
        const double r = data.samples[i].y - acc[i];
        loss += r * r;
      }
      if (loss < out.best_loss) {
        out.best_loss = loss;
        out.witness_indices = choice;
      }
      return;
    }
    for (std::size_t j = 0; j < values[level].size(); ++j) {
      choice[level] = j;
      for (std::size_t i = 0; i < n; ++i) acc[i] += values[level][j][i];
      self(self, level + 1);
      for (std::size_t i = 0; i < n; ++i) acc[i] -= values[level][j][i];
    }
  };
  recurse(recurse, 0);
  return out;
}

OracleResult best_lipschitz_dp(const RoundData& data, double b, double lip, double grid_step) {
  if (data.samples.empty()) throw std::invalid_argument("best_lipschitz_dp: empty data");
  if (!(b > 0.0)) throw std::invalid_argument("best_lipschitz_dp: b must be positive");
  if (lip < 0.0) throw std::invalid_argument("best_lipschitz_dp: negative Lipschitz constant");
  if (!(grid_step > 0.0) || grid_step >= 2.0 * b)
    throw std::invalid_argument("best_lipschitz_dp: need 0 < h < 2b");

  std::vector<Sample> pts = data.samples;
  std::stable_sort(pts.begin(), pts.end(),
                   [](const Sample& l, const Sample& r) { return l.x < r.x; });

  const std::size_t v_count =
      static_cast<std::size_t>(std::ceil(2.0 * b / grid_step)) + 1;
  std::vector<double> values(v_count);
  for (std::size_t k = 0; k < v_count; ++k)
    values[k] = -b + static_cast<double>(k) * grid_step;

  const std::size_t n = pts.size();
  std::vector<double> cost(v_count), prev(v_count);
  std::vector<std::vector<std::size_t>> arg(n, std::vector<std::size_t>(v_count, 0));
  for (std::size_t k = 0; k < v_count; ++k) {
    const double r = pts[0].y - values[k];
    cost[k] = r * r;
  }
  for (std::size_t i = 1; i < n; ++i) {
    prev.swap(cost);
    const double dx = pts[i].x - pts[i - 1].x;
    // Identical x means one function value; the slack applies only across a
    // real gap.
    const double budget = dx > 0.0 ? lip * dx + grid_step : 0.0;
    const std::size_t halfwin =
        static_cast<std::size_t>(std::floor(budget / grid_step + 1e-9)) + 1;
    for (std::size_t k = 0; k < v_count; ++k) {
      const std::size_t lo = k > halfwin ? k - halfwin : 0;
      const std::size_t hi = std::min(k + halfwin, v_count - 1);
      double best = std::numeric_limits<double>::infinity();
      std::size_t best_u = lo;
      for (std::size_t u = lo; u <= hi; ++u) {
        if (std::abs(values[k] - values[u]) > budget + 1e-12) continue;
        if (prev[u] < best) {
          best = prev[u];
          best_u = u;
        }
      }
      const double r = pts[i].y - values[k];
      cost[k] = r * r + best;
      arg[i][k] = best_u;
    }
  }

  OracleResult out;
  std::size_t k_best = 0;
  for (std::size_t k = 1; k < v_count; ++k)
    if (cost[k] < cost[k_best]) k_best = k;
  out.best_loss = cost[k_best];
  out.certified_gap =
      static_cast<double>(n) * grid_step * (4.0 * b + grid_step);
  out.witness_path.resize(n);
  std::size_t k = k_best;
  for (std::size_t i = n; i-- > 0;) {
    out.witness_path[i] = values[k];
    if (i > 0) k = arg[i][k];
  }
  return out;
}

double empirical_regret(double forecaster_cumulative_loss, const OracleResult& oracle) {
  return forecaster_cumulative_loss - (oracle.best_loss - oracle.certified_gap);
}

}  // namespace chainreg
