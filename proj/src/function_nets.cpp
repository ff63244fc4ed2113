#include "chainreg/function_nets.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <stdexcept>
#include <utility>

#include "chainreg/errors.hpp"
#include "chainreg/simplex.hpp"

namespace chainreg {

double grid_round_ties_down(double v, const GridSpec& grid) {
  if (grid.count == 0 || !(grid.step > 0.0))
    throw std::invalid_argument("grid_round_ties_down: empty or degenerate grid");
  const double q = (v - grid.lo) / grid.step;
  double j = std::floor(q);
  if (j < 0.0) j = 0.0;
  if (j > static_cast<double>(grid.count - 1)) j = static_cast<double>(grid.count - 1);
  std::size_t lo_idx = static_cast<std::size_t>(j);
  if (lo_idx + 1 >= grid.count) return grid.value(grid.count - 1);
  const double lo_val = grid.value(lo_idx);
  const double hi_val = grid.value(lo_idx + 1);
  // <= keeps ties on the lower value.
  return (std::abs(v - lo_val) <= std::abs(hi_val - v)) ? lo_val : hi_val;
}

namespace {

std::size_t locate_interval(double x, double width, std::size_t intervals) {
  if (!(x >= 0.0) || !(x <= 1.0))
    throw std::domain_error("cell index: x outside [0,1]");
  double a = std::floor(x / width);
  if (a > static_cast<double>(intervals - 1)) a = static_cast<double>(intervals - 1);
  return static_cast<std::size_t>(a) + 1;  // 1-based
}

std::size_t locate_child(double x, double interval_lo, double width, std::size_t arity_pow) {
  const double child_width = width / static_cast<double>(arity_pow);
  double n = std::floor((x - interval_lo) / child_width);
  if (n < 0.0) n = 0.0;
  if (n > static_cast<double>(arity_pow - 1)) n = static_cast<double>(arity_pow - 1);
  return static_cast<std::size_t>(n) + 1;  // 1-based
}

// Midpoint of cell ∩ [0,1]; identical to the true center for interior cells.
double effective_center(double lo, double hi) {
  const double a = std::max(lo, 0.0);
  const double b = std::min(hi, 1.0);
  if (a >= b) return std::min(std::max(0.5 * (lo + hi), 0.0), 1.0);
  return 0.5 * (a + b);
}

std::size_t pow_sz(std::size_t base, int e) {
  std::size_t r = 1;
  for (int i = 0; i < e; ++i) r *= base;
  return r;
}

}  // namespace

// ---------------------------------------------------------------------------
// Lipschitz nets

LipschitzNetConfig make_lipschitz_net_config(double b, double gamma, int levels,
                                             std::size_t horizon) {
  if (!(b > 0.0)) throw std::invalid_argument("lipschitz net: b must be positive");
  if (levels < 0) throw std::invalid_argument("lipschitz net: levels must be >= 0");
  if (!(gamma > 0.0)) throw std::invalid_argument("lipschitz net: gamma must be positive");

  LipschitzNetConfig config;
  config.b = b;
  config.gamma = gamma;
  config.levels = levels;
  if (gamma > b) {
    config.gamma = b;
    config.gamma_clamped = true;
  }
  if (horizon > 0) {
    const double lower = b / static_cast<double>(horizon);
    if (config.gamma <= lower) {
      config.gamma = std::min(b, 2.0 * lower);
      config.gamma_clamped = true;
    }
  }
  config.intervals = static_cast<std::size_t>(std::ceil(1.0 / config.gamma));
  const std::size_t steps = static_cast<std::size_t>(std::ceil(2.0 * b / config.gamma));
  config.value_grid = GridSpec{-b, config.gamma, steps + 1};
  return config;
}

CellIndex lipschitz_cell_index(double x, const LipschitzNetConfig& config, int m) {
  if (m < 0) throw std::invalid_argument("lipschitz_cell_index: negative level");
  CellIndex idx;
  idx.interval = locate_interval(x, config.gamma, config.intervals);
  const double lo = static_cast<double>(idx.interval - 1) * config.gamma;
  idx.cell = locate_child(x, lo, config.gamma, pow_sz(2, m));
  return idx;
}

double lipschitz_cell_center(const LipschitzNetConfig& config, int m, std::size_t a,
                             std::size_t n) {
  const double width = config.gamma / static_cast<double>(pow_sz(2, m));
  const double lo = static_cast<double>(a - 1) * config.gamma +
                    static_cast<double>(n - 1) * width;
  return effective_center(lo, lo + width);
}

double lipschitz_net_error_bound(const LipschitzNetConfig& config, int m_max) {
  if (m_max == 0) return config.gamma;
  return config.gamma / static_cast<double>(pow_sz(2, m_max + 1));
}

LipschitzProjection project_lipschitz(const RealFunction& f, const LipschitzNetConfig& config,
                                      int m_max) {
  if (m_max < 0) throw std::invalid_argument("project_lipschitz: negative level");
  LipschitzProjection out;
  ChainCoefficients& c = out.coeffs;
  c.c0.resize(config.intervals);
  for (std::size_t a = 1; a <= config.intervals; ++a)
    c.c0[a - 1] = grid_round_ties_down(f(lipschitz_cell_center(config, 0, a, 1)),
                                       config.value_grid);

  // Partial sums interpolate f at every cell center (the recursion makes
  // c^(m,n) the gap between f at the child center and the parent partial sum).
  c.increments.resize(static_cast<std::size_t>(m_max));
  std::vector<std::vector<double>> partial(config.intervals);  // level m-1 partial sums
  for (std::size_t a = 0; a < config.intervals; ++a) partial[a] = {c.c0[a]};
  for (int m = 1; m <= m_max; ++m) {
    const std::size_t cells = pow_sz(2, m);
    auto& level = c.increments[static_cast<std::size_t>(m - 1)];
    level.assign(config.intervals, std::vector<double>(cells, 0.0));
    std::vector<std::vector<double>> next(config.intervals, std::vector<double>(cells, 0.0));
    for (std::size_t a = 1; a <= config.intervals; ++a) {
      for (std::size_t n = 1; n <= cells; ++n) {
        const double parent = partial[a - 1][(n - 1) / 2];
        const double inc = f(lipschitz_cell_center(config, m, a, n)) - parent;
        level[a - 1][n - 1] = inc;
        next[a - 1][n - 1] = parent + inc;
      }
    }
    partial = std::move(next);
  }

  const std::size_t probes = 64 * pow_sz(2, m_max);
  double err = 0.0;
  for (std::size_t a = 0; a < config.intervals; ++a) {
    const double lo = static_cast<double>(a) * config.gamma;
    for (std::size_t i = 0; i < probes; ++i) {
      const double x = lo + (static_cast<double>(i) + 0.5) / static_cast<double>(probes) *
                                config.gamma;
      if (x > 1.0) break;
      err = std::max(err, std::abs(f(x) - evaluate_chain(c, config, m_max, x)));
    }
  }
  out.certified_sup_error = err;
  out.certified = err <= lipschitz_net_error_bound(config, m_max) + 1e-9;
  return out;
}

double evaluate_chain(const ChainCoefficients& coeffs, const LipschitzNetConfig& config,
                      int m_max, double x) {
  const CellIndex base = lipschitz_cell_index(x, config, 0);
  double value = coeffs.c0[base.interval - 1];
  for (int m = 1; m <= m_max; ++m) {
    const CellIndex idx = lipschitz_cell_index(x, config, m);
    value += coeffs.increments[static_cast<std::size_t>(m - 1)][idx.interval - 1][idx.cell - 1];
  }
  return value;
}

// ---------------------------------------------------------------------------
// Hölder nets

double ClippedPolynomial::raw(double x) const {
  const double t = x - center;
  double acc = 0.0;
  double fact = 1.0;
  // Nested multiplication on the centered form, highest degree first.
  for (std::size_t i = 1; i < coefficients.size(); ++i) fact *= static_cast<double>(i);
  for (std::size_t i = coefficients.size(); i-- > 0;) {
    acc = acc * t + coefficients[i] / fact;
    if (i > 0) fact /= static_cast<double>(i);
  }
  return acc;
}

double ClippedPolynomial::operator()(double x) const { return clip(raw(x), clip_bound); }

HolderNetConfig make_holder_net_config(int q, double alpha, double lambda, double b,
                                       double gamma, int levels) {
  if (q < 0) throw std::invalid_argument("holder net: q must be >= 0");
  if (!(alpha > 0.0) || alpha > 1.0)
    throw std::invalid_argument("holder net: alpha must be in (0,1]");
  if (!(lambda > 0.0)) throw std::invalid_argument("holder net: lambda must be positive");
  if (!(b > 0.0)) throw std::invalid_argument("holder net: b must be positive");
  if (!(gamma > 0.0)) throw std::invalid_argument("holder net: gamma must be positive");
  if (levels < 0) throw std::invalid_argument("holder net: levels must be >= 0");

  HolderNetConfig config;
  config.q = q;
  config.alpha = alpha;
  config.lambda = lambda;
  config.b = b;
  config.beta = static_cast<double>(q) + alpha;
  if (config.beta < 0.5)
    throw std::invalid_argument("holder net: regularity beta = q + alpha must be >= 1/2");
  config.gamma = gamma;
  double fact = 1.0;
  for (int i = 2; i <= q; ++i) fact *= static_cast<double>(i);
  config.delta_x = 2.0 * std::pow(fact * gamma / (2.0 * lambda), 1.0 / config.beta);
  config.delta_y = gamma / std::exp(1.0);
  config.levels = levels;
  config.intervals = static_cast<std::size_t>(std::ceil(1.0 / config.delta_x));
  if (config.intervals == 0) config.intervals = 1;
  return config;
}

GridSpec holder_value_grid(const HolderNetConfig& config, int m) {
  const double step = config.delta_y / static_cast<double>(pow_sz(2, m));
  const std::size_t steps = static_cast<std::size_t>(std::ceil(2.0 * config.b / step));
  return GridSpec{-config.b, step, steps + 1};
}

CellIndex holder_cell_index(double x, const HolderNetConfig& config, int m) {
  if (m < 0) throw std::invalid_argument("holder_cell_index: negative level");
  CellIndex idx;
  idx.interval = locate_interval(x, config.delta_x, config.intervals);
  const double lo = static_cast<double>(idx.interval - 1) * config.delta_x;
  idx.cell = locate_child(x, lo, config.delta_x, pow_sz(4, m));
  return idx;
}

double holder_cell_center(const HolderNetConfig& config, int m, std::size_t a, std::size_t n) {
  const double width = config.delta_x / static_cast<double>(pow_sz(4, m));
  const double lo = static_cast<double>(a - 1) * config.delta_x +
                    static_cast<double>(n - 1) * width;
  return effective_center(lo, lo + width);
}

ClippedPolynomial taylor_project_holder(const std::vector<double>& derivatives,
                                        const HolderNetConfig& config, int m, double center) {
  if (derivatives.size() != static_cast<std::size_t>(config.q) + 1)
    throw std::invalid_argument("taylor_project_holder: need q+1 derivative values");
  const GridSpec grid = holder_value_grid(config, m);
  ClippedPolynomial poly;
  poly.center = center;
  poly.clip_bound = config.b;
  poly.coefficients.resize(derivatives.size());
  for (std::size_t i = 0; i < derivatives.size(); ++i)
    poly.coefficients[i] = grid_round_ties_down(derivatives[i], grid);
  return poly;
}

double ClippedPolyDiff::operator()(double x) const { return clip(fine(x) - coarse(x), cap); }

ClippedPolyDiff q_increment(const ClippedPolynomial& p_m, const ClippedPolynomial& p_prev,
                            double gamma, int m) {
  if (m < 1) throw std::invalid_argument("q_increment: level must be >= 1");
  ClippedPolyDiff diff;
  diff.fine = p_m;
  diff.coarse = p_prev;
  diff.cap = 3.0 * gamma / static_cast<double>(pow_sz(2, m));
  return diff;
}

HolderChainProjection project_holder_chain(const DerivativeProvider& derivatives_at,
                                           const HolderNetConfig& config, int m_max) {
  if (m_max < 0) throw std::invalid_argument("project_holder_chain: negative level");
  HolderChainProjection chain;
  chain.p0.reserve(config.intervals);
  for (std::size_t a = 1; a <= config.intervals; ++a) {
    const double center = holder_cell_center(config, 0, a, 1);
    chain.p0.push_back(taylor_project_holder(derivatives_at(center), config, 0, center));
  }
  chain.p_level.resize(static_cast<std::size_t>(m_max));
  for (int m = 1; m <= m_max; ++m) {
    const std::size_t cells = pow_sz(4, m);
    auto& level = chain.p_level[static_cast<std::size_t>(m - 1)];
    level.assign(config.intervals, {});
    for (std::size_t a = 1; a <= config.intervals; ++a) {
      level[a - 1].reserve(cells);
      for (std::size_t n = 1; n <= cells; ++n) {
        const double center = holder_cell_center(config, m, a, n);
        level[a - 1].push_back(taylor_project_holder(derivatives_at(center), config, m, center));
      }
    }
  }
  return chain;
}

double evaluate_holder_chain(const HolderChainProjection& chain, const HolderNetConfig& config,
                             int m_max, double x) {
  const CellIndex base = holder_cell_index(x, config, 0);
  const ClippedPolynomial* prev = &chain.p0[base.interval - 1];
  double value = (*prev)(x);
  for (int m = 1; m <= m_max; ++m) {
    const CellIndex idx = holder_cell_index(x, config, m);
    const ClippedPolynomial& cur =
        chain.p_level[static_cast<std::size_t>(m - 1)][idx.interval - 1][idx.cell - 1];
    value += q_increment(cur, *prev, config.gamma, m)(x);
    prev = &cur;
  }
  return value;
}

// ---------------------------------------------------------------------------
// Explicit nets for finite families

ExplicitNets build_explicit_nets(const FunctionFamily& family, double gamma, int k_max) {
  const std::size_t n = family.members.size();
  if (n == 0) throw std::invalid_argument("build_explicit_nets: empty family");
  if (family.probes.empty()) throw std::invalid_argument("build_explicit_nets: no probe points");
  if (!(gamma > 0.0)) throw std::invalid_argument("build_explicit_nets: gamma must be positive");
  if (k_max < 0) throw std::invalid_argument("build_explicit_nets: k_max must be >= 0");
  if (n > family.cardinality_cap)
    throw resource_error("build_explicit_nets: family cardinality " + std::to_string(n) +
                         " exceeds cap " + std::to_string(family.cardinality_cap));

  // Pairwise sup distances over the probe set.
  std::vector<std::vector<double>> values(n, std::vector<double>(family.probes.size()));
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t p = 0; p < family.probes.size(); ++p)
      values[i][p] = family.members[i](family.probes[p]);
  std::vector<std::vector<double>> dist(n, std::vector<double>(n, 0.0));
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      double d = 0.0;
      for (std::size_t p = 0; p < family.probes.size(); ++p)
        d = std::max(d, std::abs(values[i][p] - values[j][p]));
      dist[i][j] = dist[j][i] = d;
    }
  }

  // Greedy proper cover at the given radius; net indices kept sorted so the
  // projection tie-break is by family index.
  auto greedy_net = [&](double radius) {
    std::vector<bool> covered(n, false);
    std::vector<std::size_t> net;
    std::size_t remaining = n;
    while (remaining > 0) {
      std::size_t best = 0, best_cover = 0;
      for (std::size_t i = 0; i < n; ++i) {
        std::size_t cover = 0;
        for (std::size_t j = 0; j < n; ++j)
          if (!covered[j] && dist[i][j] <= radius) ++cover;
        if (cover > best_cover) {
          best_cover = cover;
          best = i;
        }
      }
      net.push_back(best);
      for (std::size_t j = 0; j < n; ++j)
        if (!covered[j] && dist[best][j] <= radius) {
          covered[j] = true;
          --remaining;
        }
    }
    std::sort(net.begin(), net.end());
    return net;
  };

  auto project = [&](const std::vector<std::size_t>& net, std::size_t i) {
    std::size_t arg = 0;
    double best = dist[net[0]][i];
    for (std::size_t m = 1; m < net.size(); ++m) {
      if (dist[net[m]][i] < best) {
        best = dist[net[m]][i];
        arg = m;
      }
    }
    return net[arg];
  };

  ExplicitNets out;
  std::vector<std::vector<std::size_t>> nets;
  for (int k = 0; k <= k_max; ++k) {
    nets.push_back(greedy_net(gamma / static_cast<double>(pow_sz(2, k))));
    out.net_sizes.push_back(nets.back().size());
  }

  for (std::size_t idx : nets[0]) out.f0.functions.push_back(family.members[idx]);
  out.f0.sup_bound = family.sup_bound;

  for (int k = 1; k <= k_max; ++k) {
    // The increment class is a set of functions: pairs whose differences
    // coincide on the probes collapse to one member.
    std::set<std::vector<double>> seen;
    FiniteFunctionClass level;
    level.sup_bound = 3.0 * gamma / static_cast<double>(pow_sz(2, k));
    for (std::size_t i = 0; i < n; ++i) {
      const std::size_t fine = project(nets[static_cast<std::size_t>(k)], i);
      const std::size_t coarse = project(nets[static_cast<std::size_t>(k - 1)], i);
      std::vector<double> key(family.probes.size());
      for (std::size_t p = 0; p < family.probes.size(); ++p)
        key[p] = values[fine][p] - values[coarse][p];
      if (!seen.insert(key).second) continue;
      RealFunction hi = family.members[fine];
      RealFunction lo = family.members[coarse];
      level.functions.push_back([hi, lo](double x) { return hi(x) - lo(x); });
    }
    out.increments.push_back(std::move(level));
  }
  return out;
}

}  // namespace chainreg
