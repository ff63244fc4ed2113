#include <doctest.h>

#include <cmath>
#include <limits>
#include <stdexcept>

#include "chainreg/multivar_eg.hpp"
#include "chainreg/rng.hpp"

using namespace chainreg;

TEST_CASE("meg_init") {
  MegState one = meg_init({BlockSpec::fixed(2, 1.0, 0.5)});
  CHECK(meg_weights(one) == std::vector<WeightVector>{{0.5, 0.5}});

  MegState two = meg_init({BlockSpec::fixed(2, 1.0, 0.5), BlockSpec::fixed(3, 2.0, 0.1)});
  const auto w = meg_weights(two);
  CHECK(w[0] == WeightVector{0.5, 0.5});
  for (double v : w[1]) CHECK(v == doctest::Approx(1.0 / 3).epsilon(1e-12));

  MegState trivial = meg_init({BlockSpec::fixed(1, 1.0, 0.5)});
  meg_observe(trivial, {{3.0}});
  CHECK(meg_weights(trivial) == std::vector<WeightVector>{{1.0}});

  CHECK_THROWS_AS(meg_init({}), std::invalid_argument);
}

TEST_CASE("meg_weights fixed and adaptive") {
  MegState fixed = meg_init({BlockSpec::fixed(2, 1.0, 1.0)});
  meg_observe(fixed, {{std::log(2.0), 0.0}});
  const WeightVector w = meg_block_weights(fixed, 0);
  CHECK(w[0] == doctest::Approx(1.0 / 3).epsilon(1e-12));
  CHECK(w[1] == doctest::Approx(2.0 / 3).epsilon(1e-12));

  // Singleton adaptive block: log N = 0 makes eta 0 and the weight (1).
  MegState degenerate = meg_init({BlockSpec::adaptive_block(1, 2.0)});
  CHECK(meg_block_eta(degenerate, 0) == 0.0);
  CHECK(meg_block_weights(degenerate, 0) == WeightVector{1.0});
}

TEST_CASE("meg_observe counters and convergence") {
  MegState state = meg_init({BlockSpec::fixed(2, 1.0, 0.2), BlockSpec::fixed(2, 1.0, 0.2)});
  meg_observe(state, {{0.0, 0.0}, {0.0, 0.0}});
  CHECK(state.blocks[0].active_rounds == 0);
  CHECK(state.blocks[1].active_rounds == 0);
  CHECK(meg_weights(state)[0] == WeightVector{0.5, 0.5});

  // Only block 1 active: its counter tracks t, the other stays 0.
  for (int t = 0; t < 40; ++t) meg_observe(state, {{1.0, 0.0}, {0.0, 0.0}});
  CHECK(state.blocks[0].active_rounds == 40);
  CHECK(state.blocks[1].active_rounds == 0);

  // Weights follow softmax(-eta*t, 0): the unpenalized index takes over.
  const WeightVector w = meg_block_weights(state, 0);
  const double z = std::exp(-0.2 * 40.0);
  CHECK(w[0] == doctest::Approx(z / (1.0 + z)).epsilon(1e-12));
  CHECK(w[1] > 0.99);

  CHECK_THROWS_AS(meg_observe(state, {{1.0, 0.0}}), std::invalid_argument);
  CHECK_THROWS_AS(meg_observe(state, {{1.0}, {0.0, 0.0}}), std::invalid_argument);
}

TEST_CASE("fixed_eta") {
  CHECK(fixed_eta(1, 100, 2.0) == 0.0);
  CHECK(fixed_eta(8, 16, 2.0) == doctest::Approx(0.2549167475422022).epsilon(1e-12));
  CHECK(fixed_eta(8, 16, 4.0) == doctest::Approx(0.5 * 0.2549167475422022).epsilon(1e-12));
}

TEST_CASE("regret bound formulas") {
  CHECK(meg_regret_bound({BlockSpec::fixed(1, 1.0, 0.0)}, 100) == 0.0);
  CHECK(meg_regret_bound({BlockSpec::fixed(4, 1.0, 0.0)}, 100) ==
        doctest::Approx(16.651092223153956).epsilon(1e-12));
  CHECK(adaptive_regret_bound({BlockSpec::adaptive_block(4, 1.0)}, {25}) ==
        doctest::Approx(11.774100225154747).epsilon(1e-12));
  CHECK_THROWS_AS(adaptive_regret_bound({BlockSpec::adaptive_block(4, 1.0)}, {1, 2}),
                  std::invalid_argument);
}

TEST_CASE("scaling gradients and 1/eta leaves the trajectory unchanged") {
  SplitMix64 rng(31);
  const double c = 7.5;
  MegState base = meg_init({BlockSpec::fixed(3, 1.0, 0.4), BlockSpec::adaptive_block(2, 1.0)});
  MegState scaled =
      meg_init({BlockSpec::fixed(3, c, 0.4 / c), BlockSpec::adaptive_block(2, c)});
  for (int t = 0; t < 50; ++t) {
    std::vector<std::vector<double>> g = {{rng.next_in(-1, 1), rng.next_in(-1, 1),
                                           rng.next_in(-1, 1)},
                                          {rng.next_in(-1, 1), rng.next_in(-1, 1)}};
    std::vector<std::vector<double>> gc = g;
    for (auto& block : gc)
      for (double& v : block) v *= c;
    meg_observe(base, g);
    meg_observe(scaled, gc);
    const auto wa = meg_weights(base), wb = meg_weights(scaled);
    for (std::size_t k = 0; k < wa.size(); ++k)
      for (std::size_t i = 0; i < wa[k].size(); ++i)
        CHECK(std::abs(wa[k][i] - wb[k][i]) <= 1e-12);
  }
}

namespace {

// Random scaled-quadratic losses l(u, v) = s(a.u + b.v - c)^2 over a simplex
// product, rescaled so the per-block gradient sup-norms respect the caps.
struct QuadraticStream {
  std::vector<std::vector<double>> a_rounds, b_rounds;
  std::vector<double> c_rounds, scales;

  static QuadraticStream make(SplitMix64& rng, std::size_t n1, std::size_t n2, double g1,
                              double g2, std::size_t t, double density) {
    QuadraticStream s;
    for (std::size_t round = 0; round < t; ++round) {
      std::vector<double> a(n1, 0.0), b(n2, 0.0);
      const bool a_active = rng.next_double() < density;
      const bool b_active = rng.next_double() < density;
      if (a_active)
        for (double& v : a) v = rng.next_in(-1.0, 1.0);
      if (b_active)
        for (double& v : b) v = rng.next_in(-1.0, 1.0);
      const double c = rng.next_in(-1.0, 1.0);
      double amax = 0.0, bmax = 0.0, rmax = 0.0;
      for (double v : a) amax = std::max(amax, std::abs(v));
      for (double v : b) bmax = std::max(bmax, std::abs(v));
      for (double va : a)
        for (double vb : b) rmax = std::max(rmax, std::abs(va + vb - c));
      double scale = 1.0;
      if (rmax > 0.0) {
        if (amax > 0.0) scale = std::min(scale, g1 / (2.0 * rmax * amax));
        if (bmax > 0.0) scale = std::min(scale, g2 / (2.0 * rmax * bmax));
      }
      s.a_rounds.push_back(a);
      s.b_rounds.push_back(b);
      s.c_rounds.push_back(c);
      s.scales.push_back(scale);
    }
    return s;
  }

  double loss(std::size_t t, const WeightVector& u, const WeightVector& v) const {
    double r = -c_rounds[t];
    for (std::size_t i = 0; i < u.size(); ++i) r += a_rounds[t][i] * u[i];
    for (std::size_t i = 0; i < v.size(); ++i) r += b_rounds[t][i] * v[i];
    return scales[t] * r * r;
  }

  std::vector<std::vector<double>> gradients(std::size_t t, const WeightVector& u,
                                             const WeightVector& v) const {
    double r = -c_rounds[t];
    for (std::size_t i = 0; i < u.size(); ++i) r += a_rounds[t][i] * u[i];
    for (std::size_t i = 0; i < v.size(); ++i) r += b_rounds[t][i] * v[i];
    std::vector<double> ga(u.size()), gb(v.size());
    for (std::size_t i = 0; i < u.size(); ++i) ga[i] = 2.0 * scales[t] * r * a_rounds[t][i];
    for (std::size_t i = 0; i < v.size(); ++i) gb[i] = 2.0 * scales[t] * r * b_rounds[t][i];
    return {ga, gb};
  }

  double vertex_minimum(std::size_t n1, std::size_t n2) const {
    double best = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < n1; ++i) {
      for (std::size_t j = 0; j < n2; ++j) {
        double total = 0.0;
        for (std::size_t t = 0; t < c_rounds.size(); ++t) {
          const double r = a_rounds[t][i] + b_rounds[t][j] - c_rounds[t];
          total += scales[t] * r * r;
        }
        best = std::min(best, total);
      }
    }
    return best;
  }
};

}  // namespace

TEST_CASE("horizon-tuned and adaptive runs stay under their bounds") {
  const std::size_t n1 = 4, n2 = 8, horizon = 200;
  const double g1 = 1.0, g2 = 2.0;
  SplitMix64 rng(32);
  for (int trial = 0; trial < 5; ++trial) {
    const QuadraticStream stream =
        QuadraticStream::make(rng, n1, n2, g1, g2, horizon, trial % 2 == 0 ? 1.0 : 0.4);

    std::vector<BlockSpec> fixed_specs = {
        BlockSpec::fixed(n1, g1, fixed_eta(n1, horizon, g1)),
        BlockSpec::fixed(n2, g2, fixed_eta(n2, horizon, g2))};
    std::vector<BlockSpec> adaptive_specs = {BlockSpec::adaptive_block(n1, g1),
                                             BlockSpec::adaptive_block(n2, g2)};
    MegState fixed = meg_init(fixed_specs);
    MegState adaptive = meg_init(adaptive_specs);
    double fixed_loss = 0.0, adaptive_loss = 0.0;
    for (std::size_t t = 0; t < horizon; ++t) {
      const auto wf = meg_weights(fixed);
      fixed_loss += stream.loss(t, wf[0], wf[1]);
      meg_observe(fixed, stream.gradients(t, wf[0], wf[1]));

      const auto wa = meg_weights(adaptive);
      adaptive_loss += stream.loss(t, wa[0], wa[1]);
      meg_observe(adaptive, stream.gradients(t, wa[0], wa[1]));
    }
    const double comparator = stream.vertex_minimum(n1, n2);
    CHECK(fixed.blocks[0].max_observed_grad <= g1 + 1e-12);
    CHECK(fixed.blocks[1].max_observed_grad <= g2 + 1e-12);
    CHECK(fixed_loss - comparator <= meg_regret_bound(fixed_specs, horizon) + 1e-9);
    CHECK(adaptive_loss - comparator <=
          adaptive_regret_bound(adaptive_specs, {adaptive.blocks[0].active_rounds,
                                                 adaptive.blocks[1].active_rounds}) +
              1e-9);
  }
}
