#include <doctest.h>

#include <cmath>
#include <limits>
#include <stdexcept>

#include "chainreg/errors.hpp"
#include "chainreg/function_nets.hpp"
#include "chainreg/rng.hpp"
#include "chainreg/sequence_gen.hpp"

using namespace chainreg;

TEST_CASE("lipschitz_cell_index") {
  const LipschitzNetConfig config = make_lipschitz_net_config(1.0, 0.25, 3);
  CHECK(config.intervals == 4);
  CHECK(config.value_grid.count == 9);

  CellIndex idx = lipschitz_cell_index(0.0, config, 1);
  CHECK(idx.interval == 1);
  CHECK(idx.cell == 1);

  for (int m : {0, 1, 2, 3}) {
    idx = lipschitz_cell_index(1.0, config, m);
    CHECK(idx.interval == 4);
    CHECK(idx.cell == static_cast<std::size_t>(1) << m);
  }

  idx = lipschitz_cell_index(0.30, config, 2);
  CHECK(idx.interval == 2);  // [0.25, 0.5)
  CHECK(idx.cell == 1);      // [0.25, 0.3125)

  CHECK_THROWS_AS(lipschitz_cell_index(-0.1, config, 1), std::domain_error);
  CHECK_THROWS_AS(lipschitz_cell_index(1.1, config, 1), std::domain_error);
}

TEST_CASE("level partition covers [0,1] exactly once") {
  const LipschitzNetConfig config = make_lipschitz_net_config(1.0, 0.25, 3);
  SplitMix64 rng(41);
  for (int m : {0, 1, 2, 3}) {
    const std::size_t cells = static_cast<std::size_t>(1) << m;
    for (int probe = 0; probe < 500; ++probe) {
      const double x = probe < 250 ? rng.next_double()
                                   : static_cast<double>(probe - 250) / 249.0;
      const CellIndex idx = lipschitz_cell_index(x, config, m);
      CHECK(idx.interval >= 1);
      CHECK(idx.interval <= config.intervals);
      CHECK(idx.cell >= 1);
      CHECK(idx.cell <= cells);
      // The named cell really contains x (right edge closed only at 1).
      const double width = config.gamma / static_cast<double>(cells);
      const double lo = static_cast<double>(idx.interval - 1) * config.gamma +
                        static_cast<double>(idx.cell - 1) * width;
      CHECK(x >= lo - 1e-12);
      if (x < 1.0) CHECK(x < lo + width + 1e-12);
    }
  }
}

TEST_CASE("gamma clamping") {
  const LipschitzNetConfig high = make_lipschitz_net_config(1.0, 5.0, 0);
  CHECK(high.gamma == 1.0);
  CHECK(high.gamma_clamped);
  const LipschitzNetConfig low = make_lipschitz_net_config(1.0, 1e-9, 0, 100);
  CHECK(low.gamma > 1.0 / 100);
  CHECK(low.gamma_clamped);
  const LipschitzNetConfig fine = make_lipschitz_net_config(1.0, 0.25, 2, 100);
  CHECK(!fine.gamma_clamped);
}

TEST_CASE("project_lipschitz on the zero function") {
  const LipschitzNetConfig config = make_lipschitz_net_config(1.0, 0.25, 2);
  const LipschitzProjection p = project_lipschitz([](double) { return 0.0; }, config, 2);
  CHECK(p.certified);
  CHECK(p.certified_sup_error == 0.0);
  for (double c : p.coeffs.c0) CHECK(c == 0.0);
  for (const auto& level : p.coeffs.increments)
    for (const auto& interval : level)
      for (double c : interval) CHECK(c == 0.0);
}

TEST_CASE("project_lipschitz hand-run: f(x) = x - 1/2, gamma = 1/2, M = 1") {
  const LipschitzNetConfig config = make_lipschitz_net_config(1.0, 0.5, 1);
  const LipschitzProjection p =
      project_lipschitz([](double x) { return x - 0.5; }, config, 1);
  // f(0.25) = -0.25 ties between -0.5 and 0; ties-down picks -0.5.
  CHECK(p.coeffs.c0[0] == -0.5);
  // f(0.75) = 0.25 ties between 0 and 0.5; ties-down picks 0.
  CHECK(p.coeffs.c0[1] == 0.0);
  // Increments re-center at the child midpoints 0.125, 0.375, 0.625, 0.875.
  CHECK(p.coeffs.increments[0][0][0] == doctest::Approx(0.125).epsilon(1e-13));
  CHECK(p.coeffs.increments[0][0][1] == doctest::Approx(0.375).epsilon(1e-13));
  CHECK(p.coeffs.increments[0][1][0] == doctest::Approx(0.125).epsilon(1e-13));
  CHECK(p.coeffs.increments[0][1][1] == doctest::Approx(0.375).epsilon(1e-13));
  CHECK(p.certified);
  CHECK(p.certified_sup_error <= 0.5 / 4 + 1e-12);
}

TEST_CASE("random 1-Lipschitz functions certify at every level") {
  const double gamma = 0.25, b = 1.0;
  SplitMix64 rng(42);
  for (int m_max = 0; m_max <= 3; ++m_max) {
    const LipschitzNetConfig config = make_lipschitz_net_config(b, gamma, m_max);
    const double bound = lipschitz_net_error_bound(config, m_max);
    CHECK(bound == (m_max == 0 ? gamma : gamma / std::pow(2.0, m_max + 1)));
    for (int trial = 0; trial < 50; ++trial) {
      const PiecewisePoly f = random_piecewise_linear(rng, b, 1.0, 16);
      const LipschitzProjection p =
          project_lipschitz([&](double x) { return f(x); }, config, m_max);
      CHECK(p.certified);
      CHECK(p.certified_sup_error <= bound + 1e-9);
      // Increment magnitudes stay within the per-level caps.
      for (int m = 1; m <= m_max; ++m) {
        const double cap = gamma / std::pow(2.0, m - 1);
        for (const auto& interval : p.coeffs.increments[m - 1])
          for (double c : interval) CHECK(std::abs(c) <= cap + 1e-12);
      }
    }
  }
}

TEST_CASE("holder net config formulas") {
  const HolderNetConfig q0 = make_holder_net_config(0, 1.0, 1.0, 1.0, 0.25, 4);
  CHECK(q0.beta == 1.0);
  CHECK(q0.delta_x == doctest::Approx(0.25).epsilon(1e-12));  // 2*(gamma/2)
  CHECK(q0.delta_y == doctest::Approx(0.25 / std::exp(1.0)).epsilon(1e-12));
  CHECK(q0.intervals == 4);
  CHECK(holder_value_grid(q0, 0).count == 23);

  CHECK_THROWS_AS(make_holder_net_config(0, 0.25, 1.0, 1.0, 0.25, 1), std::invalid_argument);
}

TEST_CASE("holder nesting: level-m cells sit inside their level-(m-1) parent") {
  const HolderNetConfig config = make_holder_net_config(1, 1.0, 1.0, 1.0, 0.5, 2);
  SplitMix64 rng(43);
  for (int probe = 0; probe < 400; ++probe) {
    const double x = rng.next_double();
    for (int m = 2; m <= config.levels; ++m) {
      const CellIndex child = holder_cell_index(x, config, m);
      const CellIndex parent = holder_cell_index(x, config, m - 1);
      CHECK(child.interval == parent.interval);
      CHECK((child.cell - 1) / 4 + 1 == parent.cell);
    }
  }
}

TEST_CASE("taylor_project_holder") {
  const GridSpec grid{-1.0, 0.25, 9};
  CHECK(grid_round_ties_down(0.30, grid) == 0.25);
  CHECK(grid_round_ties_down(-0.20, grid) == -0.25);
  CHECK(grid_round_ties_down(0.125, grid) == 0.0);  // tie resolved down

  // Coefficients already on the grid are fixed points of the rounding.
  const HolderNetConfig config = make_holder_net_config(1, 1.0, 1.0, 1.0, 0.25, 1);
  const GridSpec y0 = holder_value_grid(config, 0);
  const std::vector<double> derivs = {y0.value(3), y0.value(7)};
  const ClippedPolynomial p = taylor_project_holder(derivs, config, 0, 0.5);
  CHECK(p.coefficients[0] == derivs[0]);
  CHECK(p.coefficients[1] == derivs[1]);

  // q = 0 reduces to rounding a single constant.
  const HolderNetConfig c0 = make_holder_net_config(0, 1.0, 1.0, 1.0, 0.25, 1);
  const ClippedPolynomial constant = taylor_project_holder({0.3}, c0, 0, 0.5);
  CHECK(constant.coefficients.size() == 1);
  CHECK(constant(0.9) == constant(0.1));
}

TEST_CASE("clipped polynomial evaluation") {
  const ClippedPolynomial p{0.5, {0.25, -0.25}, 1.0};
  CHECK(p.raw(0.5) == 0.25);
  CHECK(p.raw(0.9) == doctest::Approx(0.25 - 0.25 * 0.4).epsilon(1e-13));
  const ClippedPolynomial big{0.0, {5.0}, 1.0};
  CHECK(big(0.3) == 1.0);
  // Degree-2 coefficient carries the 1/2! factor.
  const ClippedPolynomial quad{0.0, {0.0, 0.0, 2.0}, 10.0};
  CHECK(quad.raw(3.0) == doctest::Approx(9.0).epsilon(1e-13));
}

TEST_CASE("q_increment") {
  const ClippedPolynomial same{0.5, {0.4}, 1.0};
  const ClippedPolyDiff zero = q_increment(same, same, 1.0, 1);
  CHECK(zero(0.25) == 0.0);

  const ClippedPolynomial a{0.5, {0.4}, 1.0};
  const ClippedPolynomial b{0.5, {0.1}, 1.0};
  const ClippedPolyDiff d = q_increment(a, b, 1.0, 1);
  CHECK(d.cap == 1.5);
  CHECK(d(0.7) == doctest::Approx(0.3).epsilon(1e-13));

  const ClippedPolynomial far_apart{0.5, {1.0}, 1.0};
  const ClippedPolynomial low{0.5, {-1.0}, 1.0};
  const ClippedPolyDiff sat = q_increment(far_apart, low, 0.5, 1);  // cap 0.75
  CHECK(sat(0.2) == 0.75);
}

TEST_CASE("holder chain certifies gamma/2^M for constructed Hölder functions") {
  SplitMix64 rng(44);
  const double gamma = 0.25, b = 1.0;
  for (int m_max = 0; m_max <= 3; ++m_max) {
    const HolderNetConfig config = make_holder_net_config(0, 1.0, 1.0, b, gamma, m_max);
    const double bound = gamma / std::pow(2.0, m_max);
    for (int trial = 0; trial < 15; ++trial) {
      const PiecewisePoly f = random_piecewise_linear(rng, b, 1.0, 16);
      const HolderChainProjection chain = project_holder_chain(
          [&](double x) { return f.derivatives_at(x, 0); }, config, m_max);
      double err = 0.0;
      for (int i = 0; i < 4000; ++i) {
        const double x = (static_cast<double>(i) + 0.5) / 4000.0;
        err = std::max(err, std::abs(f(x) - evaluate_holder_chain(chain, config, m_max, x)));
      }
      CHECK(err <= bound + 1e-9);
    }
  }
}

TEST_CASE("holder chain with q = 1 targets") {
  SplitMix64 rng(45);
  const double b = 1.0, gamma = 0.5, lambda = 1.0;
  const HolderNetConfig config = make_holder_net_config(1, 1.0, lambda, b, gamma, 2);
  for (int trial = 0; trial < 5; ++trial) {
    GeneratorSpec spec;
    spec.kind = SequenceKind::holder_signal;
    spec.seed = rng.next();
    spec.q = 1;
    spec.lambda = lambda;
    const PiecewisePoly f = generator_target(spec, b);
    const HolderChainProjection chain = project_holder_chain(
        [&](double x) { return f.derivatives_at(x, 1); }, config, 2);
    double err = 0.0;
    for (int i = 0; i < 2000; ++i) {
      const double x = (static_cast<double>(i) + 0.5) / 2000.0;
      err = std::max(err, std::abs(f(x) - evaluate_holder_chain(chain, config, 2, x)));
    }
    CHECK(err <= gamma / 4.0 + 1e-9);
  }
}

TEST_CASE("build_explicit_nets") {
  SUBCASE("singleton family") {
    FunctionFamily family;
    family.members = {[](double) { return 0.3; }};
    family.probes = {0.0};
    family.sup_bound = 1.0;
    const ExplicitNets nets = build_explicit_nets(family, 0.5, 2);
    CHECK(nets.f0.functions.size() == 1);
    for (const auto& level : nets.increments) {
      CHECK(level.functions.size() == 1);
      CHECK(level.functions[0](0.0) == 0.0);
    }
  }

  SUBCASE("two distant constants: covering holds") {
    FunctionFamily family;
    family.members = {[](double) { return -1.0; }, [](double) { return 1.0; }};
    family.probes = {0.0};
    family.sup_bound = 1.0;
    const ExplicitNets nets = build_explicit_nets(family, 1.0, 0);
    for (const auto& member : family.members) {
      double best = std::numeric_limits<double>::infinity();
      for (const auto& g : nets.f0.functions)
        best = std::min(best, std::abs(member(0.0) - g(0.0)));
      CHECK(best <= 1.0);
    }
  }

  SUBCASE("16 grid constants vs brute-force minimal net") {
    const double step = 0.1, gamma = 4.0 * step;
    FunctionFamily family;
    for (int j = 0; j < 16; ++j) {
      const double v = static_cast<double>(j) * step;
      family.members.push_back([v](double) { return v; });
    }
    family.probes = {0.0};
    family.sup_bound = 2.0;
    const ExplicitNets nets = build_explicit_nets(family, gamma, 0);

    // Exhaustive search for the smallest proper cover of the 16 values.
    std::size_t minimal = 16;
    for (unsigned mask = 1; mask < (1u << 16); ++mask) {
      bool covers = true;
      for (int j = 0; j < 16 && covers; ++j) {
        bool found = false;
        for (int i = 0; i < 16 && !found; ++i)
          if ((mask >> i) & 1u)
            found = std::abs(static_cast<double>(i - j)) * step <= gamma + 1e-12;
        covers = found;
      }
      if (covers) minimal = std::min(minimal, static_cast<std::size_t>(__builtin_popcount(mask)));
    }
    CHECK(nets.f0.functions.size() == minimal);
  }

  SUBCASE("cardinality cap") {
    FunctionFamily family;
    for (int j = 0; j < 20; ++j) family.members.push_back([](double) { return 0.0; });
    family.probes = {0.0};
    family.cardinality_cap = 10;
    CHECK_THROWS_AS(build_explicit_nets(family, 0.5, 1), resource_error);
  }

  SUBCASE("increments respect the 3*gamma/2^k sup caps on probes") {
    SplitMix64 rng(46);
    FunctionFamily family;
    family.probes = {0.0, 0.25, 0.5, 0.75, 1.0};
    family.sup_bound = 1.0;
    for (int j = 0; j < 24; ++j) {
      const double v0 = rng.next_in(-1.0, 1.0), v1 = rng.next_in(-1.0, 1.0);
      family.members.push_back([v0, v1](double x) { return v0 + (v1 - v0) * x; });
    }
    const double gamma = 0.8;
    const ExplicitNets nets = build_explicit_nets(family, gamma, 3);
    for (std::size_t k = 1; k <= nets.increments.size(); ++k) {
      const double cap = 3.0 * gamma / std::pow(2.0, static_cast<double>(k));
      for (const auto& g : nets.increments[k - 1].functions)
        for (double p : family.probes) CHECK(std::abs(g(p)) <= cap + 1e-12);
    }
  }
}
