#ifndef CHAINREG_FUNCTION_NETS_HPP
#define CHAINREG_FUNCTION_NETS_HPP

#include <cstddef>
#include <functional>
#include <vector>

namespace chainreg {

using RealFunction = std::function<double(double)>;

// A finite, evaluable function class with a declared sup-norm cap.
struct FiniteFunctionClass {
  std::vector<RealFunction> functions;
  double sup_bound = 0.0;
};

// Uniform value grid {lo + j*step : j = 0..count-1}.
struct GridSpec {
  double lo = 0.0;
  double step = 0.0;
  std::size_t count = 0;
  double value(std::size_t j) const { return lo + static_cast<double>(j) * step; }
};

// Nearest grid value, ties resolved toward the lower value.
double grid_round_ties_down(double v, const GridSpec& grid);

// 1-based (interval, level-m child) pair.
struct CellIndex {
  std::size_t interval = 0;
  std::size_t cell = 0;
};

// ---------------------------------------------------------------------------
// Piecewise-constant dyadic nets for 1-Lipschitz functions on [0,1].

struct LipschitzNetConfig {
  double b = 0.0;
  double gamma = 0.0;
  int levels = 0;              // M
  std::size_t intervals = 0;   // ceil(1/gamma)
  GridSpec value_grid;         // {-B + j*gamma}
  bool gamma_clamped = false;  // gamma fell outside (b/horizon, b] and was clamped
};

// Derives interval count and value grid. gamma outside (b/horizon, b] is
// clamped into range and flagged. horizon == 0 skips the lower check.
LipschitzNetConfig make_lipschitz_net_config(double b, double gamma, int levels,
                                             std::size_t horizon = 0);

// Locates x in the level-m partition: interval a with I_a = [(a-1)g, a*g)
// (last interval closed at 1) and the 2^m-ary child cell containing x.
// Throws std::domain_error outside [0,1].
CellIndex lipschitz_cell_index(double x, const LipschitzNetConfig& config, int m);

// Center of the level-m cell, shifted to the midpoint of cell ∩ [0,1] when a
// ceiling-extended interval sticks out past 1 (keeps Lipschitz drift bounds).
double lipschitz_cell_center(const LipschitzNetConfig& config, int m, std::size_t a,
                             std::size_t n);

// Coarse grid value per interval plus per-level per-cell increments.
struct ChainCoefficients {
  std::vector<double> c0;                                    // [a-1]
  std::vector<std::vector<std::vector<double>>> increments;  // [m-1][a-1][n-1]
};

struct LipschitzProjection {
  ChainCoefficients coeffs;
  double certified_sup_error = 0.0;
  bool certified = false;  // error <= lipschitz_net_error_bound + 1e-9
};

// gamma for M == 0, gamma/2^(M+1) for M >= 1.
double lipschitz_net_error_bound(const LipschitzNetConfig& config, int m_max);

// Rounds f at interval centers onto the value grid (ties down), then picks
// increments so the partial sums interpolate f at every cell center down to
// level m_max. Certifies the sup error on a dense probe grid
// (64 * 2^m_max points per interval); certification failure signals an input
// that was not 1-Lipschitz / B-bounded.
LipschitzProjection project_lipschitz(const RealFunction& f, const LipschitzNetConfig& config,
                                      int m_max);

double evaluate_chain(const ChainCoefficients& coeffs, const LipschitzNetConfig& config,
                      int m_max, double x);

// ---------------------------------------------------------------------------
// Clipped-polynomial nets for Hölder classes.

struct ClippedPolynomial {
  double center = 0.0;
  std::vector<double> coefficients;  // a_0..a_q; term i is a_i/i! (x-center)^i
  double clip_bound = 0.0;

  double raw(double x) const;         // unclipped evaluation (nested form)
  double operator()(double x) const;  // clip(raw(x), clip_bound)
};

struct HolderNetConfig {
  int q = 0;
  double alpha = 1.0;
  double lambda = 1.0;
  double b = 0.0;
  double beta = 0.0;     // q + alpha
  double gamma = 0.0;
  double delta_x = 0.0;  // 2 (q! gamma / (2 lambda))^(1/beta)
  double delta_y = 0.0;  // gamma / e
  int levels = 0;        // M
  std::size_t intervals = 0;  // ceil(1/delta_x)
};

// Computes beta, delta_x, delta_y, interval count from the stated formulas.
// Requires beta >= 1/2.
HolderNetConfig make_holder_net_config(int q, double alpha, double lambda, double b,
                                       double gamma, int levels);

// Y^(m) = {-B + j*delta_y/2^m : j = 0..ceil(2^(m+1) B/delta_y)}.
GridSpec holder_value_grid(const HolderNetConfig& config, int m);

// 4^m-ary nested partition of each interval.
CellIndex holder_cell_index(double x, const HolderNetConfig& config, int m);
double holder_cell_center(const HolderNetConfig& config, int m, std::size_t a, std::size_t n);

// Rounds the Taylor coefficients (derivative values at the cell center) onto
// Y^(m) with ties down; the polynomial is clipped at B.
ClippedPolynomial taylor_project_holder(const std::vector<double>& derivatives,
                                        const HolderNetConfig& config, int m, double center);

// Difference of clipped polynomials from consecutive levels, clipped again at
// 3*gamma/2^m.
struct ClippedPolyDiff {
  ClippedPolynomial fine;
  ClippedPolynomial coarse;
  double cap = 0.0;

  double operator()(double x) const;
};

ClippedPolyDiff q_increment(const ClippedPolynomial& p_m, const ClippedPolynomial& p_prev,
                            double gamma, int m);

// Full chain P^(0) + sum_m clipped level differences, built from derivative
// values supplied at cell centers; used to certify the net quality.
struct HolderChainProjection {
  std::vector<ClippedPolynomial> p0;                                   // [a-1]
  std::vector<std::vector<std::vector<ClippedPolynomial>>> p_level;    // [m-1][a-1][n-1]
};

using DerivativeProvider = std::function<std::vector<double>(double)>;  // f, f', .., f^(q)

HolderChainProjection project_holder_chain(const DerivativeProvider& derivatives_at,
                                           const HolderNetConfig& config, int m_max);

double evaluate_holder_chain(const HolderChainProjection& chain, const HolderNetConfig& config,
                             int m_max, double x);

// ---------------------------------------------------------------------------
// Explicit nets for finite families (the generic chaining forecaster input).

struct FunctionFamily {
  std::vector<RealFunction> members;
  std::vector<double> probes;  // sup distances are evaluated over these points
  double sup_bound = 0.0;
  std::size_t cardinality_cap = 4096;
};

struct ExplicitNets {
  FiniteFunctionClass f0;                        // proper gamma-net of the family
  std::vector<FiniteFunctionClass> increments;   // level k: {pi_k(f) - pi_(k-1)(f)}
  std::vector<std::size_t> net_sizes;            // |F^(k)|, k = 0..k_max
};

// Greedy proper covers at radii gamma/2^k; projections break argmin ties by
// first index. Throws resource_error when the family exceeds its cap.
ExplicitNets build_explicit_nets(const FunctionFamily& family, double gamma, int k_max);

}  // namespace chainreg

#endif
