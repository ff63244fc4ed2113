#ifndef CHAINREG_EXPERIMENT_HPP
#define CHAINREG_EXPERIMENT_HPP

#include <cstddef>
#include <iosfwd>
#include <string>
#include <utility>
#include <vector>

#include "chainreg/sequence_gen.hpp"
#include "chainreg/trace.hpp"

namespace chainreg {

enum class Algorithm { chaining_ewa, dyadic_lipschitz, nested_holder, ewa_baseline };

Algorithm parse_algorithm(const std::string& name);
std::string to_string(Algorithm a);

struct OracleSpec {
  double dp_grid_h = 0.0;  // 0: default gamma/8 for the active horizon
  std::size_t finite_cap = 1000000;
};

struct ExperimentConfig {
  Algorithm algorithm = Algorithm::dyadic_lipschitz;
  double b = 1.0;
  int q = 0;            // Hölder class parameters
  double alpha = 1.0;
  double lambda = 1.0;
  std::vector<std::size_t> horizons;  // strictly increasing
  GeneratorSpec generator;
  OracleSpec oracle;
  std::string output_path;
};

// Key-value text, one `key = value` per line, '#' comments, dotted keys for
// the nested fields (class.b, generator.kind, oracle.dp_grid_h, ...).
// Unknown keys are rejected.
ExperimentConfig parse_experiment_config(std::istream& is);
ExperimentConfig load_experiment_config(const std::string& path);

// One trace per horizon, forecaster tuned by that horizon's formulas. When
// output_path is nonempty, writes <output_path>_T<horizon>.csv per horizon
// and <output_path>_summary.txt ordered by horizon. Resource errors from
// submodules are rethrown with the offending horizon named.
std::vector<RegretTrace> run_experiment(const ExperimentConfig& config);

struct RateModel {
  double exponent = 0.0;  // slope of log(regret) on log(T)
  double constant = 0.0;  // exp(intercept)
};

// Least squares in log-log coordinates. Points with nonpositive regret are
// excluded (count reported via excluded_count when given); fewer than two
// remaining points is an error.
RateModel fit_rate(const std::vector<std::pair<double, double>>& points,
                   std::size_t* excluded_count = nullptr);

}  // namespace chainreg

#endif
