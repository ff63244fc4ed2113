#include "chainreg/experiment.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <map>
#include <set>
#include <sstream>
#include <stdexcept>

#include "chainreg/chaining.hpp"
#include "chainreg/dyadic_lipschitz.hpp"
#include "chainreg/errors.hpp"
#include "chainreg/ewa.hpp"
#include "chainreg/nested_holder.hpp"

namespace chainreg {

Algorithm parse_algorithm(const std::string& name) {
  if (name == "chaining_ewa") return Algorithm::chaining_ewa;
  if (name == "dyadic_lipschitz") return Algorithm::dyadic_lipschitz;
  if (name == "nested_holder") return Algorithm::nested_holder;
  if (name == "ewa_baseline") return Algorithm::ewa_baseline;
  throw std::invalid_argument("unknown algorithm: " + name);
}

std::string to_string(Algorithm a) {
  switch (a) {
    case Algorithm::chaining_ewa: return "chaining_ewa";
    case Algorithm::dyadic_lipschitz: return "dyadic_lipschitz";
    case Algorithm::nested_holder: return "nested_holder";
    case Algorithm::ewa_baseline: return "ewa_baseline";
  }
  throw std::invalid_argument("unknown algorithm");
}

namespace {

std::string trim(const std::string& s) {
  const auto begin = s.find_first_not_of(" \t\r");
  if (begin == std::string::npos) return "";
  const auto end = s.find_last_not_of(" \t\r");
  return s.substr(begin, end - begin + 1);
}

}  // namespace

ExperimentConfig parse_experiment_config(std::istream& is) {
  ExperimentConfig config;
  std::set<std::string> seen;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(is, line)) {
    ++line_no;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw std::invalid_argument("config line " + std::to_string(line_no) +
                                  ": expected 'key = value'");
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    seen.insert(key);

    if (key == "algorithm") {
      config.algorithm = parse_algorithm(value);
    } else if (key == "class.b") {
      config.b = std::stod(value);
    } else if (key == "class.q") {
      config.q = std::stoi(value);
    } else if (key == "class.alpha") {
      config.alpha = std::stod(value);
    } else if (key == "class.lambda") {
      config.lambda = std::stod(value);
    } else if (key == "horizons") {
      std::stringstream ss(value);
      std::size_t t;
      config.horizons.clear();
      while (ss >> t) config.horizons.push_back(t);
    } else if (key == "generator.kind") {
      config.generator.kind = parse_sequence_kind(value);
    } else if (key == "generator.seed") {
      config.generator.seed = std::stoull(value);
    } else if (key == "oracle.dp_grid_h") {
      config.oracle.dp_grid_h = std::stod(value);
    } else if (key == "oracle.finite_cap") {
      config.oracle.finite_cap = std::stoull(value);
    } else if (key == "output_path") {
      config.output_path = value;
    } else {
      throw std::invalid_argument("config: unknown key '" + key + "'");
    }
  }
  for (const char* required : {"algorithm", "class.b", "horizons", "generator.kind",
                               "generator.seed", "output_path"}) {
    if (!seen.count(required))
      throw std::invalid_argument(std::string("config: missing key '") + required + "'");
  }
  if (config.horizons.empty()) throw std::invalid_argument("config: horizons is empty");
  for (std::size_t i = 1; i < config.horizons.size(); ++i)
    if (config.horizons[i] <= config.horizons[i - 1])
      throw std::invalid_argument("config: horizons must be strictly increasing");
  if (!(config.b > 0.0)) throw std::invalid_argument("config: class.b must be positive");
  config.generator.q = config.q;
  config.generator.alpha = config.alpha;
  config.generator.lambda = config.lambda;
  return config;
}

ExperimentConfig load_experiment_config(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw std::invalid_argument("cannot open config file: " + path);
  return parse_experiment_config(is);
}

namespace {

// Symmetric constants grid on [-b, b]; a finite family for the generic
// chaining forecaster and the plain EWA baseline.
FunctionFamily constants_family(double b, double spacing, std::size_t cap) {
  const std::size_t n =
      static_cast<std::size_t>(std::ceil(2.0 * b / spacing)) + 1;
  FunctionFamily family;
  family.sup_bound = b;
  family.probes = {0.0};
  family.cardinality_cap = cap;
  family.members.reserve(n);
  for (std::size_t j = 0; j < n; ++j) {
    const double value = -b + 2.0 * b * static_cast<double>(j) / static_cast<double>(n - 1);
    family.members.push_back([value](double) { return value; });
  }
  return family;
}

std::uint64_t horizon_seed(std::uint64_t base, std::size_t horizon) {
  SplitMix64 mix(base ^ (0x9e3779b97f4a7c15ULL * static_cast<std::uint64_t>(horizon)));
  return mix.next();
}

RegretTrace run_one(const ExperimentConfig& config, std::size_t horizon) {
  GeneratorSpec gen = config.generator;
  gen.seed = horizon_seed(config.generator.seed, horizon);
  const RoundData data = generate_sequence(gen, horizon, config.b);

  RegretTrace trace;
  trace.rows.reserve(horizon);
  trace.summary.horizon = horizon;
  trace.summary.algorithm = to_string(config.algorithm);
  trace.summary.seed = gen.seed;

  double cum_loss = 0.0;
  auto record = [&](std::size_t t, const Sample& s, double prediction) {
    const double loss = (s.y - prediction) * (s.y - prediction);
    cum_loss += loss;
    trace.rows.push_back({t, s.x, s.y, prediction, loss, cum_loss});
  };

  switch (config.algorithm) {
    case Algorithm::dyadic_lipschitz: {
      DyadicLipschitzForecaster forecaster(config.b, horizon);
      for (std::size_t t = 0; t < horizon; ++t) {
        const Sample& s = data.samples[t];
        record(t + 1, s, forecaster.predict(s.x));
        forecaster.observe(s.x, s.y);
      }
      const double h = config.oracle.dp_grid_h > 0.0 ? config.oracle.dp_grid_h
                                                     : forecaster.config().gamma / 8.0;
      const OracleResult oracle = best_lipschitz_dp(data, config.b, 1.0, h);
      trace.summary.oracle_loss = oracle.best_loss;
      trace.summary.certified_gap = oracle.certified_gap;
      trace.summary.regret = empirical_regret(cum_loss, oracle);
      trace.summary.theoretical_bound = dyadic_regret_bound(config.b, horizon);
      trace.summary.touched_weights_total = forecaster.total_touched_weights();
      break;
    }
    case Algorithm::nested_holder: {
      if (config.q != 0 || config.alpha != 1.0)
        throw std::invalid_argument(
            "nested_holder experiments use q = 0, alpha = 1 (the class then embeds in "
            "lambda-Lipschitz functions and the DP comparator applies)");
      NestedHolderForecaster forecaster(
          holder_tuned_config(config.q, config.alpha, config.lambda, config.b, horizon,
                                1000000));
      for (std::size_t t = 0; t < horizon; ++t) {
        const Sample& s = data.samples[t];
        record(t + 1, s, forecaster.predict(s.x));
        forecaster.observe(s.x, s.y);
      }
      const double gamma = forecaster.config().net.gamma;
      const double h =
          config.oracle.dp_grid_h > 0.0 ? config.oracle.dp_grid_h : gamma / 8.0;
      const OracleResult oracle = best_lipschitz_dp(data, config.b, config.lambda, h);
      trace.summary.oracle_loss = oracle.best_loss;
      trace.summary.certified_gap = oracle.certified_gap;
      trace.summary.regret = empirical_regret(cum_loss, oracle);
      trace.summary.theoretical_bound = holder_regret_bound(forecaster.config());
      trace.summary.touched_weights_total = forecaster.total_touched_weights();
      break;
    }
    case Algorithm::chaining_ewa: {
      const double gamma = config.b * std::pow(static_cast<double>(horizon), -1.0 / 3.0);
      const int k = chaining_levels(config.b, gamma, horizon);
      const double spacing = gamma / std::pow(2.0, static_cast<double>(k));
      const FunctionFamily family = constants_family(config.b, spacing, 4096);
      const ExplicitNets nets = build_explicit_nets(family, gamma, k);
      ChainingForecaster forecaster(
          make_chaining_config(config.b, gamma, horizon, nets.f0, nets.increments));
      for (std::size_t t = 0; t < horizon; ++t) {
        const Sample& s = data.samples[t];
        record(t + 1, s, forecaster.predict(s.x));
        forecaster.observe(s.x, s.y);
      }
      const OracleResult oracle = best_chained_finite(nets.f0, nets.increments, data,
                                                      config.oracle.finite_cap);
      trace.summary.oracle_loss = oracle.best_loss;
      trace.summary.certified_gap = oracle.certified_gap;
      trace.summary.regret = empirical_regret(cum_loss, oracle);
      trace.summary.theoretical_bound =
          chaining_regret_quantities(forecaster.config()).proof_bound;
      std::size_t per_round = nets.f0.functions.size();
      for (const auto& level : nets.increments)
        per_round += nets.f0.functions.size() * level.functions.size();
      trace.summary.touched_weights_total = per_round * horizon;
      break;
    }
    case Algorithm::ewa_baseline: {
      const double gamma = config.b * std::pow(static_cast<double>(horizon), -1.0 / 3.0);
      const FunctionFamily family = constants_family(config.b, gamma, 1 << 20);
      std::vector<double> expert_values(family.members.size());
      for (std::size_t j = 0; j < family.members.size(); ++j)
        expert_values[j] = family.members[j](0.0);
      // Predictions stay in [-b, b], so 1/(2(2b)^2) keeps the loss exp-concave.
      const double eta = 1.0 / (8.0 * config.b * config.b);
      EwaState state = ewa_init(expert_values.size(), eta);
      std::vector<double> losses(expert_values.size());
      for (std::size_t t = 0; t < horizon; ++t) {
        const Sample& s = data.samples[t];
        const WeightVector w = ewa_weights(state);
        double prediction = 0.0;
        for (std::size_t j = 0; j < w.size(); ++j) prediction += w[j] * expert_values[j];
        record(t + 1, s, prediction);
        for (std::size_t j = 0; j < losses.size(); ++j) {
          const double r = s.y - expert_values[j];
          losses[j] = r * r;
        }
        ewa_observe(state, losses);
      }
      FiniteFunctionClass cls;
      cls.functions = family.members;
      cls.sup_bound = config.b;
      const OracleResult oracle = best_finite(cls, data);
      trace.summary.oracle_loss = oracle.best_loss;
      trace.summary.certified_gap = oracle.certified_gap;
      trace.summary.regret = empirical_regret(cum_loss, oracle);
      trace.summary.theoretical_bound =
          std::log(static_cast<double>(expert_values.size())) / eta;
      trace.summary.touched_weights_total = expert_values.size() * horizon;
      break;
    }
  }
  return trace;
}

}  // namespace

std::vector<RegretTrace> run_experiment(const ExperimentConfig& config) {
  if (config.horizons.empty()) throw std::invalid_argument("run_experiment: no horizons");
  std::vector<RegretTrace> traces;
  for (std::size_t horizon : config.horizons) {
    try {
      traces.push_back(run_one(config, horizon));
    } catch (const resource_error& e) {
      throw resource_error("T=" + std::to_string(horizon) + ": " + e.what());
    }
  }

  if (!config.output_path.empty()) {
    const std::filesystem::path base(config.output_path);
    if (base.has_parent_path()) std::filesystem::create_directories(base.parent_path());
    for (const RegretTrace& trace : traces) {
      std::ofstream os(config.output_path + "_T" + std::to_string(trace.summary.horizon) +
                       ".csv");
      if (!os) throw std::runtime_error("cannot write trace csv");
      write_trace_csv(os, trace.rows);
    }
    std::ofstream os(config.output_path + "_summary.txt");
    if (!os) throw std::runtime_error("cannot write summary");
    for (const RegretTrace& trace : traces) write_summary_block(os, trace.summary);
  }
  return traces;
}

RateModel fit_rate(const std::vector<std::pair<double, double>>& points,
                   std::size_t* excluded_count) {
  std::vector<std::pair<double, double>> logs;
  std::size_t excluded = 0;
  for (const auto& [t, regret] : points) {
    if (!(t > 0.0) || !(regret > 0.0)) {
      ++excluded;
      continue;
    }
    logs.emplace_back(std::log(t), std::log(regret));
  }
  if (excluded_count != nullptr) *excluded_count = excluded;
  if (logs.size() < 2)
    throw std::invalid_argument("fit_rate: need at least two points with positive regret");
  double mx = 0.0, my = 0.0;
  for (const auto& [lx, ly] : logs) {
    mx += lx;
    my += ly;
  }
  mx /= static_cast<double>(logs.size());
  my /= static_cast<double>(logs.size());
  double sxx = 0.0, sxy = 0.0;
  for (const auto& [lx, ly] : logs) {
    sxx += (lx - mx) * (lx - mx);
    sxy += (lx - mx) * (ly - my);
  }
  if (sxx == 0.0) throw std::invalid_argument("fit_rate: all horizons identical");
  RateModel model;
  model.exponent = sxy / sxx;
  model.constant = std::exp(my - model.exponent * mx);
  return model;
}

}  // namespace chainreg
