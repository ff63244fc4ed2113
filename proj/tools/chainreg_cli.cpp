// Command-line front end: run experiments from a config file, fit regret
// rates, or evaluate the offline Lipschitz comparator on a data file.
// Exit codes: 0 success, 2 resource cap exceeded, 1 any other failure.

#include <fstream>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "chainreg/errors.hpp"
#include "chainreg/experiment.hpp"
#include "chainreg/oracle.hpp"
#include "chainreg/trace.hpp"

int main(int argc, char** argv) {
  CLI::App app{"chainreg: online nonparametric regression benchmarks"};
  app.require_subcommand(1);

  std::string config_path;
  CLI::App* run = app.add_subcommand("run", "run an experiment from a config file");
  run->add_option("--config", config_path, "experiment config file")->required();

  std::string fit_input;
  CLI::App* fit = app.add_subcommand("fit", "fit a power law to (T, regret) points");
  fit->add_option("--input", fit_input, "csv with header T,regret")->required();

  std::string oracle_input;
  double oracle_b = 1.0, oracle_lip = 1.0, oracle_h = 0.01;
  CLI::App* oracle = app.add_subcommand("oracle", "best Lipschitz fit for a data file");
  oracle->add_option("--input", oracle_input, "csv with header x,y")->required();
  oracle->add_option("--b", oracle_b, "range bound B");
  oracle->add_option("--lipschitz", oracle_lip, "Lipschitz constant L");
  oracle->add_option("--grid-h", oracle_h, "value grid step h");

  CLI11_PARSE(app, argc, argv);

  try {
    if (run->parsed()) {
      const auto config = chainreg::load_experiment_config(config_path);
      const auto traces = chainreg::run_experiment(config);
      for (const auto& trace : traces) {
        chainreg::check_trace_consistency(trace);
        chainreg::write_summary_block(std::cout, trace.summary);
      }
    } else if (fit->parsed()) {
      std::ifstream is(fit_input);
      if (!is) throw std::runtime_error("cannot open " + fit_input);
      const auto points = chainreg::read_points_csv(is);
      std::size_t excluded = 0;
      const auto model = chainreg::fit_rate(points, &excluded);
      if (excluded > 0)
        std::cerr << "warning: excluded " << excluded << " nonpositive points\n";
      std::cout << "exponent = " << chainreg::format_g17(model.exponent) << '\n'
                << "constant = " << chainreg::format_g17(model.constant) << '\n';
    } else if (oracle->parsed()) {
      std::ifstream is(oracle_input);
      if (!is) throw std::runtime_error("cannot open " + oracle_input);
      const auto data = chainreg::read_xy_csv(is);
      const auto result = chainreg::best_lipschitz_dp(data, oracle_b, oracle_lip, oracle_h);
      std::cout << "best_loss = " << chainreg::format_g17(result.best_loss) << '\n'
                << "certified_gap = " << chainreg::format_g17(result.certified_gap) << '\n';
    }
  } catch (const chainreg::resource_error& e) {
    std::cerr << "resource error: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
