#ifndef CHAINREG_TRACE_HPP
#define CHAINREG_TRACE_HPP

#include <cstddef>
#include <iosfwd>
#include <string>
#include <utility>
#include <vector>

#include "chainreg/oracle.hpp"

namespace chainreg {

struct TraceRow {
  std::size_t t = 0;
  double x = 0.0;
  double y = 0.0;
  double prediction = 0.0;
  double loss = 0.0;
  double cum_loss = 0.0;
};

struct TraceSummary {
  std::size_t horizon = 0;
  std::string algorithm;
  std::uint64_t seed = 0;
  double oracle_loss = 0.0;
  double certified_gap = 0.0;
  double regret = 0.0;
  double theoretical_bound = 0.0;
  std::size_t touched_weights_total = 0;
};

struct RegretTrace {
  std::vector<TraceRow> rows;
  TraceSummary summary;
};

// 17 significant digits; round-trips any double.
std::string format_g17(double v);

// Columns t,x,y,prediction,loss,cum_loss with a mandatory header row.
void write_trace_csv(std::ostream& os, const std::vector<TraceRow>& rows);
std::vector<TraceRow> read_trace_csv(std::istream& is);

void write_summary_block(std::ostream& os, const TraceSummary& summary);

// Throws std::runtime_error when cum_loss is not the running sum of loss or
// the summary regret disagrees with its recomputation.
void check_trace_consistency(const RegretTrace& trace, double tolerance = 1e-9);

// Data files for the standalone oracle: header "x,y".
RoundData read_xy_csv(std::istream& is);
// Rate-fit inputs: header "T,regret".
std::vector<std::pair<double, double>> read_points_csv(std::istream& is);

}  // namespace chainreg

#endif
