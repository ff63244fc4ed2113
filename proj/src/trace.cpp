#include "chainreg/trace.hpp"

#include <cmath>
#include <cstdio>
#include <istream>
#include <ostream>
#include <sstream>
#include <stdexcept>

namespace chainreg {

std::string format_g17(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

void write_trace_csv(std::ostream& os, const std::vector<TraceRow>& rows) {
  os << "t,x,y,prediction,loss,cum_loss\n";
  for (const TraceRow& r : rows) {
    os << r.t << ',' << format_g17(r.x) << ',' << format_g17(r.y) << ','
       << format_g17(r.prediction) << ',' << format_g17(r.loss) << ','
       << format_g17(r.cum_loss) << '\n';
  }
}

namespace {

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> fields;
  std::stringstream ss(line);
  std::string field;
  while (std::getline(ss, field, ',')) fields.push_back(field);
  return fields;
}

}  // namespace

std::vector<TraceRow> read_trace_csv(std::istream& is) {
  std::string line;
  if (!std::getline(is, line) || line.rfind("t,x,y,prediction,loss,cum_loss", 0) != 0)
    throw std::runtime_error("trace csv: missing header");
  std::vector<TraceRow> rows;
  while (std::getline(is, line)) {
    if (line.empty()) continue;
    const auto fields = split_csv_line(line);
    if (fields.size() != 6) throw std::runtime_error("trace csv: malformed row");
    TraceRow r;
    r.t = static_cast<std::size_t>(std::stoull(fields[0]));
    r.x = std::stod(fields[1]);
    r.y = std::stod(fields[2]);
    r.prediction = std::stod(fields[3]);
    r.loss = std::stod(fields[4]);
    r.cum_loss = std::stod(fields[5]);
    rows.push_back(r);
  }
  return rows;
}

void write_summary_block(std::ostream& os, const TraceSummary& s) {
  os << "T = " << s.horizon << '\n'
     << "algorithm = " << s.algorithm << '\n'
     << "seed = " << s.seed << '\n'
     << "oracle_loss = " << format_g17(s.oracle_loss) << '\n'
     << "certified_gap = " << format_g17(s.certified_gap) << '\n'
     << "regret = " << format_g17(s.regret) << '\n'
     << "theoretical_bound = " << format_g17(s.theoretical_bound) << '\n'
     << "touched_weights_total = " << s.touched_weights_total << '\n'
     << "bound_satisfied = " << (s.regret <= s.theoretical_bound ? 1 : 0) << '\n'
     << '\n';
}

void check_trace_consistency(const RegretTrace& trace, double tolerance) {
  double running = 0.0;
  for (const TraceRow& r : trace.rows) {
    running += r.loss;
    if (std::abs(running - r.cum_loss) > tolerance)
      throw std::runtime_error("trace: cum_loss is not the running sum of loss");
  }
  const double regret =
      running - (trace.summary.oracle_loss - trace.summary.certified_gap);
  if (std::abs(regret - trace.summary.regret) > tolerance)
    throw std::runtime_error("trace: summary regret does not match recomputation");
}

RoundData read_xy_csv(std::istream& is) {
  std::string line;
  if (!std::getline(is, line) || line.rfind("x,y", 0) != 0)
    throw std::runtime_error("data csv: expected header 'x,y'");
  RoundData data;
  while (std::getline(is, line)) {
    if (line.empty()) continue;
    const auto fields = split_csv_line(line);
    if (fields.size() != 2) throw std::runtime_error("data csv: malformed row");
    data.samples.push_back({std::stod(fields[0]), std::stod(fields[1])});
  }
  return data;
}

std::vector<std::pair<double, double>> read_points_csv(std::istream& is) {
  std::string line;
  if (!std::getline(is, line) || line.rfind("T,regret", 0) != 0)
    throw std::runtime_error("points csv: expected header 'T,regret'");
  std::vector<std::pair<double, double>> points;
  while (std::getline(is, line)) {
    if (line.empty()) continue;
    const auto fields = split_csv_line(line);
    if (fields.size() != 2) throw std::runtime_error("points csv: malformed row");
    points.emplace_back(std::stod(fields[0]), std::stod(fields[1]));
  }
  return points;
}

}  // namespace chainreg
