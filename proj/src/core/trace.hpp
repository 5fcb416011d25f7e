#pragma once
// Time series emitted by training runs, with CSV + metadata sidecar output.
#include <cstdint>
#include <string>
#include <utility>
#include <vector>

namespace msplab {

struct TrainingTrace {
  std::vector<std::uint32_t> tracked;  // set masks, column order
  std::vector<double> t;
  std::vector<double> risk;
  std::vector<double> stderr_;             // 0 for exact risks
  std::vector<std::vector<double>> coeff;  // one row per record
  std::vector<std::string> warnings;
  bool diverged = false;

  int records() const { return static_cast<int>(t.size()); }
  void add(double time, double r, double se, std::vector<double> c);
  // per-set column: first time the coefficient reaches level, -1 if never
  double first_crossing(std::size_t col, double level) const;
  double sup_gap(const TrainingTrace& other) const;  // max over shared records/cols
};

std::string trace_csv(const TrainingTrace& tr);
void write_file(const std::string& path, const std::string& content);
std::string read_file(const std::string& path);

// structured-text sidecar: "key = value" lines
std::string meta_text(const std::vector<std::pair<std::string, std::string>>& kv);

std::string format_double(double v);  // shortest round-trip decimal

}  // namespace msplab
