#include "core/trace.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "core/bits.hpp"

namespace msplab {

void TrainingTrace::add(double time, double r, double se, std::vector<double> c) {
  if (!t.empty() && time <= t.back())
    throw std::logic_error("trace: record times must be strictly increasing");
  t.push_back(time);
  risk.push_back(r);
  stderr_.push_back(se);
  coeff.push_back(std::move(c));
}

double TrainingTrace::first_crossing(std::size_t col, double level) const {
  for (int i = 0; i < records(); ++i)
    if (coeff[i][col] >= level) return t[i];
  return -1.0;
}

double TrainingTrace::sup_gap(const TrainingTrace& other) const {
  int n = std::min(records(), other.records());
  std::size_t m = tracked.size();
  double g = 0.0;
  for (int i = 0; i < n; ++i)
    for (std::size_t j = 0; j < m; ++j)
      g = std::max(g, std::fabs(coeff[i][j] - other.coeff[i][j]));
  return g;
}

std::string format_double(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[40];
  auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

std::string trace_csv(const TrainingTrace& tr) {
  std::ostringstream out;
  out << "t,risk,stderr";
  for (auto m : tr.tracked) out << "," << set_column_label(m);
  out << "\n";
  for (int i = 0; i < tr.records(); ++i) {
    out << format_double(tr.t[i]) << "," << format_double(tr.risk[i]) << ","
        << format_double(tr.stderr_[i]);
    for (double c : tr.coeff[i]) out << "," << format_double(c);
    out << "\n";
  }
  return out.str();
}

void write_file(const std::string& path, const std::string& content) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error("cannot write " + path);
  f << content;
  if (!f.good()) throw std::runtime_error("write failed: " + path);
}

std::string read_file(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error("cannot read " + path);
  std::ostringstream s;
  s << f.rdbuf();
  return s.str();
}

std::string meta_text(const std::vector<std::pair<std::string, std::string>>& kv) {
  std::ostringstream out;
  for (const auto& [k, v] : kv) out << k << " = " << v << "\n";
  return out.str();
}

}  // namespace msplab
