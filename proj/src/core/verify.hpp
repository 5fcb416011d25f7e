#pragma once
// Named self-check registry behind `msplab verify`: quick runs the fast
// invariants of every module, full adds the paper-scale comparisons.
#include <string>
#include <vector>

namespace msplab {

enum class VerifyLevel { Quick, Full };

struct VerifyCheck {
  std::string name;
  bool pass = false;
  double seconds = 0.0;
  std::string detail;
};

struct VerifyResult {
  std::vector<VerifyCheck> checks;
  bool all_pass() const;
};

VerifyResult run_verify(VerifyLevel level);
std::string verify_report(const VerifyResult& r);

}  // namespace msplab
