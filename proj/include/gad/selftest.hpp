#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace gad {

struct SelfTestResult {
  std::string suite;
  bool passed = false;
  double max_error = 0.0;
  std::string detail;
};

// Gradient checks, Hungarian-vs-enumeration, metric-vs-brute-force and
// permutation properties; prints one line per suite.
std::vector<SelfTestResult> run_selftest(std::ostream& os);

}  // namespace gad
