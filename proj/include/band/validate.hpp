#pragma once

#include <functional>
#include <string>
#include <vector>

namespace band::validate {

struct Check {
  std::string name;
  bool passed = false;
  std::string detail;
};

struct Report {
  std::vector<Check> checks;

  int failures() const {
    int f = 0;
    for (const auto& c : checks) f += c.passed ? 0 : 1;
    return f;
  }
  bool all_passed() const { return failures() == 0; }
};

using Logger = std::function<void(const std::string&)>;

/**
 * Built-in cross-check battery: derivative implementations against finite
 * differences, transport against its convergence order, serialization round
 * trips, discrete statics identities, plus a negative control (a deliberately
 * corrupted gradient that the battery must catch, proving it can fail).
 * full = false trims iteration counts for a fast smoke run. The logger, when
 * set, receives one line per check.
 */
Report run(bool full = false, const Logger& log = {});

}  // namespace band::validate
