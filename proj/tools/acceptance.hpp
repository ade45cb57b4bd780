#pragma once

#include <string>
#include <vector>

namespace bistoch::acceptance {

struct CheckResult {
  int id = 0;
  std::string name;
  bool pass = false;
  std::string details;
};

/// Runs the quantitative acceptance checks (all of them, or the listed ids)
/// and returns one result per check. Checks share fixtures, so running the
/// full set is cheaper than the sum of individual runs.
std::vector<CheckResult> run_checks(const std::vector<int>& only = {});

}  // namespace bistoch::acceptance
