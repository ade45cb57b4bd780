// Acceptance runner: executes every quantitative check and prints one
// pass/fail line per criterion. Exits nonzero if any check fails.

#include <cstdio>
#include <cstring>
#include <string>
#include <vector>

#include "acceptance.hpp"

int main(int argc, char** argv) {
  std::vector<int> only;
  for (int i = 1; i < argc; ++i) {
    only.push_back(std::atoi(argv[i]));
  }
  const auto results = bistoch::acceptance::run_checks(only);
  int failed = 0;
  for (const auto& r : results) {
    std::printf("[%s] criterion %2d: %s — %s\n", r.pass ? "PASS" : "FAIL", r.id,
                r.name.c_str(), r.details.c_str());
    std::fflush(stdout);
    if (!r.pass) ++failed;
  }
  std::printf("%d/%zu criteria passed\n", static_cast<int>(results.size()) - failed,
              results.size());
  return failed == 0 ? 0 : 1;
}
