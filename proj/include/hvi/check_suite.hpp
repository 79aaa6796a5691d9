#ifndef HVI_CHECK_SUITE_HPP
#define HVI_CHECK_SUITE_HPP

#include <cstdint>
#include <string>
#include <vector>

namespace hvi {

struct CheckResult {
  std::string name;
  bool passed = false;
  std::string detail;
};

// Property suites over the problem zoo: prox nonexpansiveness and variational
// characterization, operator monotonicity/Lipschitz spot-checks, combined-prox
// consistency, the energy recursion, gap nonnegativity/convexity, and the
// weak-sharpness probes. `inject_fault` ("prox_clamp") adds a deliberately
// broken prox term to demonstrate the harness catches it.
std::vector<CheckResult> run_check_suite(uint64_t seed, const std::string& inject_fault = "");

}  // namespace hvi

#endif
