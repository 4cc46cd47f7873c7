#ifndef FRACGRAD_SELFCHECK_HPP
#define FRACGRAD_SELFCHECK_HPP

#include <string>
#include <vector>

namespace fracgrad {

struct SelfCheckOptions {
  // Test hook: perturbs the gradient multiplier so the gradient/divergence
  // duality check must fail. Proves the suite can detect a broken operator.
  bool corrupt_multiplier = false;
};

struct CheckResult {
  std::string name;
  bool passed = false;
  double measured = 0.0;  // the quantity compared against `bound`
  double bound = 0.0;
  std::string detail;
};

// Runs the module invariant suites at the default sizes (d=1 n=128 and
// d=2 n=64) and stops at the first violated tolerance. Pure computation;
// printing is the caller's concern.
std::vector<CheckResult> run_selfcheck(const SelfCheckOptions& opts = {});

bool all_passed(const std::vector<CheckResult>& results);

}  // namespace fracgrad

#endif
