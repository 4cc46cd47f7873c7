#include <chrono>
#include <string>

#include <doctest.h>

#include "fracgrad/selfcheck.hpp"

using namespace fracgrad;

TEST_SUITE("selfcheck") {

TEST_CASE("clean build passes every invariant inside the time budget") {
  const auto start = std::chrono::steady_clock::now();
  const std::vector<CheckResult> results = run_selfcheck();
  const double seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();

  REQUIRE(!results.empty());
  for (const CheckResult& r : results) {
    INFO(r.name, ": measured=", r.measured, " bound=", r.bound, " ", r.detail);
    CHECK(r.passed);
  }
  CHECK(all_passed(results));
  CHECK(results.size() >= 20);  // every module contributes several invariants
  CHECK(seconds <= 60.0);
}

TEST_CASE("fault injection is caught, and the suite stops there") {
  SelfCheckOptions opts;
  opts.corrupt_multiplier = true;
  const std::vector<CheckResult> results = run_selfcheck(opts);
  REQUIRE(!results.empty());
  CHECK(!all_passed(results));
  // the run stops at the first violated tolerance...
  CHECK(!results.back().passed);
  for (std::size_t i = 0; i + 1 < results.size(); ++i) CHECK(results[i].passed);
  // ...and that failure is the gradient/divergence duality check
  CHECK(results.back().name.find("duality") != std::string::npos);
}

}  // TEST_SUITE
