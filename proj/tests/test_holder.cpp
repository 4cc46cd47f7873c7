#include <cmath>
#include <vector>

#include <doctest.h>

#include "fracgrad/grid.hpp"
#include "fracgrad/holder.hpp"
#include "fracgrad/numerics.hpp"

using namespace fracgrad;

namespace {

constexpr double kPi = 3.14159265358979323846;

GridSpec make_spec(int n) {
  GridSpec spec;
  spec.d = 1;
  spec.n = n;
  spec.L = 1.0;
  spec.validate();
  return spec;
}

Mask interval_mask(const GridSpec& spec, double lo, double hi) {
  Box b;
  b.lo = {lo, 0.0, 0.0};
  b.hi = {hi, 1.0, 1.0};
  return mask_from_box(spec, b);
}

// Dyadic ladder sized so the largest window stays within the sampling
// region's margin (the estimate mixes scaling regimes otherwise).
const std::vector<double> kRadii{0.05, 0.025, 0.0125, 0.00625};
const std::vector<double> kCoarseRadii{0.1, 0.05, 0.025, 0.0125};

}  // namespace

TEST_SUITE("holder") {

TEST_CASE("local oscillation on a hand-checked ramp") {
  const GridSpec spec = make_spec(16);
  ScalarField f(spec);
  for (int i = 0; i < 16; ++i) f[static_cast<std::size_t>(i)] = static_cast<double>(i);
  // radius 2h around i = 8 covers lattice points 6..10: max - min = 4
  const MultiIndex center{8, 0, 0};
  CHECK(local_oscillation(f, center, 2.0 * spec.h()) == doctest::Approx(4.0));
  // radius below h or beyond L/2 is rejected
  CHECK_THROWS_AS(local_oscillation(f, center, 0.5 * spec.h()), ValidationError);
  CHECK_THROWS_AS(local_oscillation(f, center, 0.5), ValidationError);
}

TEST_CASE("power-law fit recovers exact exponents") {
  const std::vector<double> radii{0.1, 0.05, 0.025, 0.0125};
  std::vector<double> osc;
  for (double r : radii) osc.push_back(2.7 * std::pow(r, 0.7));
  const PowerFit fit = fit_power_law(radii, osc);
  CHECK(std::abs(fit.slope - 0.7) <= 1e-12);
  CHECK(std::abs(fit.r2 - 1.0) <= 1e-12);
}

TEST_CASE("square-root cusp calibrates to one half") {
  // |sin(pi (x - c)/L)|^{1/2} has a genuine 1/2-Holder cusp at x = c
  const GridSpec spec = make_spec(512);
  const ScalarField f = field_from_function(spec, [](const std::array<double, 3>& x, int) {
    return std::sqrt(std::abs(std::sin(kPi * (x[0] - 0.5))));
  });
  const HolderEstimate est = estimate_holder(f, interval_mask(spec, 0.45, 0.55), kRadii);
  CHECK(est.exponent >= 0.45);
  CHECK(est.exponent <= 0.55);
  CHECK(est.fit_quality >= 0.9);
  CHECK(est.note.empty());
  REQUIRE(est.radii.size() == 4);
  REQUIRE(est.oscillations.size() == 4);
}

TEST_CASE("smooth fields report exponent near one") {
  const GridSpec spec = make_spec(512);
  const ScalarField f = field_from_function(
      spec, [](const std::array<double, 3>& x, int) { return std::sin(2.0 * kPi * x[0]); });
  const HolderEstimate est = estimate_holder(f, interval_mask(spec, 0.30, 0.45), kRadii);
  CHECK(est.exponent >= 0.9);
  CHECK(est.fit_quality >= 0.9);
}

TEST_CASE("constant fields take the sentinel path") {
  const GridSpec spec = make_spec(256);
  const HolderEstimate est =
      estimate_holder(ScalarField(spec, 3.25), interval_mask(spec, 0.40, 0.60), kCoarseRadii);
  CHECK(est.exponent == 2.0);
  CHECK(est.fit_quality == 1.0);
  CHECK(!est.note.empty());
}

TEST_CASE("radius validation") {
  const GridSpec spec = make_spec(256);
  const ScalarField f = random_band_limited(spec, 8, 55);
  const Mask region = interval_mask(spec, 0.40, 0.60);
  // too few radii
  CHECK_THROWS_AS(estimate_holder(f, region, {0.1, 0.05, 0.025}), ValidationError);
  // not dyadic
  CHECK_THROWS_AS(estimate_holder(f, region, {0.1, 0.06, 0.03, 0.015}), ValidationError);
  // below the 2h floor
  CHECK_THROWS_AS(estimate_holder(f, region, {0.02, 0.01, 0.005, 0.0025}), ValidationError);
  // at or above L/2
  CHECK_THROWS_AS(estimate_holder(f, region, {0.8, 0.4, 0.2, 0.1}), ValidationError);
  // empty region
  CHECK_THROWS_AS(estimate_holder(f, Mask(spec.size(), 0), kCoarseRadii), ValidationError);
}

TEST_CASE("estimates are shift equivariant and scale invariant") {
  const GridSpec spec = make_spec(512);
  const ScalarField f = field_from_function(spec, [](const std::array<double, 3>& x, int) {
    return std::sqrt(std::abs(std::sin(kPi * (x[0] - 0.5))));
  });
  const HolderEstimate base = estimate_holder(f, interval_mask(spec, 0.45, 0.55), kRadii);

  // shift the field and the window by the same number of lattice steps
  const int shift = 51;
  ScalarField g(spec);
  for (int i = 0; i < spec.n; ++i) {
    g[static_cast<std::size_t>(i)] = f[static_cast<std::size_t>(wrap(i + shift, spec.n))];
  }
  const double delta = shift * spec.h();
  const HolderEstimate moved = estimate_holder(g, interval_mask(spec, 0.45 - delta, 0.55 - delta), kRadii);
  CHECK(moved.exponent == base.exponent);

  // rescaling the field values leaves the slope untouched
  const HolderEstimate scaled = estimate_holder(5.0 * f, interval_mask(spec, 0.45, 0.55), kRadii);
  CHECK(std::abs(scaled.exponent - base.exponent) <= 1e-12);
}

}  // TEST_SUITE
