#include <cmath>
#include <vector>

#include <doctest.h>

#include "fracgrad/grid.hpp"
#include "fracgrad/numerics.hpp"
#include "fracgrad/singular.hpp"
#include "fracgrad/spectral.hpp"

using namespace fracgrad;

namespace {

constexpr double kPi = 3.14159265358979323846;

GridSpec make_spec(int d, int n, double L = 1.0) {
  GridSpec spec;
  spec.d = d;
  spec.n = n;
  spec.L = L;
  spec.validate();
  return spec;
}

ScalarField random_field(const GridSpec& spec, std::uint64_t seed) {
  ScalarField f(spec);
  Rng rng(seed);
  for (std::size_t i = 0; i < f.size(); ++i) f[i] = rng.uniform(-1.0, 1.0);
  return f;
}

// smooth periodic bump centered at 0.5, used for the spectral comparison
ScalarField gaussian_bump(const GridSpec& spec, double width) {
  return field_from_function(spec, [&](const std::array<double, 3>& x, int d) {
    double q = 0.0;
    for (int a = 0; a < d; ++a) {
      double delta = std::fabs(x[a] - 0.5);
      delta = std::min(delta, spec.L - delta);
      q += (delta / width) * (delta / width);
    }
    return std::exp(-q);
  });
}

// Brute-force d=1 Gagliardo sum over ordered pairs; independent of the
// offset-table machinery under test. Periodic variant uses the minimal
// image, compact variant extends by zero.
double naive_gagliardo_1d(const ScalarField& u, double s, double p, double r_max,
                          bool compact) {
  const GridSpec& spec = u.spec();
  const int n = spec.n;
  const double h = spec.h();
  const double expo = 1.0 + s * p;
  const double limit = r_max * (1.0 + 1e-12);
  long double acc = 0.0L;
  const int m = static_cast<int>(std::floor(limit / h));
  for (int i = 0; i < n; ++i) {
    for (int r = -m; r <= m; ++r) {
      if (r == 0) continue;
      const double dist = std::abs(r) * h;
      if (dist > limit) continue;
      const double w = std::pow(dist, -expo);
      if (compact) {
        const int j = i + r;
        if (j >= 0 && j < n) {
          acc += std::pow(std::abs(u[static_cast<std::size_t>(i)] - u[static_cast<std::size_t>(j)]), p) * w;
        } else {
          // zero exterior partner; the mirrored ordered pair is folded in
          acc += 2.0 * std::pow(std::abs(u[static_cast<std::size_t>(i)]), p) * w;
        }
      } else {
        if (std::abs(r) > n / 2 || (r == -n / 2)) continue;  // one image per torus offset
        const int j = wrap(i + r, n);
        acc += std::pow(std::abs(u[static_cast<std::size_t>(i)] - u[static_cast<std::size_t>(j)]), p) * w;
      }
    }
  }
  return std::pow(h * h * static_cast<double>(acc), 1.0 / p);
}

double naive_wsp_1d(const ScalarField& u, const ScalarField& phi, double s, double p,
                    double r_max) {
  const GridSpec& spec = u.spec();
  const int n = spec.n;
  const double h = spec.h();
  const double expo = 1.0 + s * p;
  const double limit = r_max * (1.0 + 1e-12);
  const int m = static_cast<int>(std::floor(limit / h));
  long double acc = 0.0L;
  for (int i = 0; i < n; ++i) {
    for (int r = -m; r <= m; ++r) {
      if (r == 0 || std::abs(r) > n / 2 || r == -n / 2) continue;
      const double dist = std::abs(r) * h;
      if (dist > limit) continue;
      const int j = wrap(i + r, n);
      const double du = u[static_cast<std::size_t>(i)] - u[static_cast<std::size_t>(j)];
      const double dphi = phi[static_cast<std::size_t>(i)] - phi[static_cast<std::size_t>(j)];
      if (du == 0.0 || dphi == 0.0) continue;
      acc += std::pow(std::abs(du), p - 2.0) * du * dphi * std::pow(dist, -expo);
    }
  }
  return h * h * static_cast<double>(acc);
}

}  // namespace

TEST_SUITE("singular") {

TEST_CASE("gagliardo seminorm matches a brute-force sum (periodic)") {
  const GridSpec spec = make_spec(1, 32);
  const ScalarField u = random_field(spec, 1001);
  QuadratureConfig q;
  q.r_max = 0.5;
  const double got = gagliardo_seminorm(u, 0.4, 2.5, q);
  const double want = naive_gagliardo_1d(u, 0.4, 2.5, 0.5, false);
  CHECK(std::abs(got - want) <= 1e-12 * want);

  // truncation radius participates: a smaller window gives a smaller sum
  QuadratureConfig q2;
  q2.r_max = 0.25;
  CHECK(gagliardo_seminorm(u, 0.4, 2.5, q2) < got);
  CHECK(std::abs(gagliardo_seminorm(u, 0.4, 2.5, q2) -
                 naive_gagliardo_1d(u, 0.4, 2.5, 0.25, false)) <=
        1e-12 * want);
}

TEST_CASE("gagliardo seminorm matches a brute-force sum (compact support)") {
  const GridSpec spec = make_spec(1, 32);
  ScalarField u(spec);
  Rng rng(1002);
  // interior values only; the exterior of the lattice is an implicit zero
  for (int i = 4; i < 28; ++i) u[static_cast<std::size_t>(i)] = rng.uniform(-1.0, 1.0);
  QuadratureConfig q;
  q.r_max = 0.25;
  q.compact_support = true;
  const double got = gagliardo_seminorm(u, 0.3, 2.0, q);
  const double want = naive_gagliardo_1d(u, 0.3, 2.0, 0.25, true);
  CHECK(std::abs(got - want) <= 1e-12 * want);
}

TEST_CASE("gagliardo seminorm is shift invariant on the torus") {
  const GridSpec spec = make_spec(1, 64);
  const ScalarField u = random_band_limited(spec, 12, 555);
  ScalarField shifted(spec);
  for (int i = 0; i < spec.n; ++i) {
    shifted[static_cast<std::size_t>(i)] = u[static_cast<std::size_t>(wrap(i + 17, spec.n))];
  }
  QuadratureConfig q;
  q.r_max = 0.5;
  const double a = gagliardo_seminorm(u, 0.4, 2.5, q);
  const double b = gagliardo_seminorm(shifted, 0.4, 2.5, q);
  CHECK(std::abs(a - b) <= 1e-12 * a);
}

TEST_CASE("wsp weak form matches a brute-force sum and is linear in phi") {
  const GridSpec spec = make_spec(1, 32);
  const ScalarField u = random_field(spec, 2001);
  const ScalarField phi1 = random_field(spec, 2002);
  const ScalarField phi2 = random_field(spec, 2003);
  QuadratureConfig q;
  q.r_max = 0.5;
  const double got = wsp_laplacian_weak(u, phi1, 0.5, 3.0, q);
  const double want = naive_wsp_1d(u, phi1, 0.5, 3.0, 0.5);
  CHECK(std::abs(got - want) <= 1e-11 * std::max(1.0, std::abs(want)));

  const double combo = wsp_laplacian_weak(u, 0.7 * phi1 + (-1.3) * phi2, 0.5, 3.0, q);
  const double split = 0.7 * wsp_laplacian_weak(u, phi1, 0.5, 3.0, q) +
                       (-1.3) * wsp_laplacian_weak(u, phi2, 0.5, 3.0, q);
  CHECK(std::abs(combo - split) <= 1e-11 * std::max(1.0, std::abs(split)));
}

TEST_CASE("pv fractional gradient approaches the spectral operator") {
  // coarse-grid version of the oracle-equivalence check: errors shrink with n
  const double s = 0.5;
  std::vector<double> errors;
  for (int n : {64, 128}) {
    const GridSpec spec = make_spec(1, n);
    const ScalarField f = gaussian_bump(spec, 0.0625);
    QuadratureConfig q;
    q.r_max = 0.5;
    const CalibratedConstants c = calibrate_constants(spec, s);
    const VectorField pv = frac_gradient_pv(f, s, q, c);
    const VectorField sp = frac_gradient(f, s);
    errors.push_back(linf_diff(pv.comp(0), sp.comp(0)) / std::max(1.0, linf(sp.comp(0))));
  }
  CHECK(errors[1] < errors[0]);
  CHECK(errors[1] <= 0.05);
}

TEST_CASE("calibration is deterministic and within its residual guard") {
  const GridSpec spec = make_spec(1, 128);
  const CalibratedConstants a = calibrate_constants(spec, 0.6);
  const CalibratedConstants b = calibrate_constants(spec, 0.6);
  CHECK(a.c_grad == b.c_grad);
  CHECK(a.c_lap == b.c_lap);
  CHECK(a.c_grad > 0.0);
  CHECK(a.c_lap > 0.0);
  CHECK(a.grad_residual <= 0.05);
  CHECK(a.lap_residual <= 0.05);
}

TEST_CASE("compact-support operators demand a zero boundary layer") {
  const GridSpec spec = make_spec(1, 64);
  ScalarField f(spec);
  f[1] = 1.0;  // inside the 2h layer
  QuadratureConfig q;
  q.r_max = 0.25;
  q.compact_support = true;
  const CalibratedConstants c;
  CHECK_THROWS_AS(frac_gradient_pv(f, 0.5, q, c), ValidationError);
  CHECK_THROWS_AS(frac_laplacian_pv(f, 0.8, q, c), ValidationError);

  ScalarField ok(spec);
  ok[10] = 1.0;
  CHECK_NOTHROW(frac_gradient_pv(ok, 0.5, q, c));
}

TEST_CASE("quadrature window validation") {
  const GridSpec spec = make_spec(1, 64);
  QuadratureConfig too_big;
  too_big.r_max = 0.75;  // beyond L/2 on the torus
  CHECK_THROWS_AS(too_big.validate(spec), ValidationError);

  QuadratureConfig too_small;
  too_small.r_max = spec.h();  // below the 2h floor
  CHECK_THROWS_AS(too_small.validate(spec), ValidationError);

  QuadratureConfig fine;
  fine.r_max = 0.5;
  CHECK_NOTHROW(fine.validate(spec));
}

TEST_CASE("results do not depend on the thread count") {
  const GridSpec spec = make_spec(1, 64);
  const ScalarField u = random_field(spec, 3003);
  QuadratureConfig q;
  q.r_max = 0.5;
  const int saved = max_threads();
  set_max_threads(1);
  const double g1 = gagliardo_seminorm(u, 0.4, 2.0, q);
  const VectorField p1 = frac_gradient_pv(gaussian_bump(spec, 0.0625), 0.5, q, CalibratedConstants{});
  set_max_threads(4);
  const double g4 = gagliardo_seminorm(u, 0.4, 2.0, q);
  const VectorField p4 = frac_gradient_pv(gaussian_bump(spec, 0.0625), 0.5, q, CalibratedConstants{});
  set_max_threads(saved);
  CHECK(g1 == g4);
  CHECK(linf_diff(p1.comp(0), p4.comp(0)) == 0.0);
}

TEST_CASE("tail bound shrinks as the window grows") {
  const GridSpec spec = make_spec(1, 64);
  const ScalarField f = gaussian_bump(spec, 0.0625);
  QuadratureConfig qa, qb;
  qa.r_max = 0.25;
  qb.r_max = 0.5;
  const CalibratedConstants c;
  CHECK(pv_tail_bound(f, 0.5, qb, c) < pv_tail_bound(f, 0.5, qa, c));
}

}  // TEST_SUITE
