#ifndef FRACGRAD_NUMERICS_HPP
#define FRACGRAD_NUMERICS_HPP

#include <cstdint>
#include <functional>
#include <vector>

#include "fracgrad/grid.hpp"

namespace fracgrad {

// Compensated (Kahan) accumulator. The quadrature double sums have n^{2d}
// terms; plain summation drifts past the 1e-12 reproducibility tolerance.
class KahanSum {
 public:
  void add(double x) {
    double y = x - c_;
    double t = s_ + y;
    c_ = (t - s_) - y;
    s_ = t;
  }
  double value() const { return s_; }

 private:
  double s_ = 0.0;
  double c_ = 0.0;
};

// Process-wide cap on data-parallel width. 0 means hardware concurrency.
void set_max_threads(int n);
int max_threads();

// Runs fn(begin, end) over a partition of [0, count). Each index is handled
// by exactly one invocation, so per-index output slots are deterministic
// regardless of the thread count.
void parallel_for(std::size_t count, const std::function<void(std::size_t, std::size_t)>& fn);

// Deterministic RNG (splitmix64 core). Used instead of <random> distributions
// so that streams are identical across standard library implementations.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : state_(seed) {}
  std::uint64_t next_u64();
  double uniform();              // [0, 1)
  double uniform(double a, double b);
  double normal();               // Box-Muller, one value per call

 private:
  std::uint64_t state_;
  bool have_spare_ = false;
  double spare_ = 0.0;
};

// Real field with independent N(0,1) Fourier coefficients on modes with
// |k_a| <= kmax on every axis (zero mode excluded), unit-normalized in L^inf.
ScalarField random_band_limited(const GridSpec& spec, int kmax, std::uint64_t seed);

// C^2 ramp: 0 for t <= 0, 1 for t >= 1, quintic smoothstep between.
double smoothstep(double t);

}  // namespace fracgrad

#endif
