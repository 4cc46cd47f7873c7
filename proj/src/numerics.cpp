#include "fracgrad/numerics.hpp"

#include <atomic>
#include <cmath>
#include <numbers>
#include <thread>

namespace fracgrad {

namespace {
std::atomic<int> g_max_threads{0};

std::uint64_t splitmix64(std::uint64_t& state) {
  state += 0x9e3779b97f4a7c15ULL;
  std::uint64_t z = state;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}
}  // namespace

void set_max_threads(int n) { g_max_threads.store(n < 0 ? 0 : n); }

int max_threads() {
  int n = g_max_threads.load();
  if (n > 0) return n;
  unsigned hw = std::thread::hardware_concurrency();
  return hw == 0 ? 1 : static_cast<int>(hw);
}

void parallel_for(std::size_t count, const std::function<void(std::size_t, std::size_t)>& fn) {
  int nthreads = max_threads();
  if (nthreads <= 1 || count < 2048) {
    fn(0, count);
    return;
  }
  std::size_t chunks = std::min<std::size_t>(static_cast<std::size_t>(nthreads), count);
  std::size_t per = (count + chunks - 1) / chunks;
  std::vector<std::thread> workers;
  workers.reserve(chunks);
  for (std::size_t c = 0; c < chunks; ++c) {
    std::size_t lo = c * per;
    std::size_t hi = std::min(count, lo + per);
    if (lo >= hi) break;
    workers.emplace_back([&fn, lo, hi] { fn(lo, hi); });
  }
  for (auto& w : workers) w.join();
}

std::uint64_t Rng::next_u64() { return splitmix64(state_); }

double Rng::uniform() {
  return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
}

double Rng::uniform(double a, double b) { return a + (b - a) * uniform(); }

double Rng::normal() {
  if (have_spare_) {
    have_spare_ = false;
    return spare_;
  }
  double u1 = 0.0;
  do {
    u1 = uniform();
  } while (u1 <= 0.0);
  double u2 = uniform();
  double r = std::sqrt(-2.0 * std::log(u1));
  double a = 2.0 * std::numbers::pi * u2;
  spare_ = r * std::sin(a);
  have_spare_ = true;
  return r * std::cos(a);
}

ScalarField random_band_limited(const GridSpec& spec, int kmax, std::uint64_t seed) {
  spec.validate();
  if (kmax < 1 || kmax >= spec.n / 2)
    throw ValidationError("random_band_limited: kmax must be in [1, n/2)");
  Rng rng(seed);
  struct Mode {
    std::array<int, 3> k;
    double amp;
    double phase;
  };
  std::vector<Mode> modes;
  // Canonical half space: first nonzero component positive, so each real
  // oscillation is generated once.
  std::array<int, 3> k{0, 0, 0};
  std::function<void(int)> enumerate = [&](int axis) {
    if (axis == spec.d) {
      int lead = 0;
      for (int a = 0; a < spec.d; ++a) {
        if (k[a] != 0) {
          lead = k[a];
          break;
        }
      }
      if (lead <= 0) return;
      modes.push_back({k, rng.normal(), rng.uniform(0.0, 2.0 * std::numbers::pi)});
      return;
    }
    for (int kk = -kmax; kk <= kmax; ++kk) {
      k[axis] = kk;
      enumerate(axis + 1);
    }
    k[axis] = 0;
  };
  enumerate(0);

  ScalarField out(spec);
  double h = spec.h();
  double two_pi_over_L = 2.0 * std::numbers::pi / spec.L;
  for (std::size_t f = 0; f < out.size(); ++f) {
    MultiIndex idx = unflatten(spec, f);
    double v = 0.0;
    for (const auto& m : modes) {
      double arg = m.phase;
      for (int a = 0; a < spec.d; ++a) arg += two_pi_over_L * m.k[a] * (idx[a] * h);
      v += m.amp * std::cos(arg);
    }
    out[f] = v;
  }
  double scale = linf(out);
  if (scale > 0.0) {
    for (std::size_t i = 0; i < out.size(); ++i) out[i] /= scale;
  }
  return out;
}

double smoothstep(double t) {
  if (t <= 0.0) return 0.0;
  if (t >= 1.0) return 1.0;
  return t * t * t * (t * (6.0 * t - 15.0) + 10.0);
}

}  // namespace fracgrad
