#ifndef FRACGRAD_GRID_HPP
#define FRACGRAD_GRID_HPP

#include <array>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <stdexcept>
#include <string>
#include <vector>

namespace fracgrad {

// Raised when inputs violate a documented precondition.
class ValidationError : public std::invalid_argument {
 public:
  explicit ValidationError(const std::string& msg) : std::invalid_argument(msg) {}
};

// Raised when a computation leaves the numerically trustworthy regime
// (NaN iterates, excessive imaginary residue, failed calibration).
class NumericError : public std::runtime_error {
 public:
  explicit NumericError(const std::string& msg) : std::runtime_error(msg) {}
};

// Periodic lattice [0,L)^d with n points per axis, spacing h = L/n.
// Indexing is row major: axis 0 is the slowest.
struct GridSpec {
  int d = 1;
  int n = 8;
  double L = 1.0;

  double h() const { return L / n; }
  std::size_t size() const {
    std::size_t s = 1;
    for (int a = 0; a < d; ++a) s *= static_cast<std::size_t>(n);
    return s;
  }
  bool operator==(const GridSpec& o) const { return d == o.d && n == o.n && L == o.L; }

  void validate() const;
};

using MultiIndex = std::array<int, 3>;

inline std::size_t flat_index(const GridSpec& spec, const MultiIndex& idx) {
  std::size_t f = 0;
  for (int a = 0; a < spec.d; ++a) f = f * spec.n + static_cast<std::size_t>(idx[a]);
  return f;
}

inline MultiIndex unflatten(const GridSpec& spec, std::size_t flat) {
  MultiIndex idx{0, 0, 0};
  for (int a = spec.d - 1; a >= 0; --a) {
    idx[a] = static_cast<int>(flat % spec.n);
    flat /= spec.n;
  }
  return idx;
}

// Wraps an integer lattice coordinate into [0, n).
inline int wrap(int i, int n) {
  int r = i % n;
  return r < 0 ? r + n : r;
}

// Real scalar field sampled at lattice points, 64-bit values, row major.
class ScalarField {
 public:
  ScalarField() = default;
  ScalarField(const GridSpec& spec, double fill = 0.0);
  ScalarField(const GridSpec& spec, std::vector<double> values);

  const GridSpec& spec() const { return spec_; }
  const std::vector<double>& values() const { return values_; }
  std::vector<double>& values() { return values_; }
  double operator[](std::size_t i) const { return values_[i]; }
  double& operator[](std::size_t i) { return values_[i]; }
  std::size_t size() const { return values_.size(); }

  // Throws NumericError if any value is non-finite.
  void check_finite(const char* what = "field") const;

 private:
  GridSpec spec_;
  std::vector<double> values_;
};

// d scalar components sharing one GridSpec.
class VectorField {
 public:
  VectorField() = default;
  explicit VectorField(const GridSpec& spec);
  VectorField(const GridSpec& spec, std::vector<ScalarField> components);

  const GridSpec& spec() const { return spec_; }
  int dims() const { return spec_.d; }
  const ScalarField& comp(int a) const { return comps_[static_cast<std::size_t>(a)]; }
  ScalarField& comp(int a) { return comps_[static_cast<std::size_t>(a)]; }

  // Pointwise Euclidean magnitude.
  ScalarField magnitude() const;

 private:
  GridSpec spec_;
  std::vector<ScalarField> comps_;
};

using Mask = std::vector<std::uint8_t>;

// Axis-aligned box [lo, hi) per axis, in length units. The standard way to
// describe resolution-independent geometry in configs.
struct Box {
  std::array<double, 3> lo{0, 0, 0};
  std::array<double, 3> hi{0, 0, 0};
};

Mask mask_from_box(const GridSpec& spec, const Box& box);

// Minimum periodic Euclidean distance (length units) between two nonempty
// lattice sets. Returns spec.L if either set is empty.
double mask_distance(const GridSpec& spec, const Mask& a, const Mask& b);

// Distance from each lattice point to the set marked by `mask` (zero inside).
std::vector<double> distance_to_mask(const GridSpec& spec, const Mask& mask);

// Nested geometry omega1 within omega2 within omega, with the minimum gap
// between consecutive shells recorded as `separation`.
struct DomainMasks {
  GridSpec spec;
  Mask omega;
  Mask omega2;
  Mask omega1;
  double separation = 0.0;

  static DomainMasks from_masks(const GridSpec& spec, Mask omega, Mask omega2, Mask omega1);
  static DomainMasks from_boxes(const GridSpec& spec, const Box& omega, const Box& omega2,
                                const Box& omega1);

  // Strict invariants needed by the solver and the reduction pipeline:
  // strict nested inclusions, nonempty complements, separation >= 2h.
  void validate() const;
};

std::size_t mask_count(const Mask& m);

// Samples f at the lattice points of spec. f receives the d coordinates.
using FieldFunction = std::function<double(const std::array<double, 3>&, int d)>;
ScalarField field_from_function(const GridSpec& spec, const FieldFunction& f);

// Discrete L^p norm with quadrature weight h^d; p = infinity gives max |.|.
double lp_norm(const ScalarField& f, double p);

// Max of |f| over the marked points. Rejects an empty mask.
double masked_sup(const ScalarField& f, const Mask& mask);

// h^d-weighted inner products.
double inner(const ScalarField& a, const ScalarField& b);
double inner(const VectorField& a, const VectorField& b);

double linf(const ScalarField& f);
double linf_diff(const ScalarField& a, const ScalarField& b);

ScalarField operator+(const ScalarField& a, const ScalarField& b);
ScalarField operator-(const ScalarField& a, const ScalarField& b);
ScalarField operator*(double c, const ScalarField& f);
ScalarField& axpy(ScalarField& y, double t, const ScalarField& x);  // y += t*x

}  // namespace fracgrad

#endif
