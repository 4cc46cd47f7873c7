#include "fracgrad/grid.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "fracgrad/numerics.hpp"

namespace fracgrad {

namespace {

bool is_power_of_two(int n) { return n > 0 && (n & (n - 1)) == 0; }

// Squared periodic Euclidean distance between flat indices, in length units.
double periodic_dist2(const GridSpec& spec, const MultiIndex& a, const MultiIndex& b) {
  double h = spec.h();
  double d2 = 0.0;
  for (int ax = 0; ax < spec.d; ++ax) {
    int di = std::abs(a[ax] - b[ax]);
    di = std::min(di, spec.n - di);
    double dx = di * h;
    d2 += dx * dx;
  }
  return d2;
}

// Points of the set with at least one axis neighbor outside it. For a
// nonempty proper subset this is nonempty, and set-to-point distances are
// attained on it.
std::vector<std::size_t> boundary_points(const GridSpec& spec, const Mask& mask) {
  std::vector<std::size_t> out;
  const std::size_t total = spec.size();
  for (std::size_t f = 0; f < total; ++f) {
    if (!mask[f]) continue;
    MultiIndex idx = unflatten(spec, f);
    bool boundary = false;
    for (int ax = 0; ax < spec.d && !boundary; ++ax) {
      for (int step : {-1, 1}) {
        MultiIndex nb = idx;
        nb[ax] = wrap(idx[ax] + step, spec.n);
        if (!mask[flat_index(spec, nb)]) {
          boundary = true;
          break;
        }
      }
    }
    if (boundary) out.push_back(f);
  }
  return out;
}

}  // namespace

void GridSpec::validate() const {
  if (d < 1 || d > 3) throw ValidationError("GridSpec: d must be 1, 2, or 3");
  if (n < 8 || !is_power_of_two(n)) throw ValidationError("GridSpec: n must be a power of two >= 8");
  if (!(L > 0.0) || !std::isfinite(L)) throw ValidationError("GridSpec: L must be positive and finite");
  double points = std::pow(static_cast<double>(n), d);
  if (points > static_cast<double>(1) * (1 << 28))
    throw ValidationError("GridSpec: n^d exceeds addressable field size");
}

ScalarField::ScalarField(const GridSpec& spec, double fill) : spec_(spec) {
  spec_.validate();
  values_.assign(spec_.size(), fill);
}

ScalarField::ScalarField(const GridSpec& spec, std::vector<double> values)
    : spec_(spec), values_(std::move(values)) {
  spec_.validate();
  if (values_.size() != spec_.size())
    throw ValidationError("ScalarField: value count does not match n^d");
}

void ScalarField::check_finite(const char* what) const {
  for (std::size_t i = 0; i < values_.size(); ++i) {
    if (!std::isfinite(values_[i])) {
      std::ostringstream os;
      os << what << ": non-finite value at flat index " << i;
      throw NumericError(os.str());
    }
  }
}

VectorField::VectorField(const GridSpec& spec) : spec_(spec) {
  spec_.validate();
  comps_.assign(static_cast<std::size_t>(spec_.d), ScalarField(spec_));
}

VectorField::VectorField(const GridSpec& spec, std::vector<ScalarField> components)
    : spec_(spec), comps_(std::move(components)) {
  spec_.validate();
  if (comps_.size() != static_cast<std::size_t>(spec_.d))
    throw ValidationError("VectorField: needs exactly d components");
  for (const auto& c : comps_)
    if (!(c.spec() == spec_)) throw ValidationError("VectorField: components must share one GridSpec");
}

ScalarField VectorField::magnitude() const {
  ScalarField out(spec_);
  for (std::size_t i = 0; i < out.size(); ++i) {
    double m2 = 0.0;
    for (int a = 0; a < spec_.d; ++a) {
      double v = comps_[static_cast<std::size_t>(a)][i];
      m2 += v * v;
    }
    out[i] = std::sqrt(m2);
  }
  return out;
}

Mask mask_from_box(const GridSpec& spec, const Box& box) {
  spec.validate();
  Mask m(spec.size(), 0);
  double h = spec.h();
  double tol = 1e-12 * spec.L;
  for (std::size_t f = 0; f < m.size(); ++f) {
    MultiIndex idx = unflatten(spec, f);
    bool inside = true;
    for (int a = 0; a < spec.d; ++a) {
      double x = idx[a] * h;
      if (x < box.lo[a] - tol || x >= box.hi[a] - tol) {
        inside = false;
        break;
      }
    }
    m[f] = inside ? 1 : 0;
  }
  return m;
}

std::size_t mask_count(const Mask& m) {
  std::size_t c = 0;
  for (auto v : m) c += (v != 0);
  return c;
}

double mask_distance(const GridSpec& spec, const Mask& a, const Mask& b) {
  if (a.size() != spec.size() || b.size() != spec.size())
    throw ValidationError("mask_distance: mask length mismatch");
  if (mask_count(a) == 0 || mask_count(b) == 0) return spec.L;
  for (std::size_t f = 0; f < a.size(); ++f)
    if (a[f] && b[f]) return 0.0;
  auto ba = boundary_points(spec, a);
  auto bb = boundary_points(spec, b);
  // Full sets when a mask has no boundary (covers the whole torus).
  if (ba.empty() || bb.empty()) return 0.0;
  double best = std::numeric_limits<double>::infinity();
  for (auto fa : ba) {
    MultiIndex ia = unflatten(spec, fa);
    for (auto fb : bb) {
      best = std::min(best, periodic_dist2(spec, ia, unflatten(spec, fb)));
    }
  }
  return std::sqrt(best);
}

std::vector<double> distance_to_mask(const GridSpec& spec, const Mask& mask) {
  if (mask.size() != spec.size()) throw ValidationError("distance_to_mask: mask length mismatch");
  std::vector<double> dist(spec.size(), 0.0);
  std::size_t inside = mask_count(mask);
  if (inside == 0) {
    std::fill(dist.begin(), dist.end(), spec.L);
    return dist;
  }
  if (inside == mask.size()) return dist;
  auto boundary = boundary_points(spec, mask);
  std::vector<MultiIndex> bidx(boundary.size());
  for (std::size_t i = 0; i < boundary.size(); ++i) bidx[i] = unflatten(spec, boundary[i]);
  parallel_for(spec.size(), [&](std::size_t lo, std::size_t hi) {
    for (std::size_t f = lo; f < hi; ++f) {
      if (mask[f]) continue;
      MultiIndex idx = unflatten(spec, f);
      double best = std::numeric_limits<double>::infinity();
      for (const auto& b : bidx) best = std::min(best, periodic_dist2(spec, idx, b));
      dist[f] = std::sqrt(best);
    }
  });
  return dist;
}

DomainMasks DomainMasks::from_masks(const GridSpec& spec, Mask omega, Mask omega2, Mask omega1) {
  spec.validate();
  if (omega.size() != spec.size() || omega2.size() != spec.size() || omega1.size() != spec.size())
    throw ValidationError("DomainMasks: mask length mismatch");
  DomainMasks m{spec, std::move(omega), std::move(omega2), std::move(omega1), 0.0};
  Mask omega2_c(m.omega2.size()), omega_c(m.omega.size());
  for (std::size_t i = 0; i < m.omega.size(); ++i) {
    omega2_c[i] = m.omega2[i] ? 0 : 1;
    omega_c[i] = m.omega[i] ? 0 : 1;
  }
  double gap1 = mask_distance(spec, m.omega1, omega2_c);
  double gap2 = mask_distance(spec, m.omega2, omega_c);
  m.separation = std::min(gap1, gap2);
  return m;
}

DomainMasks DomainMasks::from_boxes(const GridSpec& spec, const Box& omega, const Box& omega2,
                                    const Box& omega1) {
  return from_masks(spec, mask_from_box(spec, omega), mask_from_box(spec, omega2),
                    mask_from_box(spec, omega1));
}

void DomainMasks::validate() const {
  spec.validate();
  std::size_t c1 = mask_count(omega1), c2 = mask_count(omega2), c = mask_count(omega);
  if (c1 == 0) throw ValidationError("DomainMasks: omega1 is empty");
  if (c == spec.size()) throw ValidationError("DomainMasks: complement of omega is empty");
  if (c2 == spec.size()) throw ValidationError("DomainMasks: complement of omega2 is empty");
  for (std::size_t i = 0; i < omega.size(); ++i) {
    if (omega1[i] && !omega2[i]) throw ValidationError("DomainMasks: omega1 not contained in omega2");
    if (omega2[i] && !omega[i]) throw ValidationError("DomainMasks: omega2 not contained in omega");
  }
  if (!(c1 < c2 && c2 < c)) throw ValidationError("DomainMasks: inclusions must be strict");
  if (separation < 2.0 * spec.h())
    throw ValidationError("DomainMasks: shell separation below 2h");
}

ScalarField field_from_function(const GridSpec& spec, const FieldFunction& f) {
  ScalarField out(spec);
  double h = spec.h();
  for (std::size_t i = 0; i < out.size(); ++i) {
    MultiIndex idx = unflatten(spec, i);
    std::array<double, 3> x{idx[0] * h, idx[1] * h, idx[2] * h};
    double v = f(x, spec.d);
    if (!std::isfinite(v)) {
      std::ostringstream os;
      os << "field_from_function: non-finite sample at (";
      for (int a = 0; a < spec.d; ++a) os << (a ? ", " : "") << x[static_cast<std::size_t>(a)];
      os << ")";
      throw ValidationError(os.str());
    }
    out[i] = v;
  }
  return out;
}

double lp_norm(const ScalarField& f, double p) {
  if (std::isinf(p)) return linf(f);
  if (!(p >= 1.0)) throw ValidationError("lp_norm: p must be >= 1");
  KahanSum sum;
  if (p == 2.0) {
    for (double v : f.values()) sum.add(v * v);
  } else if (p == 1.0) {
    for (double v : f.values()) sum.add(std::abs(v));
  } else {
    for (double v : f.values()) sum.add(std::pow(std::abs(v), p));
  }
  double hd = std::pow(f.spec().h(), f.spec().d);
  return std::pow(hd * sum.value(), 1.0 / p);
}

double masked_sup(const ScalarField& f, const Mask& mask) {
  if (mask.size() != f.size()) throw ValidationError("masked_sup: mask length mismatch");
  if (mask_count(mask) == 0) throw ValidationError("masked_sup: empty mask");
  double m = 0.0;
  for (std::size_t i = 0; i < f.size(); ++i)
    if (mask[i]) m = std::max(m, std::abs(f[i]));
  return m;
}

double inner(const ScalarField& a, const ScalarField& b) {
  if (!(a.spec() == b.spec())) throw ValidationError("inner: spec mismatch");
  KahanSum sum;
  for (std::size_t i = 0; i < a.size(); ++i) sum.add(a[i] * b[i]);
  return std::pow(a.spec().h(), a.spec().d) * sum.value();
}

double inner(const VectorField& a, const VectorField& b) {
  if (!(a.spec() == b.spec())) throw ValidationError("inner: spec mismatch");
  double total = 0.0;
  for (int c = 0; c < a.dims(); ++c) total += inner(a.comp(c), b.comp(c));
  return total;
}

double linf(const ScalarField& f) {
  double m = 0.0;
  for (double v : f.values()) m = std::max(m, std::abs(v));
  return m;
}

double linf_diff(const ScalarField& a, const ScalarField& b) {
  double m = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a[i] - b[i]));
  return m;
}

ScalarField operator+(const ScalarField& a, const ScalarField& b) {
  ScalarField out = a;
  for (std::size_t i = 0; i < out.size(); ++i) out[i] += b[i];
  return out;
}

ScalarField operator-(const ScalarField& a, const ScalarField& b) {
  ScalarField out = a;
  for (std::size_t i = 0; i < out.size(); ++i) out[i] -= b[i];
  return out;
}

ScalarField operator*(double c, const ScalarField& f) {
  ScalarField out = f;
  for (std::size_t i = 0; i < out.size(); ++i) out[i] *= c;
  return out;
}

ScalarField& axpy(ScalarField& y, double t, const ScalarField& x) {
  for (std::size_t i = 0; i < y.size(); ++i) y[i] += t * x[i];
  return y;
}

}  // namespace fracgrad
