#include "fracgrad/singular.hpp"

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include "fracgrad/numerics.hpp"
#include "fracgrad/spectral.hpp"

namespace fracgrad {

namespace {

struct Offset {
  std::array<int, 3> di{0, 0, 0};
  std::array<double, 3> dx{0.0, 0.0, 0.0};
  double dist = 0.0;
};

// Offsets are split into an antipodal half-shell (Chebyshev norm within the
// inner exclusion) whose contributions are summed in +/- pairs, and plain
// singles further out. In periodic mode components range over (-n/2, n/2] so
// every torus offset appears exactly once; odd kernels drop offsets touching
// the ambiguous antipodal index n/2, where the two minimal images cancel.
struct OffsetTable {
  std::vector<Offset> paired;   // canonical representatives, use f(x+r)-f(x-r)
  std::vector<Offset> singles;  // use f(x)-f(x-r)
};

bool lexicographically_positive(const std::array<int, 3>& di, int d) {
  for (int a = 0; a < d; ++a) {
    if (di[a] != 0) return di[a] > 0;
  }
  return false;
}

OffsetTable make_offsets(const GridSpec& spec, const QuadratureConfig& q, bool odd_kernel) {
  const double h = spec.h();
  const double limit = q.r_max * (1.0 + 1e-12);
  int lo[3] = {0, 0, 0}, hi[3] = {0, 0, 0};
  if (q.compact_support) {
    const int m = static_cast<int>(std::ceil(q.r_max / h));
    for (int a = 0; a < spec.d; ++a) { lo[a] = -m; hi[a] = m; }
  } else {
    for (int a = 0; a < spec.d; ++a) { lo[a] = -spec.n / 2 + 1; hi[a] = spec.n / 2; }
  }

  OffsetTable table;
  std::array<int, 3> di{0, 0, 0};
  for (int i0 = lo[0]; i0 <= hi[0]; ++i0) {
    di[0] = i0;
    for (int i1 = lo[1]; i1 <= hi[1]; ++i1) {
      di[1] = i1;
      for (int i2 = lo[2]; i2 <= hi[2]; ++i2) {
        di[2] = i2;
        int cheb = 0;
        double r2 = 0.0;
        bool antipodal = false;
        for (int a = 0; a < spec.d; ++a) {
          cheb = std::max(cheb, std::abs(di[a]));
          r2 += static_cast<double>(di[a]) * di[a];
          if (!q.compact_support && std::abs(di[a]) == spec.n / 2) antipodal = true;
        }
        if (cheb == 0) continue;  // the singular cell is excluded
        const double dist = h * std::sqrt(r2);
        if (dist > limit) continue;
        if (odd_kernel && antipodal) continue;

        Offset o;
        o.di = di;
        for (int a = 0; a < spec.d; ++a) o.dx[a] = h * di[a];
        o.dist = dist;
        if (cheb <= q.inner_exclusion) {
          if (lexicographically_positive(di, spec.d)) table.paired.push_back(o);
        } else {
          table.singles.push_back(o);
        }
      }
    }
  }
  return table;
}

// Value of f at index x - di, wrapping (periodic) or extending by zero.
inline double shifted_value(const GridSpec& spec, const std::vector<double>& v,
                            const std::array<int, 3>& x, const std::array<int, 3>& di,
                            bool compact) {
  std::array<int, 3> j{0, 0, 0};
  for (int a = 0; a < spec.d; ++a) {
    j[a] = x[a] - di[a];
    if (compact) {
      if (j[a] < 0 || j[a] >= spec.n) return 0.0;
    } else {
      if (j[a] < 0) j[a] += spec.n;
      else if (j[a] >= spec.n) j[a] -= spec.n;
    }
  }
  return v[flat_index(spec, j)];
}

// Hurwitz zeta for exponent a in (1, 3] and offset q in (0, 1], by
// Euler-Maclaurin summation. Accurate to ~1e-14 relative, which is far below
// the quadrature tolerances the weights feed into.
double hurwitz_zeta(double a, double q) {
  constexpr int kLead = 24;
  KahanSum sum;
  for (int m = 0; m < kLead; ++m) sum.add(std::pow(q + m, -a));
  const double x = q + kLead;
  sum.add(std::pow(x, 1.0 - a) / (a - 1.0));
  sum.add(0.5 * std::pow(x, -a));
  const double x2 = 1.0 / (x * x);
  double rising = a;  // a (a+1) ... rising factorial, advanced two at a time
  double pw = std::pow(x, -a - 1.0);
  sum.add(rising * pw / 12.0);  // B2 / 2!
  rising *= (a + 1.0) * (a + 2.0);
  pw *= x2;
  sum.add(-rising * pw / 720.0);  // B4 / 4!
  rising *= (a + 3.0) * (a + 4.0);
  pw *= x2;
  sum.add(rising * pw / 30240.0);  // B6 / 6!
  rising *= (a + 5.0) * (a + 6.0);
  pw *= x2;
  sum.add(-rising * pw / 1209600.0);  // B8 / 8!
  return sum.value();
}

inline bool shifted_inside(const GridSpec& spec, const std::array<int, 3>& x,
                           const std::array<int, 3>& di) {
  for (int a = 0; a < spec.d; ++a) {
    const int j = x[a] - di[a];
    if (j < 0 || j >= spec.n) return false;
  }
  return true;
}

void check_boundary_layer(const ScalarField& f) {
  const GridSpec& spec = f.spec();
  const std::size_t total = spec.size();
  for (std::size_t k = 0; k < total; ++k) {
    const MultiIndex idx = unflatten(spec, k);
    bool layer = false;
    for (int a = 0; a < spec.d; ++a) {
      if (idx[a] <= 1 || idx[a] >= spec.n - 2) layer = true;
    }
    if (layer && f[k] != 0.0) {
      throw ValidationError(
          "compact-support quadrature requires the field to vanish on a boundary "
          "layer of width 2h; found nonzero value at flat index " + std::to_string(k));
    }
  }
}

}  // namespace

void QuadratureConfig::validate(const GridSpec& spec) const {
  if (!(r_max > 0.0) || !std::isfinite(r_max)) {
    throw ValidationError("quadrature r_max must be positive and finite");
  }
  if (!compact_support && r_max > spec.L / 2.0 * (1.0 + 1e-12)) {
    throw ValidationError("periodic quadrature requires r_max <= L/2 (minimal image)");
  }
  if (inner_exclusion < 1) {
    throw ValidationError("quadrature inner_exclusion must be at least 1");
  }
  if (r_max < 2.0 * spec.h()) {
    throw ValidationError("quadrature r_max must cover at least two grid cells");
  }
}

VectorField frac_gradient_pv(const ScalarField& f, double s, const QuadratureConfig& q,
                             const CalibratedConstants& c) {
  const GridSpec& spec = f.spec();
  if (!(s > 0.0) || s > 1.0) throw ValidationError("frac_gradient_pv requires s in (0, 1]");
  q.validate(spec);
  if (q.compact_support) check_boundary_layer(f);

  const OffsetTable table = make_offsets(spec, q, /*odd_kernel=*/true);
  const double expo = spec.d + s + 1.0;
  // Periodic fields see the kernel summed over all periodic images; in d = 1
  // that sum has a closed form, and using it makes the quadrature consistent
  // with the spectral operator at every mode, not just asymptotically. For
  // d >= 2 and for compact support the minimal-image kernel is used.
  const bool periodize = spec.d == 1 && !q.compact_support;
  const auto weight = [&](const Offset& o) {
    if (!periodize) return std::pow(o.dist, -expo);
    const double u = o.dist / spec.L;
    return (hurwitz_zeta(1.0 + s, u) - hurwitz_zeta(1.0 + s, 1.0 - u)) /
           (u * std::pow(spec.L, 2.0 + s));
  };
  std::vector<double> w_paired(table.paired.size()), w_singles(table.singles.size());
  for (std::size_t o = 0; o < table.paired.size(); ++o) w_paired[o] = weight(table.paired[o]);
  for (std::size_t o = 0; o < table.singles.size(); ++o) w_singles[o] = weight(table.singles[o]);

  const std::size_t total = spec.size();
  const double h = spec.h();
  const double scale = c.c_grad * std::pow(h, spec.d);
  const double corr = c.kappa_grad * std::pow(h, 1.0 - s) / (2.0 * h);
  VectorField out(spec);
  const std::vector<double>& v = f.values();

  parallel_for(total, [&](std::size_t lo, std::size_t hi) {
    for (std::size_t k = lo; k < hi; ++k) {
      const MultiIndex x = unflatten(spec, k);
      KahanSum acc[3];
      for (std::size_t o = 0; o < table.paired.size(); ++o) {
        const Offset& r = table.paired[o];
        std::array<int, 3> neg{-r.di[0], -r.di[1], -r.di[2]};
        const double diff = shifted_value(spec, v, x, neg, q.compact_support) -
                            shifted_value(spec, v, x, r.di, q.compact_support);
        const double base = diff * w_paired[o];
        for (int a = 0; a < spec.d; ++a) acc[a].add(base * r.dx[a]);
      }
      const double fx = v[k];
      for (std::size_t o = 0; o < table.singles.size(); ++o) {
        const Offset& r = table.singles[o];
        const double diff = fx - shifted_value(spec, v, x, r.di, q.compact_support);
        const double base = diff * w_singles[o];
        for (int a = 0; a < spec.d; ++a) acc[a].add(base * r.dx[a]);
      }
      for (int a = 0; a < spec.d; ++a) {
        std::array<int, 3> step{0, 0, 0};
        step[a] = 1;
        std::array<int, 3> back{0, 0, 0};
        back[a] = -1;
        const double cd = shifted_value(spec, v, x, back, q.compact_support) -
                          shifted_value(spec, v, x, step, q.compact_support);
        out.comp(a)[k] = scale * acc[a].value() + corr * cd;
      }
    }
  });
  for (int a = 0; a < spec.d; ++a) out.comp(a).check_finite("frac_gradient_pv");
  return out;
}

ScalarField frac_laplacian_pv(const ScalarField& f, double sigma, const QuadratureConfig& q,
                              const CalibratedConstants& c) {
  const GridSpec& spec = f.spec();
  if (!(sigma > 0.0) || sigma >= 2.0) {
    throw ValidationError("frac_laplacian_pv requires sigma in (0, 2)");
  }
  q.validate(spec);
  if (q.compact_support) check_boundary_layer(f);

  const OffsetTable table = make_offsets(spec, q, /*odd_kernel=*/false);
  const double expo = spec.d + sigma;
  // Same image periodization as the gradient; the even kernel sums with a
  // plus sign.
  const bool periodize = spec.d == 1 && !q.compact_support;
  const auto weight = [&](const Offset& o) {
    if (!periodize) return std::pow(o.dist, -expo);
    const double u = o.dist / spec.L;
    return (hurwitz_zeta(1.0 + sigma, u) + hurwitz_zeta(1.0 + sigma, 1.0 - u)) /
           std::pow(spec.L, 1.0 + sigma);
  };
  std::vector<double> w_paired(table.paired.size()), w_singles(table.singles.size());
  for (std::size_t o = 0; o < table.paired.size(); ++o) w_paired[o] = weight(table.paired[o]);
  for (std::size_t o = 0; o < table.singles.size(); ++o) w_singles[o] = weight(table.singles[o]);

  const std::size_t total = spec.size();
  const double h = spec.h();
  const double scale = c.c_lap * std::pow(h, spec.d);
  const double corr = c.kappa_lap * std::pow(h, 2.0 - sigma) / (h * h);
  ScalarField out(spec);
  const std::vector<double>& v = f.values();

  parallel_for(total, [&](std::size_t lo, std::size_t hi) {
    for (std::size_t k = lo; k < hi; ++k) {
      const MultiIndex x = unflatten(spec, k);
      const double fx = v[k];
      KahanSum acc;
      for (std::size_t o = 0; o < table.paired.size(); ++o) {
        const Offset& r = table.paired[o];
        std::array<int, 3> neg{-r.di[0], -r.di[1], -r.di[2]};
        const double diff = 2.0 * fx - shifted_value(spec, v, x, neg, q.compact_support) -
                            shifted_value(spec, v, x, r.di, q.compact_support);
        acc.add(diff * w_paired[o]);
      }
      for (std::size_t o = 0; o < table.singles.size(); ++o) {
        const Offset& r = table.singles[o];
        acc.add((fx - shifted_value(spec, v, x, r.di, q.compact_support)) * w_singles[o]);
      }
      double neglap = 0.0;
      for (int a = 0; a < spec.d; ++a) {
        std::array<int, 3> step{0, 0, 0};
        step[a] = 1;
        std::array<int, 3> back{0, 0, 0};
        back[a] = -1;
        neglap += 2.0 * fx - shifted_value(spec, v, x, back, q.compact_support) -
                  shifted_value(spec, v, x, step, q.compact_support);
      }
      out[k] = scale * acc.value() + corr * neglap;
    }
  });
  out.check_finite("frac_laplacian_pv");
  return out;
}

double pv_tail_bound(const ScalarField& f, double s, const QuadratureConfig& q,
                     const CalibratedConstants& c) {
  const GridSpec& spec = f.spec();
  static const double sphere_measure[4] = {0.0, 2.0, 2.0 * M_PI, 4.0 * M_PI};
  const double sup = linf(f);
  return c.c_grad * 2.0 * sup * sphere_measure[spec.d] *
         std::pow(q.r_max, -(s + 1.0)) / (s + 1.0);
}

double gagliardo_seminorm(const ScalarField& u, double s, double p, const QuadratureConfig& q) {
  const GridSpec& spec = u.spec();
  if (!(s > 0.0) || s >= 1.0) {
    throw ValidationError("gagliardo_seminorm requires s in (0, 1); the kernel is "
                          "non-integrable at s = 1");
  }
  if (!(p >= 1.0) || !std::isfinite(p)) {
    throw ValidationError("gagliardo_seminorm requires finite p >= 1");
  }
  q.validate(spec);

  const OffsetTable table = make_offsets(spec, q, /*odd_kernel=*/false);
  std::vector<Offset> offsets = table.singles;
  // The seminorm kernel is even, so inner-shell pairing buys nothing; fold
  // the paired representatives back with their mirrors for a single flat list.
  for (const Offset& r : table.paired) {
    offsets.push_back(r);
    Offset m = r;
    for (int a = 0; a < spec.d; ++a) { m.di[a] = -m.di[a]; m.dx[a] = -m.dx[a]; }
    offsets.push_back(m);
  }
  const double expo = spec.d + s * p;
  std::vector<double> w(offsets.size());
  for (std::size_t o = 0; o < offsets.size(); ++o) w[o] = std::pow(offsets[o].dist, -expo);

  const std::size_t total = spec.size();
  const std::vector<double>& v = u.values();
  const bool square = (p == 2.0);
  std::vector<double> partial(total, 0.0);

  parallel_for(total, [&](std::size_t lo, std::size_t hi) {
    for (std::size_t k = lo; k < hi; ++k) {
      const MultiIndex x = unflatten(spec, k);
      const double ux = v[k];
      KahanSum acc;
      for (std::size_t o = 0; o < offsets.size(); ++o) {
        const Offset& r = offsets[o];
        double term;
        double mult = 1.0;
        if (q.compact_support && !shifted_inside(spec, x, r.di)) {
          // exterior partner: u(y) = 0, and the (y, x) order never appears
          // in the x-sum, so the pair is counted twice here
          term = std::abs(ux);
          mult = 2.0;
        } else {
          term = std::abs(ux - shifted_value(spec, v, x, r.di, q.compact_support));
        }
        if (term == 0.0) continue;
        acc.add(mult * (square ? term * term : std::pow(term, p)) * w[o]);
      }
      partial[k] = acc.value();
    }
  });

  KahanSum sum;
  for (std::size_t k = 0; k < total; ++k) sum.add(partial[k]);
  const double h2d = std::pow(spec.h(), 2 * spec.d);
  return std::pow(h2d * sum.value(), 1.0 / p);
}

double wsp_laplacian_weak(const ScalarField& u, const ScalarField& phi, double s, double p,
                          const QuadratureConfig& q) {
  const GridSpec& spec = u.spec();
  if (!(spec == phi.spec())) {
    throw ValidationError("wsp_laplacian_weak requires u and phi on the same grid");
  }
  if (!(s > 0.0) || s >= 1.0) throw ValidationError("wsp_laplacian_weak requires s in (0, 1)");
  if (!(p > 1.0) || !std::isfinite(p)) throw ValidationError("wsp_laplacian_weak requires p > 1");
  q.validate(spec);

  const OffsetTable table = make_offsets(spec, q, /*odd_kernel=*/false);
  std::vector<Offset> offsets = table.singles;
  for (const Offset& r : table.paired) {
    offsets.push_back(r);
    Offset m = r;
    for (int a = 0; a < spec.d; ++a) { m.di[a] = -m.di[a]; m.dx[a] = -m.dx[a]; }
    offsets.push_back(m);
  }
  const double expo = spec.d + s * p;
  std::vector<double> w(offsets.size());
  for (std::size_t o = 0; o < offsets.size(); ++o) w[o] = std::pow(offsets[o].dist, -expo);

  const std::size_t total = spec.size();
  const std::vector<double>& uv = u.values();
  const std::vector<double>& pv = phi.values();
  std::vector<double> partial(total, 0.0);

  parallel_for(total, [&](std::size_t lo, std::size_t hi) {
    for (std::size_t k = lo; k < hi; ++k) {
      const MultiIndex x = unflatten(spec, k);
      const double ux = uv[k];
      const double px = pv[k];
      KahanSum acc;
      for (std::size_t o = 0; o < offsets.size(); ++o) {
        const Offset& r = offsets[o];
        double du, dphi;
        double mult = 1.0;
        if (q.compact_support && !shifted_inside(spec, x, r.di)) {
          du = ux;
          dphi = px;
          mult = 2.0;
        } else {
          du = ux - shifted_value(spec, uv, x, r.di, q.compact_support);
          dphi = px - shifted_value(spec, pv, x, r.di, q.compact_support);
        }
        if (du == 0.0 || dphi == 0.0) continue;
        acc.add(mult * std::pow(std::abs(du), p - 2.0) * du * dphi * w[o]);
      }
      partial[k] = acc.value();
    }
  });

  KahanSum sum;
  for (std::size_t k = 0; k < total; ++k) sum.add(partial[k]);
  return std::pow(spec.h(), 2 * spec.d) * sum.value();
}

CalibratedConstants calibrate_constants(const GridSpec& spec, double s) {
  spec.validate();
  if (!(s > 0.0) || s >= 1.0) throw ValidationError("calibrate_constants requires s in (0, 1)");

  const auto mode_field = [&](int k) {
    return field_from_function(spec, [&](const std::array<double, 3>& x, int) {
      return std::sin(2.0 * M_PI * k * x[0] / spec.L);
    });
  };
  const ScalarField mode1 = mode_field(1);
  const ScalarField mode2 = mode_field(2);

  QuadratureConfig q;
  q.r_max = spec.L / 2.0;
  CalibratedConstants unit;  // c = 1, kappa = 0: the plain lattice sums

  const double h = spec.h();

  // Correction basis exactly as the operators apply it per unit kappa.
  const auto grad_corr = [&](const ScalarField& f) {
    const std::vector<double>& v = f.values();
    std::vector<double> out(v.size());
    const double fac = std::pow(h, 1.0 - s) / (2.0 * h);
    for (std::size_t k = 0; k < v.size(); ++k) {
      const MultiIndex x = unflatten(spec, k);
      const std::array<int, 3> step{1, 0, 0}, back{-1, 0, 0};
      out[k] =
          fac * (shifted_value(spec, v, x, back, false) - shifted_value(spec, v, x, step, false));
    }
    return out;
  };
  const auto lap_corr = [&](const ScalarField& f) {
    const std::vector<double>& v = f.values();
    std::vector<double> out(v.size());
    const double fac = std::pow(h, 2.0 - s) / (h * h);
    for (std::size_t k = 0; k < v.size(); ++k) {
      const MultiIndex x = unflatten(spec, k);
      double neglap = 0.0;
      for (int a = 0; a < spec.d; ++a) {
        std::array<int, 3> step{0, 0, 0};
        step[a] = 1;
        std::array<int, 3> back{0, 0, 0};
        back[a] = -1;
        neglap += 2.0 * v[k] - shifted_value(spec, v, x, back, false) -
                  shifted_value(spec, v, x, step, false);
      }
      out[k] = fac * neglap;
    }
    return out;
  };

  // Joint least squares for (c, kappa) over both modes; the reported
  // residual is the k = 1 misfit, which the two-parameter fit drives to
  // roundoff on translation-invariant operators.
  struct Fit {
    double c = 0.0, kappa = 0.0, residual1 = 0.0;
  };
  const auto fit = [](const std::vector<double>& raw1, const std::vector<double>& cor1,
                      const std::vector<double>& tgt1, const std::vector<double>& raw2,
                      const std::vector<double>& cor2, const std::vector<double>& tgt2,
                      const char* what) {
    KahanSum a11, a12, a22, b1, b2;
    const auto accumulate = [&](const std::vector<double>& r, const std::vector<double>& cc,
                                const std::vector<double>& t) {
      for (std::size_t i = 0; i < r.size(); ++i) {
        a11.add(r[i] * r[i]);
        a12.add(r[i] * cc[i]);
        a22.add(cc[i] * cc[i]);
        b1.add(r[i] * t[i]);
        b2.add(cc[i] * t[i]);
      }
    };
    accumulate(raw1, cor1, tgt1);
    accumulate(raw2, cor2, tgt2);
    const double det = a11.value() * a22.value() - a12.value() * a12.value();
    if (!(a11.value() > 0.0) || !(det > 1e-12 * a11.value() * a22.value())) {
      throw NumericError(std::string("calibration failed: degenerate normal equations for ") +
                         what);
    }
    Fit f;
    f.c = (b1.value() * a22.value() - b2.value() * a12.value()) / det;
    f.kappa = (a11.value() * b2.value() - a12.value() * b1.value()) / det;
    KahanSum mis, ref;
    for (std::size_t i = 0; i < raw1.size(); ++i) {
      const double e = f.c * raw1[i] + f.kappa * cor1[i] - tgt1[i];
      mis.add(e * e);
      ref.add(tgt1[i] * tgt1[i]);
    }
    f.residual1 = std::sqrt(mis.value() / ref.value());
    return f;
  };

  CalibratedConstants out;
  {
    const VectorField tg1 = frac_gradient(mode1, s), tg2 = frac_gradient(mode2, s);
    const VectorField rg1 = frac_gradient_pv(mode1, s, q, unit);
    const VectorField rg2 = frac_gradient_pv(mode2, s, q, unit);
    const Fit f = fit(rg1.comp(0).values(), grad_corr(mode1), tg1.comp(0).values(),
                      rg2.comp(0).values(), grad_corr(mode2), tg2.comp(0).values(), "gradient");
    if (!(f.c > 0.0)) throw NumericError("calibration failed: nonpositive gradient constant");
    out.c_grad = f.c;
    out.kappa_grad = f.kappa;
    out.grad_residual = f.residual1;
  }
  {
    const ScalarField tl1 = frac_laplacian(mode1, s), tl2 = frac_laplacian(mode2, s);
    const ScalarField rl1 = frac_laplacian_pv(mode1, s, q, unit);
    const ScalarField rl2 = frac_laplacian_pv(mode2, s, q, unit);
    const Fit f = fit(rl1.values(), lap_corr(mode1), tl1.values(), rl2.values(), lap_corr(mode2),
                      tl2.values(), "laplacian");
    if (!(f.c > 0.0)) throw NumericError("calibration failed: nonpositive laplacian constant");
    out.c_lap = f.c;
    out.kappa_lap = f.kappa;
    out.lap_residual = f.residual1;
  }

  if (out.grad_residual > 0.05 || out.lap_residual > 0.05) {
    throw NumericError(
        "calibration residual exceeds 5% (grad " + std::to_string(out.grad_residual) +
        ", lap " + std::to_string(out.lap_residual) + "); grid too coarse for this order");
  }
  return out;
}

}  // namespace fracgrad
