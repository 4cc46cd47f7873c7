#include "fracgrad/holder.hpp"

#include <algorithm>
#include <cfloat>
#include <cmath>

#include "fracgrad/numerics.hpp"

namespace fracgrad {

namespace {

std::vector<MultiIndex> ball_offsets(const GridSpec& spec, double r) {
  const double h = spec.h();
  const int m = static_cast<int>(std::floor(r / h * (1.0 + 1e-12)));
  std::vector<MultiIndex> out;
  const double r2 = (r / h) * (r / h) * (1.0 + 1e-12);
  MultiIndex di{0, 0, 0};
  const int lo1 = (spec.d > 1) ? -m : 0, hi1 = (spec.d > 1) ? m : 0;
  const int lo2 = (spec.d > 2) ? -m : 0, hi2 = (spec.d > 2) ? m : 0;
  for (int i0 = -m; i0 <= m; ++i0) {
    di[0] = i0;
    for (int i1 = lo1; i1 <= hi1; ++i1) {
      di[1] = i1;
      for (int i2 = lo2; i2 <= hi2; ++i2) {
        di[2] = i2;
        double q = 0.0;
        for (int a = 0; a < spec.d; ++a) q += static_cast<double>(di[a]) * di[a];
        if (q <= r2) out.push_back(di);
      }
    }
  }
  return out;
}

double oscillation_at(const ScalarField& f, const MultiIndex& center,
                      const std::vector<MultiIndex>& offsets) {
  const GridSpec& spec = f.spec();
  double mn = DBL_MAX, mx = -DBL_MAX;
  for (const MultiIndex& di : offsets) {
    MultiIndex j = center;
    for (int a = 0; a < spec.d; ++a) j[a] = wrap(center[a] + di[a], spec.n);
    const double v = f[flat_index(spec, j)];
    mn = std::min(mn, v);
    mx = std::max(mx, v);
  }
  return mx - mn;
}

}  // namespace

double local_oscillation(const ScalarField& f, const MultiIndex& center, double r) {
  const GridSpec& spec = f.spec();
  if (r < spec.h()) throw ValidationError("local_oscillation: radius below grid spacing");
  if (!(r < spec.L / 2.0)) {
    throw ValidationError("local_oscillation: radius must stay below L/2 (self-overlap)");
  }
  for (int a = 0; a < spec.d; ++a) {
    if (center[a] < 0 || center[a] >= spec.n) {
      throw ValidationError("local_oscillation: center outside the lattice");
    }
  }
  return oscillation_at(f, center, ball_offsets(spec, r));
}

PowerFit fit_power_law(const std::vector<double>& radii, const std::vector<double>& osc) {
  if (radii.size() != osc.size() || radii.size() < 2) {
    throw ValidationError("fit_power_law needs matching lists with at least two entries");
  }
  const std::size_t m = radii.size();
  std::vector<double> xs(m), ys(m);
  for (std::size_t i = 0; i < m; ++i) {
    if (!(radii[i] > 0.0) || !(osc[i] > 0.0)) {
      throw ValidationError("fit_power_law requires positive radii and oscillations");
    }
    xs[i] = std::log(radii[i]);
    ys[i] = std::log(osc[i]);
  }
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < m; ++i) { mx += xs[i]; my += ys[i]; }
  mx /= static_cast<double>(m);
  my /= static_cast<double>(m);
  double sxx = 0.0, sxy = 0.0, syy = 0.0;
  for (std::size_t i = 0; i < m; ++i) {
    sxx += (xs[i] - mx) * (xs[i] - mx);
    sxy += (xs[i] - mx) * (ys[i] - my);
    syy += (ys[i] - my) * (ys[i] - my);
  }
  PowerFit fit;
  fit.slope = sxy / sxx;
  if (syy > 0.0) {
    double ss_res = 0.0;
    for (std::size_t i = 0; i < m; ++i) {
      const double e = ys[i] - (my + fit.slope * (xs[i] - mx));
      ss_res += e * e;
    }
    fit.r2 = 1.0 - ss_res / syy;
  }
  return fit;
}

HolderEstimate estimate_holder(const ScalarField& f, const Mask& region,
                               const std::vector<double>& radii) {
  const GridSpec& spec = f.spec();
  if (region.size() != spec.size()) {
    throw ValidationError("estimate_holder: region mask length mismatch");
  }
  if (radii.size() < 4) throw ValidationError("estimate_holder needs at least 4 radii");
  for (std::size_t j = 0; j < radii.size(); ++j) {
    if (radii[j] < 2.0 * spec.h() || !(radii[j] < spec.L / 2.0)) {
      throw ValidationError("estimate_holder: radii must lie in [2h, L/2)");
    }
    if (j > 0) {
      const double ratio = radii[j] / radii[j - 1];
      if (std::abs(ratio - 0.5) > 1e-6) {
        throw ValidationError("estimate_holder: radii must be dyadic, r_j = r_0 * 2^-j");
      }
    }
  }

  std::vector<std::size_t> marked;
  for (std::size_t k = 0; k < region.size(); ++k) {
    if (region[k]) marked.push_back(k);
  }
  if (marked.empty()) throw ValidationError("estimate_holder: empty region");
  const std::size_t stride = std::max<std::size_t>(1, marked.size() / 50);
  std::vector<MultiIndex> centers;
  for (std::size_t i = 0; i < marked.size() && centers.size() < 50; i += stride) {
    centers.push_back(unflatten(spec, marked[i]));
  }

  std::vector<double> kept_r, kept_s;
  const double floor = 10.0 * DBL_EPSILON * std::max(1.0, linf(f));
  for (double r : radii) {
    const std::vector<MultiIndex> offsets = ball_offsets(spec, r);
    double s = 0.0;
    for (const MultiIndex& c : centers) s = std::max(s, oscillation_at(f, c, offsets));
    if (s > floor) {
      kept_r.push_back(r);
      kept_s.push_back(s);
    }
  }

  HolderEstimate est;
  est.region = region;
  est.radii = kept_r;
  est.oscillations = kept_s;
  if (kept_r.size() < 2) {
    est.exponent = 2.0;
    est.fit_quality = 1.0;
    est.note = "field locally constant at the sampled scales; sentinel exponent";
    return est;
  }
  const PowerFit fit = fit_power_law(kept_r, kept_s);
  est.exponent = std::clamp(fit.slope, 0.0, 2.0);
  est.fit_quality = fit.r2;
  return est;
}

}  // namespace fracgrad
