#include "fracgrad/energy.hpp"

#include <cmath>

#include "fracgrad/numerics.hpp"
#include "fracgrad/spectral.hpp"

namespace fracgrad {

void FracParams::validate() const {
  if (!(s > 0.0) || s > 1.0) throw ValidationError("FracParams: s must lie in (0, 1]");
  if (!(p > 1.0) || !std::isfinite(p)) throw ValidationError("FracParams: p must be finite and > 1");
  if (!(eps_reg >= 0.0) || !std::isfinite(eps_reg)) {
    throw ValidationError("FracParams: eps_reg must be finite and nonnegative");
  }
  if (p < 2.0 && eps_reg == 0.0) {
    throw ValidationError("FracParams: p < 2 requires eps_reg > 0 (flux singular at zero gradient)");
  }
}

VectorField flux(const VectorField& g, const FracParams& params) {
  params.validate();
  const GridSpec& spec = g.spec();
  const std::size_t total = spec.size();
  const double e2 = params.eps_reg * params.eps_reg;
  const double expo = (params.p - 2.0) / 2.0;
  VectorField out(spec);

  if (params.p == 2.0 && params.eps_reg == 0.0) {
    for (int a = 0; a < spec.d; ++a) out.comp(a) = g.comp(a);
    return out;
  }

  parallel_for(total, [&](std::size_t lo, std::size_t hi) {
    for (std::size_t k = lo; k < hi; ++k) {
      double m2 = e2;
      for (int a = 0; a < spec.d; ++a) {
        const double c = g.comp(a)[k];
        m2 += c * c;
      }
      const double m = (m2 == 0.0) ? 0.0 : std::pow(m2, expo);
      for (int a = 0; a < spec.d; ++a) out.comp(a)[k] = m * g.comp(a)[k];
    }
  });
  return out;
}

double hsp_seminorm(const ScalarField& u, double s, double p) {
  if (!(p >= 1.0)) throw ValidationError("hsp_seminorm requires p >= 1");
  return lp_norm(frac_gradient(u, s).magnitude(), p);
}

double p_energy(const ScalarField& u, const FracParams& params) {
  params.validate();
  const GridSpec& spec = u.spec();
  const VectorField g = frac_gradient(u, params.s);
  const double e2 = params.eps_reg * params.eps_reg;
  const double ep = std::pow(params.eps_reg, params.p);
  const std::size_t total = spec.size();

  KahanSum sum;
  for (std::size_t k = 0; k < total; ++k) {
    double m2 = e2;
    for (int a = 0; a < spec.d; ++a) {
      const double c = g.comp(a)[k];
      m2 += c * c;
    }
    sum.add((m2 == 0.0 ? 0.0 : std::pow(m2, params.p / 2.0)) - ep);
  }
  return std::pow(spec.h(), spec.d) * sum.value() / params.p;
}

double first_variation(const ScalarField& u, const ScalarField& phi, const FracParams& params) {
  params.validate();
  if (!(u.spec() == phi.spec())) {
    throw ValidationError("first_variation requires u and phi on the same grid");
  }
  const VectorField f = flux(frac_gradient(u, params.s), params);
  const VectorField dphi = frac_gradient(phi, params.s);
  return inner(f, dphi);
}

ScalarField hsp_laplacian_strong(const ScalarField& u, const FracParams& params) {
  params.validate();
  return frac_divergence(flux(frac_gradient(u, params.s), params), params.s);
}

ScalarField energy_gradient(const ScalarField& u, const FracParams& params, const Mask& interior) {
  const GridSpec& spec = u.spec();
  if (interior.size() != spec.size()) {
    throw ValidationError("energy_gradient: mask length does not match the grid");
  }
  ScalarField g = hsp_laplacian_strong(u, params);
  const std::size_t total = spec.size();
  for (std::size_t k = 0; k < total; ++k) g[k] = interior[k] ? -g[k] : 0.0;
  return g;
}

}  // namespace fracgrad
