#ifndef FRACGRAD_SPECTRAL_HPP
#define FRACGRAD_SPECTRAL_HPP

#include <array>
#include <memory>
#include <vector>

#include "fracgrad/grid.hpp"

namespace fracgrad {

// Frequency bookkeeping for one grid. Integer frequencies per axis live in
// (-n/2, n/2] with the Nyquist index n/2 mapped to +n/2 in every component,
// so magnitude symbols compose exactly across operators.
struct MultiplierTable {
  GridSpec spec;
  std::vector<double> abs_xi;                 // |xi_k|, flat row-major, length n^d
  std::array<std::vector<double>, 3> axis_xi; // signed xi per axis index, length n each

  std::array<double, 3> xi(std::size_t flat) const {
    MultiIndex idx = unflatten(spec, flat);
    std::array<double, 3> v{0, 0, 0};
    for (int a = 0; a < spec.d; ++a) v[a] = axis_xi[a][static_cast<std::size_t>(idx[a])];
    return v;
  }
};

// Shared, cached per GridSpec; safe to use concurrently.
std::shared_ptr<const MultiplierTable> multiplier_table(const GridSpec& spec);

// Fourier multiplier |xi|^sigma for sigma in (0,2]. The zero mode is
// annihilated, so the output is mean-free.
ScalarField frac_laplacian(const ScalarField& f, double sigma);

// Fourier multiplier |xi|^{-sigma} for sigma in (0,1]. The zero mode passes
// through unchanged, so constants are fixed points and the lift at s = 1 is
// the identity. The inverse identity against frac_laplacian holds on
// mean-zero fields.
ScalarField riesz_potential(const ScalarField& f, double sigma);

// Component j carries the multiplier i*xi_j*|xi|^{s-1}; at s = 1 this is the
// spectral classical gradient. s in (0,1].
VectorField frac_gradient(const ScalarField& f, double s);

// Adjoint-up-to-sign of frac_gradient: sum over components of the same odd
// multiplier. s in (0,1].
ScalarField frac_divergence(const VectorField& g, double s);

VectorField classical_gradient(const ScalarField& f);
ScalarField classical_divergence(const VectorField& g);

// Unvalidated power helpers used inside composite pipelines. sigma in [0,2];
// sigma = 0 returns the input unchanged.
ScalarField frac_power(const ScalarField& f, double sigma);   // |xi|^sigma, zero mode -> 0
ScalarField riesz_power(const ScalarField& f, double sigma);  // |xi|^{-sigma}, zero mode kept

namespace testing {
// Perturbs the gradient's multiplier only (not the divergence), which breaks
// the discrete duality pairing; selfcheck uses this to prove the adjointness
// check has teeth.
void inject_gradient_multiplier_fault(bool enabled);
}  // namespace testing

}  // namespace fracgrad

#endif
