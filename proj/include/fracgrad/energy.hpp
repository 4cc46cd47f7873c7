#ifndef FRACGRAD_ENERGY_HPP
#define FRACGRAD_ENERGY_HPP

#include "fracgrad/grid.hpp"

namespace fracgrad {

// Parameters of the regularized p-energy of the spectral fractional gradient.
struct FracParams {
  double s = 0.5;       // differentiation order, (0, 1]
  double p = 2.0;       // growth exponent, > 1
  double eps_reg = 0.0; // flux regularization; must be positive when p < 2

  void validate() const;
};

// Pointwise flux g -> (|g|^2 + eps_reg^2)^{(p-2)/2} g. flux(0) = 0 always.
VectorField flux(const VectorField& g, const FracParams& params);

// ( h^d sum_x |D^s u(x)|^p )^{1/p} with the spectral fractional gradient.
double hsp_seminorm(const ScalarField& u, double s, double p);

// (1/p) h^d sum_x ( (|D^s u|^2 + eps_reg^2)^{p/2} - eps_reg^p ).  The
// subtraction keeps the energy of constants exactly zero for every eps_reg;
// at eps_reg = 0 this is hsp_seminorm^p / p.
double p_energy(const ScalarField& u, const FracParams& params);

// Gateaux derivative of p_energy at u in direction phi:
// h^d sum_x flux(D^s u) . D^s phi.  Exact derivative of the discrete energy.
double first_variation(const ScalarField& u, const ScalarField& phi, const FracParams& params);

// div_s( flux(D^s u) ).  Pairs with the first variation through the discrete
// duality <hsp_laplacian_strong(u), phi> = -first_variation(u, phi).
ScalarField hsp_laplacian_strong(const ScalarField& u, const FracParams& params);

// L2 gradient of p_energy over the interior unknowns: -hsp_laplacian_strong
// zeroed outside the marked points (exterior values are fixed data).
ScalarField energy_gradient(const ScalarField& u, const FracParams& params, const Mask& interior);

}  // namespace fracgrad

#endif
