#ifndef FRACGRAD_REDUCTION_HPP
#define FRACGRAD_REDUCTION_HPP

#include <cstdint>
#include <vector>

#include "fracgrad/energy.hpp"
#include "fracgrad/grid.hpp"
#include "fracgrad/solver.hpp"

namespace fracgrad {

// Smooth partition pair for the nested geometry: eta is a mollified
// indicator of omega (exactly 1 at distance >= width from the complement,
// exactly 0 on it), zeta a mollified indicator of omega1 (exactly 1 on it,
// vanishing beyond width). eta_c = 1 - eta exactly, so supp eta_c hugs the
// outer boundary and stays far from supp zeta; that separation is what keeps
// the transform kernel bounded.
struct CutoffPair {
  ScalarField eta;
  ScalarField eta_c;
  ScalarField zeta;
  double smoothness_width = 0.0;
};

struct ReductionGridEntry {
  int n = 0;
  double sup_mu_omega1 = 0.0;
  double sup_mu_control = 0.0;
  double identity_defect = 0.0;
  bool valid = false;  // false when the solve did not converge at this n
};

struct KernelStats {
  double max_ratio = 0.0;     // max_i ||T(phi_i)||_p / ||phi_i||_1
  double median_ratio = 0.0;
  double schur_x = 0.0;       // sup_x integral |k(x,y)| dy
  double schur_y = 0.0;       // sup_y integral |k(x,y)| dx
  std::vector<double> ratios; // per-sample ratios, in draw order
};

struct ReductionVerdict {
  bool prop1_stable = false;   // successive sup-mu ratios <= 1.5
  bool control_grows = false;  // successive control ratios >= 2
};

struct ReductionReport {
  std::vector<ReductionGridEntry> grids;
  KernelStats kernel;
  ReductionVerdict verdict;
};

// Resolution-independent description of one variational problem, resampled
// onto each grid of a refinement study.
struct ProblemRecipe {
  int d = 1;
  double L = 1.0;
  Box omega, omega2, omega1;
  FieldFunction exterior;  // evaluated pointwise to build g per grid
  FracParams params;
};

// v = I_{1-s} u; the identity map at s = 1. Constants pass through.
ScalarField lift(const ScalarField& u, double s);

// mu = -div( flux(Dv) ) with the classical spectral gradient/divergence.
ScalarField classical_p_laplacian(const ScalarField& v, double p, double eps_reg);

// | <flux(D lift(u,s)), D^s phi> - first_variation(u, phi) |.  Zero in exact
// arithmetic because D lift(u,s) = D^s u; the defect measures roundoff.
double reduction_identity_check(const ScalarField& u, const FracParams& params,
                                const ScalarField& phi);

// Requires width <= masks.separation / 2 so both ramps complete inside their
// gaps. Handles degenerate geometry (omega = whole torus gives eta == 1).
CutoffPair build_cutoffs(const DomainMasks& masks, double width);

// T(phi) = D^s( eta_c * (-Delta)^{(1-s)/2} phi ) for phi supported in omega1
// (vanishing wherever zeta < 1). Vector form plus its magnitude for reports.
VectorField test_transform_vec(const ScalarField& phi, double s, const CutoffPair& cut);
ScalarField test_transform(const ScalarField& phi, double s, const CutoffPair& cut);

// Smooth window equal to 1 deep inside the marked set and 0 on its
// complement; used to manufacture test functions supported in a mask.
ScalarField interior_window(const GridSpec& spec, const Mask& mask);

// Samples seeded test functions supported in omega1, records the ratio
// statistics ||T(phi)||_p / ||phi||_1, and evaluates the Schur quantities of
// k(x,y) = D^s_x [ eta_c(x) zeta(y) / |x-y|^{d+1-s} ] on a coarse y-sample.
KernelStats kernel_bound_report(const DomainMasks& masks, const CutoffPair& cut, double s,
                                double p, int samples, std::uint64_t seed);

// Refinement study: per grid size solve, lift, measure sup_{omega1} |mu| for
// the solution and for an oscillatory control (exterior data plus a bump at
// frequency n/4 supported in omega), and record the identity defect.
ReductionReport mu_boundedness_report(const ProblemRecipe& recipe, const SolverConfig& cfg,
                                      const std::vector<int>& grid_sizes);

}  // namespace fracgrad

#endif
