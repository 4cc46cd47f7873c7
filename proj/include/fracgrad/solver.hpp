#ifndef FRACGRAD_SOLVER_HPP
#define FRACGRAD_SOLVER_HPP

#include <string>
#include <vector>

#include "fracgrad/energy.hpp"
#include "fracgrad/grid.hpp"

namespace fracgrad {

// Minimize p_energy over fields that agree with g outside omega. The
// exterior values are data, not unknowns: nonlocal operators see the whole
// complement, so this plays the role a boundary condition plays locally.
struct Problem {
  GridSpec spec;
  DomainMasks masks;
  ScalarField g;      // authoritative off omega
  FracParams params;

  void validate() const;
};

struct SolverConfig {
  double tol = 0.0;                // <= 0 selects the default 1e-9 * sqrt(n^d)
  int max_iters = 50000;
  double step0 = 1.0;
  double shrink = 0.5;             // backtracking factor, in (0,1)
  double armijo_c = 1e-4;          // sufficient-decrease constant, in (0,1/2)
  double precondition_order = -1;  // sigma_pre in [0, 2s]; < 0 selects 2s; 0 disables

  double resolved_tol(const GridSpec& spec) const;
  double resolved_order(const FracParams& params) const;
  void validate(const FracParams& params) const;
};

struct Solution {
  ScalarField u;
  std::vector<double> residual_history;  // interior-gradient L2 norms
  std::vector<double> energy_history;
  int iterations = 0;
  bool converged = false;
  std::string diagnostic;
};

// Preconditioned projected gradient descent with Armijo backtracking.
// Iterates keep the exterior bitwise equal to g; the energy history is
// nonincreasing. Near the minimizer the Armijo decrease drops below the
// roundoff in p_energy; there a trial step is accepted on its directional
// derivative instead (which keeps full relative precision), so tolerances
// below the energy roundoff floor remain reachable. Line-search underflow
// returns a non-converged Solution with a diagnostic; NaN iterates raise
// NumericError.
Solution solve(const Problem& prob, const SolverConfig& cfg);

// Linear oracle for p = 2, eps_reg = 0, where the optimality condition is
// the linear system (-Delta)^{2s} u = 0 on omega. Solved by preconditioned
// conjugate gradients on the interior unknowns to relative residual 1e-12.
Solution solve_linear_p2(const Problem& prob);

// L2 norm (weight h^d) of energy_gradient over omega.
double interior_residual(const ScalarField& u, const Problem& prob);

}  // namespace fracgrad

#endif
