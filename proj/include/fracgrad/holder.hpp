#ifndef FRACGRAD_HOLDER_HPP
#define FRACGRAD_HOLDER_HPP

#include <string>
#include <vector>

#include "fracgrad/grid.hpp"

namespace fracgrad {

struct HolderEstimate {
  double exponent = 0.0;            // alpha, clipped to [0, 2]
  double fit_quality = 0.0;         // R^2 of the log-log fit
  std::vector<double> radii;        // radii that entered the fit
  std::vector<double> oscillations; // max oscillation per kept radius
  Mask region;
  std::string note;                 // nonempty when the sentinel path was taken
};

// max - min of f over lattice points within distance r of center (periodic).
// Requires h <= r < L/2 so the ball has content and does not self-overlap.
double local_oscillation(const ScalarField& f, const MultiIndex& center, double r);

struct PowerFit {
  double slope = 0.0;
  double r2 = 1.0;
};

// Least-squares slope of log S against log r; r2 is the coefficient of
// determination. Exposed so the regression can be checked on exact tables.
PowerFit fit_power_law(const std::vector<double>& radii, const std::vector<double>& osc);

// For each radius, takes the max oscillation over up to 50 centers sampled
// from the region by lattice strides, then fits the decay exponent.
// Radii must be >= 4, dyadically spaced, decreasing, each in [2h, L/2).
// A locally constant field short-circuits to the sentinel alpha = 2.
HolderEstimate estimate_holder(const ScalarField& f, const Mask& region,
                               const std::vector<double>& radii);

}  // namespace fracgrad

#endif
