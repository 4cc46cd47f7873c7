#ifndef FRACGRAD_CLI_CONFIG_HPP
#define FRACGRAD_CLI_CONFIG_HPP

#include <cstdint>
#include <string>
#include <vector>

#include <json.hpp>

#include "fracgrad/grid.hpp"
#include "fracgrad/singular.hpp"
#include "fracgrad/solver.hpp"

namespace fracgrad::cli {

using OrderedJson = nlohmann::ordered_json;

// One additive term of the exterior-data function. The sum of terms is
// evaluated at lattice points to build g on each grid, which keeps the data
// resolution-independent.
struct ExteriorTerm {
  std::string kind;               // "constant" | "sin" | "gaussian"
  double value = 0.0;             // constant
  double amplitude = 0.0;         // sin, gaussian
  std::array<int, 3> frequency{0, 0, 0};  // sin: integer mode numbers
  double phase = 0.0;             // sin
  std::array<double, 3> center{0, 0, 0};  // gaussian
  double width = 0.1;             // gaussian
};

// Parsed, structurally validated configuration. Which sections are required
// depends on the command; run_command enforces that.
struct RunConfig {
  bool has_grid = false;
  GridSpec spec;

  bool has_domain = false;
  Box omega, omega2, omega1;

  bool has_params = false;
  FracParams params;

  SolverConfig solver;  // defaults unless a "solver" section overrides them

  bool has_exterior = false;
  std::vector<ExteriorTerm> exterior;

  std::uint64_t seed = 12345;  // documented default; FRACGRAD_SEED overrides
  int samples = 50;
  std::vector<int> grid_sizes;
  std::vector<double> radii;
  double cutoff_width = -1.0;  // < 0 selects masks.separation / 2

  bool has_quadrature = false;
  QuadratureConfig quadrature;

  std::string algorithm = "gradient_descent";  // or "linear_p2"
  bool inject_fault = false;                   // selfcheck test hook

  OrderedJson raw;  // echoed into report sidecars
};

// Strict parse: every key must be known, every value well-typed and in
// range. Throws ValidationError with the offending path in the message.
RunConfig parse_config_file(const std::string& path, const std::string& command);

// The exterior terms as an evaluable function of position.
FieldFunction exterior_function(const RunConfig& cfg, double L);

}  // namespace fracgrad::cli

#endif
