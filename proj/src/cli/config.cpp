#include "config.hpp"

#include <cmath>
#include <fstream>
#include <set>

namespace fracgrad::cli {

namespace {

using Json = OrderedJson;

[[noreturn]] void fail(const std::string& where, const std::string& what) {
  throw ValidationError("config: " + where + ": " + what);
}

void reject_unknown(const Json& obj, const std::string& where, const std::set<std::string>& allowed) {
  for (auto it = obj.begin(); it != obj.end(); ++it) {
    if (!allowed.count(it.key())) fail(where, "unknown key \"" + it.key() + "\"");
  }
}

const Json& require(const Json& obj, const std::string& where, const std::string& key) {
  auto it = obj.find(key);
  if (it == obj.end()) fail(where, "missing required key \"" + key + "\"");
  return *it;
}

double as_double(const Json& v, const std::string& where) {
  if (!v.is_number()) fail(where, "expected a number");
  return v.get<double>();
}

int as_int(const Json& v, const std::string& where) {
  if (!v.is_number_integer()) fail(where, "expected an integer");
  return v.get<int>();
}

bool as_bool(const Json& v, const std::string& where) {
  if (!v.is_boolean()) fail(where, "expected a boolean");
  return v.get<bool>();
}

std::string as_string(const Json& v, const std::string& where) {
  if (!v.is_string()) fail(where, "expected a string");
  return v.get<std::string>();
}

template <typename T, std::size_t N>
std::array<T, N> as_array(const Json& v, const std::string& where, int want) {
  if (!v.is_array() || static_cast<int>(v.size()) != want) {
    fail(where, "expected an array of length " + std::to_string(want));
  }
  std::array<T, N> out{};
  for (int i = 0; i < want; ++i) {
    if constexpr (std::is_same_v<T, double>) {
      out[static_cast<std::size_t>(i)] = as_double(v[static_cast<std::size_t>(i)], where);
    } else {
      out[static_cast<std::size_t>(i)] = as_int(v[static_cast<std::size_t>(i)], where);
    }
  }
  return out;
}

Box parse_box(const Json& v, const std::string& where, int d) {
  if (!v.is_object()) fail(where, "expected an object with lo/hi");
  reject_unknown(v, where, {"lo", "hi"});
  Box b;
  b.lo = as_array<double, 3>(require(v, where, "lo"), where + ".lo", d);
  b.hi = as_array<double, 3>(require(v, where, "hi"), where + ".hi", d);
  for (int a = 0; a < d; ++a) {
    if (!(b.lo[a] < b.hi[a])) fail(where, "lo must be strictly below hi on every axis");
  }
  return b;
}

ExteriorTerm parse_term(const Json& v, const std::string& where, int d) {
  if (!v.is_object()) fail(where, "expected a term object");
  ExteriorTerm t;
  t.kind = as_string(require(v, where, "kind"), where + ".kind");
  if (t.kind == "constant") {
    reject_unknown(v, where, {"kind", "value"});
    t.value = as_double(require(v, where, "value"), where + ".value");
  } else if (t.kind == "sin") {
    reject_unknown(v, where, {"kind", "amplitude", "frequency", "phase"});
    t.amplitude = as_double(require(v, where, "amplitude"), where + ".amplitude");
    t.frequency = as_array<int, 3>(require(v, where, "frequency"), where + ".frequency", d);
    if (auto it = v.find("phase"); it != v.end()) t.phase = as_double(*it, where + ".phase");
  } else if (t.kind == "gaussian") {
    reject_unknown(v, where, {"kind", "amplitude", "center", "width"});
    t.amplitude = as_double(require(v, where, "amplitude"), where + ".amplitude");
    t.center = as_array<double, 3>(require(v, where, "center"), where + ".center", d);
    t.width = as_double(require(v, where, "width"), where + ".width");
    if (!(t.width > 0.0)) fail(where, "gaussian width must be positive");
  } else {
    fail(where, "unknown term kind \"" + t.kind + "\" (constant | sin | gaussian)");
  }
  return t;
}

}  // namespace

RunConfig parse_config_file(const std::string& path, const std::string& command) {
  std::ifstream in(path);
  if (!in) throw ValidationError("config: cannot open " + path);
  Json root;
  try {
    root = Json::parse(in);
  } catch (const std::exception& e) {
    throw ValidationError("config: JSON parse error in " + path + ": " + e.what());
  }
  if (!root.is_object()) throw ValidationError("config: top level must be a JSON object");

  reject_unknown(root, "top level",
                 {"command", "grid", "domain", "params", "solver", "exterior", "seed", "samples",
                  "grid_sizes", "radii", "cutoff_width", "quadrature", "algorithm",
                  "inject_fault"});

  RunConfig cfg;
  cfg.raw = root;

  if (auto it = root.find("command"); it != root.end()) {
    const std::string declared = as_string(*it, "command");
    if (declared != command) {
      fail("command", "config declares \"" + declared + "\" but \"" + command + "\" was invoked");
    }
  }

  if (auto it = root.find("grid"); it != root.end()) {
    const Json& g = *it;
    if (!g.is_object()) fail("grid", "expected an object");
    reject_unknown(g, "grid", {"d", "n", "L"});
    cfg.spec.d = as_int(require(g, "grid", "d"), "grid.d");
    cfg.spec.n = as_int(require(g, "grid", "n"), "grid.n");
    cfg.spec.L = as_double(require(g, "grid", "L"), "grid.L");
    cfg.spec.validate();
    cfg.has_grid = true;
  }

  if (auto it = root.find("domain"); it != root.end()) {
    if (!cfg.has_grid) fail("domain", "requires a grid section (for the dimension)");
    const Json& dm = *it;
    if (!dm.is_object()) fail("domain", "expected an object");
    reject_unknown(dm, "domain", {"omega", "omega2", "omega1"});
    cfg.omega = parse_box(require(dm, "domain", "omega"), "domain.omega", cfg.spec.d);
    cfg.omega2 = parse_box(require(dm, "domain", "omega2"), "domain.omega2", cfg.spec.d);
    cfg.omega1 = parse_box(require(dm, "domain", "omega1"), "domain.omega1", cfg.spec.d);
    cfg.has_domain = true;
  }

  if (auto it = root.find("params"); it != root.end()) {
    const Json& p = *it;
    if (!p.is_object()) fail("params", "expected an object");
    reject_unknown(p, "params", {"s", "p", "eps_reg"});
    cfg.params.s = as_double(require(p, "params", "s"), "params.s");
    cfg.params.p = as_double(require(p, "params", "p"), "params.p");
    if (auto e = p.find("eps_reg"); e != p.end()) cfg.params.eps_reg = as_double(*e, "params.eps_reg");
    cfg.params.validate();
    cfg.has_params = true;
  }

  if (auto it = root.find("solver"); it != root.end()) {
    const Json& s = *it;
    if (!s.is_object()) fail("solver", "expected an object");
    reject_unknown(s, "solver",
                   {"tol", "max_iters", "step0", "shrink", "armijo_c", "precondition_order"});
    if (auto v = s.find("tol"); v != s.end()) cfg.solver.tol = as_double(*v, "solver.tol");
    if (auto v = s.find("max_iters"); v != s.end())
      cfg.solver.max_iters = as_int(*v, "solver.max_iters");
    if (auto v = s.find("step0"); v != s.end()) cfg.solver.step0 = as_double(*v, "solver.step0");
    if (auto v = s.find("shrink"); v != s.end()) cfg.solver.shrink = as_double(*v, "solver.shrink");
    if (auto v = s.find("armijo_c"); v != s.end())
      cfg.solver.armijo_c = as_double(*v, "solver.armijo_c");
    if (auto v = s.find("precondition_order"); v != s.end())
      cfg.solver.precondition_order = as_double(*v, "solver.precondition_order");
  }

  if (auto it = root.find("exterior"); it != root.end()) {
    if (!cfg.has_grid) fail("exterior", "requires a grid section (for the dimension)");
    if (!it->is_array() || it->empty()) fail("exterior", "expected a nonempty array of terms");
    for (std::size_t i = 0; i < it->size(); ++i) {
      cfg.exterior.push_back(
          parse_term((*it)[i], "exterior[" + std::to_string(i) + "]", cfg.spec.d));
    }
    cfg.has_exterior = true;
  }

  if (auto it = root.find("seed"); it != root.end()) {
    if (!it->is_number_unsigned() && !it->is_number_integer()) fail("seed", "expected an integer");
    const auto v = it->get<std::int64_t>();
    if (v < 0) fail("seed", "must be nonnegative");
    cfg.seed = static_cast<std::uint64_t>(v);
  }

  if (auto it = root.find("samples"); it != root.end()) {
    cfg.samples = as_int(*it, "samples");
    if (cfg.samples < 1) fail("samples", "must be at least 1");
  }

  if (auto it = root.find("grid_sizes"); it != root.end()) {
    if (!it->is_array() || it->empty()) fail("grid_sizes", "expected a nonempty array");
    for (std::size_t i = 0; i < it->size(); ++i) {
      cfg.grid_sizes.push_back(as_int((*it)[i], "grid_sizes[" + std::to_string(i) + "]"));
    }
  }

  if (auto it = root.find("radii"); it != root.end()) {
    if (!it->is_array() || it->empty()) fail("radii", "expected a nonempty array");
    for (std::size_t i = 0; i < it->size(); ++i) {
      cfg.radii.push_back(as_double((*it)[i], "radii[" + std::to_string(i) + "]"));
    }
  }

  if (auto it = root.find("cutoff_width"); it != root.end()) {
    cfg.cutoff_width = as_double(*it, "cutoff_width");
    if (!(cfg.cutoff_width > 0.0)) fail("cutoff_width", "must be positive");
  }

  if (auto it = root.find("quadrature"); it != root.end()) {
    const Json& q = *it;
    if (!q.is_object()) fail("quadrature", "expected an object");
    reject_unknown(q, "quadrature", {"r_max", "inner_exclusion", "compact_support"});
    cfg.quadrature.r_max = as_double(require(q, "quadrature", "r_max"), "quadrature.r_max");
    if (auto v = q.find("inner_exclusion"); v != q.end())
      cfg.quadrature.inner_exclusion = as_int(*v, "quadrature.inner_exclusion");
    if (auto v = q.find("compact_support"); v != q.end())
      cfg.quadrature.compact_support = as_bool(*v, "quadrature.compact_support");
    cfg.has_quadrature = true;
  }

  if (auto it = root.find("algorithm"); it != root.end()) {
    cfg.algorithm = as_string(*it, "algorithm");
    if (cfg.algorithm != "gradient_descent" && cfg.algorithm != "linear_p2") {
      fail("algorithm", "must be \"gradient_descent\" or \"linear_p2\"");
    }
  }

  if (auto it = root.find("inject_fault"); it != root.end()) {
    cfg.inject_fault = as_bool(*it, "inject_fault");
  }

  return cfg;
}

FieldFunction exterior_function(const RunConfig& cfg, double L) {
  const std::vector<ExteriorTerm> terms = cfg.exterior;
  return [terms, L](const std::array<double, 3>& x, int d) {
    double v = 0.0;
    for (const ExteriorTerm& t : terms) {
      if (t.kind == "constant") {
        v += t.value;
      } else if (t.kind == "sin") {
        double arg = t.phase;
        for (int a = 0; a < d; ++a) arg += 2.0 * M_PI * t.frequency[a] * x[a] / L;
        v += t.amplitude * std::sin(arg);
      } else {  // gaussian, with minimal-image displacement so the sum stays periodic
        double q = 0.0;
        for (int a = 0; a < d; ++a) {
          double delta = std::fabs(x[a] - t.center[a]);
          delta = std::min(delta, L - delta);
          q += (delta / t.width) * (delta / t.width);
        }
        v += t.amplitude * std::exp(-q);
      }
    }
    return v;
  };
}

}  // namespace fracgrad::cli
