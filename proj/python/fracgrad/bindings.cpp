#include <cstring>
#include <vector>

#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "fracgrad/energy.hpp"
#include "fracgrad/grid.hpp"
#include "fracgrad/holder.hpp"
#include "fracgrad/numerics.hpp"
#include "fracgrad/reduction.hpp"
#include "fracgrad/singular.hpp"
#include "fracgrad/solver.hpp"
#include "fracgrad/spectral.hpp"

namespace py = pybind11;
using namespace fracgrad;

namespace {

using DoubleArray = py::array_t<double, py::array::c_style | py::array::forcecast>;

// Fields use row-major flattening with axis 0 slowest, which is exactly
// numpy's C order, so conversion is a shape check plus a copy.
GridSpec spec_from_shape(const DoubleArray& a, double L) {
  GridSpec spec;
  spec.d = static_cast<int>(a.ndim());
  if (spec.d < 1 || spec.d > 3) throw ValidationError("array must have 1, 2, or 3 dimensions");
  spec.n = static_cast<int>(a.shape(0));
  for (int i = 1; i < spec.d; ++i) {
    if (a.shape(i) != a.shape(0)) throw ValidationError("grid arrays must be cubic");
  }
  spec.L = L;
  spec.validate();
  return spec;
}

ScalarField to_field(const DoubleArray& a, double L) {
  const GridSpec spec = spec_from_shape(a, L);
  ScalarField f(spec);
  std::memcpy(f.values().data(), a.data(), sizeof(double) * f.size());
  return f;
}

py::array to_array(const ScalarField& f) {
  const GridSpec& spec = f.spec();
  std::vector<py::ssize_t> shape(static_cast<std::size_t>(spec.d), spec.n);
  py::array_t<double> out(shape);
  std::memcpy(out.mutable_data(), f.values().data(), sizeof(double) * f.size());
  return out;
}

// Components stacked along a leading axis of length d.
py::array to_array(const VectorField& g) {
  const GridSpec& spec = g.spec();
  std::vector<py::ssize_t> shape;
  shape.push_back(spec.d);
  for (int i = 0; i < spec.d; ++i) shape.push_back(spec.n);
  py::array_t<double> out(shape);
  double* dst = out.mutable_data();
  for (int a = 0; a < spec.d; ++a) {
    std::memcpy(dst + static_cast<std::size_t>(a) * g.comp(a).size(), g.comp(a).values().data(),
                sizeof(double) * g.comp(a).size());
  }
  return out;
}

VectorField to_vector_field(const DoubleArray& a, double L) {
  if (a.ndim() < 2) throw ValidationError("vector fields need a leading component axis");
  const int d = static_cast<int>(a.shape(0));
  if (d != a.ndim() - 1) throw ValidationError("leading axis must have length d");
  GridSpec spec;
  spec.d = d;
  spec.n = static_cast<int>(a.shape(1));
  for (int i = 2; i < a.ndim(); ++i) {
    if (a.shape(i) != a.shape(1)) throw ValidationError("grid arrays must be cubic");
  }
  spec.L = L;
  spec.validate();
  VectorField g(spec);
  const double* src = a.data();
  for (int c = 0; c < d; ++c) {
    std::memcpy(g.comp(c).values().data(), src + static_cast<std::size_t>(c) * spec.size(),
                sizeof(double) * spec.size());
  }
  return g;
}

Box box_from_pair(const std::vector<double>& lo, const std::vector<double>& hi, int d,
                  const char* name) {
  if (static_cast<int>(lo.size()) != d || static_cast<int>(hi.size()) != d) {
    throw ValidationError(std::string(name) + " must give lo/hi with d entries each");
  }
  Box b;
  for (int a = 0; a < d; ++a) {
    b.lo[static_cast<std::size_t>(a)] = lo[static_cast<std::size_t>(a)];
    b.hi[static_cast<std::size_t>(a)] = hi[static_cast<std::size_t>(a)];
  }
  return b;
}

FracParams make_params(double s, double p, double eps_reg) {
  FracParams params;
  params.s = s;
  params.p = p;
  params.eps_reg = eps_reg;
  params.validate();
  return params;
}

}  // namespace

PYBIND11_MODULE(_fracgrad, m) {
  m.doc() = "spectral fractional-gradient calculus on the periodic torus";

  py::register_exception<ValidationError>(m, "ValidationError", PyExc_ValueError);
  py::register_exception<NumericError>(m, "NumericError", PyExc_ArithmeticError);

  m.def(
      "frac_laplacian",
      [](const DoubleArray& u, double L, double sigma) {
        return to_array(frac_laplacian(to_field(u, L), sigma));
      },
      py::arg("u"), py::arg("L"), py::arg("sigma"),
      "Fractional Laplacian (-Delta)^{sigma/2} u, sigma in (0, 2].");

  m.def(
      "riesz_potential",
      [](const DoubleArray& u, double L, double sigma) {
        return to_array(riesz_potential(to_field(u, L), sigma));
      },
      py::arg("u"), py::arg("L"), py::arg("sigma"),
      "Riesz potential I_sigma u = (-Delta)^{-sigma/2} u, sigma in (0, 1].");

  m.def(
      "frac_gradient",
      [](const DoubleArray& u, double L, double s) {
        return to_array(frac_gradient(to_field(u, L), s));
      },
      py::arg("u"), py::arg("L"), py::arg("s"),
      "Fractional gradient D^s u; components stacked on a leading axis.");

  m.def(
      "frac_divergence",
      [](const DoubleArray& g, double L, double s) {
        return to_array(frac_divergence(to_vector_field(g, L), s));
      },
      py::arg("g"), py::arg("L"), py::arg("s"),
      "Fractional divergence div_s g of a component-stacked vector field.");

  m.def(
      "lift",
      [](const DoubleArray& u, double L, double s) { return to_array(lift(to_field(u, L), s)); },
      py::arg("u"), py::arg("L"), py::arg("s"), "v = I_{1-s} u (identity at s = 1).");

  m.def(
      "p_energy",
      [](const DoubleArray& u, double L, double s, double p, double eps_reg) {
        return p_energy(to_field(u, L), make_params(s, p, eps_reg));
      },
      py::arg("u"), py::arg("L"), py::arg("s"), py::arg("p"), py::arg("eps_reg") = 0.0,
      "Regularized H^{s,p} energy (1/p) integral (|D^s u|^2 + eps^2)^{p/2} - eps^p.");

  m.def(
      "first_variation",
      [](const DoubleArray& u, const DoubleArray& phi, double L, double s, double p,
         double eps_reg) {
        return first_variation(to_field(u, L), to_field(phi, L), make_params(s, p, eps_reg));
      },
      py::arg("u"), py::arg("phi"), py::arg("L"), py::arg("s"), py::arg("p"),
      py::arg("eps_reg") = 0.0, "d/dt E(u + t phi) at t = 0.");

  m.def(
      "hsp_seminorm",
      [](const DoubleArray& u, double L, double s, double p) {
        return hsp_seminorm(to_field(u, L), s, p);
      },
      py::arg("u"), py::arg("L"), py::arg("s"), py::arg("p"), "Lp norm of |D^s u|.");

  m.def(
      "gagliardo_seminorm",
      [](const DoubleArray& u, double L, double s, double p, double r_max) {
        QuadratureConfig q;
        q.r_max = r_max > 0.0 ? r_max : L / 2.0;
        return gagliardo_seminorm(to_field(u, L), s, p, q);
      },
      py::arg("u"), py::arg("L"), py::arg("s"), py::arg("p"), py::arg("r_max") = -1.0,
      "Gagliardo W^{s,p} seminorm by direct double-sum quadrature.");

  m.def(
      "solve",
      [](const DoubleArray& g, double L, const std::vector<double>& omega_lo,
         const std::vector<double>& omega_hi, const std::vector<double>& omega2_lo,
         const std::vector<double>& omega2_hi, const std::vector<double>& omega1_lo,
         const std::vector<double>& omega1_hi, double s, double p, double eps_reg, double tol,
         int max_iters, bool linear) {
        Problem prob;
        prob.g = to_field(g, L);
        prob.spec = prob.g.spec();
        const int d = prob.spec.d;
        prob.masks = DomainMasks::from_boxes(prob.spec, box_from_pair(omega_lo, omega_hi, d, "omega"),
                                             box_from_pair(omega2_lo, omega2_hi, d, "omega2"),
                                             box_from_pair(omega1_lo, omega1_hi, d, "omega1"));
        prob.params = make_params(s, p, eps_reg);
        prob.validate();
        SolverConfig cfg;
        cfg.tol = tol;
        cfg.max_iters = max_iters;
        cfg.validate(prob.params);
        const Solution sol = linear ? solve_linear_p2(prob) : solve(prob, cfg);
        py::dict info;
        info["iterations"] = sol.iterations;
        info["converged"] = sol.converged;
        info["diagnostic"] = sol.diagnostic;
        info["residual_history"] = sol.residual_history;
        info["energy_history"] = sol.energy_history;
        return py::make_tuple(to_array(sol.u), info);
      },
      py::arg("g"), py::arg("L"), py::arg("omega_lo"), py::arg("omega_hi"), py::arg("omega2_lo"),
      py::arg("omega2_hi"), py::arg("omega1_lo"), py::arg("omega1_hi"), py::arg("s"), py::arg("p"),
      py::arg("eps_reg") = 0.0, py::arg("tol") = 0.0, py::arg("max_iters") = 50000,
      py::arg("linear") = false,
      "Minimize the H^{s,p} energy with exterior data g outside omega; returns (u, info).");

  m.def(
      "estimate_holder",
      [](const DoubleArray& f, double L, const py::array_t<bool, py::array::c_style>& region,
         const std::vector<double>& radii) {
        const ScalarField field = to_field(f, L);
        if (static_cast<std::size_t>(region.size()) != field.size()) {
          throw ValidationError("region mask must match the field shape");
        }
        Mask mask(field.size());
        const bool* src = region.data();
        for (std::size_t i = 0; i < mask.size(); ++i) mask[i] = src[i] ? 1 : 0;
        const HolderEstimate est = estimate_holder(field, mask, radii);
        py::dict out;
        out["exponent"] = est.exponent;
        out["fit_quality"] = est.fit_quality;
        out["radii"] = est.radii;
        out["oscillations"] = est.oscillations;
        out["note"] = est.note;
        return out;
      },
      py::arg("f"), py::arg("L"), py::arg("region"), py::arg("radii"),
      "Local Holder exponent from dyadic oscillation decay over a region mask.");

  m.def(
      "random_band_limited",
      [](int d, int n, double L, int kmax, std::uint64_t seed) {
        GridSpec spec;
        spec.d = d;
        spec.n = n;
        spec.L = L;
        spec.validate();
        return to_array(random_band_limited(spec, kmax, seed));
      },
      py::arg("d"), py::arg("n"), py::arg("L"), py::arg("kmax"), py::arg("seed"),
      "Seeded band-limited field, sup-normalized; same function across grids.");

  m.def("set_max_threads", &set_max_threads, py::arg("count"),
        "Cap data-parallel width; results do not depend on it.");
}
