#include "commands.hpp"

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include "config.hpp"
#include "fracgrad/holder.hpp"
#include "fracgrad/io.hpp"
#include "fracgrad/numerics.hpp"
#include "fracgrad/reduction.hpp"
#include "fracgrad/selfcheck.hpp"
#include "fracgrad/singular.hpp"
#include "fracgrad/solver.hpp"
#include "fracgrad/spectral.hpp"

namespace fracgrad::cli {

namespace {

namespace fs = std::filesystem;

std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

void write_text(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ValidationError("cannot open " + path.string() + " for writing");
  out << text;
  if (!out) throw ValidationError("write failed for " + path.string());
}

void write_json(const fs::path& path, const OrderedJson& j) {
  write_text(path, j.dump(2) + "\n");
}

void apply_env_seed(RunConfig& cfg) {
  const char* env = std::getenv("FRACGRAD_SEED");
  if (!env || !*env) return;
  char* end = nullptr;
  const unsigned long long v = std::strtoull(env, &end, 10);
  if (end == env || *end != '\0') {
    throw ValidationError("FRACGRAD_SEED must be a nonnegative integer, got \"" +
                          std::string(env) + "\"");
  }
  cfg.seed = static_cast<std::uint64_t>(v);
}

void require_sections(const RunConfig& cfg, const std::string& command, bool grid, bool domain,
                      bool params, bool exterior) {
  if (grid && !cfg.has_grid) throw ValidationError(command + ": config needs a \"grid\" section");
  if (domain && !cfg.has_domain)
    throw ValidationError(command + ": config needs a \"domain\" section");
  if (params && !cfg.has_params)
    throw ValidationError(command + ": config needs a \"params\" section");
  if (exterior && !cfg.has_exterior)
    throw ValidationError(command + ": config needs an \"exterior\" section");
}

DomainMasks make_masks(const RunConfig& cfg, const GridSpec& spec) {
  DomainMasks masks = DomainMasks::from_boxes(spec, cfg.omega, cfg.omega2, cfg.omega1);
  masks.validate();
  return masks;
}

Problem make_problem(const RunConfig& cfg) {
  Problem prob;
  prob.spec = cfg.spec;
  prob.masks = make_masks(cfg, cfg.spec);
  prob.g = field_from_function(cfg.spec, exterior_function(cfg, cfg.spec.L));
  prob.params = cfg.params;
  prob.validate();
  return prob;
}

Solution run_solver(const RunConfig& cfg, const Problem& prob) {
  cfg.solver.validate(prob.params);
  if (cfg.algorithm == "linear_p2") return solve_linear_p2(prob);
  return solve(prob, cfg.solver);
}

ScalarField product(const ScalarField& a, const ScalarField& b) {
  ScalarField out = a;
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = a[i] * b[i];
  return out;
}

OrderedJson params_json(const FracParams& p) {
  OrderedJson j;
  j["s"] = p.s;
  j["p"] = p.p;
  j["eps_reg"] = p.eps_reg;
  return j;
}

OrderedJson solution_json(const RunConfig& cfg, const Solution& sol) {
  OrderedJson j;
  j["iterations"] = sol.iterations;
  j["converged"] = sol.converged;
  if (!sol.diagnostic.empty()) j["diagnostic"] = sol.diagnostic;
  j["residual_history"] = sol.residual_history;
  j["energy_history"] = sol.energy_history;
  j["params"] = params_json(cfg.params);
  j["config"] = cfg.raw;
  return j;
}

void write_history_csv(const fs::path& path, const Solution& sol) {
  std::string csv = "iter,residual,energy\n";
  for (std::size_t i = 0; i < sol.residual_history.size(); ++i) {
    csv += std::to_string(i) + "," + fmt(sol.residual_history[i]) + "," +
           fmt(sol.energy_history[i]) + "\n";
  }
  write_text(path, csv);
}

// Writes the solution artifacts shared by solve/holder/compare-wsp. Returns
// false when the solver stopped short of its tolerance.
bool emit_solution(const RunConfig& cfg, const Solution& sol, const fs::path& out) {
  write_field((out / "solution.fsf").string(), sol.u);
  write_json(out / "solution.json", solution_json(cfg, sol));
  write_history_csv(out / "residual_history.csv", sol);
  if (!sol.converged) {
    std::cerr << "solver did not converge after " << sol.iterations
              << " iterations: " << sol.diagnostic << "\n";
  }
  return sol.converged;
}

std::vector<double> default_radii(const GridSpec& spec) {
  return {spec.L / 8.0, spec.L / 16.0, spec.L / 32.0, spec.L / 64.0};
}

OrderedJson estimate_json(const HolderEstimate& e) {
  OrderedJson j;
  j["exponent"] = e.exponent;
  j["fit_quality"] = e.fit_quality;
  j["radii"] = e.radii;
  j["oscillations"] = e.oscillations;
  if (!e.note.empty()) j["note"] = e.note;
  return j;
}

int cmd_selfcheck(const RunConfig& cfg, const fs::path& out) {
  SelfCheckOptions opts;
  opts.corrupt_multiplier = cfg.inject_fault;
  const std::vector<CheckResult> results = run_selfcheck(opts);

  OrderedJson checks = OrderedJson::array();
  for (const CheckResult& r : results) {
    std::printf("%s  %-34s measured=%-13.4e bound=%-13.4e %s\n", r.passed ? "PASS" : "FAIL",
                r.name.c_str(), r.measured, r.bound, r.detail.c_str());
    OrderedJson c;
    c["name"] = r.name;
    c["passed"] = r.passed;
    c["measured"] = r.measured;
    c["bound"] = r.bound;
    if (!r.detail.empty()) c["detail"] = r.detail;
    checks.push_back(c);
  }
  const bool ok = all_passed(results);
  OrderedJson j;
  j["all_passed"] = ok;
  j["checks"] = checks;
  write_json(out / "selfcheck.json", j);

  std::printf("%s (%zu checks)\n", ok ? "selfcheck passed" : "selfcheck FAILED", results.size());
  return ok ? 0 : 3;
}

int cmd_solve(const RunConfig& cfg, const fs::path& out) {
  require_sections(cfg, "solve", true, true, true, true);
  const Problem prob = make_problem(cfg);
  const Solution sol = run_solver(cfg, prob);
  const bool ok = emit_solution(cfg, sol, out);
  if (ok) {
    std::cout << "solve: converged in " << sol.iterations
              << " iterations, residual = " << fmt(sol.residual_history.back())
              << ", energy = " << fmt(sol.energy_history.back()) << "\n";
  }
  return ok ? 0 : 3;
}

int cmd_reduce(const RunConfig& cfg, const fs::path& out) {
  require_sections(cfg, "reduce", true, true, true, true);
  cfg.solver.validate(cfg.params);

  std::vector<int> sizes = cfg.grid_sizes;
  if (sizes.empty()) sizes = {64, 128, 256};

  ProblemRecipe recipe;
  recipe.d = cfg.spec.d;
  recipe.L = cfg.spec.L;
  recipe.omega = cfg.omega;
  recipe.omega2 = cfg.omega2;
  recipe.omega1 = cfg.omega1;
  recipe.exterior = exterior_function(cfg, cfg.spec.L);
  recipe.params = cfg.params;

  ReductionReport rep = mu_boundedness_report(recipe, cfg.solver, sizes);

  // Kernel statistics are computed once, at the finest grid of the study.
  GridSpec fine = cfg.spec;
  fine.n = sizes.back();
  fine.validate();
  const DomainMasks masks = make_masks(cfg, fine);
  const double width = cfg.cutoff_width > 0.0 ? cfg.cutoff_width : masks.separation / 2.0;
  const CutoffPair cut = build_cutoffs(masks, width);
  rep.kernel = kernel_bound_report(masks, cut, cfg.params.s, cfg.params.p, cfg.samples, cfg.seed);

  OrderedJson grids = OrderedJson::array();
  std::string grids_csv = "n,sup_mu_omega1,sup_mu_control,identity_defect,valid\n";
  for (const ReductionGridEntry& e : rep.grids) {
    OrderedJson g;
    g["n"] = e.n;
    g["sup_mu_omega1"] = e.sup_mu_omega1;
    g["sup_mu_control"] = e.sup_mu_control;
    g["identity_defect"] = e.identity_defect;
    g["valid"] = e.valid;
    grids.push_back(g);
    grids_csv += std::to_string(e.n) + "," + fmt(e.sup_mu_omega1) + "," + fmt(e.sup_mu_control) +
                 "," + fmt(e.identity_defect) + "," + (e.valid ? "1" : "0") + "\n";
  }

  OrderedJson kernel;
  kernel["max_ratio"] = rep.kernel.max_ratio;
  kernel["median_ratio"] = rep.kernel.median_ratio;
  kernel["schur_x"] = rep.kernel.schur_x;
  kernel["schur_y"] = rep.kernel.schur_y;

  OrderedJson verdict;
  verdict["prop1_stable"] = rep.verdict.prop1_stable;
  verdict["control_grows"] = rep.verdict.control_grows;

  OrderedJson j;
  j["grids"] = grids;
  j["kernel"] = kernel;
  j["verdict"] = verdict;
  write_json(out / "report.json", j);
  write_text(out / "grids.csv", grids_csv);

  std::string ratios_csv = "sample,ratio\n";
  for (std::size_t i = 0; i < rep.kernel.ratios.size(); ++i) {
    ratios_csv += std::to_string(i) + "," + fmt(rep.kernel.ratios[i]) + "\n";
  }
  write_text(out / "ratios.csv", ratios_csv);

  std::cout << "reduce: prop1_stable=" << (rep.verdict.prop1_stable ? "true" : "false")
            << " control_grows=" << (rep.verdict.control_grows ? "true" : "false")
            << " max_ratio=" << fmt(rep.kernel.max_ratio) << "\n";
  return 0;
}

int cmd_kernel(const RunConfig& cfg, const fs::path& out) {
  require_sections(cfg, "kernel", true, true, true, false);
  const DomainMasks masks = make_masks(cfg, cfg.spec);
  const double width = cfg.cutoff_width > 0.0 ? cfg.cutoff_width : masks.separation / 2.0;
  const CutoffPair cut = build_cutoffs(masks, width);
  const KernelStats stats =
      kernel_bound_report(masks, cut, cfg.params.s, cfg.params.p, cfg.samples, cfg.seed);

  OrderedJson j;
  j["n"] = cfg.spec.n;
  j["s"] = cfg.params.s;
  j["p"] = cfg.params.p;
  j["samples"] = cfg.samples;
  j["seed"] = cfg.seed;
  j["cutoff_width"] = width;
  j["max_ratio"] = stats.max_ratio;
  j["median_ratio"] = stats.median_ratio;
  j["schur_x"] = stats.schur_x;
  j["schur_y"] = stats.schur_y;
  write_json(out / "kernel.json", j);

  std::string csv = "sample,ratio\n";
  for (std::size_t i = 0; i < stats.ratios.size(); ++i) {
    csv += std::to_string(i) + "," + fmt(stats.ratios[i]) + "\n";
  }
  write_text(out / "ratios.csv", csv);

  std::cout << "kernel: max_ratio=" << fmt(stats.max_ratio)
            << " median_ratio=" << fmt(stats.median_ratio) << " schur_x=" << fmt(stats.schur_x)
            << " schur_y=" << fmt(stats.schur_y) << "\n";
  return 0;
}

int cmd_holder(const RunConfig& cfg, const fs::path& out) {
  require_sections(cfg, "holder", true, true, true, true);
  const Problem prob = make_problem(cfg);
  const Solution sol = run_solver(cfg, prob);
  if (!emit_solution(cfg, sol, out)) return 3;

  std::vector<double> radii = cfg.radii;
  if (radii.empty()) radii = default_radii(cfg.spec);

  const HolderEstimate est_u = estimate_holder(sol.u, prob.masks.omega1, radii);
  const ScalarField v = lift(sol.u, cfg.params.s);
  const VectorField dv = classical_gradient(v);

  OrderedJson j;
  j["u"] = estimate_json(est_u);
  std::string csv = "field,radius,oscillation\n";
  for (std::size_t i = 0; i < est_u.radii.size(); ++i) {
    csv += "u," + fmt(est_u.radii[i]) + "," + fmt(est_u.oscillations[i]) + "\n";
  }

  OrderedJson comps = OrderedJson::array();
  for (int a = 0; a < cfg.spec.d; ++a) {
    const HolderEstimate e = estimate_holder(dv.comp(a), prob.masks.omega1, radii);
    const std::string label = "dlift_" + std::to_string(a);
    OrderedJson ej;
    ej["field"] = label;
    ej.update(estimate_json(e));
    comps.push_back(ej);
    for (std::size_t i = 0; i < e.radii.size(); ++i) {
      csv += label + "," + fmt(e.radii[i]) + "," + fmt(e.oscillations[i]) + "\n";
    }
  }
  j["lift_gradient"] = comps;
  write_json(out / "holder.json", j);
  write_text(out / "oscillations.csv", csv);

  std::cout << "holder: alpha(u)=" << fmt(est_u.exponent) << " fit_quality=" << fmt(est_u.fit_quality)
            << "\n";
  return 0;
}

int cmd_compare_wsp(const RunConfig& cfg, const fs::path& out, bool force_oracle) {
  require_sections(cfg, "compare-wsp", true, true, true, true);

  QuadratureConfig q = cfg.quadrature;
  if (!cfg.has_quadrature) q.r_max = cfg.spec.L / 2.0;
  q.validate(cfg.spec);

  // The quadrature forms scan every offset within r_max for every lattice
  // point; refuse plainly unaffordable runs unless the user insists.
  {
    const double m = std::floor(q.r_max / cfg.spec.h());
    const double per_point =
        std::pow(std::min(2.0 * m + 1.0, static_cast<double>(cfg.spec.n)), cfg.spec.d);
    const double cost = static_cast<double>(cfg.spec.size()) * per_point * (cfg.samples + 1);
    if (cost > 2e8 && !force_oracle) {
      throw ValidationError(
          "compare-wsp: estimated quadrature work " + fmt(cost) +
          " point-pairs exceeds the guard (2e8); shrink the grid, r_max, or samples, or pass "
          "--force-oracle");
    }
  }

  const Problem prob = make_problem(cfg);
  const Solution sol = run_solver(cfg, prob);
  if (!emit_solution(cfg, sol, out)) return 3;

  const ScalarField window = interior_window(cfg.spec, prob.masks.omega1);
  OrderedJson rows = OrderedJson::array();
  std::string csv = "sample,wsp_weak,first_variation,abs_diff\n";
  for (int i = 0; i < cfg.samples; ++i) {
    const ScalarField phi =
        product(window, random_band_limited(cfg.spec, 8, cfg.seed + static_cast<std::uint64_t>(i)));
    const double wsp = wsp_laplacian_weak(sol.u, phi, cfg.params.s, cfg.params.p, q);
    const double fv = first_variation(sol.u, phi, cfg.params);
    OrderedJson r;
    r["sample"] = i;
    r["wsp_weak"] = wsp;
    r["first_variation"] = fv;
    r["abs_diff"] = std::abs(wsp - fv);
    rows.push_back(r);
    csv += std::to_string(i) + "," + fmt(wsp) + "," + fmt(fv) + "," + fmt(std::abs(wsp - fv)) + "\n";
  }

  const double gag = gagliardo_seminorm(sol.u, cfg.params.s, cfg.params.p, q);
  const double hsp = hsp_seminorm(sol.u, cfg.params.s, cfg.params.p);

  OrderedJson j;
  j["params"] = params_json(cfg.params);
  j["seminorms"] = OrderedJson::object();
  j["seminorms"]["gagliardo"] = gag;
  j["seminorms"]["hsp"] = hsp;
  j["seminorms"]["ratio"] = hsp > 0.0 ? gag / hsp : 0.0;
  j["rows"] = rows;
  write_json(out / "compare.json", j);
  write_text(out / "compare.csv", csv);

  std::cout << "compare-wsp: gagliardo=" << fmt(gag) << " hsp=" << fmt(hsp)
            << " ratio=" << fmt(hsp > 0.0 ? gag / hsp : 0.0) << "\n";
  return 0;
}

}  // namespace

int run_command(const CliOptions& opt) {
  RunConfig cfg = parse_config_file(opt.config_path, opt.command);
  apply_env_seed(cfg);

  const fs::path out(opt.out_dir);
  std::error_code ec;
  fs::create_directories(out, ec);
  if (ec) throw ValidationError("cannot create output directory " + out.string());

  if (opt.command == "selfcheck") return cmd_selfcheck(cfg, out);
  if (opt.command == "solve") return cmd_solve(cfg, out);
  if (opt.command == "reduce") return cmd_reduce(cfg, out);
  if (opt.command == "kernel") return cmd_kernel(cfg, out);
  if (opt.command == "holder") return cmd_holder(cfg, out);
  if (opt.command == "compare-wsp") return cmd_compare_wsp(cfg, out, opt.force_oracle);
  throw ValidationError("unknown command \"" + opt.command + "\"");
}

}  // namespace fracgrad::cli
