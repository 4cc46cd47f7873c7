// End-to-end tests that drive the installed binary through std::system,
// checking exit codes, emitted files, and the seed override contract.
#include <doctest.h>

#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include <json.hpp>

#include "fracgrad/grid.hpp"
#include "fracgrad/io.hpp"

namespace fs = std::filesystem;
using Json = nlohmann::json;
using namespace fracgrad;

namespace {

fs::path fresh_dir(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / ("fracgrad_cli_" + name);
  fs::remove_all(p);
  fs::create_directories(p);
  return p;
}

void write_file(const fs::path& p, const std::string& text) {
  std::ofstream out(p);
  REQUIRE(static_cast<bool>(out));
  out << text;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  REQUIRE(static_cast<bool>(in));
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

// Runs the binary with stdout/stderr captured next to the fixture; returns
// the process exit status. `env` is a space-terminated VAR=value prefix.
int run_cli(const std::string& args, const fs::path& capture_dir, const std::string& env = "") {
  const std::string cmd = env + std::string(FRACGRAD_CLI_PATH) + " " + args + " > " +
                          (capture_dir / "stdout.txt").string() + " 2> " +
                          (capture_dir / "stderr.txt").string();
  const int rc = std::system(cmd.c_str());
  REQUIRE(rc != -1);
  REQUIRE(WIFEXITED(rc));
  return WEXITSTATUS(rc);
}

// d=1 grid over the standard nested boxes; callers splice in the rest.
std::string base_sections(int n) {
  std::ostringstream ss;
  ss << "\"grid\": {\"d\": 1, \"n\": " << n << ", \"L\": 1.0},\n"
     << "\"domain\": {\"omega\":  {\"lo\": [0.20], \"hi\": [0.80]},\n"
     << "            \"omega2\": {\"lo\": [0.30], \"hi\": [0.70]},\n"
     << "            \"omega1\": {\"lo\": [0.40], \"hi\": [0.60]}},\n"
     << "\"exterior\": [{\"kind\": \"sin\", \"amplitude\": 1.0, \"frequency\": [1]}]";
  return ss.str();
}

}  // namespace

TEST_SUITE("cli") {
  TEST_CASE("solve writes the solution bundle and exits 0") {
    const fs::path dir = fresh_dir("solve_ok");
    const fs::path cfg = dir / "config.json";
    const fs::path out = dir / "out";
    write_file(cfg, "{\n\"command\": \"solve\",\n" + base_sections(64) +
                        ",\n\"params\": {\"s\": 0.5, \"p\": 3.0}\n}\n");

    const int code = run_cli("solve --config " + cfg.string() + " --out " + out.string(), dir);
    CHECK(code == 0);

    const ScalarField u = read_field(out / "solution.fsf");
    CHECK(u.spec().n == 64);

    const Json j = Json::parse(slurp(out / "solution.json"));
    CHECK(j.at("converged").get<bool>());
    CHECK(j.at("iterations").get<int>() >= 1);
    CHECK(j.at("residual_history").size() == j.at("energy_history").size());

    const std::string hist = slurp(out / "residual_history.csv");
    CHECK(hist.rfind("iter,residual,energy\n", 0) == 0);
  }

  TEST_CASE("malformed config exits 2 and writes nothing") {
    const fs::path dir = fresh_dir("solve_bad_p");
    const fs::path cfg = dir / "config.json";
    const fs::path out = dir / "out";
    write_file(cfg, "{\n\"command\": \"solve\",\n" + base_sections(64) +
                        ",\n\"params\": {\"s\": 0.5, \"p\": 0.0}\n}\n");

    const int code = run_cli("solve --config " + cfg.string() + " --out " + out.string(), dir);
    CHECK(code == 2);
    // Validation happens before the output directory is created.
    CHECK(!fs::exists(out));
  }

  TEST_CASE("unknown config key exits 2") {
    const fs::path dir = fresh_dir("unknown_key");
    const fs::path cfg = dir / "config.json";
    write_file(cfg, "{\n\"command\": \"solve\",\n" + base_sections(64) +
                        ",\n\"params\": {\"s\": 0.5, \"p\": 3.0},\n\"bogus\": 1\n}\n");
    const int code =
        run_cli("solve --config " + cfg.string() + " --out " + (dir / "out").string(), dir);
    CHECK(code == 2);
    CHECK(!fs::exists(dir / "out"));
  }

  TEST_CASE("unknown subcommand exits 2") {
    const fs::path dir = fresh_dir("unknown_cmd");
    const fs::path cfg = dir / "config.json";
    write_file(cfg, "{}\n");
    const int code = run_cli("frobnicate --config " + cfg.string(), dir);
    CHECK(code == 2);
  }

  TEST_CASE("selfcheck with an injected fault exits 3 and records the failure") {
    const fs::path dir = fresh_dir("selfcheck_fault");
    const fs::path cfg = dir / "config.json";
    const fs::path out = dir / "out";
    write_file(cfg, "{\"command\": \"selfcheck\", \"inject_fault\": true}\n");

    const int code = run_cli("selfcheck --config " + cfg.string() + " --out " + out.string(), dir);
    CHECK(code == 3);

    const Json j = Json::parse(slurp(out / "selfcheck.json"));
    CHECK(!j.at("all_passed").get<bool>());
    const auto& checks = j.at("checks");
    REQUIRE(!checks.empty());
    // The corrupted multiplier cancels in every identity that applies it to
    // both sides; the gradient/divergence duality is the first real casualty.
    CHECK(!checks.back().at("passed").get<bool>());
    CHECK(checks.back().at("name").get<std::string>().find("duality") != std::string::npos);
    for (std::size_t i = 0; i + 1 < checks.size(); ++i) {
      CHECK(checks[i].at("passed").get<bool>());
    }
  }

  TEST_CASE("kernel runs are deterministic and FRACGRAD_SEED overrides the config") {
    const auto kernel_cfg = [](std::uint64_t seed) {
      return "{\n\"command\": \"kernel\",\n" + base_sections(64) +
             ",\n\"params\": {\"s\": 0.5, \"p\": 3.0},\n\"samples\": 5,\n\"seed\": " +
             std::to_string(seed) + "\n}\n";
    };

    const fs::path dir = fresh_dir("kernel_seeds");
    write_file(dir / "seed1.json", kernel_cfg(1));
    write_file(dir / "seed2.json", kernel_cfg(2));

    CHECK(run_cli("kernel --config " + (dir / "seed2.json").string() + " --out " +
                      (dir / "a").string(),
                  dir) == 0);
    CHECK(run_cli("kernel --config " + (dir / "seed2.json").string() + " --out " +
                      (dir / "b").string(),
                  dir) == 0);
    CHECK(run_cli("kernel --config " + (dir / "seed1.json").string() + " --out " +
                      (dir / "c").string(),
                  dir) == 0);
    CHECK(run_cli("kernel --config " + (dir / "seed1.json").string() + " --out " +
                      (dir / "env").string(),
                  dir, "FRACGRAD_SEED=2 ") == 0);

    const std::string a = slurp(dir / "a" / "kernel.json");
    CHECK(a == slurp(dir / "b" / "kernel.json"));      // repeatable
    CHECK(a == slurp(dir / "env" / "kernel.json"));    // env wins over config
    CHECK(a != slurp(dir / "c" / "kernel.json"));      // and the seed matters
    CHECK(slurp(dir / "a" / "ratios.csv") == slurp(dir / "env" / "ratios.csv"));
  }

  TEST_CASE("a garbage FRACGRAD_SEED exits 2") {
    const fs::path dir = fresh_dir("bad_env_seed");
    const fs::path cfg = dir / "config.json";
    write_file(cfg, "{\n\"command\": \"kernel\",\n" + base_sections(64) +
                        ",\n\"params\": {\"s\": 0.5, \"p\": 3.0},\n\"samples\": 2\n}\n");
    const int code = run_cli(
        "kernel --config " + cfg.string() + " --out " + (dir / "out").string(), dir,
        "FRACGRAD_SEED=abc ");
    CHECK(code == 2);
  }

  TEST_CASE("compare-wsp refuses unaffordable quadrature without --force-oracle") {
    const fs::path dir = fresh_dir("wsp_guard");
    const fs::path cfg = dir / "config.json";
    write_file(cfg,
               "{\n\"command\": \"compare-wsp\",\n"
               "\"grid\": {\"d\": 2, \"n\": 64, \"L\": 1.0},\n"
               "\"domain\": {\"omega\":  {\"lo\": [0.20, 0.20], \"hi\": [0.80, 0.80]},\n"
               "            \"omega2\": {\"lo\": [0.30, 0.30], \"hi\": [0.70, 0.70]},\n"
               "            \"omega1\": {\"lo\": [0.40, 0.40], \"hi\": [0.60, 0.60]}},\n"
               "\"exterior\": [{\"kind\": \"sin\", \"amplitude\": 1.0, \"frequency\": [1, 0]}],\n"
               "\"params\": {\"s\": 0.5, \"p\": 2.0},\n"
               "\"samples\": 12\n}\n");

    const int code = run_cli(
        "compare-wsp --config " + cfg.string() + " --out " + (dir / "out").string(), dir);
    CHECK(code == 2);
    CHECK(slurp(dir / "stderr.txt").find("--force-oracle") != std::string::npos);
    CHECK(!fs::exists(dir / "out" / "compare.json"));
  }

  TEST_CASE("compare-wsp emits rows for an affordable configuration") {
    const fs::path dir = fresh_dir("wsp_small");
    const fs::path cfg = dir / "config.json";
    const fs::path out = dir / "out";
    write_file(cfg, "{\n\"command\": \"compare-wsp\",\n" + base_sections(64) +
                        ",\n\"params\": {\"s\": 0.5, \"p\": 2.0},\n"
                        "\"algorithm\": \"linear_p2\",\n"
                        "\"quadrature\": {\"r_max\": 0.25},\n"
                        "\"samples\": 2\n}\n");

    const int code =
        run_cli("compare-wsp --config " + cfg.string() + " --out " + out.string(), dir);
    CHECK(code == 0);

    const Json j = Json::parse(slurp(out / "compare.json"));
    CHECK(j.at("rows").size() == 2);
    CHECK(j.at("seminorms").at("gagliardo").get<double>() > 0.0);
    CHECK(j.at("seminorms").at("hsp").get<double>() > 0.0);
    const std::string csv = slurp(out / "compare.csv");
    CHECK(csv.rfind("sample,wsp_weak,first_variation,abs_diff\n", 0) == 0);
  }

  TEST_CASE("holder honours explicit radii and rejects the defaults on a coarse grid") {
    const std::string params =
        ",\n\"params\": {\"s\": 0.5, \"p\": 2.0},\n\"algorithm\": \"linear_p2\"";

    const fs::path dir = fresh_dir("holder");
    write_file(dir / "ok.json", "{\n\"command\": \"holder\",\n" + base_sections(64) + params +
                                    ",\n\"radii\": [0.25, 0.125, 0.0625, 0.03125]\n}\n");
    // The default ladder bottoms out at L/64, below the 2h floor when n=64.
    write_file(dir / "defaults.json",
               "{\n\"command\": \"holder\",\n" + base_sections(64) + params + "\n}\n");

    const fs::path out = dir / "out";
    CHECK(run_cli("holder --config " + (dir / "ok.json").string() + " --out " + out.string(),
                  dir) == 0);
    const Json j = Json::parse(slurp(out / "holder.json"));
    CHECK(j.at("u").at("exponent").is_number());
    CHECK(j.at("u").at("fit_quality").is_number());
    REQUIRE(j.at("lift_gradient").size() == 1);
    CHECK(j.at("lift_gradient")[0].at("field").get<std::string>() == "dlift_0");
    const std::string osc = slurp(out / "oscillations.csv");
    CHECK(osc.rfind("field,radius,oscillation\n", 0) == 0);

    CHECK(run_cli("holder --config " + (dir / "defaults.json").string() + " --out " +
                      (dir / "out2").string(),
                  dir) == 2);
  }

  TEST_CASE("reduce produces the report bundle on a miniature ladder") {
    const fs::path dir = fresh_dir("reduce_mini");
    const fs::path cfg = dir / "config.json";
    const fs::path out = dir / "out";
    write_file(cfg, "{\n\"command\": \"reduce\",\n" + base_sections(64) +
                        ",\n\"params\": {\"s\": 0.5, \"p\": 2.0},\n"
                        "\"grid_sizes\": [32, 64],\n"
                        "\"samples\": 3\n}\n");

    const int code = run_cli("reduce --config " + cfg.string() + " --out " + out.string(), dir);
    CHECK(code == 0);

    const Json j = Json::parse(slurp(out / "report.json"));
    REQUIRE(j.at("grids").size() == 2);
    for (const auto& g : j.at("grids")) {
      CHECK(g.at("n").is_number_integer());
      CHECK(g.at("sup_mu_omega1").is_number());
      CHECK(g.at("sup_mu_control").is_number());
      CHECK(g.at("identity_defect").is_number());
      CHECK(g.at("valid").is_boolean());
      CHECK(g.at("valid").get<bool>());
    }
    for (const char* key : {"max_ratio", "median_ratio", "schur_x", "schur_y"}) {
      CHECK(j.at("kernel").at(key).is_number());
    }
    CHECK(j.at("verdict").at("prop1_stable").is_boolean());
    CHECK(j.at("verdict").at("control_grows").is_boolean());

    CHECK(slurp(out / "grids.csv").rfind("n,", 0) == 0);
    CHECK(slurp(out / "ratios.csv").rfind("sample,ratio\n", 0) == 0);
  }
}
