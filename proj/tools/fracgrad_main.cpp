#include <exception>
#include <iostream>

#include <CLI11.hpp>

#include "../src/cli/commands.hpp"
#include "fracgrad/grid.hpp"
#include "fracgrad/numerics.hpp"

int main(int argc, char** argv) {
  CLI::App app{"fracgrad: spectral fractional-gradient calculus driver"};
  app.get_formatter()->column_width(28);

  fracgrad::cli::CliOptions opt;
  int threads = 0;
  app.add_option("command", opt.command, "one of: selfcheck solve reduce kernel holder compare-wsp")
      ->required()
      ->check(CLI::IsMember({"selfcheck", "solve", "reduce", "kernel", "holder", "compare-wsp"}));
  app.add_option("--config", opt.config_path, "JSON configuration file")->required();
  app.add_option("--out", opt.out_dir, "directory for reports and fields")
      ->capture_default_str();
  app.add_option("--threads", threads, "cap data-parallel width (does not change results)");
  app.add_flag("--force-oracle", opt.force_oracle,
               "run quadrature oracles even past the cost guard");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;  // bad usage is a validation error
  }

  try {
    if (threads > 0) fracgrad::set_max_threads(threads);
    return fracgrad::cli::run_command(opt);
  } catch (const fracgrad::ValidationError& e) {
    std::cerr << "validation error: " << e.what() << "\n";
    return 2;
  } catch (const fracgrad::NumericError& e) {
    std::cerr << "numerical failure: " << e.what() << "\n";
    return 3;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  }
}
