#include <omp.h>

#include <CLI11.hpp>
#include <iostream>
#include <memory>

#include "commands.hpp"
#include "config_json.hpp"
#include "zeitlin/harmonics.hpp"
#include "zeitlin/dynamics.hpp"

namespace {

bool ends_with(const std::string& s, const std::string& suffix) {
  return s.size() >= suffix.size() && s.compare(s.size() - suffix.size(), suffix.size(), suffix) == 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Quantized Euler equations on the sphere: structure constants, dynamics, measures, remainder"};
  app.require_subcommand(1);
  app.allow_config_extras(CLI::config_extras_mode::error);

  // The config format follows the file extension: .json, otherwise TOML.
  for (int i = 1; i + 1 < argc; ++i)
    if (std::string(argv[i]) == "--config" && ends_with(argv[i + 1], ".json"))
      app.config_formatter(std::make_shared<ConfigJSON>());
  app.set_config("--config", "", "TOML or JSON config; sections name subcommands");

  GlobalOptions g;
  app.add_option("--threads", g.threads, "Worker threads (0: all cores)")->check(CLI::NonNegativeNumber);
  app.add_option("--scale", g.scale, "Bracket scale s_N: n32 = N^{3/2}, np1 = (N+1)^{3/2}")
      ->check(CLI::IsMember({"n32", "np1"}));
  app.add_option("--cache-dir", g.cache_dir, "Structure-constant cache (default: $ZEITLIN_CACHE_DIR)");

  std::function<int()> action;
  register_commands(app, g, action);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kRuntimeError;
  }
  if (!action) {
    std::cerr << "no command selected\n";
    return kRuntimeError;
  }
  if (g.threads > 0) omp_set_num_threads(g.threads);
  try {
    return action();
  } catch (const zeitlin::dynamics::ConvergenceError& e) {
    std::cerr << "error: " << e.what() << " (after " << e.iterations() << " iterations)\n";
  } catch (const zeitlin::harmonics::ResolutionError& e) {
    std::cerr << "error: " << e.what() << '\n';
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
  }
  return kRuntimeError;
}
