#include <cstdlib>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include <topeig/version.hpp>

#include "commands.hpp"

int main(int argc, char** argv) {
  using namespace topeig::cli;
  CLI::App app{"Scaled spectral gap studies for weighted Fourier multipliers"};
  app.set_version_flag("--version", std::string("topeig ") + topeig::kVersion);
  app.require_subcommand(1);

  std::string config;
  std::string out_dir;
  std::uint64_t seed = 0;
  int threads = 0;
  const char* help[][2] = {
      {"validate", "Check both profiles against the structural assumptions"},
      {"model-spectrum", "Lowest eigenvalues of the model operator T"},
      {"sweep", "Alpha sweep of the scaled gaps; writes CSV, report and plot script"},
      {"verify", "Sweep and evaluate verdicts; exit 0 iff every n passes"},
      {"report", "Re-render an existing report"},
  };
  for (const auto& h : help) {
    CLI::App* sub = app.add_subcommand(h[0], h[1]);
    sub->add_option("--config", config, "Run configuration file")->required();
    sub->add_option("--out", out_dir, "Output directory (overrides [output] dir)");
    sub->add_option("--seed", seed, "Random seed (overrides [solver] seed)");
    sub->add_option("--threads", threads, "Concurrent alpha jobs (default: TOPEIG_THREADS or config)")
        ->check(CLI::PositiveNumber);
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kConfigError;
  }

  CLI::App* sub = app.get_subcommands().front();
  Overrides o;
  if (sub->count("--out")) o.out_dir = out_dir;
  if (sub->count("--seed")) o.seed = seed;
  if (sub->count("--threads")) {
    o.threads = threads;
  } else if (const char* env = std::getenv("TOPEIG_THREADS"); env && *env) {
    try {
      o.threads = std::stoi(env);
    } catch (const std::exception&) {
      std::cerr << "config error: TOPEIG_THREADS must be an integer\n";
      return kConfigError;
    }
  }
  return run_command(sub->get_name(), config, o, std::cout, std::cerr);
}
