#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>

#include "config.hpp"

namespace topeig::cli {

enum ExitCode : int { kOk = 0, kFailure = 1, kConfigError = 2, kNumericalError = 3 };

struct Overrides {
  std::optional<std::string> out_dir;
  std::optional<std::uint64_t> seed;
  std::optional<int> threads;
};

void apply_overrides(RunConfig& cfg, const Overrides& o);

int cmd_validate(const RunConfig& cfg, std::ostream& out, std::ostream& err);
int cmd_model_spectrum(const RunConfig& cfg, std::ostream& out, std::ostream& err);
int cmd_sweep(const RunConfig& cfg, std::ostream& out, std::ostream& err);
int cmd_verify(const RunConfig& cfg, std::ostream& out, std::ostream& err);
/// Re-renders the report found in the configured output location.
int cmd_report(const RunConfig& cfg, std::ostream& out, std::ostream& err);

/// Loads the config, applies overrides and dispatches; config errors map to exit 2.
int run_command(const std::string& name, const std::string& config_path, const Overrides& o,
                std::ostream& out, std::ostream& err);

std::string output_path(const RunConfig& cfg, const std::string& suffix);

}  // namespace topeig::cli
