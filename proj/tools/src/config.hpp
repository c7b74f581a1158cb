#pragma once

// Declarative run configuration: a sectioned key = value document.
// See docs/config.md for the schema.

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include <topeig/asymptotics.hpp>
#include <topeig/profiles.hpp>

namespace topeig::cli {

class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct ProfileConfig {
  /// Catalog key; empty when the profile is given by expressions.
  std::string catalog;
  std::vector<double> params;
  std::string expr;
  std::string principal;
  double max_value = 1.0;
  double degree = 0.0;

  friend bool operator==(const ProfileConfig&, const ProfileConfig&) = default;
};

struct RunConfig {
  ProfileConfig a;
  ProfileConfig v;
  int dimension = 1;
  std::vector<double> alphas;
  int k = 1;
  std::vector<double> radii = {2.0, 4.0, 8.0};
  int threads = 1;

  bool grid_auto = true;
  int grid_n = 0;
  double grid_l = 0.0;

  double tol = 1e-10;
  int max_iter = 500;
  std::uint64_t seed = 0x70b5eed;
  std::string mode = "lanczos";     // lanczos | dense
  std::string model_mode = "auto";  // auto | dense | shift-invert

  double rel_final = 0.05;
  double rel_extrap = 0.02;
  bool strict = false;

  std::string out_dir = "out";
  std::string prefix = "study";
  bool emit_eigenfunctions = false;

  friend bool operator==(const RunConfig&, const RunConfig&) = default;
};

/// Throws ConfigError on syntax errors, unknown keys and out-of-range values.
RunConfig parse_config(const std::string& text);
RunConfig load_config(const std::string& path);

/// Canonical text: fixed section and key order, shortest round-trip numbers.
std::string emit_config(const RunConfig& cfg);

/// emit_config(parse_config(text)).
std::string normalize_config(const std::string& text);

/// Builds both profiles. Propagates ParseError / InvalidArgument from the core.
ProfilePair build_pair(const RunConfig& cfg);
ProfileSpec build_profile(const ProfileConfig& p, int dimension, Role role);

SweepSettings sweep_settings(const RunConfig& cfg);
Tolerances tolerances(const RunConfig& cfg);

/// Shortest representation that parses back to the same double.
std::string format_number(double x);

}  // namespace topeig::cli
