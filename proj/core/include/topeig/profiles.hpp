#pragma once

// Symbol and weight profiles: a decaying function with a unique maximum at
// the origin, its principal homogeneous part at that maximum, and the
// degree of homogeneity.

#include <functional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace topeig {

enum class Role { SymbolA, WeightV };

std::string_view to_string(Role role) noexcept;

using ScalarField = std::function<double(std::span<const double>)>;

struct ProfileSpec {
  int dimension = 1;
  Role role = Role::SymbolA;
  ScalarField evaluate;
  /// A0 for a symbol, V0 for a weight.
  double max_value = 1.0;
  /// Psi_gamma or Phi_beta. Only meaningful away from the origin.
  ScalarField principal;
  double degree = 1.0;
  /// c in  -V0 + c <= V(x). Zero for symbols.
  double lower_bound_margin = 0.0;
  std::string label;
};

struct ProfilePair {
  ProfileSpec a;
  ProfileSpec v;
  double sigma = 0.0;

  /// gamma / (gamma + beta): position scaling exponent of W_alpha.
  double position_exponent() const noexcept { return a.degree / (a.degree + v.degree); }
  /// beta / (gamma + beta): frequency scaling exponent of b_alpha.
  double frequency_exponent() const noexcept { return v.degree / (a.degree + v.degree); }
  int dimension() const noexcept { return a.dimension; }
};

/// sigma with 1/sigma = 1/beta + 1/gamma.
double sigma_exponent(double beta, double gamma);

/// Builds a pair; checks roles and dimensions and computes sigma.
ProfilePair make_profile_pair(ProfileSpec a, ProfileSpec v);

/// Catalog entries:
///   gaussian_power  {p [, scale]}   x -> scale * exp(-|x|^p)
///   rational_power  {p [, scale]}   x -> scale / (1 + |x|^p)
///   aniso_gaussian  {Q_11 .. Q_dd [, scale]}   x -> scale * exp(-<x, Qx>)
/// Q is row-major, symmetric and positive definite.
ProfileSpec make_catalog_profile(std::string_view name, std::span<const double> params,
                                 int dimension, Role role = Role::SymbolA);

/// A profile given by closed-form expression strings (see expression.hpp).
/// The lower-bound margin of a weight is taken later from sampled values.
ProfileSpec make_expression_profile(std::string_view value_expr,
                                    std::string_view principal_expr, double max_value,
                                    double degree, int dimension, Role role);

/// Constant function (degenerate; fails validation since its principal part is zero).
ProfileSpec make_constant_profile(double value, int dimension, Role role);

/// Rescales to max_value = 1 (principal part is divided by the same factor).
ProfileSpec normalized(const ProfileSpec& spec);
ProfilePair normalized(const ProfilePair& pair);

struct SamplePlan {
  std::vector<double> radii;
  int directions = 8;
  /// Strictly decreasing toward zero.
  std::vector<double> expansion_radii;
};

/// Radii {4, 2, 1, 0.5}, 8 directions, and an expansion ladder on which
/// principal(x) runs over 0.1 * 4^-k, k = 0..4.
SamplePlan default_sample_plan(const ProfileSpec& spec);

struct CheckResult {
  std::string name;
  bool passed = false;
  std::string detail;
  std::vector<double> residuals;
};

struct ValidationReport {
  std::vector<CheckResult> checks;
  std::vector<std::string> assumptions;

  bool passed() const noexcept;
  const CheckResult* find(std::string_view name) const noexcept;
};

/// Checks: "finite", "global_max", "positivity", "homogeneity",
/// "expansion", and for weights "lower_bound".
ValidationReport validate_profile(const ProfileSpec& spec, const SamplePlan& plan);

/// Deterministic unit directions in R^d (2 for d = 1).
std::vector<std::vector<double>> sample_directions(int dimension, int count);

}  // namespace topeig
