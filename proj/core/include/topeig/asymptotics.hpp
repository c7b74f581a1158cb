#pragma once

// Alpha sweeps of the scaled spectral gaps g_n(alpha) = alpha^{-sigma}(A0 V0^2 - lambda_n),
// their extrapolation to alpha -> 0, localization diagnostics of the top
// eigenfunctions, and verdicts against the model eigenvalues mu_n of T.

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "topeig/eigensolve.hpp"
#include "topeig/grid.hpp"
#include "topeig/profiles.hpp"

namespace topeig {

struct LocalizationMetrics {
  std::vector<double> radii;  // ascending
  std::vector<double> position_mass_outside;
  std::vector<double> frequency_mass_outside;
  double k_form = 0.0;  // K_alpha[W_alpha psi]
  double s_form = 0.0;  // S_alpha[psi]
  /// |k_form + s_form - alpha^{-sigma}(1 - lambda)| / |alpha^{-sigma}(1 - lambda)|.
  double identity_residual = 0.0;
  /// (mass outside R) R^gamma / mu and (mass outside R) R^beta / mu.
  std::vector<double> c_hat_frequency;
  std::vector<double> c_hat_position;
};

struct SweepRecord {
  double alpha = 0.0;
  int n = 1;
  double lambda = 0.0;
  double scaled_gap = 0.0;
  double residual = 0.0;
  std::string grid_id;
  LocalizationMetrics localization;
  bool converged = true;
  std::string note;
};

struct ModelEigenvalue {
  int n = 1;
  double mu = 0.0;
  double residual = 0.0;
};

struct Extrapolation {
  int n = 1;
  double limit = 0.0;
  double rate = 0.0;
  double fit_residual = 0.0;
  bool degenerate = false;
  std::string note;
};

enum class VerdictStatus { Pass, Fail, Inconclusive };
std::string_view to_string(VerdictStatus s) noexcept;

struct Tolerances {
  double rel_final = 0.05;
  double rel_extrap = 0.02;
  /// When set, ladder-monotonicity and one-sided-bound violations FAIL
  /// instead of downgrading the verdict to inconclusive.
  bool strict = false;
};

struct Verdict {
  int n = 1;
  VerdictStatus status = VerdictStatus::Inconclusive;
  double mu = 0.0;
  double final_gap = 0.0;
  double final_rel_error = 0.0;
  double extrap_limit = 0.0;
  double extrap_rel_error = 0.0;
  bool final_ok = false;
  bool extrap_ok = false;
  bool monotone_ok = false;
  bool upper_bound_ok = false;
  Tolerances tolerances;
  std::vector<std::string> reasons;
};

struct SweepSettings {
  SolveSettings top;    // solves of B_alpha (LanczosTop or DenseFull)
  SolveSettings model;  // solve of T (DenseFull or ShiftInvertBottom)
  /// Fixed grid; suggest_grid(pair, k) is used when absent.
  std::optional<Grid> grid;
  std::vector<double> radii = {2.0, 4.0, 8.0};
  int threads = 1;
  bool keep_eigenvectors = false;
};

struct ProfileSummary {
  std::string label;
  double max_value = 0.0;
  double degree = 0.0;
};

struct StudyReport {
  ProfileSummary a;
  ProfileSummary v;
  int dimension = 1;
  double sigma = 0.0;
  /// A0 V0^2; the solves run on the normalized pair and lambda / gaps / mu are scaled back.
  double rescale = 1.0;
  std::vector<double> alphas;
  int k = 0;
  Grid grid;
  std::string grid_reasoning;
  SolveSettings top_settings;
  SolveSettings model_settings;
  std::vector<ModelEigenvalue> model_eigenvalues;
  std::vector<SweepRecord> records;  // ordered by (alpha index, n)
  std::vector<Extrapolation> extrapolations;
  std::vector<Verdict> verdicts;
  /// Eigenvectors of B_alpha per record, when keep_eigenvectors is set (same order).
  std::vector<StateVector> eigenvectors;
  std::string config_echo;
  std::string version;
  int threads = 1;
};

/// alpha^{-sigma} (A0 V0^2 - lambda).
double scaled_gap(double lambda, double alpha, const ProfilePair& pair);

/// Least-squares fit g(alpha) = limit + c alpha^rate. Exact on data of that form.
/// Throws DegenerateFit for fewer than 3 points or non-monotone gaps.
Extrapolation extrapolate_limit(std::span<const double> alphas, std::span<const double> gaps);

/// Localization masses and forms of a unit eigenpair of the normalized scaled B_alpha.
/// Radii may be given in any order. `mu` scales the empirical constants (skipped if <= 0).
LocalizationMetrics localization_metrics(const ProfilePair& pair, double alpha,
                                         const EigenPair& eigpair, std::span<const double> radii,
                                         double mu = 0.0);

/// Runs the sweep. Validates both profiles first (InvalidArgument when rejected).
StudyReport run_sweep(const ProfilePair& pair, std::span<const double> alphas, int k,
                      const SweepSettings& settings);

/// Per-n verdicts (also stored into report.verdicts).
std::vector<Verdict> verify_theorem(StudyReport& report, const Tolerances& tolerances);

/// Model eigenvalues mu_1..k of T. Mode LanczosTop means automatic: DenseFull when
/// N^d <= kDenseNodeLimit, else ShiftInvertBottom.
std::vector<EigenPair> model_spectrum(const ProfilePair& pair, const Grid& grid,
                                      const SolveSettings& settings);

}  // namespace topeig
