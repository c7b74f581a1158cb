#pragma once

// Hermitian eigensolvers for matrix-free operators.
//
// Residuals are ||A v - lambda v|| for unit v. A solve converges when every
// residual is <= tol * op.residual_scale(), i.e. tol is relative to the a
// priori spectral radius bound (1 for B_alpha, max symbol + potential for T).

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "topeig/grid.hpp"
#include "topeig/operators.hpp"

namespace topeig {

struct EigenPair {
  double value = 0.0;
  StateVector vector;
  double residual = 0.0;
};

enum class SolveMode { LanczosTop, DenseFull, ShiftInvertBottom };

std::string_view to_string(SolveMode mode) noexcept;
SolveMode solve_mode_from_string(std::string_view s);

/// DenseFull materializes the operator; it is refused above this many nodes.
inline constexpr std::size_t kDenseNodeLimit = 4096;

struct SolveSettings {
  int k = 1;
  double tol = 1e-10;
  /// Restart cycles for Lanczos (outer iterations).
  int max_iterations = 500;
  std::uint64_t rng_seed = 0x70b5eedULL;
  SolveMode mode = SolveMode::LanczosTop;
  /// Krylov subspace size; 0 picks max(2k + 20, 40) capped by the problem size.
  int krylov_dim = 0;
  /// Shift c of (T + c I)^{-1}.
  double shift = 1.0;
  int inner_max_iterations = 20000;
  /// Relative residual of the inner CG solves.
  double inner_tol = 1e-14;
};

/// k algebraically largest pairs, descending. Modes LanczosTop or DenseFull.
/// Throws NoConvergence when Lanczos exhausts max_iterations restarts.
std::vector<EigenPair> top_eigenpairs(const LinearOperator& op, const SolveSettings& s);

/// k smallest pairs of a positive operator, ascending. Modes DenseFull or
/// ShiftInvertBottom. Throws NoConvergence or InnerSolveStall.
std::vector<EigenPair> bottom_eigenpairs_T(const LinearOperator& op, const SolveSettings& s);

/// Dense Hermitian decomposition of the materialized operator.
/// `largest` selects the k largest (descending) or k smallest (ascending).
std::vector<EigenPair> dense_eigenpairs(const LinearOperator& op, int k, bool largest);

struct CertReport {
  bool passed = false;
  std::vector<double> residuals;
  std::vector<double> norm_errors;
  double max_gram_deviation = 0.0;
  std::vector<std::string> failures;
};

/// Recomputes residuals, unit norms and pairwise orthogonality from scratch.
/// Residuals are compared against tol * op.residual_scale(); norms and the
/// Gram matrix against 1e-8.
CertReport certify(const LinearOperator& op, std::span<const EigenPair> pairs, double tol);

/// Groups consecutive values closer than `gap` (default use: 1e3 * tol).
std::vector<std::vector<std::size_t>> eigenvalue_clusters(std::span<const EigenPair> pairs,
                                                         double gap);

/// Solves (op + shift) x = b by conjugate gradients. Throws InnerSolveStall.
StateVector solve_shifted(const LinearOperator& op, double shift, const StateVector& b,
                          double rel_tol, int max_iterations);

}  // namespace topeig
