#pragma once

// Matrix-free Hermitian operators on a Grid and the quadratic forms
// K_alpha, S_alpha, R_alpha, T[u, v] built from the same quadratures.

#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "topeig/grid.hpp"
#include "topeig/profiles.hpp"

namespace topeig {

class LinearOperator {
 public:
  using ApplyFn = std::function<StateVector(const StateVector&)>;

  LinearOperator(Grid grid, ApplyFn apply, std::string name);

  StateVector apply(const StateVector& u) const;
  StateVector operator()(const StateVector& u) const { return apply(u); }

  const Grid& grid() const noexcept { return grid_; }
  const std::string& name() const noexcept { return name_; }
  bool hermitian() const noexcept { return true; }

  /// A priori upper bound of the spectrum, when known.
  std::optional<double> upper_bound;
  /// A priori lower bound of the spectrum, when known.
  std::optional<double> lower_bound;

  /// max(|lower|, |upper|, 1); the scale residual tolerances are measured against.
  double residual_scale() const noexcept;

 private:
  Grid grid_;
  ApplyFn apply_;
  std::string name_;
};

/// W_alpha on the nodes and b_alpha on the frequency lattice.
struct ScaledPair {
  double alpha = 0.0;
  double sigma = 0.0;
  std::vector<double> w_alpha;
  std::vector<double> b_alpha;
};

/// W_alpha(x) = V(alpha^{gamma/(gamma+beta)} x), b_alpha(xi) = a(alpha^{beta/(gamma+beta)} xi).
ScaledPair make_scaled_pair(const ProfilePair& pair, double alpha, const Grid& grid);

/// u -> weight * F^* (symbol * F (weight * u)). An empty weight means 1.
LinearOperator make_sandwich(const Grid& grid, std::vector<double> weight,
                             std::vector<double> symbol, std::string name);

/// u -> F^* (symbol * F u) + potential * u.
LinearOperator make_multiplier_potential(const Grid& grid, std::vector<double> symbol,
                                         std::vector<double> potential, std::string name);

/// B_alpha = W_alpha op(b_alpha) W_alpha.
LinearOperator build_B_scaled(const ProfilePair& pair, double alpha, const Grid& grid);

/// B_alpha = V op(a(alpha .)) V.
LinearOperator build_B_original(const ProfilePair& pair, double alpha, const Grid& grid);

/// T = V0^2 Psi_gamma(D) + 2 A0 V0 Phi_beta(x), with both principal parts set to 0 at the origin.
LinearOperator build_T(const ProfilePair& pair, const Grid& grid);

// Forms. All of them are evaluated for the normalized pair (A0 = V0 = 1) and use
// the same h^d / (dxi)^d quadrature as inner(), so the algebraic identities
// between them hold to rounding.

/// alpha^{-sigma} sum (1 - b_alpha) u_hat conj(v_hat) dxi^d.
Complex form_K(const ProfilePair& pair, double alpha, const StateVector& u, const StateVector& v);
/// alpha^{-sigma} sum (1 - W_alpha^2) u conj(v) h^d.
Complex form_S(const ProfilePair& pair, double alpha, const StateVector& u, const StateVector& v);
/// sum Psi u_hat conj(v_hat) dxi^d + 2 sum Phi u conj(v) h^d.
Complex form_T(const ProfilePair& pair, const StateVector& u, const StateVector& v);
/// (B_alpha u, u) - |u|^2 + alpha^sigma T[u].
double form_R(const ProfilePair& pair, double alpha, const StateVector& u);

/// Pointwise multiplication by real samples.
StateVector multiply(std::span<const double> samples, const StateVector& u);

/// Ratios K_alpha[u] / sum |xi|^gamma |u_hat|^2 and S_alpha[u] / sum |x|^beta |u|^2:
/// empirical constants of the domination bounds.
struct DominationRatios {
  double k_ratio = 0.0;
  double s_ratio = 0.0;
};
DominationRatios domination_ratios(const ProfilePair& pair, double alpha, const StateVector& u);

struct GridChoice {
  Grid grid;
  std::string reasoning;
};

/// Heuristic grid for the scaled operators: L and the frequency cutoff are
/// raised until 2 Phi_beta and Psi_gamma exceed 50 (2k + 1) on the boundary.
GridChoice suggest_grid(const ProfilePair& pair, int k);

}  // namespace topeig
