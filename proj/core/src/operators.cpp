#include "topeig/operators.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>

#include "topeig/errors.hpp"

namespace topeig {

LinearOperator::LinearOperator(Grid grid, ApplyFn apply, std::string name)
    : grid_(grid), apply_(std::move(apply)), name_(std::move(name)) {}

StateVector LinearOperator::apply(const StateVector& u) const {
  if (!(u.grid() == grid_)) throw GridMismatch("operator '" + name_ + "' applied off its grid");
  if (u.domain() != Domain::Position)
    throw InvalidArgument("operators act on position-space vectors");
  return apply_(u);
}

double LinearOperator::residual_scale() const noexcept {
  double s = 1.0;
  if (upper_bound) s = std::max(s, std::abs(*upper_bound));
  if (lower_bound) s = std::max(s, std::abs(*lower_bound));
  return s;
}

namespace {

void require_finite(std::span<const double> samples, const std::string& what) {
  for (double v : samples)
    if (!std::isfinite(v)) throw NonFiniteValue(what + ": non-finite sample");
}

double max_abs(std::span<const double> v) {
  double m = 0.0;
  for (double x : v) m = std::max(m, std::abs(x));
  return m;
}

void require_dimension(const ProfilePair& pair, const Grid& grid) {
  if (pair.dimension() != grid.dimension)
    throw GridMismatch("profile dimension does not match the grid");
}

void require_alpha(double alpha) {
  if (!(alpha > 0.0) || !std::isfinite(alpha)) throw InvalidArgument("alpha must be positive");
}

// f(t x) sampled on a lattice; t = 1 samples f itself.
std::vector<double> sample_scaled(const Grid& grid, Domain domain, const ScalarField& f, double t) {
  return sample(grid, domain, [&](std::span<const double> x) {
    std::vector<double> y(x.begin(), x.end());
    for (double& c : y) c *= t;
    return f(y);
  });
}

// Principal parts are undefined at 0; homogeneity of positive degree fixes the value 0 there.
std::vector<double> sample_principal(const Grid& grid, Domain domain, const ScalarField& f) {
  return sample(grid, domain, [&](std::span<const double> x) {
    bool origin = true;
    for (double c : x) origin = origin && c == 0.0;
    return origin ? 0.0 : f(x);
  });
}

void require_vectors(const StateVector& u, const StateVector& v, const Grid* grid = nullptr) {
  if (!(u.grid() == v.grid())) throw GridMismatch("form arguments live on different grids");
  if (grid && !(u.grid() == *grid)) throw GridMismatch("form argument off the operator grid");
  if (u.domain() != Domain::Position || v.domain() != Domain::Position)
    throw InvalidArgument("forms take position-space vectors");
}

}  // namespace

StateVector multiply(std::span<const double> samples, const StateVector& u) {
  if (samples.size() != u.size()) throw GridMismatch("multiplier size does not match vector");
  StateVector out = u;
  auto vals = out.values();
  for (std::size_t i = 0; i < vals.size(); ++i) vals[i] *= samples[i];
  return out;
}

ScaledPair make_scaled_pair(const ProfilePair& pair, double alpha, const Grid& grid) {
  require_alpha(alpha);
  require_dimension(pair, grid);
  ScaledPair sp;
  sp.alpha = alpha;
  sp.sigma = pair.sigma;
  sp.w_alpha = sample_scaled(grid, Domain::Position, pair.v.evaluate,
                             std::pow(alpha, pair.position_exponent()));
  sp.b_alpha = sample_scaled(grid, Domain::Frequency, pair.a.evaluate,
                             std::pow(alpha, pair.frequency_exponent()));
  require_finite(sp.w_alpha, "W_alpha");
  require_finite(sp.b_alpha, "b_alpha");
  return sp;
}

LinearOperator make_sandwich(const Grid& grid, std::vector<double> weight,
                             std::vector<double> symbol, std::string name) {
  if (symbol.size() != grid.size() || (!weight.empty() && weight.size() != grid.size()))
    throw GridMismatch("sandwich samples do not match the grid");
  require_finite(symbol, name + " symbol");
  require_finite(weight, name + " weight");
  const double w_max = weight.empty() ? 1.0 : max_abs(weight);
  const double bound = max_abs(symbol) * w_max * w_max;
  auto apply = [w = std::move(weight), b = std::move(symbol)](const StateVector& u) {
    StateVector wu = w.empty() ? u : multiply(w, u);
    StateVector hat = to_frequency(wu);
    auto h = hat.values();
    for (std::size_t i = 0; i < h.size(); ++i) h[i] *= b[i];
    StateVector out = to_position(hat);
    return w.empty() ? out : multiply(w, out);
  };
  LinearOperator op(grid, std::move(apply), std::move(name));
  op.upper_bound = bound;
  op.lower_bound = -bound;
  return op;
}

LinearOperator make_multiplier_potential(const Grid& grid, std::vector<double> symbol,
                                         std::vector<double> potential, std::string name) {
  if (symbol.size() != grid.size() || potential.size() != grid.size())
    throw GridMismatch("multiplier/potential samples do not match the grid");
  require_finite(symbol, name + " symbol");
  require_finite(potential, name + " potential");
  const auto [smin, smax] = std::minmax_element(symbol.begin(), symbol.end());
  const auto [pmin, pmax] = std::minmax_element(potential.begin(), potential.end());
  const double upper = *smax + *pmax;
  const double lower = *smin + *pmin;
  auto apply = [m = std::move(symbol), p = std::move(potential)](const StateVector& u) {
    StateVector hat = to_frequency(u);
    auto h = hat.values();
    for (std::size_t i = 0; i < h.size(); ++i) h[i] *= m[i];
    StateVector out = to_position(hat);
    auto o = out.values();
    const auto in = u.values();
    for (std::size_t i = 0; i < o.size(); ++i) o[i] += p[i] * in[i];
    return out;
  };
  LinearOperator op(grid, std::move(apply), std::move(name));
  op.upper_bound = upper;
  op.lower_bound = lower;
  return op;
}

LinearOperator build_B_scaled(const ProfilePair& pair, double alpha, const Grid& grid) {
  ScaledPair sp = make_scaled_pair(pair, alpha, grid);
  std::ostringstream name;
  name << "B_scaled(alpha=" << alpha << ")";
  return make_sandwich(grid, std::move(sp.w_alpha), std::move(sp.b_alpha), name.str());
}

LinearOperator build_B_original(const ProfilePair& pair, double alpha, const Grid& grid) {
  require_alpha(alpha);
  require_dimension(pair, grid);
  auto w = sample_scaled(grid, Domain::Position, pair.v.evaluate, 1.0);
  auto b = sample_scaled(grid, Domain::Frequency, pair.a.evaluate, alpha);
  std::ostringstream name;
  name << "B_original(alpha=" << alpha << ")";
  return make_sandwich(grid, std::move(w), std::move(b), name.str());
}

LinearOperator build_T(const ProfilePair& pair, const Grid& grid) {
  require_dimension(pair, grid);
  const double a0 = pair.a.max_value;
  const double v0 = pair.v.max_value;
  auto psi = sample_principal(grid, Domain::Frequency, pair.a.principal);
  auto phi = sample_principal(grid, Domain::Position, pair.v.principal);
  for (double& s : psi) s *= v0 * v0;
  for (double& s : phi) s *= 2.0 * a0 * v0;
  return make_multiplier_potential(grid, std::move(psi), std::move(phi), "T");
}

Complex form_K(const ProfilePair& pair, double alpha, const StateVector& u, const StateVector& v) {
  require_alpha(alpha);
  require_vectors(u, v);
  require_dimension(pair, u.grid());
  const Grid& g = u.grid();
  const auto b = sample_scaled(g, Domain::Frequency, pair.a.evaluate,
                               std::pow(alpha, pair.frequency_exponent()));
  require_finite(b, "b_alpha");
  const StateVector uh = to_frequency(u);
  const StateVector vh = to_frequency(v);
  const double a0 = pair.a.max_value;
  Complex acc = 0.0;
  for (std::size_t i = 0; i < b.size(); ++i) acc += (1.0 - b[i] / a0) * uh[i] * std::conj(vh[i]);
  return acc * g.frequency_weight() * std::pow(alpha, -pair.sigma);
}

Complex form_S(const ProfilePair& pair, double alpha, const StateVector& u, const StateVector& v) {
  require_alpha(alpha);
  require_vectors(u, v);
  require_dimension(pair, u.grid());
  const Grid& g = u.grid();
  const auto w = sample_scaled(g, Domain::Position, pair.v.evaluate,
                               std::pow(alpha, pair.position_exponent()));
  require_finite(w, "W_alpha");
  const double v0 = pair.v.max_value;
  Complex acc = 0.0;
  for (std::size_t i = 0; i < w.size(); ++i) {
    const double wn = w[i] / v0;
    acc += (1.0 - wn * wn) * u[i] * std::conj(v[i]);
  }
  return acc * g.position_weight() * std::pow(alpha, -pair.sigma);
}

Complex form_T(const ProfilePair& pair, const StateVector& u, const StateVector& v) {
  require_vectors(u, v);
  require_dimension(pair, u.grid());
  const Grid& g = u.grid();
  const double a0 = pair.a.max_value;
  const double v0 = pair.v.max_value;
  const auto psi = sample_principal(g, Domain::Frequency, pair.a.principal);
  const auto phi = sample_principal(g, Domain::Position, pair.v.principal);
  const StateVector uh = to_frequency(u);
  const StateVector vh = to_frequency(v);
  Complex kinetic = 0.0;
  Complex potential = 0.0;
  for (std::size_t i = 0; i < psi.size(); ++i) {
    kinetic += psi[i] * uh[i] * std::conj(vh[i]);
    potential += phi[i] * u[i] * std::conj(v[i]);
  }
  return v0 * v0 * kinetic * g.frequency_weight() + 2.0 * a0 * v0 * potential * g.position_weight();
}

double form_R(const ProfilePair& pair, double alpha, const StateVector& u) {
  const ProfilePair unit = normalized(pair);
  const LinearOperator b = build_B_scaled(unit, alpha, u.grid());
  const double bu = inner(b.apply(u), u).real();
  const double uu = inner(u, u).real();
  return bu - uu + std::pow(alpha, unit.sigma) * form_T(unit, u, u).real();
}

DominationRatios domination_ratios(const ProfilePair& pair, double alpha, const StateVector& u) {
  const Grid& g = u.grid();
  const auto xi_pow = sample(g, Domain::Frequency, [&](std::span<const double> x) {
    double s = 0.0;
    for (double c : x) s += c * c;
    return std::pow(s, 0.5 * pair.a.degree);
  });
  const auto x_pow = sample(g, Domain::Position, [&](std::span<const double> x) {
    double s = 0.0;
    for (double c : x) s += c * c;
    return std::pow(s, 0.5 * pair.v.degree);
  });
  const StateVector uh = to_frequency(u);
  double kd = 0.0;
  double sd = 0.0;
  for (std::size_t i = 0; i < xi_pow.size(); ++i) {
    kd += xi_pow[i] * std::norm(uh[i]);
    sd += x_pow[i] * std::norm(u[i]);
  }
  kd *= g.frequency_weight();
  sd *= g.position_weight();
  DominationRatios r;
  r.k_ratio = kd > 0.0 ? form_K(pair, alpha, u, u).real() / kd : 0.0;
  r.s_ratio = sd > 0.0 ? form_S(pair, alpha, u, u).real() / sd : 0.0;
  return r;
}

GridChoice suggest_grid(const ProfilePair& pair, int k) {
  if (k < 1) throw InvalidArgument("suggest_grid: k must be positive");
  const int d = pair.dimension();
  const double target = 50.0 * (2.0 * k + 1.0);
  const auto dirs = sample_directions(d, 8);
  auto min_on_sphere = [&](const ScalarField& f, double r) {
    double m = std::numeric_limits<double>::infinity();
    for (const auto& e : dirs) {
      std::vector<double> x(e);
      for (double& c : x) c *= r;
      m = std::min(m, f(x));
    }
    return m;
  };
  const double pot_scale = 2.0 * pair.a.max_value * pair.v.max_value;
  const double kin_scale = pair.v.max_value * pair.v.max_value;

  double L = 8.0;
  while (L < 400.0 && pot_scale * min_on_sphere(pair.v.principal, L) < target) L += 2.0;
  double xi_max = 8.0;
  while (xi_max < 4000.0 && kin_scale * min_on_sphere(pair.a.principal, xi_max) < target) xi_max += 1.0;

  // Smallest power of two with pi N / (2L) >= xi_max, capped by the node budget.
  int n = 64;
  while (std::numbers::pi * n / (2.0 * L) < xi_max) n *= 2;
  while (n > 8 && std::pow(static_cast<double>(n), d) > static_cast<double>(kDefaultNodeBudget)) n /= 2;

  GridChoice choice{build_grid(d, n, L), ""};
  std::ostringstream os;
  os << "target 50(2k+1) = " << target << "; L = " << L
     << " gives min 2A0V0 Phi(L) = " << pot_scale * min_on_sphere(pair.v.principal, L)
     << "; needed xi_max = " << xi_max << ", N = " << n
     << " gives pi N/(2L) = " << choice.grid.max_frequency();
  choice.reasoning = os.str();
  return choice;
}

}  // namespace topeig
