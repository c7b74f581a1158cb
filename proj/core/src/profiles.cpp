#include "topeig/profiles.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <memory>
#include <numbers>
#include <random>
#include <sstream>

#include <Eigen/Dense>

#include "topeig/errors.hpp"
#include "topeig/expression.hpp"

namespace topeig {

std::string_view to_string(Role role) noexcept {
  return role == Role::SymbolA ? "symbol" : "weight";
}

double sigma_exponent(double beta, double gamma) {
  if (!(beta > 0.0) || !(gamma > 0.0))
    throw InvalidArgument("sigma_exponent: degrees must be positive");
  return beta * gamma / (beta + gamma);
}

ProfilePair make_profile_pair(ProfileSpec a, ProfileSpec v) {
  if (a.role != Role::SymbolA) throw InvalidArgument("first profile must be a symbol");
  if (v.role != Role::WeightV) throw InvalidArgument("second profile must be a weight");
  if (a.dimension != v.dimension)
    throw InvalidArgument("symbol and weight profiles have different dimensions");
  const double sigma = sigma_exponent(v.degree, a.degree);
  return ProfilePair{std::move(a), std::move(v), sigma};
}

namespace {

double norm_pow(std::span<const double> x, double p) {
  double s = 0.0;
  for (double v : x) s += v * v;
  return std::pow(s, 0.5 * p);
}

void check_exponent(double p, std::string_view name) {
  if (!(p > 0.0) || !std::isfinite(p))
    throw InvalidArgument(std::string(name) + ": exponent must be positive");
}

double scale_param(std::span<const double> params, std::size_t base, std::string_view name) {
  if (params.size() == base) return 1.0;
  if (params.size() != base + 1)
    throw InvalidArgument(std::string(name) + ": expected " + std::to_string(base) + " or " +
                          std::to_string(base + 1) + " parameters");
  const double s = params[base];
  if (!(s > 0.0) || !std::isfinite(s))
    throw InvalidArgument(std::string(name) + ": scale must be positive");
  return s;
}

std::string format_params(std::span<const double> params) {
  std::ostringstream os;
  os.precision(17);
  for (std::size_t i = 0; i < params.size(); ++i) os << (i ? "," : "") << params[i];
  return os.str();
}

}  // namespace

ProfileSpec make_catalog_profile(std::string_view name, std::span<const double> params,
                                 int dimension, Role role) {
  if (dimension < 1) throw InvalidArgument("profile dimension must be positive");
  ProfileSpec spec;
  spec.dimension = dimension;
  spec.role = role;
  spec.label = std::string(name) + "(" + format_params(params) + ")";

  if (name == "gaussian_power" || name == "rational_power") {
    if (params.empty()) throw InvalidArgument(std::string(name) + ": missing exponent p");
    const double p = params[0];
    check_exponent(p, name);
    const double s = scale_param(params, 1, name);
    if (name == "gaussian_power")
      spec.evaluate = [p, s](std::span<const double> x) { return s * std::exp(-norm_pow(x, p)); };
    else
      spec.evaluate = [p, s](std::span<const double> x) { return s / (1.0 + norm_pow(x, p)); };
    spec.principal = [p, s](std::span<const double> x) { return s * norm_pow(x, p); };
    spec.max_value = s;
    spec.degree = p;
  } else if (name == "aniso_gaussian") {
    const auto d = static_cast<std::size_t>(dimension);
    if (params.size() < d * d)
      throw InvalidArgument("aniso_gaussian: expects d*d coefficients of Q");
    const double s = scale_param(params, d * d, name);
    Eigen::MatrixXd q(dimension, dimension);
    for (int i = 0; i < dimension; ++i)
      for (int j = 0; j < dimension; ++j) q(i, j) = params[static_cast<std::size_t>(i * dimension + j)];
    if ((q - q.transpose()).cwiseAbs().maxCoeff() > 1e-14 * std::max(1.0, q.cwiseAbs().maxCoeff()))
      throw InvalidArgument("aniso_gaussian: Q must be symmetric");
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(q, Eigen::EigenvaluesOnly);
    if (!(es.eigenvalues().minCoeff() > 0.0))
      throw InvalidArgument("aniso_gaussian: Q must be positive definite");
    auto coeffs = std::make_shared<const std::vector<double>>(params.begin(), params.begin() + d * d);
    auto quad = [coeffs, dimension](std::span<const double> x) {
      double acc = 0.0;
      for (int i = 0; i < dimension; ++i)
        for (int j = 0; j < dimension; ++j)
          acc += x[static_cast<std::size_t>(i)] * (*coeffs)[static_cast<std::size_t>(i * dimension + j)] *
                 x[static_cast<std::size_t>(j)];
      return acc;
    };
    spec.evaluate = [quad, s](std::span<const double> x) { return s * std::exp(-quad(x)); };
    spec.principal = [quad, s](std::span<const double> x) { return s * quad(x); };
    spec.max_value = s;
    spec.degree = 2.0;
  } else {
    throw InvalidArgument("unknown catalog profile '" + std::string(name) + "'");
  }

  // Every catalog function is positive and tends to zero, so inf V = 0 and c = V0.
  if (role == Role::WeightV) spec.lower_bound_margin = spec.max_value;
  return spec;
}

ProfileSpec make_expression_profile(std::string_view value_expr, std::string_view principal_expr,
                                    double max_value, double degree, int dimension, Role role) {
  if (!(max_value > 0.0)) throw InvalidArgument("expression profile: max must be positive");
  if (!(degree > 0.0)) throw InvalidArgument("expression profile: degree must be positive");
  auto value = Expression::parse(value_expr, dimension);
  auto principal = Expression::parse(principal_expr, dimension);
  ProfileSpec spec;
  spec.dimension = dimension;
  spec.role = role;
  spec.evaluate = [value](std::span<const double> x) { return value(x); };
  spec.principal = [principal](std::span<const double> x) { return principal(x); };
  spec.max_value = max_value;
  spec.degree = degree;
  spec.label = "expr(" + std::string(value_expr) + ")";
  if (role == Role::WeightV) {
    // c = V0 + min(0, inf V); the infimum is taken over the default sample cloud.
    double lowest = 0.0;
    const auto plan = default_sample_plan(spec);
    for (const auto& e : sample_directions(dimension, plan.directions))
      for (double r : plan.radii) {
        std::vector<double> x(e);
        for (double& c : x) c *= r;
        const double v = value(x);
        if (std::isfinite(v)) lowest = std::min(lowest, v);
      }
    spec.lower_bound_margin = max_value + lowest;
  }
  return spec;
}

ProfileSpec make_constant_profile(double value, int dimension, Role role) {
  ProfileSpec spec;
  spec.dimension = dimension;
  spec.role = role;
  spec.evaluate = [value](std::span<const double>) { return value; };
  spec.principal = [](std::span<const double>) { return 0.0; };
  spec.max_value = value;
  spec.degree = 2.0;
  spec.lower_bound_margin = role == Role::WeightV ? 2.0 * value : 0.0;
  spec.label = "constant(" + format_params(std::span<const double>(&value, 1)) + ")";
  return spec;
}

ProfileSpec normalized(const ProfileSpec& spec) {
  if (spec.max_value == 1.0) return spec;
  ProfileSpec out = spec;
  const double m = spec.max_value;
  out.evaluate = [f = spec.evaluate, m](std::span<const double> x) { return f(x) / m; };
  out.principal = [f = spec.principal, m](std::span<const double> x) { return f(x) / m; };
  out.max_value = 1.0;
  out.lower_bound_margin = spec.lower_bound_margin / m;
  return out;
}

ProfilePair normalized(const ProfilePair& pair) {
  return ProfilePair{normalized(pair.a), normalized(pair.v), pair.sigma};
}

std::vector<std::vector<double>> sample_directions(int dimension, int count) {
  std::vector<std::vector<double>> dirs;
  if (dimension == 1) {
    dirs.push_back({1.0});
    dirs.push_back({-1.0});
    return dirs;
  }
  count = std::max(count, 2 * dimension);
  // Coordinate axes first, then a fixed-seed Gaussian cloud projected to the sphere.
  for (int i = 0; i < dimension; ++i) {
    std::vector<double> e(static_cast<std::size_t>(dimension), 0.0);
    e[static_cast<std::size_t>(i)] = 1.0;
    dirs.push_back(e);
    e[static_cast<std::size_t>(i)] = -1.0;
    dirs.push_back(e);
  }
  std::mt19937_64 rng(0x5eedULL);
  std::normal_distribution<double> normal;
  while (static_cast<int>(dirs.size()) < count) {
    std::vector<double> e(static_cast<std::size_t>(dimension));
    double s = 0.0;
    for (double& c : e) {
      c = normal(rng);
      s += c * c;
    }
    if (s < 1e-12) continue;
    for (double& c : e) c /= std::sqrt(s);
    dirs.push_back(std::move(e));
  }
  return dirs;
}

SamplePlan default_sample_plan(const ProfileSpec& spec) {
  SamplePlan plan;
  plan.radii = {4.0, 2.0, 1.0, 0.5};
  plan.directions = 8;
  for (int k = 0; k < 5; ++k)
    plan.expansion_radii.push_back(std::pow(0.1 * std::pow(4.0, -k), 1.0 / spec.degree));
  return plan;
}

bool ValidationReport::passed() const noexcept {
  return !checks.empty() &&
         std::all_of(checks.begin(), checks.end(), [](const CheckResult& c) { return c.passed; });
}

const CheckResult* ValidationReport::find(std::string_view name) const noexcept {
  for (const auto& c : checks)
    if (c.name == name) return &c;
  return nullptr;
}

namespace {

std::vector<double> scaled(const std::vector<double>& dir, double r) {
  std::vector<double> x(dir);
  for (double& c : x) c *= r;
  return x;
}

std::string point_string(std::span<const double> x) {
  std::ostringstream os;
  os.precision(6);
  os << "(";
  for (std::size_t i = 0; i < x.size(); ++i) os << (i ? ", " : "") << x[i];
  os << ")";
  return os.str();
}

}  // namespace

ValidationReport validate_profile(const ProfileSpec& spec, const SamplePlan& plan) {
  if (plan.radii.empty() || plan.expansion_radii.empty() || plan.directions < 1)
    throw InvalidArgument("validate_profile: empty sample plan");
  for (std::size_t i = 1; i < plan.expansion_radii.size(); ++i)
    if (!(plan.expansion_radii[i] < plan.expansion_radii[i - 1]))
      throw InvalidArgument("validate_profile: expansion radii must strictly decrease");
  if (!(plan.expansion_radii.back() > 0.0))
    throw InvalidArgument("validate_profile: expansion radii must be positive");
  if (!spec.evaluate || !spec.principal)
    throw InvalidArgument("validate_profile: profile has no evaluate/principal function");

  ValidationReport report;
  report.assumptions.push_back("smoothness of the principal part away from 0 is assumed, not checked");
  const auto dirs = sample_directions(spec.dimension, plan.directions);
  const double m = spec.max_value;
  const double rel = 1e-12;

  CheckResult finite{"finite", true, "", {}};
  auto eval_checked = [&](const ScalarField& f, std::span<const double> x, const char* which) {
    const double v = f(x);
    if (!std::isfinite(v)) {
      if (finite.passed) finite.detail = std::string(which) + " is non-finite at";
      finite.detail += " " + point_string(x);
      finite.passed = false;
    }
    return v;
  };

  // Global maximum: value at 0 equals the max, every other sample is strictly below.
  {
    CheckResult c{"global_max", true, "", {}};
    if (!(m > 0.0)) {
      c.passed = false;
      c.detail = "max_value must be positive";
    }
    const std::vector<double> origin(static_cast<std::size_t>(spec.dimension), 0.0);
    const double v0 = eval_checked(spec.evaluate, origin, "value");
    if (!(std::abs(v0 - m) <= rel * std::abs(m))) {
      c.passed = false;
      c.detail += "value at 0 is " + std::to_string(v0) + ", not max_value; ";
    }
    for (double r : plan.radii) {
      double worst = -std::numeric_limits<double>::infinity();
      for (const auto& e : dirs) {
        const auto x = scaled(e, r);
        const double v = eval_checked(spec.evaluate, x, "value");
        worst = std::max(worst, v);
        if (!(v < m) && c.passed) {
          c.passed = false;
          c.detail += "maximum attained away from 0 near " + point_string(x) + "; ";
        } else if (!(v < m)) {
          c.detail += "also at " + point_string(x) + "; ";
        }
      }
      c.residuals.push_back(worst);
    }
    report.checks.push_back(std::move(c));
  }

  // Positivity of the principal part on the unit sphere.
  {
    CheckResult c{"positivity", true, "", {}};
    for (const auto& e : dirs) {
      const double p = eval_checked(spec.principal, e, "principal");
      c.residuals.push_back(p);
      if (!(p > 0.0)) {
        c.passed = false;
        c.detail = "principal part not positive at " + point_string(e);
      }
    }
    report.checks.push_back(std::move(c));
  }

  // Homogeneity: principal(t x) = t^degree principal(x).
  {
    CheckResult c{"homogeneity", true, "", {}};
    for (double t : {0.5, 2.0, 10.0}) {
      double worst = 0.0;
      for (const auto& e : dirs) {
        const double p1 = eval_checked(spec.principal, e, "principal");
        const double pt = eval_checked(spec.principal, scaled(e, t), "principal");
        const double expect = std::pow(t, spec.degree) * p1;
        const double res = std::abs(pt - expect) / std::max(std::abs(expect), 1e-300);
        worst = std::max(worst, std::isfinite(res) ? res : std::numeric_limits<double>::infinity());
      }
      c.residuals.push_back(worst);
      if (!(worst <= rel)) {
        c.passed = false;
        c.detail = "homogeneity residual " + std::to_string(worst) + " at t = " + std::to_string(t);
      }
    }
    report.checks.push_back(std::move(c));
  }

  // Expansion m - f(x) = principal(x) + o(|x|^degree) along a decreasing ladder.
  {
    CheckResult c{"expansion", true, "", {}};
    for (double r : plan.expansion_radii) {
      double worst = 0.0;
      for (const auto& e : dirs) {
        const auto x = scaled(e, r);
        const double v = eval_checked(spec.evaluate, x, "value");
        const double p = eval_checked(spec.principal, x, "principal");
        const double res = std::abs(m - v - p) / std::pow(r, spec.degree);
        worst = std::max(worst, std::isfinite(res) ? res : std::numeric_limits<double>::infinity());
      }
      c.residuals.push_back(worst);
    }
    // Monotone decrease, with an absolute floor for residuals that are zero to rounding.
    const double floor = 1e-13;
    for (std::size_t i = 1; i < c.residuals.size(); ++i) {
      if (c.residuals[i] > c.residuals[i - 1] * (1.0 + 1e-9) + floor) {
        c.passed = false;
        c.detail = "expansion residual increases between radii " +
                   std::to_string(plan.expansion_radii[i - 1]) + " and " +
                   std::to_string(plan.expansion_radii[i]);
        break;
      }
    }
    if (c.passed && c.residuals.size() > 1 && c.residuals.back() > floor &&
        !(c.residuals.back() < c.residuals.front())) {
      c.passed = false;
      c.detail = "expansion residual does not decrease toward 0";
    }
    report.checks.push_back(std::move(c));
  }

  if (spec.role == Role::WeightV) {
    CheckResult c{"lower_bound", true, "", {}};
    if (!(spec.lower_bound_margin > 0.0)) {
      c.passed = false;
      c.detail = "lower_bound_margin must be positive";
    }
    const double bound = -m + spec.lower_bound_margin;
    for (double r : plan.radii)
      for (const auto& e : dirs) {
        const auto x = scaled(e, r);
        const double v = eval_checked(spec.evaluate, x, "value");
        if (v < bound - 1e-12 * m) {
          c.passed = false;
          c.detail = "value below -V0 + c at " + point_string(x);
        }
        c.residuals.push_back(v - bound);
      }
    report.checks.push_back(std::move(c));
  }

  report.checks.insert(report.checks.begin(), std::move(finite));
  return report;
}

}  // namespace topeig
