#include "topeig/asymptotics.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <limits>
#include <sstream>
#include <thread>

#include <Eigen/Dense>
#include <boost/math/tools/roots.hpp>

#include "topeig/errors.hpp"
#include "topeig/operators.hpp"
#include "topeig/version.hpp"

namespace topeig {

std::string_view to_string(VerdictStatus s) noexcept {
  switch (s) {
    case VerdictStatus::Pass: return "PASS";
    case VerdictStatus::Fail: return "FAIL";
    case VerdictStatus::Inconclusive: return "INCONCLUSIVE";
  }
  return "?";
}

double scaled_gap(double lambda, double alpha, const ProfilePair& pair) {
  if (!(alpha > 0.0)) throw InvalidArgument("scaled_gap: alpha must be positive");
  const double top = pair.a.max_value * pair.v.max_value * pair.v.max_value;
  return std::pow(alpha, -pair.sigma) * (top - lambda);
}

namespace {

struct PowerFit {
  double limit = 0.0;
  double coeff = 0.0;
  double ssr = 0.0;
  double slope = 0.0;  // d SSR / d rate at the optimal (limit, coeff)
};

PowerFit fit_fixed_rate(std::span<const double> alphas, std::span<const double> gaps, double rate) {
  const auto n = static_cast<Eigen::Index>(alphas.size());
  Eigen::MatrixXd a(n, 2);
  Eigen::VectorXd g(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    a(i, 0) = 1.0;
    a(i, 1) = std::pow(alphas[static_cast<std::size_t>(i)], rate);
    g(i) = gaps[static_cast<std::size_t>(i)];
  }
  const Eigen::Vector2d x = a.colPivHouseholderQr().solve(g);
  PowerFit f;
  f.limit = x(0);
  f.coeff = x(1);
  for (Eigen::Index i = 0; i < n; ++i) {
    const double ai = alphas[static_cast<std::size_t>(i)];
    const double r = g(i) - x(0) - x(1) * a(i, 1);
    f.ssr += r * r;
    f.slope += -2.0 * r * x(1) * a(i, 1) * std::log(ai);
  }
  return f;
}

}  // namespace

Extrapolation extrapolate_limit(std::span<const double> alphas, std::span<const double> gaps) {
  if (alphas.size() != gaps.size()) throw InvalidArgument("extrapolate_limit: size mismatch");
  if (alphas.size() < 3) throw DegenerateFit("extrapolate_limit: need at least 3 points");
  for (std::size_t i = 0; i < alphas.size(); ++i) {
    if (!(alphas[i] > 0.0) || !std::isfinite(alphas[i]))
      throw InvalidArgument("extrapolate_limit: alphas must be positive");
    if (!std::isfinite(gaps[i])) throw DegenerateFit("extrapolate_limit: non-finite gap");
  }

  // Monotone in alpha (either direction), up to a relative rounding floor.
  std::vector<std::size_t> order(alphas.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::sort(order.begin(), order.end(), [&](auto i, auto j) { return alphas[i] > alphas[j]; });
  double scale = 0.0;
  for (double g : gaps) scale = std::max(scale, std::abs(g));
  const double floor = 1e-12 * std::max(scale, 1.0);
  int up = 0;
  int down = 0;
  for (std::size_t i = 1; i < order.size(); ++i) {
    const double d = gaps[order[i]] - gaps[order[i - 1]];
    if (d > floor) ++up;
    else if (d < -floor) ++down;
  }
  if (up > 0 && down > 0) throw DegenerateFit("extrapolate_limit: gaps are not monotone in alpha");

  Extrapolation ex;
  if (up == 0 && down == 0) {
    ex.limit = gaps[order.back()];
    ex.rate = 0.0;
    ex.note = "constant ladder";
    return ex;
  }

  // Rate scan on a log-spaced ladder, then root of d SSR / d rate.
  constexpr int kScan = 400;
  constexpr double kRateMin = 0.05;
  constexpr double kRateMax = 8.0;
  std::vector<double> rates(kScan);
  std::vector<PowerFit> fits(kScan);
  std::size_t best = 0;
  for (int i = 0; i < kScan; ++i) {
    rates[static_cast<std::size_t>(i)] =
        kRateMin * std::pow(kRateMax / kRateMin, static_cast<double>(i) / (kScan - 1));
    fits[static_cast<std::size_t>(i)] = fit_fixed_rate(alphas, gaps, rates[static_cast<std::size_t>(i)]);
    if (fits[static_cast<std::size_t>(i)].ssr < fits[best].ssr) best = static_cast<std::size_t>(i);
  }
  double rate = rates[best];
  PowerFit fit = fits[best];
  auto slope = [&](double r) { return fit_fixed_rate(alphas, gaps, r).slope; };
  auto refine = [&](std::size_t lo, std::size_t hi) {
    const double flo = fits[lo].slope;
    const double fhi = fits[hi].slope;
    if (!(flo < 0.0 && fhi > 0.0)) return false;
    boost::uintmax_t iters = 200;
    auto [a, b] = boost::math::tools::toms748_solve(slope, rates[lo], rates[hi], flo, fhi,
                                                    boost::math::tools::eps_tolerance<double>(52),
                                                    iters);
    const double r = 0.5 * (a + b);
    const PowerFit f = fit_fixed_rate(alphas, gaps, r);
    if (f.ssr <= fit.ssr) {
      rate = r;
      fit = f;
    }
    return true;
  };
  bool refined = false;
  if (best > 0) refined = refine(best - 1, best);
  if (best + 1 < rates.size()) refined = refine(best, best + 1) || refined;
  if (!refined) ex.note = "rate at scan boundary or flat objective; scan minimum used";

  ex.limit = fit.limit;
  ex.rate = rate;
  ex.fit_residual = std::sqrt(fit.ssr / static_cast<double>(alphas.size()));
  return ex;
}

LocalizationMetrics localization_metrics(const ProfilePair& pair, double alpha,
                                         const EigenPair& eigpair, std::span<const double> radii,
                                         double mu) {
  const ProfilePair unit = normalized(pair);
  const StateVector& psi = eigpair.vector;
  const Grid& g = psi.grid();

  LocalizationMetrics m;
  m.radii.assign(radii.begin(), radii.end());
  std::sort(m.radii.begin(), m.radii.end());

  const double total = inner(psi, psi).real();
  const StateVector psi_hat = to_frequency(psi);
  std::vector<double> coords(static_cast<std::size_t>(g.dimension));
  auto radius = [&](std::size_t i, Domain d) {
    if (d == Domain::Position) g.node_coordinates(i, coords);
    else g.frequency_coordinates(i, coords);
    double s = 0.0;
    for (double c : coords) s += c * c;
    return std::sqrt(s);
  };
  for (double r : m.radii) {
    double pos = 0.0;
    double freq = 0.0;
    for (std::size_t i = 0; i < psi.size(); ++i) {
      if (radius(i, Domain::Position) > r) pos += std::norm(psi[i]);
      if (radius(i, Domain::Frequency) > r) freq += std::norm(psi_hat[i]);
    }
    pos *= g.position_weight() / total;
    freq *= g.frequency_weight() / total;
    m.position_mass_outside.push_back(pos);
    m.frequency_mass_outside.push_back(freq);
    if (mu > 0.0) {
      m.c_hat_frequency.push_back(freq * std::pow(r, unit.a.degree) / mu);
      m.c_hat_position.push_back(pos * std::pow(r, unit.v.degree) / mu);
    }
  }

  const ScaledPair sp = make_scaled_pair(unit, alpha, g);
  const StateVector theta = multiply(sp.w_alpha, psi);
  m.k_form = form_K(unit, alpha, theta, theta).real();
  m.s_form = form_S(unit, alpha, psi, psi).real();
  const double gap = std::pow(alpha, -unit.sigma) * (1.0 - eigpair.value);
  const double denom = std::max(std::abs(gap), std::numeric_limits<double>::min());
  m.identity_residual = std::abs(m.k_form + m.s_form - gap) / denom;
  return m;
}

std::vector<EigenPair> model_spectrum(const ProfilePair& pair, const Grid& grid,
                                      const SolveSettings& settings) {
  SolveSettings s = settings;
  if (s.mode == SolveMode::LanczosTop)
    s.mode = grid.size() <= kDenseNodeLimit ? SolveMode::DenseFull : SolveMode::ShiftInvertBottom;
  return bottom_eigenpairs_T(build_T(pair, grid), s);
}

namespace {

std::string reject_reason(const ProfileSpec& spec, const ValidationReport& rep) {
  std::ostringstream os;
  os << to_string(spec.role) << " profile " << spec.label << " rejected:";
  for (const auto& c : rep.checks)
    if (!c.passed) os << " " << c.name << (c.detail.empty() ? "" : " (" + c.detail + ")");
  return os.str();
}

}  // namespace

StudyReport run_sweep(const ProfilePair& pair, std::span<const double> alphas, int k,
                      const SweepSettings& settings) {
  if (k < 1) throw InvalidArgument("run_sweep: k must be at least 1");
  if (alphas.size() < 3) throw InvalidArgument("run_sweep: need at least 3 alpha values");
  for (std::size_t i = 0; i < alphas.size(); ++i) {
    if (!(alphas[i] > 0.0)) throw InvalidArgument("run_sweep: alphas must be positive");
    if (i > 0 && !(alphas[i] < alphas[i - 1]))
      throw InvalidArgument("run_sweep: alphas must be strictly decreasing");
  }
  for (const ProfileSpec* spec : {&pair.a, &pair.v}) {
    const ValidationReport rep = validate_profile(*spec, default_sample_plan(*spec));
    if (!rep.passed()) throw InvalidArgument(reject_reason(*spec, rep));
  }

  const ProfilePair unit = normalized(pair);
  StudyReport report;
  report.a = {pair.a.label, pair.a.max_value, pair.a.degree};
  report.v = {pair.v.label, pair.v.max_value, pair.v.degree};
  report.dimension = pair.dimension();
  report.sigma = pair.sigma;
  report.rescale = pair.a.max_value * pair.v.max_value * pair.v.max_value;
  report.alphas.assign(alphas.begin(), alphas.end());
  report.k = k;
  report.top_settings = settings.top;
  report.top_settings.k = k;
  report.model_settings = settings.model;
  report.model_settings.k = k;
  report.version = kVersion;
  report.threads = std::max(1, settings.threads);
  if (settings.grid) {
    report.grid = *settings.grid;
    report.grid_reasoning = "fixed by configuration";
  } else {
    GridChoice choice = suggest_grid(unit, k);
    report.grid = choice.grid;
    report.grid_reasoning = choice.reasoning;
  }
  if (report.grid.dimension != pair.dimension())
    throw InvalidArgument("run_sweep: grid dimension does not match the profiles");

  const auto model = model_spectrum(unit, report.grid, report.model_settings);
  if (report.model_settings.mode == SolveMode::LanczosTop)
    report.model_settings.mode =
        report.grid.size() <= kDenseNodeLimit ? SolveMode::DenseFull : SolveMode::ShiftInvertBottom;
  for (int n = 0; n < k; ++n)
    report.model_eigenvalues.push_back(
        {n + 1, report.rescale * model[static_cast<std::size_t>(n)].value,
         report.rescale * model[static_cast<std::size_t>(n)].residual});

  struct Job {
    std::vector<EigenPair> pairs;
    std::string failure;
    std::exception_ptr error;
  };
  std::vector<Job> jobs(alphas.size());
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next++; i < alphas.size(); i = next++) {
      try {
        const LinearOperator b = build_B_scaled(unit, alphas[i], report.grid);
        jobs[i].pairs = top_eigenpairs(b, report.top_settings);
      } catch (const NoConvergence& e) {
        jobs[i].failure = e.what();
      } catch (...) {
        jobs[i].error = std::current_exception();
      }
    }
  };
  const int nthreads = std::min<int>(report.threads, static_cast<int>(alphas.size()));
  if (nthreads <= 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (int t = 0; t < nthreads; ++t) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
  }
  for (const auto& j : jobs)
    if (j.error) std::rethrow_exception(j.error);

  // Deterministic assembly ordered by (alpha, n).
  for (std::size_t i = 0; i < alphas.size(); ++i) {
    const double alpha = alphas[i];
    const double inv = std::pow(alpha, -unit.sigma);
    for (int n = 0; n < k; ++n) {
      SweepRecord rec;
      rec.alpha = alpha;
      rec.n = n + 1;
      rec.grid_id = report.grid.id();
      if (!jobs[i].failure.empty()) {
        rec.converged = false;
        rec.note = jobs[i].failure;
        rec.lambda = std::nan("");
        rec.scaled_gap = std::nan("");
        rec.residual = std::nan("");
        report.records.push_back(std::move(rec));
        if (settings.keep_eigenvectors) report.eigenvectors.emplace_back(report.grid);
        continue;
      }
      const EigenPair& p = jobs[i].pairs[static_cast<std::size_t>(n)];
      rec.lambda = report.rescale * p.value;
      rec.scaled_gap = report.rescale * inv * (1.0 - p.value);
      rec.residual = report.rescale * p.residual;
      rec.localization = localization_metrics(unit, alpha, p, settings.radii,
                                              model[static_cast<std::size_t>(n)].value);
      report.records.push_back(std::move(rec));
      if (settings.keep_eigenvectors) report.eigenvectors.push_back(p.vector);
    }
  }

  for (int n = 1; n <= k; ++n) {
    std::vector<double> a;
    std::vector<double> g;
    bool complete = true;
    for (const auto& r : report.records)
      if (r.n == n) {
        complete = complete && r.converged;
        a.push_back(r.alpha);
        g.push_back(r.scaled_gap);
      }
    Extrapolation ex;
    ex.n = n;
    if (!complete) {
      ex.degenerate = true;
      ex.note = "solver did not converge on every ladder point";
    } else {
      try {
        ex = extrapolate_limit(a, g);
        ex.n = n;
      } catch (const DegenerateFit& e) {
        ex.degenerate = true;
        ex.note = e.what();
      }
    }
    report.extrapolations.push_back(ex);
  }
  return report;
}

std::vector<Verdict> verify_theorem(StudyReport& report, const Tolerances& tol) {
  std::vector<Verdict> out;
  for (int n = 1; n <= report.k; ++n) {
    Verdict v;
    v.n = n;
    v.tolerances = tol;
    auto conclude = [&](VerdictStatus s, std::string why) {
      v.status = s;
      if (!why.empty()) v.reasons.push_back(std::move(why));
      out.push_back(v);
    };

    const ModelEigenvalue* model = nullptr;
    for (const auto& m : report.model_eigenvalues)
      if (m.n == n) model = &m;
    if (!model) {
      conclude(VerdictStatus::Inconclusive, "no model eigenvalue");
      continue;
    }
    v.mu = model->mu;

    std::vector<const SweepRecord*> recs;
    for (const auto& r : report.records)
      if (r.n == n) recs.push_back(&r);
    std::sort(recs.begin(), recs.end(), [](auto* x, auto* y) { return x->alpha > y->alpha; });
    if (recs.size() < 3) {
      conclude(VerdictStatus::Inconclusive, "inconclusive: insufficient ladder");
      continue;
    }
    bool converged = true;
    for (auto* r : recs) converged = converged && r->converged;
    if (!converged) {
      conclude(VerdictStatus::Inconclusive, "inconclusive: solver did not converge on the ladder");
      continue;
    }

    auto slack = [&](const SweepRecord& r) {
      return r.residual * std::pow(r.alpha, -report.sigma) + 1e-12 * std::abs(v.mu);
    };
    bool negative = false;
    for (auto* r : recs) negative = negative || r->scaled_gap < -slack(*r);

    const SweepRecord& last = *recs.back();
    v.final_gap = last.scaled_gap;
    v.final_rel_error = std::abs(last.scaled_gap - v.mu) / v.mu;
    v.final_ok = v.final_rel_error <= tol.rel_final;

    const Extrapolation* ex = nullptr;
    for (const auto& e : report.extrapolations)
      if (e.n == n) ex = &e;
    if (ex && !ex->degenerate) {
      v.extrap_limit = ex->limit;
      v.extrap_rel_error = std::abs(ex->limit - v.mu) / v.mu;
      v.extrap_ok = v.extrap_rel_error <= tol.rel_extrap;
    } else {
      v.extrap_limit = std::nan("");
      v.extrap_rel_error = std::nan("");
      v.extrap_ok = v.final_ok;
      v.reasons.push_back("extrapolation degenerate; fell back to last-point comparison");
    }

    v.monotone_ok = true;
    for (std::size_t i = 1; i < recs.size(); ++i) {
      const double prev = std::abs(recs[i - 1]->scaled_gap - v.mu);
      const double cur = std::abs(recs[i]->scaled_gap - v.mu);
      if (cur > prev + slack(*recs[i]) + slack(*recs[i - 1])) v.monotone_ok = false;
    }
    v.upper_bound_ok = last.scaled_gap <= v.mu * 1.001 + slack(last);

    std::ostringstream os;
    os.precision(6);
    if (negative) {
      conclude(VerdictStatus::Fail, "negative scaled gap");
      continue;
    }
    if (!v.final_ok) {
      os << "final-point error " << v.final_rel_error << " > rel_final " << tol.rel_final;
      v.reasons.push_back(os.str());
      os.str("");
    }
    if (ex && !ex->degenerate && !v.extrap_ok) {
      os << "extrapolation error " << v.extrap_rel_error << " > rel_extrap " << tol.rel_extrap;
      v.reasons.push_back(os.str());
      os.str("");
    }
    if (!v.monotone_ok) v.reasons.push_back("|g_n - mu_n| not nonincreasing along the ladder");
    if (!v.upper_bound_ok) v.reasons.push_back("one-sided bound g_n <= mu_n (1 + 1e-3) violated");

    VerdictStatus status = VerdictStatus::Pass;
    if (!v.final_ok || !v.extrap_ok) status = VerdictStatus::Fail;
    else if (!v.monotone_ok || !v.upper_bound_ok)
      status = tol.strict ? VerdictStatus::Fail : VerdictStatus::Inconclusive;
    conclude(status, "");
  }
  report.verdicts = out;
  return out;
}

}  // namespace topeig
