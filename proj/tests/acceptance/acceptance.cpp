// Acceptance suite: one PASS/FAIL line per criterion. Tolerances are pinned here.
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <numbers>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include <topeig/topeig.hpp>

using namespace topeig;

namespace {

constexpr double kHarmonicRelTol = 1e-6;
constexpr double kHarmonicSeconds = 10.0;
constexpr double kSweepSeconds = 120.0;
constexpr double kRelFinal = 0.05;
constexpr double kRelExtrap = 0.02;
constexpr double kTwoResolutionRelTol = 1e-7;
constexpr double kIdentityRelTol = 1e-12;
constexpr double kHermitianRelTol = 1e-12;
constexpr double kIdentitySeconds = 10.0;
constexpr int kIdentityVectors = 100;
constexpr int kRandomOperators = 20;
constexpr double kSolverTol = 1e-10;
constexpr double kUpperBoundFactor = 1.001;
constexpr double kMassCeiling = 0.5;
constexpr double kFormIdentityTol = 1e-10;

const std::vector<double> kLadder = {0.2, 0.1, 0.05, 0.025};

struct Outcome {
  bool pass = true;
  std::ostringstream detail;
  void require(bool ok, const std::string& what) {
    if (!ok) {
      pass = false;
      detail << " [" << what << "]";
    }
  }
};

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

ProfileSpec catalog(const char* name, double p, Role role) {
  const std::vector<double> params = {p};
  return make_catalog_profile(name, params, 1, role);
}

ProfilePair gaussian_pair() {
  return make_profile_pair(catalog("gaussian_power", 2, Role::SymbolA), catalog("gaussian_power", 2, Role::WeightV));
}

ProfilePair rational_pair() {
  return make_profile_pair(catalog("rational_power", 2, Role::SymbolA), catalog("gaussian_power", 2, Role::WeightV));
}

ProfilePair mixed_pair() {
  return make_profile_pair(catalog("gaussian_power", 4, Role::SymbolA), catalog("gaussian_power", 2, Role::WeightV));
}

StateVector random_state(const Grid& g, std::mt19937_64& rng) {
  std::normal_distribution<double> n;
  std::vector<Complex> v(g.size());
  for (auto& x : v) x = {n(rng), n(rng)};
  return StateVector(g, std::move(v));
}

SweepSettings sweep_settings() {
  SweepSettings s;
  s.grid = build_grid(1, 1024, 20.0);
  s.top.tol = kSolverTol;
  s.model.tol = kSolverTol;
  s.model.mode = SolveMode::DenseFull;
  return s;
}

const StudyReport& gaussian_run() {
  static StudyReport r = [] {
    StudyReport rep = run_sweep(gaussian_pair(), kLadder, 3, sweep_settings());
    verify_theorem(rep, Tolerances{kRelFinal, kRelExtrap, true});
    return rep;
  }();
  return r;
}

void append_verdicts(Outcome& o, const StudyReport& r) {
  for (const Verdict& v : r.verdicts) {
    o.detail << " n=" << v.n << ":" << to_string(v.status) << "(final " << v.final_rel_error << ", extrap "
             << v.extrap_rel_error << ", mono " << v.monotone_ok << ")";
    const double target = std::numbers::sqrt2 * (2 * v.n - 1);
    o.require(std::abs(v.mu - target) <= 1e-6 * target, "mu_" + std::to_string(v.n) + " off target");
    o.require(v.status == VerdictStatus::Pass, "n=" + std::to_string(v.n) + " not PASS");
    o.require(v.monotone_ok, "n=" + std::to_string(v.n) + " not monotone");
  }
}

void criterion1(Outcome& o) {
  const auto t0 = Clock::now();
  const ProfileSpec a = make_expression_profile("exp(-x1^2)", "x1^2", 1.0, 2.0, 1, Role::SymbolA);
  const ProfileSpec v = make_expression_profile("exp(-x1^2)", "x1^2", 1.0, 2.0, 1, Role::WeightV);
  SolveSettings s;
  s.k = 5;
  s.tol = kSolverTol;
  const auto mu = model_spectrum(make_profile_pair(a, v), build_grid(1, 1024, 20.0), s);
  double worst = 0.0;
  for (int n = 1; n <= 5; ++n) {
    const double exact = std::numbers::sqrt2 * (2 * n - 1);
    worst = std::max(worst, std::abs(mu[static_cast<std::size_t>(n - 1)].value - exact) / exact);
  }
  const double secs = seconds_since(t0);
  o.detail << "max rel err " << worst << ", " << secs << " s";
  o.require(worst <= kHarmonicRelTol, "rel err");
  o.require(secs <= kHarmonicSeconds, "runtime");
}

void criterion2(Outcome& o) {
  const auto t0 = Clock::now();
  const StudyReport& r = gaussian_run();
  const double secs = seconds_since(t0);
  o.detail << secs << " s;";
  append_verdicts(o, r);
  o.require(secs <= kSweepSeconds, "runtime");
}

void criterion3(Outcome& o) {
  const ProfilePair pair = mixed_pair();
  SolveSettings s;
  s.k = 1;
  s.tol = kSolverTol;
  s.mode = SolveMode::DenseFull;
  const double coarse = model_spectrum(pair, build_grid(1, 1024, 20.0), s)[0].value;
  const double fine = model_spectrum(pair, build_grid(1, 2048, 20.0), s)[0].value;
  const double rel = std::abs(coarse - fine) / fine;
  o.detail << "mu_1 " << coarse << " vs " << fine << " (rel " << rel << ");";
  o.require(rel <= kTwoResolutionRelTol, "two-resolution");
  StudyReport r = run_sweep(pair, kLadder, 1, sweep_settings());
  const auto v = verify_theorem(r, Tolerances{kRelFinal, kRelExtrap, false});
  o.detail << " sigma " << r.sigma << "; n=1:" << to_string(v[0].status) << "(final " << v[0].final_rel_error
           << ", extrap " << v[0].extrap_rel_error << ")";
  o.require(std::abs(r.sigma - 4.0 / 3.0) < 1e-15, "sigma");
  o.require(v[0].status == VerdictStatus::Pass, "verdict");
}

void criterion4(Outcome& o) {
  const auto t0 = Clock::now();
  const Grid g = build_grid(1, 256, 12.0);
  std::mt19937_64 rng(20240601);
  double worst_k = 0.0, worst_r = 0.0, worst_h = 0.0;
  bool nonneg = true;
  const std::vector<ProfilePair> pairs = {gaussian_pair(), mixed_pair(), rational_pair()};
  for (const ProfilePair& pair : pairs) {
    for (double alpha : {0.2, 0.025}) {
      const LinearOperator b = build_B_scaled(pair, alpha, g);
      const ScaledPair sp = make_scaled_pair(pair, alpha, g);
      const double inv = std::pow(alpha, -pair.sigma);
      for (int i = 0; i < kIdentityVectors; ++i) {
        const StateVector u = random_state(g, rng);
        const StateVector v = random_state(g, rng);
        const Complex lhs = inv * (inner(u, v) - inner(b.apply(u), v));
        const Complex rhs =
            form_K(pair, alpha, multiply(sp.w_alpha, u), multiply(sp.w_alpha, v)) + form_S(pair, alpha, u, v);
        worst_k = std::max(worst_k, std::abs(lhs - rhs) / std::abs(rhs));
        const StateVector wu = multiply(sp.w_alpha, u);
        const double kf = form_K(pair, alpha, wu, wu).real();
        const double sf = form_S(pair, alpha, u, u).real();
        const double tf = form_T(pair, u, u).real();
        const double r_alt = std::pow(alpha, pair.sigma) * (tf - kf - sf);
        worst_r = std::max(worst_r, std::abs(form_R(pair, alpha, u) - r_alt) / (std::pow(alpha, pair.sigma) * tf));
        nonneg = nonneg && kf >= 0.0 && sf >= 0.0 && form_K(pair, alpha, u, u).real() >= 0.0;
      }
    }
    std::vector<LinearOperator> ops = {build_B_scaled(pair, 0.1, g), build_B_original(pair, 0.1, g),
                                       build_T(pair, g)};
    for (const LinearOperator& op : ops) {
      for (int i = 0; i < 10; ++i) {
        const StateVector u = random_state(g, rng);
        const StateVector v = random_state(g, rng);
        const StateVector au = op.apply(u);
        const double err = std::abs(inner(au, v) - inner(u, op.apply(v))) / (norm(au) * norm(v));
        worst_h = std::max(worst_h, err);
      }
    }
  }
  const double secs = seconds_since(t0);
  o.detail << "K+S identity " << worst_k << ", R identity " << worst_r << ", hermitian " << worst_h << ", " << secs
           << " s";
  o.require(worst_k <= kIdentityRelTol, "K+S identity");
  o.require(worst_r <= kIdentityRelTol, "R identity");
  o.require(nonneg, "nonnegativity");
  o.require(worst_h <= kHermitianRelTol, "hermitian");
  o.require(secs <= kIdentitySeconds, "runtime");
}

void criterion5(Outcome& o) {
  const Grid g = build_grid(1, 256, 10.0);
  double worst_top = 0.0, worst_bottom = 0.0;
  bool deterministic = true;
  for (int i = 0; i < kRandomOperators; ++i) {
    std::mt19937_64 rng(1000 + static_cast<std::uint64_t>(i));
    std::uniform_real_distribution<double> u(0.0, 1.0);
    std::vector<double> sym(g.size()), pot(g.size());
    for (auto& x : sym) x = u(rng);
    for (auto& x : pot) x = u(rng);
    const LinearOperator op = make_multiplier_potential(g, sym, pot, "random");
    const double scale = op.residual_scale();
    SolveSettings s;
    s.k = 4;
    s.tol = kSolverTol;
    s.rng_seed = 77 + static_cast<std::uint64_t>(i);
    const auto top = top_eigenpairs(op, s);
    const auto again = top_eigenpairs(op, s);
    const auto dense_top = dense_eigenpairs(op, 4, true);
    s.mode = SolveMode::ShiftInvertBottom;
    const auto bottom = bottom_eigenpairs_T(op, s);
    const auto dense_bottom = dense_eigenpairs(op, 4, false);
    for (std::size_t j = 0; j < 4; ++j) {
      worst_top = std::max(worst_top, std::abs(top[j].value - dense_top[j].value) / (kSolverTol * scale));
      worst_bottom = std::max(worst_bottom, std::abs(bottom[j].value - dense_bottom[j].value) / (kSolverTol * scale));
      deterministic = deterministic && top[j].value == again[j].value;
      for (std::size_t m = 0; m < g.size(); ++m) deterministic = deterministic && top[j].vector[m] == again[j].vector[m];
    }
  }
  o.detail << "lanczos " << worst_top << " tol, shift-invert " << worst_bottom << " tol, deterministic "
           << deterministic;
  o.require(worst_top <= 10.0, "lanczos vs dense");
  o.require(worst_bottom <= 10.0, "shift-invert vs dense");
  o.require(deterministic, "determinism");
}

void criterion6(Outcome& o) {
  const StudyReport& r = gaussian_run();
  const double sigma = r.sigma;
  for (const SweepRecord& rec : r.records) {
    if (rec.alpha != kLadder.back()) continue;
    const double mu = r.model_eigenvalues[static_cast<std::size_t>(rec.n - 1)].mu;
    const double slack = rec.residual * std::pow(rec.alpha, -sigma) + 1e-12 * mu;
    o.detail << " n=" << rec.n << ": " << rec.scaled_gap << " <= " << mu * kUpperBoundFactor;
    o.require(rec.scaled_gap <= mu * kUpperBoundFactor + slack, "n=" + std::to_string(rec.n));
  }
}

void criterion7(Outcome& o) {
  const StudyReport& r = gaussian_run();
  for (const SweepRecord& rec : r.records) {
    if (rec.alpha != kLadder.back() || rec.n != 1) continue;
    const LocalizationMetrics& m = rec.localization;
    o.require(m.radii == std::vector<double>{2.0, 4.0, 8.0}, "radii");
    for (std::size_t i = 0; i < m.radii.size(); ++i) {
      o.detail << " R=" << m.radii[i] << ": pos " << m.position_mass_outside[i] << " freq "
               << m.frequency_mass_outside[i] << ";";
      o.require(m.position_mass_outside[i] <= kMassCeiling, "position mass");
      o.require(m.frequency_mass_outside[i] <= kMassCeiling, "frequency mass");
      if (i > 0) {
        o.require(m.position_mass_outside[i] < m.position_mass_outside[i - 1], "position decrease");
        o.require(m.frequency_mass_outside[i] < m.frequency_mass_outside[i - 1], "frequency decrease");
      }
    }
    o.detail << " identity " << m.identity_residual;
    o.require(m.identity_residual <= kFormIdentityTol, "form identity");
    return;
  }
  o.require(false, "record missing");
}

void criterion8(Outcome& o) {
  StudyReport r = run_sweep(rational_pair(), kLadder, 3, sweep_settings());
  verify_theorem(r, Tolerances{kRelFinal, kRelExtrap, true});
  append_verdicts(o, r);
}

}  // namespace

int main() {
  const std::vector<std::pair<const char*, std::function<void(Outcome&)>>> criteria = {
      {"harmonic model spectrum", criterion1},
      {"gaussian pair verdicts n=1..3", criterion2},
      {"mixed-degree two-resolution and verdict", criterion3},
      {"exact discrete identities and hermiticity", criterion4},
      {"eigensolver equivalence and determinism", criterion5},
      {"one-sided bound at alpha_min", criterion6},
      {"localization diagnostics", criterion7},
      {"principal-part sufficiency (rational symbol)", criterion8},
  };
  int failed = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    Outcome o;
    o.detail.precision(4);
    try {
      criteria[i].second(o);
    } catch (const std::exception& e) {
      o.require(false, std::string("exception: ") + e.what());
    }
    std::printf("%s criterion %zu: %s: %s\n", o.pass ? "PASS" : "FAIL", i + 1, criteria[i].first,
                o.detail.str().c_str());
    std::fflush(stdout);
    if (!o.pass) ++failed;
  }
  std::printf("%d of %zu criteria passed\n", static_cast<int>(criteria.size()) - failed, criteria.size());
  return failed == 0 ? 0 : 1;
}
