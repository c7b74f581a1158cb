#include <cmath>
#include <numbers>
#include <vector>

#include <gtest/gtest.h>

#include <topeig/asymptotics.hpp>
#include <topeig/errors.hpp>
#include <topeig/operators.hpp>

#include "test_support.hpp"

using namespace topeig;
using topeig::test::catalog_pair;
using topeig::test::gaussian_pair;

namespace {

const std::vector<double> kLadder = {0.2, 0.1, 0.05, 0.025};

SweepSettings fixed_settings(int n = 1024, double l = 20.0) {
  SweepSettings s;
  s.grid = build_grid(1, n, l);
  s.top.tol = 1e-12;
  s.model.mode = SolveMode::DenseFull;
  s.model.tol = 1e-12;
  return s;
}

const StudyReport& gaussian_reference() {
  static const StudyReport r = run_sweep(gaussian_pair(), kLadder, 3, fixed_settings());
  return r;
}

StudyReport fabricated(const std::vector<double>& alphas, const std::vector<double>& lambdas, double mu) {
  StudyReport r;
  r.k = 1;
  r.sigma = 1.0;
  r.alphas = alphas;
  r.model_eigenvalues.push_back({1, mu, 0.0});
  const ProfilePair pair = gaussian_pair();
  std::vector<double> gaps;
  for (std::size_t i = 0; i < alphas.size(); ++i) {
    SweepRecord rec;
    rec.alpha = alphas[i];
    rec.n = 1;
    rec.lambda = lambdas[i];
    rec.scaled_gap = scaled_gap(lambdas[i], alphas[i], pair);
    gaps.push_back(rec.scaled_gap);
    r.records.push_back(rec);
  }
  Extrapolation ex;
  try {
    ex = extrapolate_limit(alphas, gaps);
  } catch (const DegenerateFit&) {
    ex.degenerate = true;
  }
  r.extrapolations.push_back(ex);
  return r;
}

}  // namespace

TEST(ScaledGap, Examples) {
  const ProfilePair g = gaussian_pair();
  EXPECT_EQ(scaled_gap(1.0, 0.1, g), 0.0);
  EXPECT_NEAR(scaled_gap(0.9, 0.1, g), 1.0, 1e-14);
  const ProfilePair mixed = catalog_pair("gaussian_power", {4}, "gaussian_power", {2});
  EXPECT_NEAR(mixed.sigma, 4.0 / 3.0, 1e-15);
  EXPECT_NEAR(scaled_gap(0.99, 0.1, mixed), 0.01 * std::pow(10.0, 4.0 / 3.0), 1e-13);
  EXPECT_NEAR(scaled_gap(0.99, 0.1, mixed), 0.2154, 1e-4);
}

TEST(ScaledGap, UsesPairMaxima) {
  const ProfilePair scaled = catalog_pair("gaussian_power", {2, 3.0}, "gaussian_power", {2, 2.0});
  EXPECT_NEAR(scaled_gap(12.0, 0.5, scaled), 0.0, 1e-14);
  EXPECT_NEAR(scaled_gap(11.0, 0.5, scaled), 2.0, 1e-14);
}

TEST(Extrapolate, ExactPowerLaw) {
  const std::vector<double> a = {0.4, 0.2, 0.1, 0.05};
  std::vector<double> g;
  for (double x : a) g.push_back(2.0 + 3.0 * x);
  const Extrapolation e = extrapolate_limit(a, g);
  EXPECT_NEAR(e.limit, 2.0, 1e-10);
  EXPECT_NEAR(e.rate, 1.0, 1e-8);
  EXPECT_LE(e.fit_residual, 1e-10);
  EXPECT_FALSE(e.degenerate);

  g.clear();
  for (double x : a) g.push_back(5.0 - 2.0 * std::sqrt(x));
  const Extrapolation s = extrapolate_limit(a, g);
  EXPECT_NEAR(s.limit, 5.0, 1e-9);
  EXPECT_NEAR(s.rate, 0.5, 1e-8);
}

TEST(Extrapolate, RejectsDegenerateData) {
  const std::vector<double> a = {0.4, 0.2, 0.1, 0.05};
  EXPECT_THROW(extrapolate_limit(a, std::vector<double>{1.0, 1.2, 1.1, 1.3}), DegenerateFit);
  EXPECT_THROW(extrapolate_limit(std::vector<double>{0.2, 0.1}, std::vector<double>{1.0, 1.1}), DegenerateFit);
  const Extrapolation c = extrapolate_limit(a, std::vector<double>{1.5, 1.5, 1.5, 1.5});
  EXPECT_NEAR(c.limit, 1.5, 1e-14);
}

TEST(Sweep, GaussianLadderMatchesFrozenReference) {
  // Reference gaps from an independent dense diagonalization of the scaled operator.
  const double frozen[3][4] = {
      {1.2180611397, 1.3147086240, 1.3642759066, 1.3892213700},
      {2.8362678291, 3.4483124387, 3.8199885495, 4.0245946016},
      {3.7620802239, 5.0577812484, 5.9521009634, 6.4800908062},
  };
  const StudyReport& r = gaussian_reference();
  ASSERT_EQ(r.records.size(), 12u);
  EXPECT_EQ(r.grid.id(), "d1-N1024-L20");
  for (const auto& rec : r.records) {
    std::size_t ai = 0;
    while (kLadder[ai] != rec.alpha) ++ai;
    EXPECT_NEAR(rec.scaled_gap, frozen[rec.n - 1][ai], 2e-10) << rec.alpha << " " << rec.n;
    EXPECT_TRUE(rec.converged);
    EXPECT_LE(rec.localization.identity_residual, 1e-10);
  }
  for (int n = 1; n <= 3; ++n) EXPECT_NEAR(r.model_eigenvalues[n - 1].mu, std::numbers::sqrt2 * (2 * n - 1), 1e-9);
}

TEST(Sweep, GapsOrderedAndBelowModel) {
  const StudyReport& r = gaussian_reference();
  for (std::size_t a = 0; a < kLadder.size(); ++a) {
    for (int n = 1; n < 3; ++n)
      EXPECT_LT(r.records[a * 3 + n - 1].scaled_gap, r.records[a * 3 + n].scaled_gap);
    for (int n = 1; n <= 3; ++n) {
      const auto& rec = r.records[a * 3 + n - 1];
      EXPECT_EQ(rec.n, n);
      EXPECT_EQ(rec.alpha, kLadder[a]);
      EXPECT_GT(rec.scaled_gap, 0.0);
      EXPECT_LE(rec.scaled_gap, r.model_eigenvalues[n - 1].mu);
    }
  }
}

TEST(Sweep, ConvergesTowardModelAlongLadder) {
  const StudyReport& r = gaussian_reference();
  for (int n = 1; n <= 3; ++n) {
    double prev = std::numeric_limits<double>::infinity();
    for (std::size_t a = 0; a < kLadder.size(); ++a) {
      const double err = std::abs(r.records[a * 3 + n - 1].scaled_gap - r.model_eigenvalues[n - 1].mu);
      EXPECT_LT(err, prev);
      prev = err;
    }
  }
}

TEST(Sweep, LocalizationMassesShrinkWithRadius) {
  SweepSettings s = fixed_settings();
  s.radii = {8.0, 2.0, 4.0};
  const StudyReport r = run_sweep(gaussian_pair(), kLadder, 1, s);
  const StudyReport& ref = gaussian_reference();
  for (std::size_t a = 0; a < kLadder.size(); ++a) {
    const auto& m = r.records[a].localization;
    EXPECT_EQ(m.radii, (std::vector<double>{2.0, 4.0, 8.0}));
    EXPECT_EQ(r.records[a].scaled_gap, ref.records[a * 3].scaled_gap);
    for (std::size_t i = 1; i < 3; ++i) {
      EXPECT_LE(m.position_mass_outside[i], m.position_mass_outside[i - 1]);
      EXPECT_LE(m.frequency_mass_outside[i], m.frequency_mass_outside[i - 1]);
    }
    EXPECT_LT(m.position_mass_outside[0], 0.01);
    EXPECT_LT(m.frequency_mass_outside[0], 0.05);
    EXPECT_GE(m.position_mass_outside[0], 0.0);
  }
}

TEST(Sweep, IndependentOfGridAndThreads) {
  SweepSettings coarse;
  coarse.top.tol = 1e-12;
  const StudyReport a = run_sweep(gaussian_pair(), kLadder, 1, coarse);
  EXPECT_EQ(a.grid.id(), suggest_grid(gaussian_pair(), 1).grid.id());
  SweepSettings fine = fixed_settings(2048, 24.0);
  const StudyReport b = run_sweep(gaussian_pair(), kLadder, 1, fine);
  for (std::size_t i = 0; i < a.records.size(); ++i)
    EXPECT_NEAR(a.records[i].scaled_gap, b.records[i].scaled_gap, 1e-6 * b.records[i].scaled_gap);

  coarse.threads = 2;
  const StudyReport c = run_sweep(gaussian_pair(), kLadder, 1, coarse);
  for (std::size_t i = 0; i < a.records.size(); ++i) {
    EXPECT_EQ(a.records[i].scaled_gap, c.records[i].scaled_gap);
    EXPECT_EQ(a.records[i].residual, c.records[i].residual);
  }
}

TEST(Sweep, RejectsBadInput) {
  const ProfilePair constant_symbol =
      make_profile_pair(make_constant_profile(1.0, 1, Role::SymbolA),
                        make_catalog_profile("gaussian_power", std::vector<double>{2}, 1, Role::WeightV));
  EXPECT_THROW(run_sweep(constant_symbol, kLadder, 1, fixed_settings(128, 10.0)), InvalidArgument);
  EXPECT_THROW(run_sweep(gaussian_pair(), std::vector<double>{0.2, 0.1}, 1, fixed_settings(128, 10.0)),
               InvalidArgument);
  EXPECT_THROW(run_sweep(gaussian_pair(), std::vector<double>{0.1, 0.2, 0.05}, 1, fixed_settings(128, 10.0)),
               InvalidArgument);
  EXPECT_THROW(run_sweep(gaussian_pair(), kLadder, 0, fixed_settings(128, 10.0)), InvalidArgument);
  const ProfilePair shifted = make_profile_pair(
      make_expression_profile("exp(-(x1-1)^2)", "x1^2", 1.0, 2.0, 1, Role::SymbolA),
      make_catalog_profile("gaussian_power", std::vector<double>{2}, 1, Role::WeightV));
  try {
    run_sweep(shifted, kLadder, 1, fixed_settings(128, 10.0));
    FAIL() << "shifted maximum accepted";
  } catch (const InvalidArgument& e) {
    EXPECT_NE(std::string(e.what()).find("global_max"), std::string::npos) << e.what();
  }
}

TEST(Sweep, RationalAndGaussianSymbolsShareTheLimit) {
  const ProfilePair rational = catalog_pair("rational_power", {2}, "gaussian_power", {2});
  const StudyReport r = run_sweep(rational, kLadder, 1, fixed_settings());
  const StudyReport& g = gaussian_reference();
  EXPECT_NEAR(r.model_eigenvalues[0].mu, g.model_eigenvalues[0].mu, 1e-10);
  const double mu = g.model_eigenvalues[0].mu;
  double prev = std::numeric_limits<double>::infinity();
  for (std::size_t a = 0; a < kLadder.size(); ++a) {
    const double diff = std::abs(r.records[a].scaled_gap - g.records[a * 3].scaled_gap);
    EXPECT_LT(diff, prev);
    prev = diff;
  }
  EXPECT_LT(prev, 0.03 * mu);
}

TEST(Localization, UnitWeightHasNoPositionForm) {
  const Grid grid = build_grid(1, 256, 12.0);
  const ProfilePair pair =
      make_profile_pair(make_catalog_profile("gaussian_power", std::vector<double>{2}, 1, Role::SymbolA),
                        make_constant_profile(1.0, 1, Role::WeightV));
  SolveSettings s;
  s.k = 1;
  const auto p = top_eigenpairs(build_B_scaled(pair, 0.1, grid), s);
  const std::vector<double> radii = {1.0, 2.0};
  const LocalizationMetrics m = localization_metrics(pair, 0.1, p[0], radii);
  EXPECT_EQ(m.s_form, 0.0);
  EXPECT_TRUE(m.c_hat_frequency.empty() || m.c_hat_frequency.size() == 2);
}

TEST(Verify, GaussianVerdicts) {
  StudyReport r = gaussian_reference();
  const auto v = verify_theorem(r, Tolerances{});
  ASSERT_EQ(v.size(), 3u);
  EXPECT_EQ(v[0].status, VerdictStatus::Pass);
  EXPECT_TRUE(v[0].monotone_ok);
  EXPECT_TRUE(v[0].upper_bound_ok);
  EXPECT_NEAR(v[0].final_rel_error, 0.0177, 1e-3);
  EXPECT_EQ(r.verdicts.size(), 3u);
  StudyReport tight = gaussian_reference();
  const auto t = verify_theorem(tight, Tolerances{1e-6, 1e-6, false});
  EXPECT_EQ(t[0].status, VerdictStatus::Fail);
  EXPECT_FALSE(t[0].reasons.empty());
}

TEST(Verify, NegativeGapFails) {
  StudyReport r = fabricated({0.2, 0.1, 0.05}, {0.8, 0.9, 1.0001}, std::numbers::sqrt2);
  const auto v = verify_theorem(r, Tolerances{});
  ASSERT_EQ(v.size(), 1u);
  EXPECT_EQ(v[0].status, VerdictStatus::Fail);
  ASSERT_FALSE(v[0].reasons.empty());
  EXPECT_EQ(v[0].reasons.back(), "negative scaled gap");
}

TEST(Verify, ShortLadderIsInconclusive) {
  StudyReport r = fabricated({0.2, 0.1}, {0.8, 0.9}, std::numbers::sqrt2);
  const auto v = verify_theorem(r, Tolerances{});
  EXPECT_EQ(v[0].status, VerdictStatus::Inconclusive);
  EXPECT_EQ(v[0].reasons.back(), "inconclusive: insufficient ladder");
}

TEST(Verify, NonMonotoneLadderDependsOnStrictness) {
  // Errors 0.01, 0.02, 0.005 relative to mu = 1: good end points, non-monotone middle.
  const std::vector<double> alphas = {0.2, 0.1, 0.05};
  const std::vector<double> gaps = {0.99, 0.98, 0.995};
  std::vector<double> lambdas;
  for (std::size_t i = 0; i < 3; ++i) lambdas.push_back(1.0 - alphas[i] * gaps[i]);
  StudyReport lax = fabricated(alphas, lambdas, 1.0);
  EXPECT_EQ(verify_theorem(lax, Tolerances{})[0].status, VerdictStatus::Inconclusive);
  StudyReport strict = fabricated(alphas, lambdas, 1.0);
  const auto v = verify_theorem(strict, Tolerances{0.05, 0.02, true});
  EXPECT_EQ(v[0].status, VerdictStatus::Fail);
  EXPECT_FALSE(v[0].monotone_ok);
}

TEST(Verify, StatusStrings) {
  EXPECT_EQ(to_string(VerdictStatus::Pass), "PASS");
  EXPECT_EQ(to_string(VerdictStatus::Fail), "FAIL");
  EXPECT_EQ(to_string(VerdictStatus::Inconclusive), "INCONCLUSIVE");
}

TEST(ModelSpectrum, AutomaticModeMatchesDense) {
  const Grid g = build_grid(1, 256, 14.0);
  SolveSettings s;
  s.k = 3;
  const auto a = model_spectrum(gaussian_pair(), g, s);
  s.mode = SolveMode::DenseFull;
  const auto d = model_spectrum(gaussian_pair(), g, s);
  for (int i = 0; i < 3; ++i) EXPECT_NEAR(a[i].value, d[i].value, 1e-12 * d[i].value);
}

TEST(ModelSpectrum, RescaledPairScalesMu) {
  // T for A0 = 2, V0 = 3 is the normalized T times A0 V0^2 = 18 after rescaling.
  const ProfilePair pair = catalog_pair("gaussian_power", {2, 2.0}, "gaussian_power", {2, 3.0});
  const StudyReport r = run_sweep(pair, kLadder, 1, fixed_settings(256, 14.0));
  EXPECT_NEAR(r.rescale, 18.0, 1e-14);
  EXPECT_NEAR(r.model_eigenvalues[0].mu, 18.0 * std::numbers::sqrt2, 1e-8);
}
