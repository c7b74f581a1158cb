#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>
#include <vector>

#include <gtest/gtest.h>

#include <topeig/eigensolve.hpp>
#include <topeig/errors.hpp>
#include <topeig/operators.hpp>

#include "test_support.hpp"

using namespace topeig;
using topeig::test::gaussian_pair;
using topeig::test::random_state;

namespace {

LinearOperator random_multiplier_potential(const Grid& g, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(-0.5, 0.5);
  std::vector<double> sym(g.size()), pot(g.size());
  for (auto& x : sym) x = u(rng);
  for (auto& x : pot) x = u(rng);
  return make_multiplier_potential(g, sym, pot, "random");
}

SolveSettings settings(int k, SolveMode mode = SolveMode::LanczosTop, double tol = 1e-10) {
  SolveSettings s;
  s.k = k;
  s.mode = mode;
  s.tol = tol;
  return s;
}

}  // namespace

TEST(Eigensolve, ModeStrings) {
  for (SolveMode m : {SolveMode::LanczosTop, SolveMode::DenseFull, SolveMode::ShiftInvertBottom})
    EXPECT_EQ(solve_mode_from_string(to_string(m)), m);
  EXPECT_THROW(solve_mode_from_string("arnoldi"), InvalidArgument);
}

TEST(Eigensolve, PureMultiplierTopIsMaxSample) {
  const Grid g = build_grid(1, 64, 5.0);
  std::vector<double> sym(64);
  for (int m = 0; m < 64; ++m) sym[static_cast<std::size_t>(m)] = std::exp(-g.frequency(m) * g.frequency(m));
  const LinearOperator op = make_sandwich(g, {}, sym, "mult");
  const auto p = top_eigenpairs(op, settings(1));
  EXPECT_NEAR(p[0].value, *std::max_element(sym.begin(), sym.end()), 1e-12);
  EXPECT_NEAR(p[0].value, 1.0, 1e-12);
}

TEST(Eigensolve, ZeroOperator) {
  const Grid g = build_grid(1, 32, 4.0);
  const LinearOperator op = make_sandwich(g, std::vector<double>(32, 0.0), std::vector<double>(32, 1.0), "zero");
  const auto p = top_eigenpairs(op, settings(2));
  ASSERT_EQ(p.size(), 2u);
  for (const auto& e : p) {
    EXPECT_NEAR(e.value, 0.0, 1e-14);
    EXPECT_TRUE(certify(op, std::span<const EigenPair>(&e, 1), 1e-10).passed);
  }
}

TEST(Eigensolve, ScaledOperatorBracket) {
  const Grid g = build_grid(1, 256, 14.0);
  for (double alpha : {0.2, 0.05}) {
    const auto p = top_eigenpairs(build_B_scaled(gaussian_pair(), alpha, g), settings(3));
    for (std::size_t i = 0; i < p.size(); ++i) {
      EXPECT_LT(p[i].value, 1.0);
      EXPECT_GT(p[i].value, -1.0);
      if (i > 0) EXPECT_LE(p[i].value, p[i - 1].value);
    }
  }
}

TEST(Eigensolve, HarmonicOscillatorBottom) {
  const Grid g = build_grid(1, 512, 16.0);
  const LinearOperator t = build_T(gaussian_pair(), g);
  const double w = std::numbers::sqrt2;
  for (SolveMode mode : {SolveMode::DenseFull, SolveMode::ShiftInvertBottom}) {
    const auto p = bottom_eigenpairs_T(t, settings(4, mode));
    ASSERT_EQ(p.size(), 4u);
    for (int n = 0; n < 4; ++n) EXPECT_NEAR(p[static_cast<std::size_t>(n)].value, w * (2 * n + 1), 1e-8) << to_string(mode);
    EXPECT_TRUE(certify(t, p, 1e-10).passed) << to_string(mode);
  }
}

TEST(Eigensolve, QuarticSymbolTwoResolution) {
  // Ground state of |xi|^4 + 2 x^2; reference from a Hermite-basis diagonalization.
  const ProfilePair pair = topeig::test::catalog_pair("gaussian_power", {4}, "gaussian_power", {2});
  const double reference = 1.6832198979017911;
  double coarse = 0.0;
  for (int n : {256, 512}) {
    const auto p = bottom_eigenpairs_T(build_T(pair, build_grid(1, n, 10.0)), settings(1, SolveMode::DenseFull));
    EXPECT_NEAR(p[0].value, reference, 1e-9) << n;
    if (n == 256) coarse = p[0].value;
    else EXPECT_NEAR(p[0].value, coarse, 1e-10);
  }
}

TEST(Eigensolve, TwoDimensionalMultiplicities) {
  const Grid g = build_grid(2, 32, 7.0);
  const LinearOperator t = build_T(gaussian_pair(2), g);
  const double w = std::numbers::sqrt2;
  const std::vector<double> expect = {2 * w, 4 * w, 4 * w, 6 * w, 6 * w, 6 * w};
  for (SolveMode mode : {SolveMode::DenseFull, SolveMode::ShiftInvertBottom}) {
    const auto p = bottom_eigenpairs_T(t, settings(6, mode));
    for (std::size_t i = 0; i < 6; ++i) EXPECT_NEAR(p[i].value, expect[i], 1e-7) << to_string(mode) << " " << i;
    const auto clusters = eigenvalue_clusters(p, 1e-6);
    ASSERT_EQ(clusters.size(), 3u) << to_string(mode);
    EXPECT_EQ(clusters[0].size(), 1u);
    EXPECT_EQ(clusters[1].size(), 2u);
    EXPECT_EQ(clusters[2].size(), 3u);
    EXPECT_TRUE(certify(t, p, 1e-10).passed);
  }
}

TEST(Eigensolve, LanczosMatchesDenseOnRandomOperators) {
  const Grid g = build_grid(1, 96, 5.0);
  const double tol = 1e-10;
  for (std::uint64_t seed : {1u, 2u, 3u}) {
    const LinearOperator op = random_multiplier_potential(g, seed);
    const auto lz = top_eigenpairs(op, settings(5, SolveMode::LanczosTop, tol));
    const auto dn = top_eigenpairs(op, settings(5, SolveMode::DenseFull, tol));
    const double scale = op.residual_scale();
    for (std::size_t i = 0; i < 5; ++i) {
      EXPECT_NEAR(lz[i].value, dn[i].value, 10 * tol * scale) << seed << " " << i;
      EXPECT_LE(lz[i].residual, tol * scale);
    }
    EXPECT_TRUE(certify(op, lz, tol).passed);
  }
}

TEST(Eigensolve, DeterministicForFixedSeed) {
  const Grid g = build_grid(1, 128, 10.0);
  const LinearOperator op = build_B_scaled(gaussian_pair(), 0.1, g);
  const auto a = top_eigenpairs(op, settings(3));
  const auto b = top_eigenpairs(op, settings(3));
  for (std::size_t i = 0; i < 3; ++i) {
    EXPECT_EQ(a[i].value, b[i].value);
    for (std::size_t j = 0; j < g.size(); ++j) EXPECT_EQ(a[i].vector[j], b[i].vector[j]);
  }
}

TEST(Eigensolve, TopKIsPrefixOfTopKPlusOne) {
  const Grid g = build_grid(1, 128, 10.0);
  const LinearOperator op = build_B_scaled(topeig::test::catalog_pair("rational_power", {2}, "gaussian_power", {2}), 0.1, g);
  const auto k3 = top_eigenpairs(op, settings(3));
  const auto k4 = top_eigenpairs(op, settings(4));
  for (std::size_t i = 0; i < 3; ++i) EXPECT_NEAR(k3[i].value, k4[i].value, 1e-9);
  EXPECT_LE(k4[3].value, k4[2].value);
}

TEST(Eigensolve, InvalidRequests) {
  const Grid g = build_grid(1, 16, 2.0);
  const LinearOperator op = build_B_scaled(gaussian_pair(), 0.1, g);
  EXPECT_THROW(top_eigenpairs(op, settings(0)), InvalidArgument);
  EXPECT_THROW(top_eigenpairs(op, settings(9)), InvalidArgument);
  EXPECT_THROW(top_eigenpairs(op, settings(1, SolveMode::LanczosTop, 0.0)), InvalidArgument);
  EXPECT_THROW(top_eigenpairs(op, settings(1, SolveMode::ShiftInvertBottom)), InvalidArgument);
  EXPECT_THROW(bottom_eigenpairs_T(op, settings(1, SolveMode::LanczosTop)), InvalidArgument);
  EXPECT_THROW(dense_eigenpairs(build_B_scaled(gaussian_pair(2), 0.1, build_grid(2, 72, 2.0)), 1, true),
               InvalidArgument);
}

TEST(Eigensolve, IterationCapRaisesNoConvergence) {
  const Grid g = build_grid(1, 512, 16.0);
  SolveSettings s = settings(4, SolveMode::LanczosTop, 1e-14);
  s.max_iterations = 1;
  s.krylov_dim = 10;
  EXPECT_THROW(top_eigenpairs(build_B_scaled(gaussian_pair(), 0.01, g), s), NoConvergence);
}

TEST(Eigensolve, InnerSolveStall) {
  const Grid g = build_grid(1, 256, 12.0);
  const LinearOperator t = build_T(gaussian_pair(), g);
  EXPECT_THROW(solve_shifted(t, 1.0, random_state(g, 4), 1e-14, 2), InnerSolveStall);
  const StateVector b = random_state(g, 5);
  const StateVector x = solve_shifted(t, 1.0, b, 1e-12, 5000);
  StateVector r = t.apply(x);
  r += x;
  r -= b;
  EXPECT_LE(norm(r), 1e-10 * norm(b));
}

TEST(Certify, DetectsBadPairs) {
  const Grid g = build_grid(1, 64, 6.0);
  const LinearOperator op = build_B_scaled(gaussian_pair(), 0.1, g);
  auto p = top_eigenpairs(op, settings(2));
  EXPECT_TRUE(certify(op, p, 1e-10).passed);
  auto wrong_value = p;
  wrong_value[0].value += 1e-3;
  EXPECT_FALSE(certify(op, wrong_value, 1e-10).passed);
  auto unnormalized = p;
  unnormalized[1].vector *= Complex(2.0);
  EXPECT_FALSE(certify(op, unnormalized, 1e-10).passed);
  auto duplicate = p;
  duplicate[1] = duplicate[0];
  const CertReport rep = certify(op, duplicate, 1e-10);
  EXPECT_FALSE(rep.passed);
  EXPECT_GT(rep.max_gram_deviation, 0.5);
}

TEST(Clusters, GroupsCloseValues) {
  std::vector<EigenPair> p(5);
  const double v[] = {3.0, 3.0 + 1e-9, 2.0, 1.0, 1.0 - 5e-10};
  for (int i = 0; i < 5; ++i) p[static_cast<std::size_t>(i)].value = v[i];
  const auto c = eigenvalue_clusters(p, 1e-7);
  ASSERT_EQ(c.size(), 3u);
  EXPECT_EQ(c[0], (std::vector<std::size_t>{0, 1}));
  EXPECT_EQ(c[1], (std::vector<std::size_t>{2}));
  EXPECT_EQ(c[2], (std::vector<std::size_t>{3, 4}));
}
