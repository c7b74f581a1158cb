#include <random>
#include <vector>

#include <benchmark/benchmark.h>

#include <topeig/topeig.hpp>

using namespace topeig;

namespace {

ProfilePair gaussian_pair(int d) {
  const std::vector<double> p = {2.0};
  return make_profile_pair(make_catalog_profile("gaussian_power", p, d, Role::SymbolA),
                           make_catalog_profile("gaussian_power", p, d, Role::WeightV));
}

StateVector random_state(const Grid& g) {
  std::mt19937_64 rng(1);
  std::normal_distribution<double> n;
  std::vector<Complex> v(g.size());
  for (auto& x : v) x = {n(rng), n(rng)};
  return StateVector(g, std::move(v));
}

void BM_Transform1D(benchmark::State& state) {
  const Grid g = build_grid(1, static_cast<int>(state.range(0)), 20.0);
  const StateVector u = random_state(g);
  for (auto _ : state) benchmark::DoNotOptimize(to_frequency(u));
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(g.size()));
}
BENCHMARK(BM_Transform1D)->RangeMultiplier(4)->Range(256, 16384);

void BM_Transform2D(benchmark::State& state) {
  const Grid g = build_grid(2, static_cast<int>(state.range(0)), 10.0);
  const StateVector u = random_state(g);
  for (auto _ : state) benchmark::DoNotOptimize(to_frequency(u));
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(g.size()));
}
BENCHMARK(BM_Transform2D)->Arg(64)->Arg(128)->Arg(256);

void BM_ApplyScaled(benchmark::State& state) {
  const Grid g = build_grid(1, static_cast<int>(state.range(0)), 20.0);
  const LinearOperator b = build_B_scaled(gaussian_pair(1), 0.05, g);
  const StateVector u = random_state(g);
  for (auto _ : state) benchmark::DoNotOptimize(b.apply(u));
}
BENCHMARK(BM_ApplyScaled)->RangeMultiplier(4)->Range(256, 16384);

void BM_LanczosTop(benchmark::State& state) {
  const Grid g = build_grid(1, 1024, 20.0);
  const LinearOperator b = build_B_scaled(gaussian_pair(1), 0.025, g);
  SolveSettings s;
  s.k = static_cast<int>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(top_eigenpairs(b, s));
}
BENCHMARK(BM_LanczosTop)->Arg(1)->Arg(3)->Arg(8)->Unit(benchmark::kMillisecond);

void BM_DenseModel(benchmark::State& state) {
  const Grid g = build_grid(1, static_cast<int>(state.range(0)), 20.0);
  const LinearOperator t = build_T(gaussian_pair(1), g);
  for (auto _ : state) benchmark::DoNotOptimize(dense_eigenpairs(t, 3, false));
}
BENCHMARK(BM_DenseModel)->Arg(256)->Arg(512)->Arg(1024)->Unit(benchmark::kMillisecond);

void BM_ShiftInvertModel2D(benchmark::State& state) {
  const Grid g = build_grid(2, static_cast<int>(state.range(0)), 9.0);
  const LinearOperator t = build_T(gaussian_pair(2), g);
  SolveSettings s;
  s.k = 3;
  s.mode = SolveMode::ShiftInvertBottom;
  for (auto _ : state) benchmark::DoNotOptimize(bottom_eigenpairs_T(t, s));
}
BENCHMARK(BM_ShiftInvertModel2D)->Arg(32)->Arg(48)->Unit(benchmark::kMillisecond);

}  // namespace
BENCHMARK_MAIN();
