#include <chaos/assembly.hpp>
#include <chaos/market_data.hpp>
#include <chaos/sde.hpp>
#include <chaos/wavelet.hpp>

#include <benchmark/benchmark.h>

#include <random>

using namespace chaos;

namespace {

std::vector<double> gaussian(std::size_t n, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> nd;
  std::vector<double> x(n);
  for (auto& v : x) v = nd(rng);
  return x;
}

void BM_Decompose(benchmark::State& state, const char* family_name) {
  const auto family = wavelet::WaveletFamily::from_name(family_name);
  const auto x = gaussian(static_cast<std::size_t>(state.range(0)), 1);
  for (auto _ : state) benchmark::DoNotOptimize(wavelet::decompose(x, 6, family));
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK_CAPTURE(BM_Decompose, haar, "haar")->RangeMultiplier(4)->Range(256, 65536);
BENCHMARK_CAPTURE(BM_Decompose, db4, "db4")->RangeMultiplier(4)->Range(256, 65536);

void BM_EstimateFG(benchmark::State& state) {
  market::SyntheticSpec spec{market::SyntheticKind::ornstein_uhlenbeck,
                             {{"theta", 1.0}, {"sigma", 0.5}, {"dt", 0.01}},
                             static_cast<std::size_t>(state.range(0)), 3};
  const auto pairs = wavelet::increments(market::generate(spec).closes());
  for (auto _ : state) benchmark::DoNotOptimize(sde::estimate_fg(pairs, 0.01, 12, 3));
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_EstimateFG)->RangeMultiplier(8)->Range(256, 1 << 20);

void BM_StationaryDensity(benchmark::State& state) {
  market::SyntheticSpec spec{market::SyntheticKind::ornstein_uhlenbeck,
                             {{"theta", 1.0}, {"sigma", 0.5}, {"dt", 0.01}}, 4096, 3};
  const auto fit = sde::estimate_fg(wavelet::increments(market::generate(spec).closes()), 0.01, 12, 3);
  for (auto _ : state) benchmark::DoNotOptimize(sde::stationary_density(fit, static_cast<int>(state.range(0))));
}
BENCHMARK(BM_StationaryDensity)->Arg(128)->Arg(512)->Arg(2048);

void BM_KsTwoSample(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  const auto a = gaussian(n, 1), b = gaussian(n, 2);
  for (auto _ : state) benchmark::DoNotOptimize(sde::ks_two_sample(a, b, 0.05));
}
BENCHMARK(BM_KsTwoSample)->RangeMultiplier(4)->Range(64, 16384);

void BM_OptimizeWeights(benchmark::State& state) {
  const auto m = static_cast<std::size_t>(state.range(0));
  std::mt19937_64 rng(9);
  std::uniform_int_distribution<int> action(-1, 1);
  assembly::SignalHistory h(m);
  std::vector<int> realized, row(m);
  for (int t = 0; t < 96; ++t) {
    for (auto& a : row) a = action(rng);
    h.push(row);
    realized.push_back(action(rng));
  }
  for (auto _ : state) benchmark::DoNotOptimize(assembly::optimize_weights(h, realized));
}
BENCHMARK(BM_OptimizeWeights)->DenseRange(2, 8, 2)->Arg(12)->Unit(benchmark::kMicrosecond);

}  // namespace

BENCHMARK_MAIN();
