#include <benchmark/benchmark.h>

#include "everlast/everlasting_validation.hpp"
#include "everlast/noise.hpp"
#include "everlast/strategies.hpp"

using namespace everlast;

namespace {

void BM_EmpiricalMean(benchmark::State& state) {
  const auto size = static_cast<std::size_t>(state.range(0));
  const auto n = static_cast<std::size_t>(state.range(1));
  auto d = Domain::integers(size);
  Rng rng{1};
  const auto data = sample_dataset(Distribution::uniform(d), n, rng);
  const Query q("q", d, random_binary_table(size, rng));
  for (auto _ : state) benchmark::DoNotOptimize(empirical_mean(q, data));
}
BENCHMARK(BM_EmpiricalMean)->Args({64, 500})->Args({16384, 500})->Args({64, 100000});

void BM_TruncGauss(benchmark::State& state) {
  const auto p = TruncGaussParams::make(vr_sigma2(0.4, 0.1, 500), 0.1);
  Rng rng{2};
  for (auto _ : state) benchmark::DoNotOptimize(sample_trunc_gauss(p, rng));
}
BENCHMARK(BM_TruncGauss);

void BM_QueryFromBits(benchmark::State& state) {
  auto d = Domain::integers(static_cast<std::size_t>(state.range(0)));
  Rng rng{3};
  const auto words = random_bits(d->size(), rng);
  for (auto _ : state) benchmark::DoNotOptimize(Query::from_bits("p", d, words));
}
BENCHMARK(BM_QueryFromBits)->Arg(64)->Arg(16384);

void BM_EvSubmit(benchmark::State& state) {
  auto dist = std::make_shared<const Distribution>(Distribution::uniform(Domain::integers(64)));
  Rng rng{4};
  const Query q("q", dist->domain(), random_binary_table(64, rng));
  auto ev = std::make_unique<EverlastingValidation>(MechanismConfig{0.4, 0.1}, dist, rng);
  std::uint64_t submitted = 0;
  for (auto _ : state) {
    // stay inside the early rounds so the dataset size does not drift
    if (++submitted % 200 == 0) {
      state.PauseTiming();
      ev = std::make_unique<EverlastingValidation>(MechanismConfig{0.4, 0.1}, dist, rng);
      state.ResumeTiming();
    }
    benchmark::DoNotOptimize(ev->submit(q, rng));
  }
}
BENCHMARK(BM_EvSubmit);

}  // namespace

BENCHMARK_MAIN();
