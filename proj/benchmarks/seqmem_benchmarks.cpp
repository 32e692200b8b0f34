#include <benchmark/benchmark.h>

#include "seqmem/bounds.hpp"
#include "seqmem/experiments.hpp"
#include "seqmem/multi_pass.hpp"
#include "seqmem/single_pass.hpp"

namespace {

using namespace seqmem;

FiringMatrix bench_matrix(std::size_t l, std::size_t n, std::uint64_t seed) {
  Xoshiro256StarStar rng(seed);
  return sample_bernoulli_matrix(l, n, 0.5, rng);
}

void BM_TrainSinglePass(benchmark::State& state) {
  const auto l = static_cast<std::size_t>(state.range(0));
  const FiringMatrix m = bench_matrix(l, 64, 1);
  for (auto _ : state) {
    benchmark::DoNotOptimize(train_single_pass(m, 0.5, 0.125));
  }
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(l) * 64);
}
BENCHMARK(BM_TrainSinglePass)->Arg(64)->Arg(256)->Arg(1024);

void BM_VerifyGram(benchmark::State& state) {
  const auto l = static_cast<std::size_t>(state.range(0));
  const FiringMatrix m = bench_matrix(l, 8, 2);
  for (auto _ : state) {
    benchmark::DoNotOptimize(verify_single_pass_gram(m, 0.5, 0.125));
  }
}
BENCHMARK(BM_VerifyGram)->Arg(256)->Arg(1024)->Arg(10000);

void BM_VerifyPerNeuron(benchmark::State& state) {
  const auto l = static_cast<std::size_t>(state.range(0));
  const FiringMatrix m = bench_matrix(l, 8, 2);
  const SinglePassNetwork net = train_single_pass(m, 0.5, 0.125);
  for (auto _ : state) {
    benchmark::DoNotOptimize(verify_memorization(net, m));
  }
}
BENCHMARK(BM_VerifyPerNeuron)->Arg(256)->Arg(1024);

void BM_TheoremBound(benchmark::State& state) {
  for (auto _ : state) {
    benchmark::DoNotOptimize(theorem_bound({34002, 10, 0.5, 0.125}));
  }
}
BENCHMARK(BM_TheoremBound);

void BM_MinLForTarget(benchmark::State& state) {
  for (auto _ : state) {
    benchmark::DoNotOptimize(min_L_for_target(10000, 0.5, 0.125, 1e-12));
  }
}
BENCHMARK(BM_MinLForTarget);

void BM_KaczmarzEpochs(benchmark::State& state) {
  const auto size = static_cast<std::size_t>(state.range(0));
  const FiringMatrix m = bench_matrix(size, size, 3);
  TrainConfig config;
  config.max_updates = size * 10;
  config.tolerance = 1e-30;
  config.seed = 7;
  for (auto _ : state) {
    benchmark::DoNotOptimize(sgd_train(m, config));
  }
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(size) *
                          static_cast<std::int64_t>(size) * 10);
}
BENCHMARK(BM_KaczmarzEpochs)->Arg(32)->Arg(64);

void BM_ExactRank(benchmark::State& state) {
  const auto size = static_cast<std::size_t>(state.range(0));
  const ShiftedSystem system = build_shifted_system(bench_matrix(size, size, 4));
  for (auto _ : state) {
    benchmark::DoNotOptimize(rank_is_full(system));
  }
}
BENCHMARK(BM_ExactRank)->Arg(32)->Arg(64)->Arg(128);

void BM_ExactBinomialCdf(benchmark::State& state) {
  for (auto _ : state) {
    benchmark::DoNotOptimize(exact_binomial_cdf(10000, 0.5, 4900));
  }
}
BENCHMARK(BM_ExactBinomialCdf);

}  // namespace

BENCHMARK_MAIN();
