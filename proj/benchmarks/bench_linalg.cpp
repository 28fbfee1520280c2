#include <benchmark/benchmark.h>

#include "incompat/linalg.hpp"
#include "incompat/random.hpp"

namespace {

using namespace incompat;

void BM_HermitianEig(benchmark::State& state) {
  const auto d = static_cast<std::size_t>(state.range(0));
  Rng rng(1);
  const CMatrix m = random_hermitian(d, rng);
  for (auto _ : state) benchmark::DoNotOptimize(hermitian_eig(m));
}
BENCHMARK(BM_HermitianEig)->Arg(4)->Arg(8)->Arg(16)->Arg(27);

// Warm start from the eigenvectors of a nearby matrix, as in the solver loop.
void BM_HermitianEigWarm(benchmark::State& state) {
  const auto d = static_cast<std::size_t>(state.range(0));
  Rng rng(2);
  const CMatrix m = random_hermitian(d, rng);
  const CMatrix start = hermitian_eig(m + 1e-3 * random_hermitian(d, rng)).vectors;
  for (auto _ : state) benchmark::DoNotOptimize(hermitian_eig_from(m, start));
}
BENCHMARK(BM_HermitianEigWarm)->Arg(8)->Arg(16);

void BM_PsdProject(benchmark::State& state) {
  const auto d = static_cast<std::size_t>(state.range(0));
  Rng rng(3);
  const CMatrix m = random_hermitian(d, rng);
  for (auto _ : state) benchmark::DoNotOptimize(psd_project(m));
}
BENCHMARK(BM_PsdProject)->Arg(4)->Arg(9)->Arg(16);

void BM_PartialTrace(benchmark::State& state) {
  const auto d = static_cast<std::size_t>(state.range(0));
  Rng rng(4);
  const CMatrix m = random_hermitian(d * d * d, rng);
  for (auto _ : state) benchmark::DoNotOptimize(partial_trace(m, {d, d, d}, {0, 1}));
}
BENCHMARK(BM_PartialTrace)->Arg(2)->Arg(3)->Arg(4);

}  // namespace
