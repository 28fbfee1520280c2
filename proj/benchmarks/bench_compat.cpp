#include <benchmark/benchmark.h>

#include "incompat/compat.hpp"
#include "incompat/covariance.hpp"
#include "incompat/theorems.hpp"

namespace {

using namespace incompat;

void BM_JmWeylAtClosedForm(benchmark::State& state) {
  const auto d = static_cast<std::size_t>(state.range(0));
  const ObsPair p = mix(weyl_pair(d), weyl_optimal_noise(d), weyl_closed_form(d));
  for (auto _ : state) benchmark::DoNotOptimize(jm_feasible(p.first, p.second));
}
BENCHMARK(BM_JmWeylAtClosedForm)->Arg(2)->Arg(3)->Arg(4)->Unit(benchmark::kMillisecond);

void BM_JmSharpWeylPair(benchmark::State& state) {
  const auto d = static_cast<std::size_t>(state.range(0));
  const ObsPair p = weyl_pair(d);
  for (auto _ : state) benchmark::DoNotOptimize(jm_feasible(p.first, p.second));
}
BENCHMARK(BM_JmSharpWeylPair)->Arg(2)->Arg(3)->Unit(benchmark::kMillisecond);

void BM_ChannelSelfCompat(benchmark::State& state) {
  const auto d = static_cast<std::size_t>(state.range(0));
  const ChannelChoi e = depolarizing_mixture(d / (2.0 * (d + 1.0)), d);
  for (auto _ : state) benchmark::DoNotOptimize(channel_compat_feasible(e, e));
}
BENCHMARK(BM_ChannelSelfCompat)->Arg(2)->Arg(3)->Unit(benchmark::kMillisecond);

void BM_ObsChannel(benchmark::State& state) {
  const auto d = static_cast<std::size_t>(state.range(0));
  const ObsChannelPair p = vn_optimal_pair(d);
  for (auto _ : state) benchmark::DoNotOptimize(obs_channel_feasible(p.first, p.second));
}
BENCHMARK(BM_ObsChannel)->Arg(2)->Arg(3)->Unit(benchmark::kMillisecond);

}  // namespace
