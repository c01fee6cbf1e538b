#include <benchmark/benchmark.h>

#include "cfv/cannings.hpp"
#include "cfv/limits.hpp"
#include "cfv/replicate.hpp"

namespace {

cfv::Exec exec_of(const benchmark::State& st) { return st.range(0) ? cfv::Exec::parallel : cfv::Exec::serial; }

void bm_generator_estimate(benchmark::State& st) {
  auto law = cfv::ReproductionLaw::moran();
  auto phi = cfv::TestFunction::pair_exp();
  auto chi = cfv::TreeState::point_mass();
  for (auto _ : st)
    benchmark::DoNotOptimize(cfv::one_step_generator_estimate(law, 128, chi, phi, 20000, 3, exec_of(st)).mean);
}
BENCHMARK(bm_generator_estimate)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond)->UseRealTime();

void bm_external_branch(benchmark::State& st) {
  auto law = cfv::ReproductionLaw::example5();
  for (auto _ : st) {
    auto v = cfv::replicate(2000, 5, exec_of(st), [&](cfv::Rng& rng) { return cfv::backward_external_branch(law, 4096, 1.0, rng); });
    benchmark::DoNotOptimize(v.data());
  }
}
BENCHMARK(bm_external_branch)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond)->UseRealTime();

void bm_pair_distances(benchmark::State& st) {
  auto law = cfv::ReproductionLaw::moran();
  auto chi = cfv::TreeState::point_mass();
  double cN = cfv::pairwise_coalescence_probability(law, 512);
  std::int64_t k = cfv::generation_of(1.0, cN);
  for (auto _ : st) {
    auto v = cfv::replicate(10000, 7, exec_of(st), [&](cfv::Rng& rng) {
      return cfv::backward_sample_distances(law, 512, 2, k, chi, rng)(0, 1);
    });
    benchmark::DoNotOptimize(v.data());
  }
}
BENCHMARK(bm_pair_distances)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond)->UseRealTime();

void bm_coalescent_sampler(benchmark::State& st) {
  auto xi = cfv::LimitMeasure::point(cfv::MassPartition({0.5}));
  for (auto _ : st) {
    auto v = cfv::replicate(20000, 9, exec_of(st), [&](cfv::Rng& rng) {
      return cfv::sample_coalescent_tree(xi, 6, 1.0, nullptr, rng).rho(0, 1);
    });
    benchmark::DoNotOptimize(v.data());
  }
}
BENCHMARK(bm_coalescent_sampler)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond)->UseRealTime();

}  // namespace

BENCHMARK_MAIN();
