#include <benchmark/benchmark.h>

#include <vector>

#include "abep/absorption.hpp"
#include "abep/errors.hpp"
#include "abep/generators.hpp"
#include "abep/model.hpp"
#include "abep/moments.hpp"
#include "abep/rng.hpp"
#include "abep/sde.hpp"
#include "abep/sip.hpp"

namespace {

abep::SystemParams params(int n) {
  abep::SystemParams p;
  p.n_sites = n;
  p.sigma = 0.1;
  p.alpha = 1.0;
  p.t_left = 0.5;
  p.t_right = 1.0;
  return p;
}

void BM_MapRoundTrip(benchmark::State& state) {
  const auto p = params(static_cast<int>(state.range(0)));
  std::vector<double> x(static_cast<std::size_t>(p.n_sites), 0.3);
  for (auto _ : state) {
    auto z = abep::map_g(x, p);
    benchmark::DoNotOptimize(abep::map_g_inv(z, p));
  }
}
BENCHMARK(BM_MapRoundTrip)->Arg(2)->Arg(16)->Arg(128);

void BM_EmStep(benchmark::State& state) {
  const auto p = params(static_cast<int>(state.range(0)));
  const auto model = state.range(1) ? abep::Model::kAbep : abep::Model::kBep;
  abep::EulerMaruyama em(p, model, 1e-3, 1e6);
  abep::Engine rng = abep::make_engine(1, "bench", 0);
  std::vector<double> x0(static_cast<std::size_t>(p.n_sites), 0.4);
  std::vector<double> x = x0;
  for (auto _ : state) {
    try {
      em.step(x, rng);
    } catch (const abep::NumericalBlowup&) {
      x = x0;
    }
    benchmark::DoNotOptimize(x.data());
  }
}
BENCHMARK(BM_EmStep)->ArgsProduct({{2, 16}, {0, 1}});

void BM_GillespieAbsorption(benchmark::State& state) {
  const auto p = params(static_cast<int>(state.range(0)));
  const auto xi0 = abep::ParticleConfig::from_sites(p.n_sites, {1, p.n_sites});
  abep::Engine rng = abep::make_engine(2, "bench", 0);
  std::size_t events = 0;
  for (auto _ : state) events += abep::gillespie_run(xi0, p, rng).events;
  state.counters["events"] = benchmark::Counter(static_cast<double>(events),
                                                benchmark::Counter::kAvgIterations);
}
BENCHMARK(BM_GillespieAbsorption)->Arg(5)->Arg(20);

void BM_TwoParticleSolve(benchmark::State& state) {
  const auto p = params(static_cast<int>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(abep::two_particle_solve(1, p.n_sites, p));
}
BENCHMARK(BM_TwoParticleSolve)->Arg(5)->Arg(20)->Arg(60);

void BM_TwoPointMoment(benchmark::State& state) {
  const auto p = params(static_cast<int>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(abep::two_point_moment(1, 2, p));
}
BENCHMARK(BM_TwoPointMoment)->Arg(5)->Arg(20);

void BM_ReversibleSampler(benchmark::State& state) {
  auto p = params(static_cast<int>(state.range(0)));
  p.t_right = p.t_left;
  std::uint64_t seed = 0;
  for (auto _ : state) benchmark::DoNotOptimize(abep::reversible_sampler(p, 1000, ++seed));
}
BENCHMARK(BM_ReversibleSampler)->Arg(1)->Arg(4);

}  // namespace

BENCHMARK_MAIN();
