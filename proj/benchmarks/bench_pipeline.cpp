#include <benchmark/benchmark.h>

#include "delaycorr/debias.hpp"
#include "delaycorr/fit.hpp"
#include "delaycorr/synth.hpp"

using namespace delaycorr;

namespace {

const MixtureParams kTruth{0.15, 60.0, 400.0, 80.0};

struct Fixture {
  EventSet events;
  Window window;
  DelayHistograms histograms;
  DebiasedDistribution distribution;

  explicit Fixture(double per_month) {
    ScenarioSpec spec;
    spec.rate.value = per_month;
    spec.seed = 7;
    events = generate(spec).first;
    window.end_month = spec.start.plus(spec.months - 1);
    window.start = spec.start.first_day();
    window.end = events.cutoff;
    histograms = build_histograms(events, window);
    distribution = compute_delay_distribution(histograms);
  }
};

const Fixture& fixture() {
  static const Fixture f{50000.0 / 48.0};
  return f;
}

void BM_Generate(benchmark::State& state) {
  ScenarioSpec spec;
  spec.rate.value = static_cast<double>(state.range(0)) / 48.0;
  for (auto _ : state) benchmark::DoNotOptimize(generate(spec));
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_Generate)->Arg(10000)->Arg(50000)->Unit(benchmark::kMillisecond);

void BM_Histograms(benchmark::State& state) {
  const auto& f = fixture();
  for (auto _ : state) benchmark::DoNotOptimize(build_histograms(f.events, f.window));
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(f.events.size()));
}
BENCHMARK(BM_Histograms)->Unit(benchmark::kMicrosecond);

void BM_Debias(benchmark::State& state) {
  const auto& f = fixture();
  for (auto _ : state) benchmark::DoNotOptimize(compute_delay_distribution(f.histograms));
}
BENCHMARK(BM_Debias)->Unit(benchmark::kMicrosecond);

void BM_Objective(benchmark::State& state) {
  const auto& f = fixture();
  const auto previous = state.range(0) ? std::optional<MixtureParams>{kTruth} : std::nullopt;
  const auto ctx = ObjectiveContext::make(f.distribution, f.distribution.delta_max + 500, previous);
  for (auto _ : state) benchmark::DoNotOptimize(objective(kTruth, ctx));
}
BENCHMARK(BM_Objective)->Arg(0)->Arg(1)->Unit(benchmark::kMicrosecond);

void BM_FitWindow(benchmark::State& state) {
  const auto& f = fixture();
  const auto ctx = ObjectiveContext::make(f.distribution, f.distribution.delta_max);
  const auto init = initial_guess(f.distribution, f.distribution.delta_max);
  FitConfig cfg;
  for (auto _ : state) benchmark::DoNotOptimize(fit_window(ctx, init, cfg, f.window));
}
BENCHMARK(BM_FitWindow)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
