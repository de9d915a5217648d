#include <benchmark/benchmark.h>

#include "windres/hardening.hpp"
#include "windres/restoration.hpp"
#include "windres/synthgen.hpp"

using namespace windres;

namespace
{

struct Fixture
{
    Area area;
    InterpolatedWind wind;
    std::vector<ResilienceEvent> events;
    WindBinIndex bins;
};

Fixture const& fixture()
{
    static Fixture const f = [] {
        ScenarioSpec spec;
        spec.days = 2 * 365;
        spec.seed = 1;
        auto area = gen_outages(spec, gen_wind(spec));
        InterpolatedWind wind{area.station.samples};
        auto events = extract_events(std::span<OutageRecord const>{area.outages});
        auto bins = bin_outages(area.outages, wind);
        return Fixture{std::move(area), std::move(wind), std::move(events), std::move(bins)};
    }();
    return f;
}

Execution execution(benchmark::State const& state)
{
    return state.range(0) == 0 ? Execution::serial : Execution::parallel;
}

void BM_rate_curve(benchmark::State& state)
{
    auto const& f = fixture();
    for (auto _ : state)
        benchmark::DoNotOptimize(
            rate_curve(f.area, f.wind, default_v_max(f.wind), execution(state)));
}

void BM_hardening(benchmark::State& state)
{
    auto const& f = fixture();
    MonteCarloConfig cfg;
    cfg.replicates = 200;
    cfg.adaptive = false;
    for (auto _ : state)
        benchmark::DoNotOptimize(run_hardening({f.events, &f.bins}, 0.9, cfg, execution(state)));
}

void BM_restoration(benchmark::State& state)
{
    auto const& f = fixture();
    RestorationOptions opts;
    opts.regrouping = Regrouping::re_extract;
    for (auto _ : state)
        benchmark::DoNotOptimize(
            run_restoration(f.events, RestorationSpec::earlier(2.84), opts, execution(state)));
}

} // namespace

// Argument 0 is the serial reference, 1 the OpenMP kernel.
BENCHMARK(BM_rate_curve)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_hardening)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_restoration)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
