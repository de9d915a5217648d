#include <doctest.h>

#include <cstring>

#include "windres/execution.hpp"
#include "windres/hardening.hpp"
#include "windres/restoration.hpp"
#include "windres/synthgen.hpp"

using namespace windres;

namespace
{

bool same_bits(ClassTable const& x, ClassTable const& y)
{
    for (std::size_t c = 0; c < kSizeClassCount; ++c)
        for (std::size_t k = 0; k < kMetricCount; ++k)
        {
            if (x[c][k].has_value() != y[c][k].has_value())
                return false;
            if (x[c][k] && std::memcmp(&*x[c][k], &*y[c][k], sizeof(double)) != 0)
                return false;
        }
    return true;
}

Area scenario_area()
{
    ScenarioSpec spec;
    spec.days = 240;
    spec.seed = 77;
    return gen_outages(spec, gen_wind(spec));
}

} // namespace

TEST_SUITE("parallel")
{
    TEST_CASE("serial and parallel kernels agree bit for bit")
    {
        set_thread_count(4);
        auto const area = scenario_area();
        InterpolatedWind const w{area.station.samples};

        CHECK(rate_curve(area, w, default_v_max(w), Execution::serial) ==
              rate_curve(area, w, default_v_max(w), Execution::parallel));

        auto const events = extract_events(std::span<OutageRecord const>{area.outages});
        auto const bins = bin_outages(area.outages, w);
        MonteCarloConfig cfg;
        cfg.replicates = 64;
        cfg.seed = 5;
        auto const s = run_hardening({events, &bins}, 0.9, cfg, Execution::serial);
        auto const p = run_hardening({events, &bins}, 0.9, cfg, Execution::parallel);
        CHECK(s.replicates == p.replicates);
        CHECK(same_bits(s.percent_change, p.percent_change));
        CHECK(same_bits(s.half_width, p.half_width));

        for (auto spec : {RestorationSpec::earlier(2.84), RestorationSpec::faster(0.9385)})
        {
            RestorationOptions opts;
            opts.regrouping = Regrouping::re_extract;
            auto const rs = run_restoration(events, spec, opts, Execution::serial);
            auto const rp = run_restoration(events, spec, opts, Execution::parallel);
            CHECK(same_bits(rs.percent_change, rp.percent_change));
        }
        set_thread_count(0);
    }

    TEST_CASE("replicate results do not depend on scheduling")
    {
        auto const area = scenario_area();
        InterpolatedWind const w{area.station.samples};
        auto const events = extract_events(std::span<OutageRecord const>{area.outages});
        auto const bins = bin_outages(area.outages, w);
        MonteCarloConfig cfg;
        cfg.replicates = 16;
        cfg.seed = 9;
        auto const counts = sample_counts(bins, 0.9);
        auto const alone = hardening_replicate({events, &bins}, counts, cfg, 7);
        set_thread_count(3);
        auto const again = hardening_replicate({events, &bins}, counts, cfg, 7);
        set_thread_count(0);
        for (std::size_t c = 0; c < kSizeClassCount; ++c)
            CHECK(alone[c] == again[c]);
    }
}
