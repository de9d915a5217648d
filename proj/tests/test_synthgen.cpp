#include <doctest.h>

#include <cmath>

#include "windres/curvefit.hpp"
#include "windres/synthgen.hpp"

using namespace windres;

TEST_SUITE("synthgen")
{
    TEST_CASE("calm constant wind")
    {
        ScenarioSpec spec;
        spec.days = 10;
        spec.wind.volatility = 0;
        spec.wind.storms_per_year = 0;
        auto const st = gen_wind(spec);
        CHECK(st.samples.size() == 241);
        for (auto const& s : st.samples)
            CHECK(s.speed == spec.wind.mean_mph);
        CHECK(st.samples[1].time - st.samples[0].time == 60);
    }

    TEST_CASE("storm peak")
    {
        ScenarioSpec spec;
        spec.days = 30;
        spec.wind.volatility = 0;
        spec.wind.storms_per_year = 100;
        spec.wind.storm_peak_mph = 60;
        double peak = 0;
        for (auto const& s : gen_wind(spec).samples)
            peak = std::max(peak, s.speed);
        CHECK(std::abs(peak - 60) <= 1.0);
    }

    TEST_CASE("fixed seed reproduces the scenario")
    {
        ScenarioSpec spec;
        spec.days = 20;
        spec.wind.storms_per_year = 20;
        auto const a = gen_outages(spec, gen_wind(spec));
        auto const b = gen_outages(spec, gen_wind(spec));
        CHECK(a.station.samples == b.station.samples);
        CHECK(a.outages == b.outages);
        spec.seed += 1;
        CHECK(gen_outages(spec, gen_wind(spec)).outages != a.outages);
    }

    TEST_CASE("no outages when a is zero")
    {
        ScenarioSpec spec;
        spec.days = 20;
        spec.outages.a = 0;
        CHECK(gen_outages(spec, gen_wind(spec)).outages.empty());
    }

    TEST_CASE("Poisson count under constant wind")
    {
        ScenarioSpec spec;
        spec.days = 30;
        spec.wind.volatility = 0;
        spec.wind.storms_per_year = 0;
        spec.wind.mean_mph = 10;
        spec.outages = {0.006, 0.48};
        auto const area = gen_outages(spec, gen_wind(spec));
        double const minutes = 30 * 1440 + 1;
        double const expected = 0.006 * std::exp(0.48 * 10) * minutes;
        CHECK(std::abs(static_cast<double>(area.outages.size()) - expected) <=
              3 * std::sqrt(expected));
        for (auto const& o : area.outages)
        {
            CHECK(o.restore > o.start);
            CHECK(great_circle_km(o.location, area.station.location) <= 1.01 * spec.spread_km);
        }
    }

    TEST_CASE("exponent recovered over six years")
    {
        ScenarioSpec spec;
        spec.days = 6 * 365;
        spec.seed = 12;
        spec.outages = {0.006, 0.48};
        spec.wind.mean_mph = 4;
        spec.wind.storm_peak_mph = 14;
        auto const area = gen_outages(spec, gen_wind(spec));
        InterpolatedWind const w{area.station.samples};
        FitOptions opts;
        opts.weighted = true;
        auto const fit = fit_exponential(rate_curve(area, w, default_v_max(w)), opts);
        CHECK(std::abs(fit.b / 0.48 - 1) <= 0.10);
    }

    TEST_CASE("scenario json round trip and validation")
    {
        ScenarioSpec spec;
        spec.days = 12.5;
        spec.wind.storms_per_year = 3;
        spec.customers.values = {1, 2};
        spec.customers.weights = {0.5, 0.5};
        auto const back = scenario_from_json(scenario_to_json(spec));
        CHECK(scenario_to_json(back) == scenario_to_json(spec));

        ScenarioSpec bad;
        bad.days = 0;
        CHECK_THROWS(bad.validate());
        bad = ScenarioSpec{};
        bad.customers.weights = {1};
        CHECK_THROWS(bad.validate());
    }
}
