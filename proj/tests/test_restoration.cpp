#include <doctest.h>

#include <cmath>

#include "oracles.hpp"
#include "windres/restoration.hpp"
#include "windres/synthgen.hpp"

using namespace windres;

namespace
{

ResilienceEvent event(std::vector<std::array<double, 3>> const& ocr)
{
    std::vector<Component> comps;
    for (std::size_t i = 0; i < ocr.size(); ++i)
        comps.push_back({ocr[i][0], ocr[i][1], static_cast<std::int64_t>(ocr[i][2]), i});
    return ResilienceEvent{std::move(comps)};
}

ResilienceEvent const hand = event({{0, 180, 10}, {60, 240, 20}, {120, 360, 30}});

std::vector<ResilienceEvent> synthetic_events(std::uint64_t seed)
{
    ScenarioSpec spec;
    spec.days = 200;
    spec.seed = seed;
    auto const area = gen_outages(spec, gen_wind(spec));
    return extract_events(std::span<OutageRecord const>{area.outages});
}

double hours(ResilienceEvent const& e, Metric k)
{
    return metrics(e).value(k);
}

} // namespace

TEST_SUITE("restoration")
{
    TEST_CASE("earlier restoration")
    {
        CHECK(apply_earlier(hand, 0.0).restore_times() == hand.restore_times());
        CHECK(apply_earlier(event({{0, 120, 1}}), 1.0).restore_times() ==
              std::vector<double>{60});
        auto const clamped = apply_earlier(event({{0, 30, 1}}), 1.0);
        CHECK(clamped.restore_times() == std::vector<double>{0});
        CHECK(hours(clamped, Metric::outage_hours) == 0);

        auto const moved = apply_earlier(hand, 2.84);
        double const drop = hours(hand, Metric::time_to_first_restore) -
                            hours(moved, Metric::time_to_first_restore);
        CHECK(drop > 0);
        CHECK(drop <= 2.84 + 1e-12);
        auto const r = moved.restore_times();
        REQUIRE(r.size() == 3);
        CHECK(r[0] == doctest::Approx(9.6));
        CHECK(r[1] == doctest::Approx(69.6));
        CHECK(r[2] == doctest::Approx(189.6));
    }

    TEST_CASE("faster restoration")
    {
        CHECK(apply_faster(hand, 1.0).restore_times() == hand.restore_times());
        auto const e = event({{0, 180, 1}, {10, 240, 1}, {20, 360, 1}});
        CHECK(apply_faster(e, 0.5).restore_times() == std::vector<double>{180, 210, 270});
        auto const single = event({{0, 90, 5}});
        CHECK(apply_faster(single, 0.3).restore_times() == single.restore_times());
        CHECK_THROWS(apply_faster(e, 0.0));
        CHECK_THROWS(apply_faster(e, 1.5));
    }

    TEST_CASE("counts are untouched and faster keeps the first restore")
    {
        auto const events = synthetic_events(3);
        for (auto spec : {RestorationSpec::earlier(2.84), RestorationSpec::faster(0.9385)})
        {
            auto const r = run_restoration(events, spec);
            for (auto c : kAllSizeClasses)
            {
                if (!r.base[class_index(c)])
                    continue;
                CHECK(*r.percent_change[class_index(c)][metric_index(Metric::event_size)] == 0.0);
                CHECK(*r.percent_change[class_index(c)][metric_index(Metric::customers_out)] == 0.0);
                if (spec.mode == RestorationMode::faster)
                    CHECK(*r.percent_change[class_index(c)][metric_index(
                              Metric::time_to_first_restore)] == 0.0);
            }
        }
    }

    TEST_CASE("earlier mode trims time to first restore by at most t_earlier")
    {
        for (auto const& e : synthetic_events(5))
        {
            double const before = hours(e, Metric::time_to_first_restore);
            double const after = hours(apply_earlier(e, 2.84), Metric::time_to_first_restore);
            CHECK(after <= before);
            CHECK(before - after <= 2.84 + 1e-9);
        }
    }

    TEST_CASE("clamp-free faster restore scales restore duration")
    {
        auto const events = oracle::clamp_free_events(1, 500);
        auto const r = run_restoration(events, RestorationSpec::faster(0.9385));
        for (auto c : kAllSizeClasses)
        {
            auto const pc = r.percent_change[class_index(c)][metric_index(Metric::restore_duration)];
            REQUIRE(pc.has_value());
            CHECK(std::abs(*pc / -6.15 - 1.0) <= 1e-9);
        }
    }

    TEST_CASE("larger t_earlier never raises outage hours")
    {
        auto const events = synthetic_events(7);
        double prev = 1e300;
        for (double t = 0; t <= 6; t += 0.25)
        {
            double total = 0;
            for (auto const& e : events)
                total += hours(apply_earlier(e, t), Metric::outage_hours);
            CHECK(total <= prev);
            prev = total;
        }
    }

    TEST_CASE("calibration")
    {
        auto const events = synthetic_events(9);
        CHECK(calibrate_target(events, RestorationMode::earlier, 0.0) == 0.0);
        CHECK(calibrate_target(events, RestorationMode::faster, 0.0) == 1.0);

        double const t = calibrate_target(events, RestorationMode::earlier, 0.10);
        auto const r = run_restoration(events, RestorationSpec::earlier(t));
        CHECK(*r.percent_change[class_index(SizeClass::large)][metric_index(Metric::outage_hours)] ==
              doctest::Approx(-10.0).epsilon(1e-6));
        CHECK_THROWS_AS(calibrate_target(events, RestorationMode::faster, 0.999999999),
                        CalibrationError);
    }

    TEST_CASE("faster calibration matches the affine solution")
    {
        // Without clamping, the class mean of outage hours is A + B c.
        auto const events = oracle::clamp_free_events(2, 400);
        double a = 0;
        double b = 0;
        std::size_t n = 0;
        for (auto const& e : events)
        {
            if (classify(e) != SizeClass::large)
                continue;
            double const r1 = e.first_restore();
            for (auto const& c : e.components())
            {
                a += (r1 - c.start) / kMinutesPerHour;
                b += (c.restore - r1) / kMinutesPerHour;
            }
            ++n;
        }
        REQUIRE(n > 0);
        double const target = 0.10;
        double const analytic = ((1 - target) * (a + b) - a) / b;
        double const c = calibrate_target(events, RestorationMode::faster, target);
        CHECK(std::abs(c - analytic) <= 1e-6);
    }

    TEST_CASE("re-extraction regrouping is available")
    {
        auto const events = synthetic_events(11);
        RestorationOptions opts;
        opts.regrouping = Regrouping::re_extract;
        auto const r = run_restoration(events, RestorationSpec::earlier(2.84), opts);
        CHECK(*r.percent_change[class_index(SizeClass::small)][metric_index(Metric::event_size)] ==
              0.0);
        CHECK(r.metadata.at("regrouping") == "re_extract");
    }
}
