#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <sstream>
#include <string>

#include <fmt/format.h>

#include "oracles.hpp"
#include "windres/curvefit.hpp"
#include "windres/hardening.hpp"
#include "windres/pipeline.hpp"
#include "windres/restoration.hpp"
#include "windres/synthgen.hpp"

using namespace windres;
namespace fs = std::filesystem;

namespace
{

struct Outcome
{
    bool pass = false;
    std::string detail;
};

double seconds_since(std::chrono::steady_clock::time_point t0)
{
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

double pct(CounterfactualResult const& r, SizeClass c, Metric k)
{
    auto const v = r.percent_change[class_index(c)][metric_index(k)];
    return v ? *v : std::nan("");
}

// Shared corpus for criteria 3, 4, 5 and 9.
struct HardeningCorpus
{
    Area area;
    std::vector<ResilienceEvent> events;
    WindBinIndex bins;
    MonteCarloConfig cfg;
    CounterfactualResult result;
    double seconds = 0.0;
};

HardeningCorpus& corpus()
{
    static HardeningCorpus c = [] {
        auto const t0 = std::chrono::steady_clock::now();
        HardeningCorpus h;
        ScenarioSpec spec;
        spec.days = 7 * 365;
        spec.seed = 2023;
        h.area = gen_outages(spec, gen_wind(spec));
        h.events = extract_events(std::span<OutageRecord const>{h.area.outages});
        h.bins = bin_outages(h.area.outages, InterpolatedWind{h.area.station.samples});
        h.cfg.replicates = 2000;
        h.cfg.half_width = 0.01;
        h.cfg.confidence = 0.99;
        h.cfg.seed = 2023;
        h.result = run_hardening({h.events, &h.bins}, 0.9, h.cfg);
        h.seconds = seconds_since(t0);
        return h;
    }();
    return c;
}

Outcome shift_consistency()
{
    auto const t0 = std::chrono::steady_clock::now();
    ExponentialFit f1;
    f1.a = 1.44e-7;
    f1.b = 0.6;
    ExponentialFit f2;
    f2.a = 0.006;
    f2.b = 0.48;
    double const x1 = shift_factor(f1, HardeningSpec::reduction(0.10)).shift_mph;
    double const x2 = shift_factor(f2, HardeningSpec::reduction(0.10)).shift_mph;
    double const s = seconds_since(t0);
    bool const ok = std::abs(x1 - 0.176) < 5e-4 && std::round(x1 * 100) == 18 &&
                    std::abs(x2 - 0.220) < 5e-4 && std::round(x2 * 100) == 22 && s < 1.0;
    return {ok, fmt::format("b=0.6 x={:.4f} (0.18), b=0.48 x={:.4f} (0.22); tol 5e-4, {:.3f}s < 1s",
                            x1, x2, s)};
}

Outcome fit_recovery()
{
    auto const t0 = std::chrono::steady_clock::now();
    double worst = 0.0;
    for (auto [a, b] : {std::pair{0.006, 0.48}, std::pair{1.44e-7, 0.6}})
    {
        OutageRateCurve c;
        for (int v = 0; v <= 30; ++v)
            c.points.push_back({v, a * std::exp(b * v), 10});
        auto const f = fit_exponential(c);
        worst = std::max({worst, std::abs(f.a / a - 1), std::abs(f.b / b - 1)});
    }

    int hits = 0;
    for (std::uint64_t seed = 1; seed <= 100; ++seed)
    {
        ScenarioSpec spec;
        spec.days = 6 * 365;
        spec.seed = seed;
        spec.outages = {0.006, 0.48};
        spec.wind.mean_mph = 4;
        spec.wind.storm_peak_mph = 14;
        auto const area = gen_outages(spec, gen_wind(spec));
        InterpolatedWind const w{area.station.samples};
        FitOptions opts;
        opts.weighted = true;
        try
        {
            auto const f = fit_exponential(rate_curve(area, w, default_v_max(w)), opts);
            hits += std::abs(f.b / 0.48 - 1) <= 0.10;
        }
        catch (FitError const&)
        {
        }
    }
    double const s = seconds_since(t0);
    bool const ok = worst <= 1e-6 && hits >= 90 && s < 120.0;
    return {ok, fmt::format("noiseless max rel err {:.2e} <= 1e-6; b within 10% in {}/100 seeds "
                            "(>= 90); {:.1f}s < 120s",
                            worst, hits, s)};
}

Outcome exact_reduction()
{
    auto const& h = corpus();
    double const tol = 3 * h.cfg.half_width * 100; // percentage points
    bool ok = h.events.size() >= 3000 && h.result.replicates >= 2000 && h.seconds < 600;
    std::string detail = fmt::format("{} events, m={};", h.events.size(), h.result.replicates);
    for (auto c : kAllSizeClasses)
    {
        double const size = pct(h.result, c, Metric::event_size);
        double const hours = pct(h.result, c, Metric::outage_hours);
        double const cust = pct(h.result, c, Metric::customers_out);
        double const ch = pct(h.result, c, Metric::customer_hours);
        ok = ok && std::abs(size + 10) <= tol && std::abs(hours + 10) <= tol &&
             std::abs(cust + 10) <= 1.0 && std::abs(ch + 10) <= 1.0;
        detail += fmt::format(" {} size {:.2f}% hours {:.2f}% cust {:.2f}% cust-h {:.2f}%;",
                              size_class_name(c), size, hours, cust, ch);
    }
    detail += fmt::format(" tol {:.0f}pp / 1pp, {:.0f}s < 600s", tol, h.seconds);
    return {ok, detail};
}

Outcome duration_damping()
{
    auto const& r = corpus().result;
    double const large = pct(r, SizeClass::large, Metric::event_duration);
    double const small = pct(r, SizeClass::small, Metric::event_duration);
    double const restore_small = pct(r, SizeClass::small, Metric::restore_duration);
    bool const ok = std::abs(large) < std::abs(small) && restore_small < -10.0;
    return {ok, fmt::format("event_duration large {:.2f}% vs small {:.2f}%; restore_duration "
                            "small {:.2f}% (< -10%)",
                            large, small, restore_small)};
}

Outcome restoration_invariances()
{
    auto const& events = corpus().events;
    double const t_earlier = 2.84;
    auto const earlier = run_restoration(events, RestorationSpec::earlier(t_earlier));
    auto const faster = run_restoration(events, RestorationSpec::faster(0.9385));
    bool ok = true;
    for (auto c : kAllSizeClasses)
        for (auto const* r : {&earlier, &faster})
            ok = ok && pct(*r, c, Metric::event_size) == 0.0 &&
                 pct(*r, c, Metric::customers_out) == 0.0;
    for (auto c : kAllSizeClasses)
        ok = ok && pct(faster, c, Metric::time_to_first_restore) == 0.0;

    double largest_drop = 0.0;
    for (auto const& e : events)
    {
        double const before = metrics(e).value(Metric::time_to_first_restore);
        double const after = metrics(apply_earlier(e, t_earlier)).value(Metric::time_to_first_restore);
        largest_drop = std::max(largest_drop, before - after);
    }
    ok = ok && largest_drop <= t_earlier + 1e-9;
    return {ok, fmt::format("size/customers_out 0% in both modes, faster ttfr 0%; largest earlier "
                            "ttfr drop {:.6f}h <= {}h (+1e-9)",
                            largest_drop, t_earlier)};
}

Outcome clamp_free_faster()
{
    double const c = 0.9385;
    auto const events = oracle::clamp_free_events(6, 2000);
    auto const r = run_restoration(events, RestorationSpec::faster(c));
    double worst = 0.0;
    for (auto cls : kAllSizeClasses)
    {
        double const change = pct(r, cls, Metric::restore_duration) / 100.0;
        worst = std::max(worst, std::abs(change / -(1 - c) - 1));
    }
    return {worst <= 1e-9,
            fmt::format("restore_duration change vs -(1-c) max rel err {:.2e} <= 1e-9", worst)};
}

Outcome oracle_equivalences()
{
    auto const t0 = std::chrono::steady_clock::now();
    auto rng = RandomStream::substream(7, 0);
    int extraction = 0;
    for (int i = 0; i < 1000; ++i)
    {
        auto const comps = oracle::random_components(rng, 1 + rng.below(30));
        extraction += oracle::event_groups(extract_events(std::span<Component const>{comps})) ==
                      oracle::union_find_groups(comps);
    }
    int curves = 0;
    for (int i = 0; i < 100; ++i)
    {
        auto const samples = oracle::random_toy_wind(rng, 3 + rng.below(10));
        OutageRateSeries series;
        for (int k = 0; k < 40; ++k)
            series.add(static_cast<Minute>(
                           rng.below(static_cast<std::uint64_t>(samples.back().time + 1))),
                       1 + rng.below(3));
        curves += rate_curve(series, InterpolatedWind{samples}, 12) ==
                  oracle::brute_force_curve(samples, series, 12);
    }
    int identity = 0;
    int checked = 0;
    while (checked < 1000)
    {
        auto const comps = oracle::random_components(rng, 1 + rng.below(30));
        for (auto const& e : extract_events(std::span<Component const>{comps}))
        {
            if (checked == 1000)
                break;
            double const direct = metrics(e).value(Metric::outage_hours);
            double const sorted = outage_hours_sorted(e);
            double const area =
                -integrate_performance(performance_curve(e, PerformanceForm::components)) /
                kMinutesPerHour;
            double const scale = std::max(direct, 1e-300);
            identity += std::abs(sorted - direct) <= 1e-9 * scale &&
                        std::abs(area - direct) <= 1e-9 * scale;
            ++checked;
        }
    }
    double const s = seconds_since(t0);
    bool const ok = extraction == 1000 && curves == 100 && identity == 1000 && s < 60;
    return {ok, fmt::format("extraction {}/1000, rate curve {}/100, outage_hours identity {}/1000 "
                            "(rel 1e-9); {:.1f}s < 60s",
                            extraction, curves, identity, s)};
}

Outcome super_event_fidelity()
{
    std::vector<std::array<double, 2>> const spans{{0, 30},   {10, 50},   {20, 60},
                                                   {40, 100}, {55, 110},  {70, 130},
                                                   {80, 140}, {120, 160}, {125, 150}};
    std::vector<Component> comps;
    for (std::size_t i = 0; i < spans.size(); ++i)
        comps.push_back({spans[i][0], spans[i][1], 1, i});
    std::vector<ResilienceEvent> const base{ResilienceEvent{comps}};

    std::vector<std::size_t> const without_e1{1, 2, 3, 4, 5, 6, 7, 8};
    auto const a = super_events(base, without_e1);
    bool const one_part = a[0].parts.size() == 1 && a[0].parts[0].size() == 8;

    std::vector<std::size_t> const without_e4e5{0, 1, 2, 5, 6, 7, 8};
    auto const b = super_events(base, without_e4e5);
    auto ids = [](ResilienceEvent const& e) {
        std::vector<std::size_t> v;
        for (auto const& c : e.components())
            v.push_back(c.index);
        return v;
    };
    bool const two_parts = b[0].parts.size() == 2 &&
                           ids(b[0].parts[0]) == std::vector<std::size_t>{0, 1, 2} &&
                           ids(b[0].parts[1]) == std::vector<std::size_t>{5, 6, 7, 8};

    std::vector<ResilienceEvent> const single{ResilienceEvent{{{0, 60, 3, 0}}}};
    auto const gone = super_events(single, std::vector<std::size_t>{});
    bool const zero = gone[0].parts.empty() && super_metrics(gone[0]) == MetricVector::zeros();
    return {one_part && two_parts && zero,
            fmt::format("drop e1 -> one part of 8: {}; drop e4,e5 -> {{e1..e3}},{{e6..e9}}: {}; "
                        "single removal -> zero vector: {}",
                        one_part, two_parts, zero)};
}

Outcome ci_stopping()
{
    auto& h = corpus();
    double const d = h.cfg.half_width;
    double worst_hw = 0.0;
    for (auto const& row : h.result.half_width)
        for (auto const& x : row)
            if (x)
                worst_hw = std::max(worst_hw, *x);

    auto doubled_cfg = h.cfg;
    doubled_cfg.replicates = 2 * h.result.replicates;
    doubled_cfg.adaptive = false;
    auto const doubled = run_hardening({h.events, &h.bins}, 0.9, doubled_cfg);
    double worst_shift = 0.0;
    for (std::size_t c = 0; c < kSizeClassCount; ++c)
    {
        auto const& base = h.result.base[c];
        auto const& x = h.result.counterfactual[c];
        auto const& y = doubled.counterfactual[c];
        if (!base || !x || !y)
            continue;
        for (auto k : kAllMetrics)
        {
            if (!x->has(k) || !y->has(k))
                continue;
            double const scale = base->value(k) != 0.0 ? base->value(k) : 1.0;
            worst_shift = std::max(worst_shift, std::abs(x->value(k) - y->value(k)) / scale);
        }
    }
    bool const ok = worst_hw <= d && worst_shift <= 2 * d;
    return {ok, fmt::format("max half-width {:.5f} <= d={} at m={}; max mean shift at m={} "
                            "{:.5f} <= 2d",
                            worst_hw, d, h.result.replicates, doubled_cfg.replicates, worst_shift)};
}

std::string slurp(fs::path const& p)
{
    std::ifstream in{p, std::ios::binary};
    std::ostringstream s;
    s << in.rdbuf();
    return s.str();
}

Outcome determinism()
{
    auto const root = fs::temp_directory_path() / "windres_acceptance_determinism";
    fs::remove_all(root);
    auto run = [&](std::string const& name, int jobs) {
        RunConfig cfg;
        cfg.scenario.days = 180;
        cfg.synth_areas = 2;
        cfg.monte_carlo.replicates = 200;
        cfg.outages_csv = root / "synth" / "outages.csv";
        cfg.stations_csv = root / "synth" / "stations.csv";
        cfg.out_dir = root / name;
        cfg.jobs = jobs;
        run_synth(cfg, root / "synth");
        run_ingest(cfg);
        run_curve(cfg);
        run_fit(cfg);
        run_events(cfg);
        for (auto m : {SimulateMode::hardening, SimulateMode::earlier, SimulateMode::faster})
            run_simulate(cfg, m);
        run_report(cfg);
        return cfg.out_dir / "report";
    };
    auto const a = run("serial", 1);
    auto const b = run("parallel", 4);
    std::size_t files = 0;
    bool same = true;
    for (auto const& entry : fs::directory_iterator(a))
    {
        ++files;
        same = same && slurp(entry.path()) == slurp(b / entry.path().filename());
    }
    fs::remove_all(root);
    return {same && files == 3,
            fmt::format("{} report files byte-identical between 1 and 4 threads: {}", files, same)};
}

} // namespace

int main()
{
    struct Criterion
    {
        int id;
        char const* name;
        std::function<Outcome()> run;
    };
    std::vector<Criterion> const criteria{
        {1, "shift consistency", shift_consistency},
        {2, "fit recovery", fit_recovery},
        {3, "exact reduction", exact_reduction},
        {4, "duration damping", duration_damping},
        {5, "restoration invariances", restoration_invariances},
        {6, "clamp-free faster restore", clamp_free_faster},
        {7, "oracle equivalences", oracle_equivalences},
        {8, "super-event fidelity", super_event_fidelity},
        {9, "CI stopping", ci_stopping},
        {10, "determinism", determinism},
    };
    int failures = 0;
    for (auto const& c : criteria)
    {
        Outcome o;
        try
        {
            o = c.run();
        }
        catch (std::exception const& e)
        {
            o = {false, std::string{"threw: "} + e.what()};
        }
        failures += !o.pass;
        std::printf("%s criterion %d (%s): %s\n", o.pass ? "PASS" : "FAIL", c.id, c.name,
                    o.detail.c_str());
        std::fflush(stdout);
    }
    return failures == 0 ? 0 : 1;
}
