#include "windres/pipeline.hpp"

#include <fstream>
#include <sstream>

#include <fmt/format.h>

#include "windres/csv.hpp"
#include "windres/execution.hpp"

namespace windres
{

namespace fs = std::filesystem;
using nlohmann::json;

namespace
{

void write_text(fs::path const& path, std::string const& text)
{
    fs::create_directories(path.parent_path());
    std::ofstream out{path, std::ios::binary | std::ios::trunc};
    if (!out)
        throw std::runtime_error{"cannot write '" + path.string() + "'"};
    out << text;
}

void write_json(fs::path const& path, json const& j)
{
    write_text(path, j.dump(2) + "\n");
}

json read_json(fs::path const& path)
{
    std::ifstream in{path};
    if (!in)
        throw std::runtime_error{"cannot read '" + path.string() + "'"};
    return json::parse(in);
}

void require(fs::path const& path, std::string_view stage)
{
    if (!fs::exists(path))
        throw StageError{fmt::format("missing artifact '{}'; run `windres {}` first",
                                     path.string(), stage)};
}

std::string rate_name(RateConvention r)
{
    return r == RateConvention::absent ? "absent" : "zero";
}

std::string sampling_name(SamplingMode m)
{
    return m == SamplingMode::without_replacement ? "without_replacement"
                                                  : "with_replacement_dedup";
}

std::string regrouping_name(Regrouping r)
{
    return r == Regrouping::keep_original ? "keep_original" : "re_extract";
}

MonteCarloConfig monte_carlo(RunConfig const& cfg)
{
    auto mc = cfg.monte_carlo;
    mc.seed = cfg.seed;
    mc.rates = cfg.rates;
    mc.thresholds = cfg.thresholds;
    return mc;
}

RestorationOptions restoration_options(RunConfig const& cfg)
{
    return {cfg.thresholds, cfg.rates, cfg.regrouping};
}

struct AreaEvents
{
    LoadedArea loaded;
    std::vector<ResilienceEvent> events;
};

std::vector<AreaEvents> area_events(RunConfig const& cfg)
{
    std::vector<AreaEvents> out;
    for (auto& a : load_areas(cfg))
    {
        auto events = extract_events(std::span<OutageRecord const>{a.area.outages});
        out.push_back({std::move(a), std::move(events)});
    }
    return out;
}

} // namespace

std::string safe_name(std::string_view id)
{
    std::string out;
    for (char c : id)
        out.push_back(std::isalnum(static_cast<unsigned char>(c)) || c == '-' || c == '_' ? c : '_');
    return out.empty() ? "_" : out;
}

json RunConfig::to_json() const
{
    return {
        {"outages_csv", outages_csv.generic_string()},
        {"stations_csv", stations_csv.generic_string()},
        {"outage_columns", outage_columns},
        {"wind_columns", wind_columns},
        {"max_gap", max_gap},
        {"size_thresholds", {thresholds.small_max, thresholds.medium_max}},
        {"weighted_fit", weighted_fit},
        {"undefined_rates", rate_name(rates)},
        {"hardening_reduction", hardening_reduction},
        {"hardening_shift_mph", hardening_shift_mph ? json(*hardening_shift_mph) : json(nullptr)},
        {"monte_carlo",
         {{"replicates", monte_carlo.replicates},
          {"half_width", monte_carlo.half_width},
          {"confidence", monte_carlo.confidence},
          {"adaptive", monte_carlo.adaptive},
          {"max_factor", monte_carlo.max_factor},
          {"sampling", sampling_name(monte_carlo.mode)}}},
        {"t_earlier_hours", t_earlier_hours},
        {"c_faster", c_faster},
        {"regrouping", regrouping_name(regrouping)},
        {"calibrate",
         {{"reduction", calibrate_reduction},
          {"metric", metric_name(calibrate_metric)},
          {"class", size_class_name(calibrate_class)}}},
        {"scenario", scenario_to_json(scenario)},
        {"synth_areas", synth_areas},
        {"seed", seed},
    };
}

std::string RunConfig::hash() const
{
    // FNV-1a over the canonical dump.
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : to_json().dump())
    {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    return fmt::format("{:016x}", h);
}

std::string RunConfig::mode_flags() const
{
    return fmt::format("sampling={};rates={};regrouping={};super_event_duration=sum;fit={}",
                       sampling_name(monte_carlo.mode), rate_name(rates),
                       regrouping_name(regrouping), weighted_fit ? "weighted" : "unweighted");
}

Provenance RunConfig::provenance() const
{
    return {hash(), seed, mode_flags()};
}

std::optional<SimulateMode> simulate_mode_from_name(std::string_view name)
{
    if (name == "hardening")
        return SimulateMode::hardening;
    if (name == "earlier")
        return SimulateMode::earlier;
    if (name == "faster")
        return SimulateMode::faster;
    if (name == "calibrate")
        return SimulateMode::calibrate;
    return std::nullopt;
}

void run_synth(RunConfig const& cfg, fs::path const& dir)
{
    auto const prov = cfg.provenance();
    std::ostringstream stations;
    stations << "id,latitude,longitude,wind_file\n";
    std::vector<OutageRecord> all;
    json truth = json::array();
    for (std::size_t i = 0; i < cfg.synth_areas; ++i)
    {
        auto spec = cfg.scenario;
        spec.seed = splitmix64(cfg.seed + i);
        spec.station_id = fmt::format("S{}", i + 1);
        spec.station_location.latitude += 0.5 * static_cast<double>(i);
        auto const station = gen_wind(spec);
        auto area = gen_outages(spec, station);

        auto const wind_file = fmt::format("wind_{}.csv", safe_name(station.id));
        stations << station.id << ',' << fmt::format("{}", station.location.latitude) << ','
                 << fmt::format("{}", station.location.longitude) << ',' << wind_file << '\n';
        std::ostringstream wind;
        wind << prov.csv_comment() << '\n';
        write_wind_csv(wind, station.samples);
        write_text(dir / wind_file, wind.str());
        truth.push_back(ground_truth(spec, area));
        all.insert(all.end(), area.outages.begin(), area.outages.end());
    }
    std::ostringstream outages;
    outages << prov.csv_comment() << '\n';
    write_outages_csv(outages, all);
    write_text(dir / "outages.csv", outages.str());
    write_text(dir / "stations.csv", prov.csv_comment() + "\n" + stations.str());
    write_json(dir / "truth.json", {{"provenance", prov.to_json()}, {"areas", truth}});
}

void run_ingest(RunConfig const& cfg)
{
    set_thread_count(cfg.jobs);
    StagePaths const paths{cfg.out_dir};
    auto const prov = cfg.provenance();

    auto const outage_schema = OutageSchema{}.with_mapping(cfg.outage_columns);
    auto const wind_schema = WindSchema{}.with_mapping(cfg.wind_columns);
    auto parsed = parse_outages(cfg.outages_csv, outage_schema);

    std::vector<Station> stations;
    json wind_rejections = json::object();
    for (auto const& entry : parse_station_list(cfg.stations_csv))
    {
        auto w = parse_wind(entry.wind_file, wind_schema, entry.id, entry.location);
        wind_rejections[entry.id] = w.rejections.to_json();
        stations.push_back(std::move(w.station));
    }
    if (stations.empty())
        throw IngestError{"station list is empty"};

    auto areas = associate_areas(parsed.records, stations);
    json area_list = json::array();
    json stale = json::object();
    for (auto& a : areas)
    {
        auto const id = a.station.id;
        auto const before = a.outages.size();
        auto filtered = filter_stale_outages(std::move(a), cfg.max_gap);
        stale[id] = filtered.rejected.to_json();

        std::ostringstream outages;
        outages << prov.csv_comment() << '\n';
        write_outages_csv(outages, filtered.area.outages);
        write_text(paths.ingest() / fmt::format("outages_{}.csv", safe_name(id)), outages.str());
        std::ostringstream wind;
        wind << prov.csv_comment() << '\n';
        write_wind_csv(wind, filtered.area.station.samples);
        write_text(paths.ingest() / fmt::format("wind_{}.csv", safe_name(id)), wind.str());

        area_list.push_back({{"id", id},
                             {"latitude", filtered.area.station.location.latitude},
                             {"longitude", filtered.area.station.location.longitude},
                             {"associated", before},
                             {"outages", filtered.area.outages.size()},
                             {"rejected", filtered.rejected.total()}});
    }
    write_json(paths.ingest() / "rejections.json", {{"provenance", prov.to_json()},
                                                     {"outages", parsed.rejections.to_json()},
                                                     {"wind", wind_rejections},
                                                     {"stale", stale}});
    write_json(paths.ingest() / "areas.json", {{"provenance", prov.to_json()},
                                               {"records", parsed.records.size()},
                                               {"rejected_rows", parsed.rejections.total()},
                                               {"areas", area_list}});
}

std::vector<LoadedArea> load_areas(RunConfig const& cfg)
{
    StagePaths const paths{cfg.out_dir};
    auto const manifest = paths.ingest() / "areas.json";
    require(manifest, "ingest");
    std::vector<LoadedArea> out;
    auto const j = read_json(manifest);
    for (auto const& a : j.at("areas"))
    {
        auto const id = a.at("id").get<std::string>();
        GeoPoint const loc{a.at("latitude").get<double>(), a.at("longitude").get<double>()};
        auto const outages_file = paths.ingest() / fmt::format("outages_{}.csv", safe_name(id));
        auto const wind_file = paths.ingest() / fmt::format("wind_{}.csv", safe_name(id));
        require(outages_file, "ingest");
        require(wind_file, "ingest");
        LoadedArea la;
        la.id = id;
        la.area.outages = parse_outages(outages_file).records;
        la.area.station = parse_wind(wind_file, WindSchema{}, id, loc).station;
        out.push_back(std::move(la));
    }
    return out;
}

void run_curve(RunConfig const& cfg)
{
    set_thread_count(cfg.jobs);
    StagePaths const paths{cfg.out_dir};
    auto const prov = cfg.provenance();
    for (auto const& la : load_areas(cfg))
    {
        auto const wind = interpolate(la.area.station);
        int const v_max = default_v_max(wind);
        auto const curve = rate_curve(la.area, wind, v_max);
        auto const name = safe_name(la.id);

        std::ostringstream csv;
        csv << prov.csv_comment() << '\n';
        write_curve_csv(csv, curve);
        write_text(paths.curve() / fmt::format("curve_{}.csv", name), csv.str());

        auto j = curve_to_json(curve);
        j["provenance"] = prov.to_json();
        j["area"] = la.id;
        j["v_max"] = v_max;
        j["outages"] = la.area.outages.size();
        write_json(paths.curve() / fmt::format("curve_{}.json", name), j);
    }
}

void run_fit(RunConfig const& cfg)
{
    StagePaths const paths{cfg.out_dir};
    auto const prov = cfg.provenance();
    for (auto const& la : load_areas(cfg))
    {
        auto const name = safe_name(la.id);
        auto const curve_file = paths.curve() / fmt::format("curve_{}.json", name);
        require(curve_file, "curve");
        auto const curve = curve_from_json(read_json(curve_file));

        json j;
        try
        {
            FitOptions opts;
            opts.weighted = cfg.weighted_fit;
            auto const fit = fit_exponential(curve, opts);
            j = fit_to_json(fit);
            j["status"] = "ok";

            double const shift = cfg.hardening_shift_mph.value_or(
                shift_factor(fit, HardeningSpec::reduction(cfg.hardening_reduction)).shift_mph);
            auto const shifted = shifted_curve(fit, shift);
            std::ostringstream csv;
            csv << prov.csv_comment() << '\n';
            csv << "v,mean_rate,exposure,fit,shifted_fit\n";
            for (auto const& p : curve.points)
                csv << p.speed << ',' << fmt::format("{}", p.mean_rate) << ',' << p.exposure
                    << ',' << fmt::format("{}", fit(p.speed)) << ','
                    << fmt::format("{}", shifted(p.speed)) << '\n';
            write_text(paths.fit() / fmt::format("plot_{}.csv", name), csv.str());
        }
        catch (FitError const& e)
        {
            j = {{"status", "failed"}, {"error", e.what()}};
        }
        j["provenance"] = prov.to_json();
        j["area"] = la.id;
        j["weighted"] = cfg.weighted_fit;
        write_json(paths.fit() / fmt::format("fit_{}.json", name), j);
    }
}

void run_events(RunConfig const& cfg)
{
    set_thread_count(cfg.jobs);
    StagePaths const paths{cfg.out_dir};
    auto const prov = cfg.provenance();
    json summary = json::array();
    for (auto const& ae : area_events(cfg))
    {
        auto const name = safe_name(ae.loaded.id);
        std::ostringstream csv;
        csv << prov.csv_comment() << '\n';
        csv << "event,start,end,class";
        for (auto m : kAllMetrics)
            csv << ',' << metric_name(m);
        csv << '\n';

        std::vector<MetricVector> vecs;
        std::vector<SizeClass> classes;
        std::array<std::size_t, kSizeClassCount> counts{};
        for (std::size_t i = 0; i < ae.events.size(); ++i)
        {
            auto const& e = ae.events[i];
            auto const mv = metrics(e, cfg.rates);
            auto const cls = classify(e, cfg.thresholds);
            ++counts[class_index(cls)];
            csv << i << ',' << format_timestamp(static_cast<Minute>(e.first_outage())) << ','
                << format_timestamp(static_cast<Minute>(e.last_restore())) << ','
                << size_class_name(cls);
            for (auto m : kAllMetrics)
                csv << ',' << format_number(mv.get(m), 6);
            csv << '\n';
            vecs.push_back(mv);
            classes.push_back(cls);
        }
        write_text(paths.events() / fmt::format("events_{}.csv", name), csv.str());

        json j = {{"provenance", prov.to_json()},
                  {"area", ae.loaded.id},
                  {"events", ae.events.size()},
                  {"outages", ae.loaded.area.outages.size()},
                  {"class_counts",
                   {{"small", counts[0]}, {"medium", counts[1]}, {"large", counts[2]}}},
                  {"means", class_means_to_json(class_means(vecs, classes))}};
        write_json(paths.events() / fmt::format("means_{}.json", name), j);
        summary.push_back({{"area", ae.loaded.id}, {"events", ae.events.size()}});
    }
    write_json(paths.events() / "summary.json",
               {{"provenance", prov.to_json()}, {"areas", summary}});
}

void run_simulate(RunConfig const& cfg, SimulateMode mode)
{
    set_thread_count(cfg.jobs);
    StagePaths const paths{cfg.out_dir};
    auto const prov = cfg.provenance();
    require(paths.events() / "summary.json", "events");

    for (auto const& ae : area_events(cfg))
    {
        auto const name = safe_name(ae.loaded.id);
        auto emit = [&](CounterfactualResult const& r) {
            auto j = result_to_json(r);
            j["provenance"] = prov.to_json();
            j["area"] = ae.loaded.id;
            write_json(paths.simulate() / fmt::format("{}_{}.json", r.label, name), j);
        };

        switch (mode)
        {
        case SimulateMode::hardening: {
            auto const fit_file = paths.fit() / fmt::format("fit_{}.json", name);
            require(fit_file, "fit");
            auto const fj = read_json(fit_file);
            if (fj.value("status", "") != "ok")
                throw StageError{fmt::format("area {} has no usable fit ({}); rerun `windres fit`",
                                             ae.loaded.id, fj.value("error", "unknown"))};
            auto const fit = fit_from_json(fj);
            auto const spec = cfg.hardening_shift_mph
                                  ? HardeningSpec::shift(*cfg.hardening_shift_mph)
                                  : HardeningSpec::reduction(cfg.hardening_reduction);
            auto const wind = interpolate(ae.loaded.area.station);
            auto const bins = bin_outages(ae.loaded.area.outages, wind);
            emit(run_hardening({ae.events, &bins}, fit, spec, monte_carlo(cfg)));
            break;
        }
        case SimulateMode::earlier:
            emit(run_restoration(ae.events, RestorationSpec::earlier(cfg.t_earlier_hours),
                                 restoration_options(cfg)));
            break;
        case SimulateMode::faster:
            emit(run_restoration(ae.events, RestorationSpec::faster(cfg.c_faster),
                                 restoration_options(cfg)));
            break;
        case SimulateMode::calibrate: {
            json cal = {{"provenance", prov.to_json()},
                        {"area", ae.loaded.id},
                        {"target_reduction", cfg.calibrate_reduction},
                        {"metric", metric_name(cfg.calibrate_metric)},
                        {"class", size_class_name(cfg.calibrate_class)}};
            for (auto rm : {RestorationMode::earlier, RestorationMode::faster})
            {
                auto const key = std::string{restoration_mode_name(rm)};
                try
                {
                    double const p =
                        calibrate_target(ae.events, rm, cfg.calibrate_reduction,
                                         cfg.calibrate_metric, cfg.calibrate_class,
                                         restoration_options(cfg));
                    cal[key] = {{"status", "ok"}, {"parameter", p}};
                    emit(run_restoration(ae.events, RestorationSpec{rm, p},
                                         restoration_options(cfg)));
                }
                catch (CalibrationError const& e)
                {
                    cal[key] = {{"status", "unreachable"},
                                {"error", e.what()},
                                {"achieved", e.achieved()}};
                }
            }
            write_json(paths.simulate() / fmt::format("calibration_{}.json", name), cal);
            break;
        }
        }
    }
}

void run_report(RunConfig const& cfg)
{
    StagePaths const paths{cfg.out_dir};
    auto const prov = cfg.provenance();
    require(paths.events() / "summary.json", "events");
    auto const summary = read_json(paths.events() / "summary.json");

    json areas = json::array();
    for (auto const& a : summary.at("areas"))
    {
        auto const id = a.at("area").get<std::string>();
        auto const name = safe_name(id);
        auto const means_file = paths.events() / fmt::format("means_{}.json", name);
        require(means_file, "events");
        auto const base = class_means_from_json(read_json(means_file).at("means"));

        std::vector<CounterfactualResult> results;
        for (std::string_view label : {"hardening", "earlier", "faster"})
        {
            auto const f = paths.simulate() / fmt::format("{}_{}.json", label, name);
            if (fs::exists(f))
                results.push_back(result_from_json(read_json(f)));
        }

        std::ostringstream csv;
        write_summary_csv(csv, base, results, prov);
        write_text(paths.report() / fmt::format("report_{}.csv", name), csv.str());

        json cf = json::array();
        for (auto const& r : results)
            cf.push_back({{"label", r.label},
                          {"percent_change", class_table_to_json(r.percent_change)},
                          {"ci_half_width", class_table_to_json(r.half_width)},
                          {"replicates", r.replicates},
                          {"metadata", r.metadata},
                          {"warnings", r.warnings}});
        areas.push_back({{"area", id}, {"base", class_means_to_json(base)}, {"counterfactuals", cf}});
    }
    write_json(paths.report() / "report.json",
               {{"provenance", prov.to_json()}, {"config", cfg.to_json()}, {"areas", areas}});
}

} // namespace windres
