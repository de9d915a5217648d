#include <cstdlib>
#include <iostream>
#include <map>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "windres/pipeline.hpp"

using namespace windres;

namespace
{

std::map<std::string, std::string> parse_mapping(std::vector<std::string> const& items)
{
    std::map<std::string, std::string> out;
    for (auto const& item : items)
    {
        auto const eq = item.find('=');
        if (eq == std::string::npos || eq == 0 || eq + 1 == item.size())
            throw std::invalid_argument{"column mapping '" + item + "' is not key=column"};
        out[item.substr(0, eq)] = item.substr(eq + 1);
    }
    return out;
}

struct Flags
{
    std::string outages;
    std::string stations;
    std::string out = "out";
    std::vector<std::string> outage_columns;
    std::vector<std::string> wind_columns;
    std::string rates = "absent";
    std::string sampling = "without_replacement";
    std::string regrouping = "keep_original";
    std::string calibrate_metric = "outage_hours";
    std::string calibrate_class = "large";
    double shift_mph = 0.0;
    bool no_adaptive = false;
};

template <typename T>
void add(CLI::App& app, std::string const& name, T& value, std::string const& help,
         std::string const& env)
{
    app.add_option(name, value, help)->envname("WINDRES_" + env)->capture_default_str();
}

} // namespace

int main(int argc, char** argv)
{
    CLI::App app{"Wind resilience analysis of distribution outages"};
    app.set_config("--config", "", "TOML or INI file with option defaults");
    app.require_subcommand(1);

    RunConfig cfg;
    Flags f;

    add(app, "--outages", f.outages, "Outage CSV (default <out>/synth/outages.csv)", "OUTAGES");
    add(app, "--stations", f.stations,
        "Station list CSV: id,latitude,longitude,wind_file (default <out>/synth/stations.csv)",
        "STATIONS");
    add(app, "--out", f.out, "Output directory", "OUT");
    add(app, "--seed", cfg.seed, "Seed for synthesis and Monte Carlo", "SEED");
    add(app, "--jobs", cfg.jobs, "Worker threads (0: all cores)", "JOBS");
    add(app, "--outage-column", f.outage_columns, "Outage column mapping key=column",
        "OUTAGE_COLUMN");
    add(app, "--wind-column", f.wind_columns, "Wind column mapping key=column", "WIND_COLUMN");
    add(app, "--max-gap", cfg.max_gap, "Largest wind sample gap in minutes", "MAX_GAP");
    add(app, "--small-max", cfg.thresholds.small_max, "Largest small event", "SMALL_MAX");
    add(app, "--medium-max", cfg.thresholds.medium_max, "Largest medium event", "MEDIUM_MAX");
    app.add_flag("--weighted-fit", cfg.weighted_fit, "Weight curve points by exposure")
        ->envname("WINDRES_WEIGHTED_FIT");
    add(app, "--rates", f.rates, "Undefined rate handling: absent|zero", "RATES");

    add(app, "--reduction", cfg.hardening_reduction, "Hardening outage-rate reduction",
        "REDUCTION");
    add(app, "--shift-mph", f.shift_mph, "Hardening shift in mph (overrides --reduction)",
        "SHIFT_MPH");
    add(app, "--replicates", cfg.monte_carlo.replicates, "Monte Carlo replicates", "REPLICATES");
    add(app, "--half-width", cfg.monte_carlo.half_width, "Target CI half-width", "HALF_WIDTH");
    add(app, "--confidence", cfg.monte_carlo.confidence, "CI confidence", "CONFIDENCE");
    add(app, "--max-factor", cfg.monte_carlo.max_factor, "Replicate growth cap", "MAX_FACTOR");
    app.add_flag("--no-adaptive", f.no_adaptive, "Keep the replicate count fixed")
        ->envname("WINDRES_NO_ADAPTIVE");
    add(app, "--sampling", f.sampling, "without_replacement|with_replacement", "SAMPLING");

    add(app, "--t-earlier", cfg.t_earlier_hours, "Earlier restoration in hours", "T_EARLIER");
    add(app, "--c-faster", cfg.c_faster, "Faster restoration factor", "C_FASTER");
    add(app, "--regrouping", f.regrouping, "keep_original|re_extract", "REGROUPING");
    add(app, "--calibrate-reduction", cfg.calibrate_reduction, "Calibration target reduction",
        "CALIBRATE_REDUCTION");
    add(app, "--calibrate-metric", f.calibrate_metric, "Calibration metric",
        "CALIBRATE_METRIC");
    add(app, "--calibrate-class", f.calibrate_class, "Calibration size class",
        "CALIBRATE_CLASS");

    auto& sc = cfg.scenario;
    add(app, "--days", sc.days, "Synthetic days per area", "DAYS");
    add(app, "--areas", cfg.synth_areas, "Synthetic areas", "AREAS");
    add(app, "--wind-mean", sc.wind.mean_mph, "Synthetic mean wind (mph)", "WIND_MEAN");
    add(app, "--wind-reversion", sc.wind.reversion_per_hour, "Synthetic wind reversion per hour",
        "WIND_REVERSION");
    add(app, "--wind-volatility", sc.wind.volatility, "Synthetic wind volatility",
        "WIND_VOLATILITY");
    add(app, "--storms-per-year", sc.wind.storms_per_year, "Synthetic storm frequency",
        "STORMS_PER_YEAR");
    add(app, "--storm-peak", sc.wind.storm_peak_mph, "Synthetic storm peak (mph)", "STORM_PEAK");
    add(app, "--storm-width", sc.wind.storm_width_hours, "Synthetic storm width (hours)",
        "STORM_WIDTH");
    add(app, "--rate-a", sc.outages.a, "Synthetic outage rate a", "RATE_A");
    add(app, "--rate-b", sc.outages.b, "Synthetic outage rate b", "RATE_B");
    add(app, "--restore-median", sc.restore.median_minutes, "Synthetic restore median (minutes)",
        "RESTORE_MEDIAN");
    add(app, "--restore-shape", sc.restore.shape, "Synthetic restore lognormal shape",
        "RESTORE_SHAPE");

    std::string synth_dir;
    auto* synth = app.add_subcommand("synth", "Generate a synthetic scenario");
    synth->add_option("--dir", synth_dir, "Output directory (default <out>/synth)");
    auto* ingest = app.add_subcommand("ingest", "Parse, associate and filter outages");
    auto* curve = app.add_subcommand("curve", "Outage rate versus wind speed");
    auto* fit = app.add_subcommand("fit", "Fit the exponential rate curve");
    auto* events = app.add_subcommand("events", "Extract events and base metrics");
    std::string mode_name;
    auto* simulate = app.add_subcommand("simulate", "Run a counterfactual");
    simulate->add_option("mode", mode_name, "hardening|earlier|faster|calibrate")
        ->required()
        ->check(CLI::IsMember({"hardening", "earlier", "faster", "calibrate"}));
    auto* report = app.add_subcommand("report", "Assemble the summary report");

    CLI11_PARSE(app, argc, argv);

    auto const* cmd = app.get_subcommands().front();
    try
    {
        cfg.out_dir = f.out;
        cfg.outages_csv = f.outages.empty() ? cfg.out_dir / "synth" / "outages.csv"
                                            : std::filesystem::path{f.outages};
        cfg.stations_csv = f.stations.empty() ? cfg.out_dir / "synth" / "stations.csv"
                                              : std::filesystem::path{f.stations};
        cfg.outage_columns = parse_mapping(f.outage_columns);
        cfg.wind_columns = parse_mapping(f.wind_columns);
        if (cfg.thresholds.small_max >= cfg.thresholds.medium_max)
            throw std::invalid_argument{"--small-max must be below --medium-max"};
        if (f.rates != "absent" && f.rates != "zero")
            throw std::invalid_argument{"--rates must be absent or zero"};
        cfg.rates = f.rates == "zero" ? RateConvention::zero : RateConvention::absent;
        if (f.sampling != "without_replacement" && f.sampling != "with_replacement")
            throw std::invalid_argument{"--sampling must be without_replacement or with_replacement"};
        cfg.monte_carlo.mode = f.sampling == "with_replacement" ? SamplingMode::with_replacement
                                                                : SamplingMode::without_replacement;
        cfg.monte_carlo.adaptive = !f.no_adaptive;
        if (f.regrouping != "keep_original" && f.regrouping != "re_extract")
            throw std::invalid_argument{"--regrouping must be keep_original or re_extract"};
        cfg.regrouping =
            f.regrouping == "re_extract" ? Regrouping::re_extract : Regrouping::keep_original;
        if (app.count("--shift-mph") > 0 || std::getenv("WINDRES_SHIFT_MPH") != nullptr)
            cfg.hardening_shift_mph = f.shift_mph;
        auto const metric = metric_from_name(f.calibrate_metric);
        if (!metric)
            throw std::invalid_argument{"unknown metric '" + f.calibrate_metric + "'"};
        cfg.calibrate_metric = *metric;
        auto const cls = size_class_from_name(f.calibrate_class);
        if (!cls)
            throw std::invalid_argument{"unknown size class '" + f.calibrate_class + "'"};
        cfg.calibrate_class = *cls;

        if (cmd == synth)
        {
            cfg.scenario.validate();
            run_synth(cfg, synth_dir.empty() ? StagePaths{cfg.out_dir}.synth()
                                             : std::filesystem::path{synth_dir});
        }
        else if (cmd == ingest)
            run_ingest(cfg);
        else if (cmd == curve)
            run_curve(cfg);
        else if (cmd == fit)
            run_fit(cfg);
        else if (cmd == events)
            run_events(cfg);
        else if (cmd == simulate)
            run_simulate(cfg, *simulate_mode_from_name(mode_name));
        else if (cmd == report)
            run_report(cfg);
    }
    catch (std::exception const& e)
    {
        std::cerr << "windres " << cmd->get_name() << ": error: " << e.what() << '\n';
        return 1;
    }
    return 0;
}
