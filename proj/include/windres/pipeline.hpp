#pragma once

#include <cstddef>
#include <filesystem>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "windres/curvefit.hpp"
#include "windres/events.hpp"
#include "windres/hardening.hpp"
#include "windres/report.hpp"
#include "windres/restoration.hpp"
#include "windres/synthgen.hpp"

namespace windres
{

/// A stage could not find what an earlier stage writes.
class StageError : public std::runtime_error
{
  public:
    using std::runtime_error::runtime_error;
};

struct RunConfig
{
    std::filesystem::path outages_csv;
    std::filesystem::path stations_csv;
    std::filesystem::path out_dir = "out";
    std::map<std::string, std::string> outage_columns;
    std::map<std::string, std::string> wind_columns;
    Minute max_gap = kDefaultMaxGap;
    SizeThresholds thresholds{};
    bool weighted_fit = false;
    RateConvention rates = RateConvention::absent;

    double hardening_reduction = 0.10;
    std::optional<double> hardening_shift_mph; // overrides the reduction
    MonteCarloConfig monte_carlo{}; // its seed is replaced by `seed`

    double t_earlier_hours = 2.84;
    double c_faster = 0.9385;
    Regrouping regrouping = Regrouping::keep_original;
    double calibrate_reduction = 0.10;
    Metric calibrate_metric = Metric::outage_hours;
    SizeClass calibrate_class = SizeClass::large;

    ScenarioSpec scenario{}; // its seed and station are replaced per area
    std::size_t synth_areas = 1;

    std::uint64_t seed = 2023; // drives synth and Monte Carlo streams
    int jobs = 0;              // 0: OpenMP default

    /// Every setting that affects results. Excludes out_dir and jobs, so a
    /// relocated or differently threaded run hashes the same.
    nlohmann::json to_json() const;
    std::string hash() const;
    std::string mode_flags() const;
    Provenance provenance() const;
};

/// One artifact directory per stage under `out_dir`.
struct StagePaths
{
    std::filesystem::path root;

    std::filesystem::path ingest() const { return root / "ingest"; }
    std::filesystem::path curve() const { return root / "curve"; }
    std::filesystem::path fit() const { return root / "fit"; }
    std::filesystem::path events() const { return root / "events"; }
    std::filesystem::path simulate() const { return root / "simulate"; }
    std::filesystem::path report() const { return root / "report"; }
    std::filesystem::path synth() const { return root / "synth"; }
};

/// Generates `synth_areas` stations and their outages; writes
/// outages.csv, stations.csv, wind_<id>.csv and truth.json into `dir`.
void run_synth(RunConfig const& cfg, std::filesystem::path const& dir);

void run_ingest(RunConfig const& cfg);
void run_curve(RunConfig const& cfg);
void run_fit(RunConfig const& cfg);
void run_events(RunConfig const& cfg);

enum class SimulateMode
{
    hardening,
    earlier,
    faster,
    calibrate,
};

std::optional<SimulateMode> simulate_mode_from_name(std::string_view name);

void run_simulate(RunConfig const& cfg, SimulateMode mode);
void run_report(RunConfig const& cfg);

/// An area as reloaded from the ingest artifacts.
struct LoadedArea
{
    std::string id;
    Area area;
};

std::vector<LoadedArea> load_areas(RunConfig const& cfg);

/// Filesystem-safe form of an identifier.
std::string safe_name(std::string_view id);

} // namespace windres
