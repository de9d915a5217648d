#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include <json.hpp>

#include "windres/ingest.hpp"

namespace windres
{

/// Mean-reverting hourly wind plus a Gaussian storm bump; overlapping
/// storms take the larger bump.
struct WindModel
{
    double mean_mph = 8.0;
    double reversion_per_hour = 0.1;
    double volatility = 1.0; // mph per sqrt(hour)
    double storms_per_year = 10.0; // Poisson count over the scenario
    double storm_peak_mph = 24.0;
    double storm_width_hours = 6.0;
};

/// Outage rate a * exp(b * V(t)) per minute.
struct OutageModel
{
    double a = 2e-5;
    double b = 0.48;
};

/// Lognormal restore durations; the median scales by exp(wind_coupling * V).
struct RestoreModel
{
    double median_minutes = 120.0;
    double shape = 0.8;
    double wind_coupling = 0.0;
};

struct CustomerModel
{
    std::vector<std::int64_t> values{1, 4, 12, 40, 150};
    std::vector<double> weights{0.30, 0.30, 0.20, 0.15, 0.05};
};

struct ScenarioSpec
{
    double days = 365.0;
    WindModel wind;
    OutageModel outages;
    RestoreModel restore;
    CustomerModel customers;
    std::uint64_t seed = 1;
    std::string station_id = "S1";
    GeoPoint station_location{42.03, -93.62};
    double spread_km = 5.0;
    Minute epoch = 23667840; // 2015-01-01T00:00Z

    /// Throws std::invalid_argument on non-positive scales or durations.
    void validate() const;
};

/// Hourly samples over the scenario, clamped at 0.
Station gen_wind(ScenarioSpec const& spec);

/// Minute-by-minute Poisson outages at rate a exp(b V(t)).
Area gen_outages(ScenarioSpec const& spec, Station const& station);

nlohmann::json scenario_to_json(ScenarioSpec const& spec);
ScenarioSpec scenario_from_json(nlohmann::json const& j);

/// Generator parameters plus realized counts.
nlohmann::json ground_truth(ScenarioSpec const& spec, Area const& area);

} // namespace windres
