#include "windres/synthgen.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

#include <fmt/format.h>

#include "windres/rng.hpp"

namespace windres
{

void ScenarioSpec::validate() const
{
    if (!(days >= 1.0))
        throw std::invalid_argument{"scenario duration must be at least one day"};
    if (wind.mean_mph < 0 || wind.reversion_per_hour <= 0 || wind.volatility < 0 ||
        wind.storm_peak_mph < 0 || wind.storms_per_year < 0 || wind.storm_width_hours <= 0)
        throw std::invalid_argument{"wind model parameters out of range"};
    if (outages.a < 0 || !std::isfinite(outages.b))
        throw std::invalid_argument{"outage model parameters out of range"};
    if (restore.median_minutes <= 0 || restore.shape < 0)
        throw std::invalid_argument{"restore model parameters out of range"};
    if (customers.values.empty() || customers.values.size() != customers.weights.size())
        throw std::invalid_argument{"customer model needs matching values and weights"};
    double total = 0;
    for (std::size_t i = 0; i < customers.values.size(); ++i)
    {
        if (customers.values[i] < 0 || customers.weights[i] < 0)
            throw std::invalid_argument{"customer model entries must be nonnegative"};
        total += customers.weights[i];
    }
    if (!(total > 0))
        throw std::invalid_argument{"customer weights sum to zero"};
    if (spread_km < 0)
        throw std::invalid_argument{"spread_km must be nonnegative"};
}

Station gen_wind(ScenarioSpec const& spec)
{
    spec.validate();
    auto rng = RandomStream::substream(spec.seed, 1);
    auto const& w = spec.wind;
    auto const hours = static_cast<std::size_t>(std::llround(spec.days * 24.0));

    std::vector<double> storm_centers;
    auto const storms = rng.poisson(w.storms_per_year * spec.days / 365.0);
    for (std::uint64_t s = 0; s < storms; ++s)
        storm_centers.push_back(static_cast<double>(rng.below(hours + 1)));
    std::sort(storm_centers.begin(), storm_centers.end());

    Station station;
    station.id = spec.station_id;
    station.location = spec.station_location;
    station.samples.reserve(hours + 1);
    double base = w.mean_mph;
    double const reach = 6.0 * w.storm_width_hours;
    for (std::size_t h = 0; h <= hours; ++h)
    {
        double bump = 0.0;
        auto const hd = static_cast<double>(h);
        auto lo = std::lower_bound(storm_centers.begin(), storm_centers.end(), hd - reach);
        for (auto it = lo; it != storm_centers.end() && *it <= hd + reach; ++it)
        {
            double const z = (hd - *it) / w.storm_width_hours;
            bump = std::max(bump, (w.storm_peak_mph - w.mean_mph) * std::exp(-0.5 * z * z));
        }
        station.samples.push_back(
            {spec.epoch + static_cast<Minute>(h) * 60, std::max(0.0, base + bump)});
        base += w.reversion_per_hour * (w.mean_mph - base) + w.volatility * rng.normal();
    }
    return station;
}

Area gen_outages(ScenarioSpec const& spec, Station const& station)
{
    spec.validate();
    if (station.samples.size() < 2)
        throw std::invalid_argument{"gen_outages: station needs at least two samples"};
    auto rng = RandomStream::substream(spec.seed, 2);

    std::vector<double> cdf;
    double total = 0;
    for (double wt : spec.customers.weights)
        cdf.push_back(total += wt);

    Area area;
    area.station = station;
    if (spec.outages.a == 0.0)
        return area;

    constexpr double km_per_degree = 111.2;
    double const cos_lat = std::cos(station.location.latitude * std::numbers::pi / 180.0);
    auto const& s = station.samples;
    std::size_t seq = 0;
    std::size_t seg = 0;
    for (Minute t = s.front().time; t <= s.back().time; ++t)
    {
        while (seg + 2 < s.size() && s[seg + 1].time <= t)
            ++seg;
        double const frac =
            static_cast<double>(t - s[seg].time) / static_cast<double>(s[seg + 1].time - s[seg].time);
        double const v = s[seg].speed + (s[seg + 1].speed - s[seg].speed) * frac;
        auto const k = rng.poisson(spec.outages.a * std::exp(spec.outages.b * v));
        for (std::uint64_t j = 0; j < k; ++j)
        {
            double const median =
                spec.restore.median_minutes * std::exp(spec.restore.wind_coupling * v);
            double const dur = median * std::exp(spec.restore.shape * rng.normal());
            Minute const minutes = std::max<Minute>(1, std::llround(dur));

            double const u = rng.uniform() * total;
            auto const ci = static_cast<std::size_t>(
                std::upper_bound(cdf.begin(), cdf.end(), u) - cdf.begin());
            auto const customers = spec.customers.values[std::min(ci, cdf.size() - 1)];

            double const r = spec.spread_km * std::sqrt(rng.uniform());
            double const theta = 2.0 * std::numbers::pi * rng.uniform();
            GeoPoint loc{station.location.latitude + r * std::sin(theta) / km_per_degree,
                         station.location.longitude +
                             r * std::cos(theta) / (km_per_degree * std::max(cos_lat, 1e-6))};

            OutageRecord o;
            o.id = fmt::format("{}-{:07d}", spec.station_id, seq++);
            o.location = loc;
            o.start = t;
            o.restore = t + minutes;
            o.customers = customers;
            area.outages.push_back(std::move(o));
        }
    }
    return area;
}

nlohmann::json scenario_to_json(ScenarioSpec const& spec)
{
    return {
        {"days", spec.days},
        {"seed", spec.seed},
        {"station_id", spec.station_id},
        {"station_latitude", spec.station_location.latitude},
        {"station_longitude", spec.station_location.longitude},
        {"spread_km", spec.spread_km},
        {"epoch_minute", spec.epoch},
        {"wind",
         {{"mean_mph", spec.wind.mean_mph},
          {"reversion_per_hour", spec.wind.reversion_per_hour},
          {"volatility", spec.wind.volatility},
          {"storms_per_year", spec.wind.storms_per_year},
          {"storm_peak_mph", spec.wind.storm_peak_mph},
          {"storm_width_hours", spec.wind.storm_width_hours}}},
        {"outages", {{"a", spec.outages.a}, {"b", spec.outages.b}}},
        {"restore",
         {{"median_minutes", spec.restore.median_minutes},
          {"shape", spec.restore.shape},
          {"wind_coupling", spec.restore.wind_coupling}}},
        {"customers", {{"values", spec.customers.values}, {"weights", spec.customers.weights}}},
    };
}

ScenarioSpec scenario_from_json(nlohmann::json const& j)
{
    ScenarioSpec s;
    s.days = j.value("days", s.days);
    s.seed = j.value("seed", s.seed);
    s.station_id = j.value("station_id", s.station_id);
    s.station_location.latitude = j.value("station_latitude", s.station_location.latitude);
    s.station_location.longitude = j.value("station_longitude", s.station_location.longitude);
    s.spread_km = j.value("spread_km", s.spread_km);
    s.epoch = j.value("epoch_minute", s.epoch);
    if (j.contains("wind"))
    {
        auto const& w = j["wind"];
        s.wind.mean_mph = w.value("mean_mph", s.wind.mean_mph);
        s.wind.reversion_per_hour = w.value("reversion_per_hour", s.wind.reversion_per_hour);
        s.wind.volatility = w.value("volatility", s.wind.volatility);
        s.wind.storms_per_year = w.value("storms_per_year", s.wind.storms_per_year);
        s.wind.storm_peak_mph = w.value("storm_peak_mph", s.wind.storm_peak_mph);
        s.wind.storm_width_hours = w.value("storm_width_hours", s.wind.storm_width_hours);
    }
    if (j.contains("outages"))
    {
        s.outages.a = j["outages"].value("a", s.outages.a);
        s.outages.b = j["outages"].value("b", s.outages.b);
    }
    if (j.contains("restore"))
    {
        auto const& r = j["restore"];
        s.restore.median_minutes = r.value("median_minutes", s.restore.median_minutes);
        s.restore.shape = r.value("shape", s.restore.shape);
        s.restore.wind_coupling = r.value("wind_coupling", s.restore.wind_coupling);
    }
    if (j.contains("customers"))
    {
        s.customers.values = j["customers"].at("values").get<std::vector<std::int64_t>>();
        s.customers.weights = j["customers"].at("weights").get<std::vector<double>>();
    }
    s.validate();
    return s;
}

nlohmann::json ground_truth(ScenarioSpec const& spec, Area const& area)
{
    return {{"scenario", scenario_to_json(spec)},
            {"a", spec.outages.a},
            {"b", spec.outages.b},
            {"outages", area.outages.size()},
            {"wind_samples", area.station.samples.size()}};
}

} // namespace windres
