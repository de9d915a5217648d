#include "windres/ingest.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <numbers>
#include <ostream>

#include <fmt/format.h>

#include "windres/csv.hpp"

namespace windres
{

namespace
{

std::string trimmed(std::string const& s)
{
    auto const b = s.find_first_not_of(" \t");
    if (b == std::string::npos)
        return {};
    auto const e = s.find_last_not_of(" \t");
    return s.substr(b, e - b + 1);
}

std::optional<double> parse_double(std::string const& raw)
{
    auto const s = trimmed(raw);
    if (s.empty())
        return std::nullopt;
    double v = 0.0;
    auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc{} || ptr != s.data() + s.size() || !std::isfinite(v))
        return std::nullopt;
    return v;
}

std::optional<std::int64_t> parse_count(std::string const& raw)
{
    auto const s = trimmed(raw);
    if (s.empty())
        return std::nullopt;
    std::int64_t v = 0;
    auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec == std::errc{} && ptr == s.data() + s.size())
        return v;
    // Tolerate "12.0" style integers.
    auto d = parse_double(s);
    if (d && *d == std::floor(*d) && std::abs(*d) < 9e15)
        return static_cast<std::int64_t>(*d);
    return std::nullopt;
}

std::size_t require_column(CsvTable const& t, std::string const& name)
{
    auto c = t.column(name);
    if (!c)
        throw IngestError{"unparsable header: missing column '" + name + "'"};
    return *c;
}

std::string field(CsvRow const& row, std::size_t col)
{
    return col < row.fields.size() ? row.fields[col] : std::string{};
}

void apply_mapping(std::map<std::string, std::string> const& m,
                   std::map<std::string, std::string*> const& slots)
{
    for (auto const& [key, column] : m)
    {
        auto it = slots.find(key);
        if (it == slots.end())
            throw IngestError{"unknown schema key '" + key + "'"};
        *it->second = column;
    }
}

CsvTable read_table(std::filesystem::path const& path)
{
    try
    {
        return CsvTable::read(path);
    }
    catch (CsvError const& e)
    {
        throw IngestError{e.what()};
    }
}

CsvTable read_table(std::istream& in)
{
    try
    {
        return CsvTable::parse(in);
    }
    catch (CsvError const& e)
    {
        throw IngestError{e.what()};
    }
}

ParsedOutages outages_from_table(CsvTable const& t, OutageSchema const& schema)
{
    auto const c_id = require_column(t, schema.id);
    auto const c_lat = require_column(t, schema.latitude);
    auto const c_lon = require_column(t, schema.longitude);
    auto const c_start = require_column(t, schema.start);
    auto const c_restore = require_column(t, schema.restore);
    auto const c_cust = require_column(t, schema.customers);
    auto const c_cause = t.column(schema.cause_code);

    ParsedOutages out;
    for (auto const& row : t.rows())
    {
        auto const lat_s = trimmed(field(row, c_lat));
        auto const lon_s = trimmed(field(row, c_lon));
        if (lat_s.empty() || lon_s.empty())
        {
            out.rejections.add(reason::missing_location, row.line);
            continue;
        }
        auto lat = parse_double(lat_s);
        auto lon = parse_double(lon_s);
        if (!lat || !lon || *lat < -90.0 || *lat > 90.0 || *lon < -180.0 ||
            *lon > 180.0)
        {
            out.rejections.add(reason::invalid_location, row.line);
            continue;
        }
        auto start = parse_timestamp(field(row, c_start));
        auto restore = parse_timestamp(field(row, c_restore));
        if (!start || !restore)
        {
            out.rejections.add(reason::malformed_timestamp, row.line);
            continue;
        }
        if (*restore < *start)
        {
            out.rejections.add(reason::negative_duration, row.line);
            continue;
        }
        auto customers = parse_count(field(row, c_cust));
        if (!customers || *customers < 0)
        {
            out.rejections.add(reason::malformed_customers, row.line);
            continue;
        }
        OutageRecord rec;
        rec.id = trimmed(field(row, c_id));
        rec.location = {*lat, *lon};
        rec.start = *start;
        rec.restore = *restore;
        rec.customers = *customers;
        if (c_cause)
        {
            auto cause = field(row, *c_cause);
            if (!cause.empty())
                rec.cause_code = std::move(cause);
        }
        out.records.push_back(std::move(rec));
    }
    return out;
}

ParsedWind wind_from_table(CsvTable const& t, WindSchema const& schema,
                           std::string station_id, GeoPoint location)
{
    ParsedWind out;
    out.station.id = std::move(station_id);
    out.station.location = location;
    if (t.header().empty())
        throw IngestError{"insufficient samples"};

    auto const c_time = require_column(t, schema.time);
    auto const c_speed = require_column(t, schema.speed);

    std::vector<WindSample> raw;
    for (auto const& row : t.rows())
    {
        auto time = parse_timestamp(field(row, c_time));
        if (!time)
        {
            out.rejections.add(reason::malformed_timestamp, row.line);
            continue;
        }
        auto speed = parse_double(field(row, c_speed));
        if (!speed || *speed < 0.0)
        {
            out.rejections.add(reason::malformed_speed, row.line);
            continue;
        }
        raw.push_back({*time, *speed});
    }
    std::stable_sort(raw.begin(), raw.end(),
                     [](auto const& a, auto const& b) { return a.time < b.time; });

    auto& samples = out.station.samples;
    for (std::size_t i = 0; i < raw.size();)
    {
        std::size_t j = i;
        double sum = 0.0;
        while (j < raw.size() && raw[j].time == raw[i].time)
            sum += raw[j++].speed;
        samples.push_back({raw[i].time, sum / static_cast<double>(j - i)});
        i = j;
    }
    if (samples.size() < 2)
        throw IngestError{"insufficient samples"};
    return out;
}

} // namespace

void RejectionReport::add(std::string const& reason, std::size_t row)
{
    rows_[reason].push_back(row);
}

void RejectionReport::merge(RejectionReport const& other)
{
    for (auto const& [reason, rows] : other.rows_)
    {
        auto& mine = rows_[reason];
        mine.insert(mine.end(), rows.begin(), rows.end());
    }
}

std::size_t RejectionReport::total() const
{
    std::size_t n = 0;
    for (auto const& [_, rows] : rows_)
        n += rows.size();
    return n;
}

std::size_t RejectionReport::count(std::string const& reason) const
{
    auto it = rows_.find(reason);
    return it == rows_.end() ? 0 : it->second.size();
}

nlohmann::json RejectionReport::to_json() const
{
    auto out = nlohmann::json::array();
    for (auto const& [reason, rows] : rows_)
        out.push_back({{"reason", reason}, {"count", rows.size()}, {"rows", rows}});
    return out;
}

OutageSchema OutageSchema::with_mapping(std::map<std::string, std::string> const& m) const
{
    OutageSchema s = *this;
    apply_mapping(m, {{"id", &s.id},
                      {"latitude", &s.latitude},
                      {"longitude", &s.longitude},
                      {"start", &s.start},
                      {"restore", &s.restore},
                      {"customers", &s.customers},
                      {"cause_code", &s.cause_code}});
    return s;
}

WindSchema WindSchema::with_mapping(std::map<std::string, std::string> const& m) const
{
    WindSchema s = *this;
    apply_mapping(m, {{"time", &s.time}, {"speed", &s.speed}});
    return s;
}

ParsedOutages parse_outages(std::filesystem::path const& path, OutageSchema const& schema)
{
    return outages_from_table(read_table(path), schema);
}

ParsedOutages parse_outages(std::istream& in, OutageSchema const& schema)
{
    return outages_from_table(read_table(in), schema);
}

ParsedWind parse_wind(std::filesystem::path const& path, WindSchema const& schema,
                      std::string station_id, GeoPoint location)
{
    return wind_from_table(read_table(path), schema, std::move(station_id), location);
}

ParsedWind parse_wind(std::istream& in, WindSchema const& schema,
                      std::string station_id, GeoPoint location)
{
    return wind_from_table(read_table(in), schema, std::move(station_id), location);
}

std::vector<StationEntry> parse_station_list(std::filesystem::path const& path)
{
    auto const t = read_table(path);
    auto const c_id = require_column(t, "id");
    auto const c_lat = require_column(t, "latitude");
    auto const c_lon = require_column(t, "longitude");
    auto const c_file = require_column(t, "wind_file");
    std::vector<StationEntry> out;
    for (auto const& row : t.rows())
    {
        auto lat = parse_double(field(row, c_lat));
        auto lon = parse_double(field(row, c_lon));
        if (!lat || !lon)
            throw IngestError{fmt::format("{}:{}: station has no valid location",
                                          path.string(), row.line)};
        std::filesystem::path file = trimmed(field(row, c_file));
        if (file.is_relative())
            file = path.parent_path() / file;
        out.push_back({trimmed(field(row, c_id)), {*lat, *lon}, file});
    }
    return out;
}

double great_circle_km(GeoPoint a, GeoPoint b)
{
    constexpr double deg = std::numbers::pi / 180.0;
    double const phi1 = a.latitude * deg;
    double const phi2 = b.latitude * deg;
    double const dphi = (b.latitude - a.latitude) * deg;
    double const dlambda = (b.longitude - a.longitude) * deg;
    double const s1 = std::sin(dphi / 2.0);
    double const s2 = std::sin(dlambda / 2.0);
    double const h = s1 * s1 + std::cos(phi1) * std::cos(phi2) * s2 * s2;
    return 2.0 * kEarthRadiusKm * std::asin(std::min(1.0, std::sqrt(h)));
}

std::size_t nearest_station(GeoPoint p, std::span<Station const> stations)
{
    if (stations.empty())
        throw std::invalid_argument{"nearest_station: no stations"};
    std::size_t best = 0;
    double best_d = great_circle_km(p, stations[0].location);
    for (std::size_t s = 1; s < stations.size(); ++s)
    {
        double const d = great_circle_km(p, stations[s].location);
        if (d < best_d || (d == best_d && stations[s].id < stations[best].id))
        {
            best = s;
            best_d = d;
        }
    }
    return best;
}

std::vector<Area> associate_areas(std::span<OutageRecord const> outages,
                                  std::span<Station const> stations)
{
    if (stations.empty())
        throw std::invalid_argument{"associate_areas: no stations"};

    std::vector<std::size_t> owner(outages.size());
    auto const n = static_cast<std::int64_t>(outages.size());
#pragma omp parallel for schedule(static)
    for (std::int64_t i = 0; i < n; ++i)
        owner[i] = nearest_station(outages[i].location, stations);

    std::vector<std::size_t> order(stations.size());
    for (std::size_t s = 0; s < order.size(); ++s)
        order[s] = s;
    std::sort(order.begin(), order.end(), [&](auto x, auto y) {
        return stations[x].id < stations[y].id;
    });

    std::vector<Area> by_station(stations.size());
    for (std::size_t s = 0; s < stations.size(); ++s)
        by_station[s].station = stations[s];
    for (std::size_t i = 0; i < outages.size(); ++i)
        by_station[owner[i]].outages.push_back(outages[i]);

    std::vector<Area> areas;
    areas.reserve(stations.size());
    for (auto s : order)
        areas.push_back(std::move(by_station[s]));
    return areas;
}

FilteredArea filter_stale_outages(Area area, Minute max_gap)
{
    if (max_gap <= 0)
        throw std::invalid_argument{"filter_stale_outages: max_gap must be positive"};
    FilteredArea out;
    out.area.station = std::move(area.station);
    auto const& s = out.area.station.samples;
    if (s.empty())
    {
        for (std::size_t i = 0; i < area.outages.size(); ++i)
            out.rejected.add(reason::outside_wind, i);
        return out;
    }
    for (std::size_t i = 0; i < area.outages.size(); ++i)
    {
        Minute const t = area.outages[i].start;
        auto it = std::lower_bound(s.begin(), s.end(), t,
                                   [](auto const& w, Minute x) { return w.time < x; });
        Minute gap = std::numeric_limits<Minute>::max();
        if (it != s.end())
            gap = it->time - t;
        if (it != s.begin())
            gap = std::min(gap, t - std::prev(it)->time);
        if (gap > max_gap)
            out.rejected.add(reason::stale_wind, i);
        else if (t < s.front().time || t > s.back().time)
            out.rejected.add(reason::outside_wind, i);
        else
            out.area.outages.push_back(std::move(area.outages[i]));
    }
    return out;
}

void write_outages_csv(std::ostream& out, std::span<OutageRecord const> records)
{
    out << "id,latitude,longitude,start,restore,customers,cause_code\n";
    for (auto const& r : records)
    {
        out << csv_escape(r.id) << ',' << fmt::format("{}", r.location.latitude) << ','
            << fmt::format("{}", r.location.longitude) << ',' << format_timestamp(r.start)
            << ',' << format_timestamp(r.restore) << ',' << r.customers << ','
            << csv_escape(r.cause_code.value_or("")) << '\n';
    }
}

void write_wind_csv(std::ostream& out, std::span<WindSample const> samples)
{
    out << "time,speed\n";
    for (auto const& w : samples)
        out << format_timestamp(w.time) << ',' << fmt::format("{}", w.speed) << '\n';
}

} // namespace windres
