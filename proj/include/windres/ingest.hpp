#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "windres/time.hpp"

namespace windres
{

class IngestError : public std::runtime_error
{
  public:
    using std::runtime_error::runtime_error;
};

struct GeoPoint
{
    double latitude = 0.0;  // degrees, [-90, 90]
    double longitude = 0.0; // degrees, [-180, 180]

    friend bool operator==(GeoPoint const&, GeoPoint const&) = default;
};

/// One component outage.
struct OutageRecord
{
    std::string id;
    GeoPoint location;
    Minute start = 0;
    Minute restore = 0; // >= start
    std::int64_t customers = 0;
    std::optional<std::string> cause_code;

    friend bool operator==(OutageRecord const&, OutageRecord const&) = default;
};

struct WindSample
{
    Minute time = 0;
    double speed = 0.0; // mph, >= 0

    friend bool operator==(WindSample const&, WindSample const&) = default;
};

struct Station
{
    std::string id;
    GeoPoint location;
    std::vector<WindSample> samples; // strictly increasing in time
};

/// The outages whose nearest station is `station`.
struct Area
{
    Station station;
    std::vector<OutageRecord> outages;
};

/// Row-level rejections, grouped by reason. Serializes as
/// `[{"reason": ..., "count": ..., "rows": [...]}, ...]`.
class RejectionReport
{
  public:
    void add(std::string const& reason, std::size_t row);
    void merge(RejectionReport const& other);

    std::size_t total() const;
    std::size_t count(std::string const& reason) const;
    std::map<std::string, std::vector<std::size_t>> const& by_reason() const
    {
        return rows_;
    }

    nlohmann::json to_json() const;

  private:
    std::map<std::string, std::vector<std::size_t>> rows_;
};

namespace reason
{
inline constexpr char const* missing_location = "missing location";
inline constexpr char const* invalid_location = "invalid location";
inline constexpr char const* malformed_timestamp = "malformed timestamp";
inline constexpr char const* negative_duration = "negative duration";
inline constexpr char const* malformed_customers = "malformed customers";
inline constexpr char const* malformed_speed = "malformed speed";
inline constexpr char const* stale_wind = "stale wind sample";
inline constexpr char const* outside_wind = "outside wind coverage";
} // namespace reason

/// Column names for the outage CSV. Keys accepted by `with_mapping`:
/// id, latitude, longitude, start, restore, customers, cause_code.
struct OutageSchema
{
    std::string id = "id";
    std::string latitude = "latitude";
    std::string longitude = "longitude";
    std::string start = "start";
    std::string restore = "restore";
    std::string customers = "customers";
    std::string cause_code = "cause_code"; // optional column

    OutageSchema with_mapping(std::map<std::string, std::string> const& m) const;
};

/// Column names for a wind CSV. Keys: time, speed.
struct WindSchema
{
    std::string time = "time";
    std::string speed = "speed";

    WindSchema with_mapping(std::map<std::string, std::string> const& m) const;
};

struct ParsedOutages
{
    std::vector<OutageRecord> records;
    RejectionReport rejections;
};

/// Throws IngestError for an unreadable file or a header missing a required
/// column. Bad rows are rejected with a reason and a line number.
ParsedOutages parse_outages(std::filesystem::path const& path,
                            OutageSchema const& schema = {});
ParsedOutages parse_outages(std::istream& in, OutageSchema const& schema = {});

struct ParsedWind
{
    Station station;
    RejectionReport rejections;
};

/// Samples come back sorted; duplicate timestamps collapse to their mean.
/// Throws IngestError("insufficient samples") with fewer than two valid rows.
ParsedWind parse_wind(std::filesystem::path const& path, WindSchema const& schema,
                      std::string station_id, GeoPoint location);
ParsedWind parse_wind(std::istream& in, WindSchema const& schema,
                      std::string station_id, GeoPoint location);

/// Station list CSV: `id,latitude,longitude,wind_file`; wind_file is
/// resolved relative to the list's directory.
struct StationEntry
{
    std::string id;
    GeoPoint location;
    std::filesystem::path wind_file;
};
std::vector<StationEntry> parse_station_list(std::filesystem::path const& path);

inline constexpr double kEarthRadiusKm = 6371.0088;

/// Haversine distance on a sphere of radius kEarthRadiusKm.
double great_circle_km(GeoPoint a, GeoPoint b);

/// Index into `stations` of the nearest station, ties to the smaller id.
std::size_t nearest_station(GeoPoint p, std::span<Station const> stations);

/// One area per station, ordered by station id. Every outage lands in
/// exactly one area.
std::vector<Area> associate_areas(std::span<OutageRecord const> outages,
                                  std::span<Station const> stations);

inline constexpr Minute kDefaultMaxGap = 201;

struct FilteredArea
{
    Area area;
    RejectionReport rejected; // rows are indices into the input area's outages
};

/// Drops outages whose start is more than `max_gap` minutes from the nearest
/// wind sample, or outside the station's sample span.
FilteredArea filter_stale_outages(Area area, Minute max_gap = kDefaultMaxGap);

void write_outages_csv(std::ostream& out, std::span<OutageRecord const> records);
void write_wind_csv(std::ostream& out, std::span<WindSample const> samples);

} // namespace windres
