#pragma once

#include <cmath>
#include <cstddef>
#include <iosfwd>
#include <map>
#include <optional>
#include <span>
#include <stdexcept>
#include <vector>

#include <json.hpp>

#include "windres/execution.hpp"
#include "windres/ingest.hpp"

namespace windres
{

class DomainError : public std::domain_error
{
  public:
    using std::domain_error::domain_error;
};

/// Rounds to the nearest integer, halves upward.
inline long long round_half_up(double x)
{
    return static_cast<long long>(std::floor(x + 0.5));
}

/// Piecewise-linear wind speed V(t) through a station's samples.
class InterpolatedWind
{
  public:
    /// Requires at least two samples, strictly increasing in time.
    explicit InterpolatedWind(std::vector<WindSample> samples);

    /// V(t); throws DomainError outside [first_time(), last_time()].
    double at(double t) const;

    double first_time() const { return static_cast<double>(samples_.front().time); }
    double last_time() const { return static_cast<double>(samples_.back().time); }
    bool covers(double t) const { return t >= first_time() && t <= last_time(); }
    double max_speed() const;

    std::span<WindSample const> samples() const { return samples_; }

  private:
    std::vector<WindSample> samples_;
};

InterpolatedWind interpolate(Station const& station);

/// Times in ascending order where V(t) = v.
///
/// One time per strictly monotone segment crossing v. A segment lying flat
/// at v contributes every whole minute it spans. A sample time where V = v
/// is reported once, owned by the segment that ends there.
std::vector<double> level_set(InterpolatedWind const& wind, int v);

/// R(t): outages starting at each minute. Absent minutes have rate 0.
class OutageRateSeries
{
  public:
    void add(Minute t, std::size_t n = 1);
    std::size_t at(Minute t) const;
    std::size_t total() const;
    std::size_t max_count() const;
    std::map<Minute, std::size_t> const& counts() const { return counts_; }

  private:
    std::map<Minute, std::size_t> counts_;
};

OutageRateSeries rate_series(std::span<OutageRecord const> outages);
inline OutageRateSeries rate_series(Area const& area) { return rate_series(area.outages); }

struct RatePoint
{
    int speed = 0;           // mph
    double mean_rate = 0.0;  // outages per minute
    std::size_t exposure = 0; // |V^-1(v)|

    friend bool operator==(RatePoint const&, RatePoint const&) = default;
};

/// Mean outage rate per integer wind speed; speeds with no crossings are
/// omitted.
struct OutageRateCurve
{
    std::vector<RatePoint> points;

    friend bool operator==(OutageRateCurve const&, OutageRateCurve const&) = default;
};

/// Closed time interval, in minutes.
struct TimeWindow
{
    double begin = 0.0;
    double end = 0.0;
};

/// F(v) = sum over t in V^-1(v) of R(round t), divided by |V^-1(v)|, for
/// every integer v in [0, v_max]. When `window` is given, only crossing times
/// inside it count.
OutageRateCurve rate_curve(OutageRateSeries const& series, InterpolatedWind const& wind,
                           int v_max, std::optional<TimeWindow> window = std::nullopt,
                           Execution exec = Execution::parallel);

OutageRateCurve rate_curve(Area const& area, InterpolatedWind const& wind, int v_max,
                           Execution exec = Execution::parallel);

/// ceil of the largest sample speed.
int default_v_max(InterpolatedWind const& wind);

/// Window where both wind and outage data exist: the wind span clipped to
/// [first outage start, last outage start]. Nothing if there are no outages
/// or the spans do not meet.
std::optional<TimeWindow> common_coverage(InterpolatedWind const& wind,
                                          std::span<OutageRecord const> outages);

/// round(V(start)), halves up. Throws DomainError outside wind coverage.
int wind_at_outage(InterpolatedWind const& wind, OutageRecord const& outage);

void write_curve_csv(std::ostream& out, OutageRateCurve const& curve);
nlohmann::json curve_to_json(OutageRateCurve const& curve);
OutageRateCurve curve_from_json(nlohmann::json const& j);

} // namespace windres
