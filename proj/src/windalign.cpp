#include "windres/windalign.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>

#include <fmt/format.h>

namespace windres
{

InterpolatedWind::InterpolatedWind(std::vector<WindSample> samples)
    : samples_(std::move(samples))
{
    if (samples_.size() < 2)
        throw std::invalid_argument{"interpolate: need at least two samples"};
    for (std::size_t i = 1; i < samples_.size(); ++i)
        if (samples_[i].time <= samples_[i - 1].time)
            throw std::invalid_argument{"interpolate: sample times must increase"};
}

double InterpolatedWind::at(double t) const
{
    if (!covers(t))
        throw DomainError{fmt::format("wind queried at minute {} outside [{}, {}]", t,
                                      first_time(), last_time())};
    auto it = std::upper_bound(samples_.begin(), samples_.end(), t,
                               [](double x, auto const& w) { return x < w.time; });
    if (it == samples_.end())
        return samples_.back().speed;
    auto const& hi = *it;
    auto const& lo = *std::prev(it);
    double const frac = (t - static_cast<double>(lo.time)) /
                        static_cast<double>(hi.time - lo.time);
    return lo.speed + (hi.speed - lo.speed) * frac;
}

double InterpolatedWind::max_speed() const
{
    double m = 0.0;
    for (auto const& w : samples_)
        m = std::max(m, w.speed);
    return m;
}

InterpolatedWind interpolate(Station const& station)
{
    return InterpolatedWind{station.samples};
}

std::vector<double> level_set(InterpolatedWind const& wind, int v)
{
    std::vector<double> times;
    auto const s = wind.samples();
    double const level = v;
    for (std::size_t i = 0; i + 1 < s.size(); ++i)
    {
        auto const t0 = s[i].time;
        auto const t1 = s[i + 1].time;
        double const v0 = s[i].speed;
        double const v1 = s[i + 1].speed;
        if (v0 == level && v1 == level)
        {
            for (Minute m = (i == 0 ? t0 : t0 + 1); m <= t1; ++m)
                times.push_back(static_cast<double>(m));
        }
        else if ((v0 - level) * (v1 - level) <= 0.0)
        {
            if (v0 == level)
            {
                if (i == 0)
                    times.push_back(static_cast<double>(t0));
            }
            else if (v1 == level)
            {
                times.push_back(static_cast<double>(t1));
            }
            else
            {
                times.push_back(static_cast<double>(t0) +
                                (level - v0) * static_cast<double>(t1 - t0) / (v1 - v0));
            }
        }
    }
    return times;
}

void OutageRateSeries::add(Minute t, std::size_t n)
{
    if (n > 0)
        counts_[t] += n;
}

std::size_t OutageRateSeries::at(Minute t) const
{
    auto it = counts_.find(t);
    return it == counts_.end() ? 0 : it->second;
}

std::size_t OutageRateSeries::total() const
{
    std::size_t n = 0;
    for (auto const& [_, c] : counts_)
        n += c;
    return n;
}

std::size_t OutageRateSeries::max_count() const
{
    std::size_t n = 0;
    for (auto const& [_, c] : counts_)
        n = std::max(n, c);
    return n;
}

OutageRateSeries rate_series(std::span<OutageRecord const> outages)
{
    OutageRateSeries series;
    for (auto const& o : outages)
        series.add(o.start);
    return series;
}

namespace
{

std::optional<RatePoint> curve_point(OutageRateSeries const& series,
                                     InterpolatedWind const& wind, int v,
                                     std::optional<TimeWindow> const& window)
{
    std::size_t exposure = 0;
    std::size_t outages = 0;
    for (double t : level_set(wind, v))
    {
        if (window && (t < window->begin || t > window->end))
            continue;
        ++exposure;
        outages += series.at(round_half_up(t));
    }
    if (exposure == 0)
        return std::nullopt;
    return RatePoint{v, static_cast<double>(outages) / static_cast<double>(exposure),
                     exposure};
}

} // namespace

OutageRateCurve rate_curve(OutageRateSeries const& series, InterpolatedWind const& wind,
                           int v_max, std::optional<TimeWindow> window, Execution exec)
{
    if (v_max < 0)
        return {};
    std::vector<std::optional<RatePoint>> slots(static_cast<std::size_t>(v_max) + 1);
    if (exec == Execution::parallel)
    {
#pragma omp parallel for schedule(dynamic)
        for (int v = 0; v <= v_max; ++v)
            slots[v] = curve_point(series, wind, v, window);
    }
    else
    {
        for (int v = 0; v <= v_max; ++v)
            slots[v] = curve_point(series, wind, v, window);
    }
    OutageRateCurve curve;
    for (auto const& p : slots)
        if (p)
            curve.points.push_back(*p);
    return curve;
}

OutageRateCurve rate_curve(Area const& area, InterpolatedWind const& wind, int v_max,
                           Execution exec)
{
    auto window = common_coverage(wind, area.outages);
    if (!window)
        window = TimeWindow{wind.first_time(), wind.last_time()};
    return rate_curve(rate_series(area), wind, v_max, window, exec);
}

int default_v_max(InterpolatedWind const& wind)
{
    return static_cast<int>(std::ceil(wind.max_speed()));
}

std::optional<TimeWindow> common_coverage(InterpolatedWind const& wind,
                                          std::span<OutageRecord const> outages)
{
    if (outages.empty())
        return std::nullopt;
    auto [lo, hi] = std::minmax_element(outages.begin(), outages.end(),
                                        [](auto const& a, auto const& b) {
                                            return a.start < b.start;
                                        });
    double const begin = std::max(wind.first_time(), static_cast<double>(lo->start));
    double const end = std::min(wind.last_time(), static_cast<double>(hi->start));
    if (begin > end)
        return std::nullopt;
    return TimeWindow{begin, end};
}

int wind_at_outage(InterpolatedWind const& wind, OutageRecord const& outage)
{
    return static_cast<int>(round_half_up(wind.at(static_cast<double>(outage.start))));
}

void write_curve_csv(std::ostream& out, OutageRateCurve const& curve)
{
    out << "v,mean_rate,exposure\n";
    for (auto const& p : curve.points)
        out << p.speed << ',' << fmt::format("{}", p.mean_rate) << ',' << p.exposure << '\n';
}

nlohmann::json curve_to_json(OutageRateCurve const& curve)
{
    auto pts = nlohmann::json::array();
    for (auto const& p : curve.points)
        pts.push_back({{"v", p.speed}, {"mean_rate", p.mean_rate}, {"exposure", p.exposure}});
    return {{"points", pts}};
}

OutageRateCurve curve_from_json(nlohmann::json const& j)
{
    OutageRateCurve c;
    for (auto const& p : j.at("points"))
        c.points.push_back({p.at("v").get<int>(), p.at("mean_rate").get<double>(),
                            p.at("exposure").get<std::size_t>()});
    return c;
}

} // namespace windres
