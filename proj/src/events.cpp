#include "windres/events.hpp"

#include <algorithm>
#include <stdexcept>

namespace windres
{

namespace
{

bool component_order(Component const& a, Component const& b)
{
    if (a.start != b.start)
        return a.start < b.start;
    if (a.restore != b.restore)
        return a.restore < b.restore;
    return a.index < b.index;
}

constexpr std::array<std::string_view, kMetricCount> kMetricNames = {
    "event_size",       "outage_hours", "event_duration",
    "time_to_first_restore", "restore_duration", "restore_rate",
    "outage_rate",      "customers_out", "customer_hours"};

} // namespace

std::vector<Component> to_components(std::span<OutageRecord const> outages)
{
    std::vector<Component> out;
    out.reserve(outages.size());
    for (std::size_t i = 0; i < outages.size(); ++i)
        out.push_back({static_cast<double>(outages[i].start),
                       static_cast<double>(outages[i].restore), outages[i].customers, i});
    return out;
}

ResilienceEvent::ResilienceEvent(std::vector<Component> components)
    : components_(std::move(components))
{
    std::sort(components_.begin(), components_.end(), component_order);
}

double ResilienceEvent::first_outage() const
{
    return components_.front().start;
}

double ResilienceEvent::last_outage() const
{
    return components_.back().start;
}

double ResilienceEvent::first_restore() const
{
    double r = components_.front().restore;
    for (auto const& c : components_)
        r = std::min(r, c.restore);
    return r;
}

double ResilienceEvent::last_restore() const
{
    double r = components_.front().restore;
    for (auto const& c : components_)
        r = std::max(r, c.restore);
    return r;
}

std::vector<double> ResilienceEvent::outage_times() const
{
    std::vector<double> t;
    t.reserve(components_.size());
    for (auto const& c : components_)
        t.push_back(c.start);
    return t;
}

std::vector<double> ResilienceEvent::restore_times() const
{
    std::vector<double> t;
    t.reserve(components_.size());
    for (auto const& c : components_)
        t.push_back(c.restore);
    std::sort(t.begin(), t.end());
    return t;
}

std::vector<ResilienceEvent> extract_events(std::span<Component const> components)
{
    std::vector<Component> sorted(components.begin(), components.end());
    std::sort(sorted.begin(), sorted.end(), component_order);

    std::vector<ResilienceEvent> events;
    std::vector<Component> current;
    double reach = 0.0;
    for (auto const& c : sorted)
    {
        if (!current.empty() && c.start > reach)
        {
            events.emplace_back(std::move(current));
            current.clear();
        }
        if (current.empty())
            reach = c.restore;
        else
            reach = std::max(reach, c.restore);
        current.push_back(c);
    }
    if (!current.empty())
        events.emplace_back(std::move(current));
    return events;
}

std::vector<ResilienceEvent> extract_events(std::span<OutageRecord const> outages)
{
    auto const comps = to_components(outages);
    return extract_events(std::span<Component const>{comps});
}

std::string_view metric_name(Metric m)
{
    return kMetricNames[static_cast<std::size_t>(m)];
}

std::optional<Metric> metric_from_name(std::string_view name)
{
    for (auto m : kAllMetrics)
        if (metric_name(m) == name)
            return m;
    return std::nullopt;
}

MetricVector MetricVector::zeros()
{
    MetricVector v;
    for (auto m : kAllMetrics)
        v.set(m, 0.0);
    return v;
}

MetricVector metrics(ResilienceEvent const& event, RateConvention convention)
{
    if (event.empty())
        return MetricVector::zeros();

    auto const n = static_cast<double>(event.size());
    double outage_minutes = 0.0;
    double customer_minutes = 0.0;
    double customers = 0.0;
    for (auto const& c : event.components())
    {
        outage_minutes += c.restore - c.start;
        customer_minutes += static_cast<double>(c.customers) * (c.restore - c.start);
        customers += static_cast<double>(c.customers);
    }
    double const o1 = event.first_outage();
    double const on = event.last_outage();
    double const r1 = event.first_restore();
    double const rn = event.last_restore();

    auto rate = [&](double span_minutes) -> std::optional<double> {
        if (span_minutes > 0.0)
            return n / (span_minutes / kMinutesPerHour);
        if (convention == RateConvention::zero)
            return 0.0;
        return std::nullopt;
    };

    MetricVector v;
    v.set(Metric::event_size, n);
    v.set(Metric::outage_hours, outage_minutes / kMinutesPerHour);
    v.set(Metric::event_duration, (rn - o1) / kMinutesPerHour);
    v.set(Metric::time_to_first_restore, (r1 - o1) / kMinutesPerHour);
    v.set(Metric::restore_duration, (rn - r1) / kMinutesPerHour);
    v.set(Metric::restore_rate, rate(rn - r1));
    v.set(Metric::outage_rate, rate(on - o1));
    v.set(Metric::customers_out, customers);
    v.set(Metric::customer_hours, customer_minutes / kMinutesPerHour);
    return v;
}

double outage_hours_sorted(ResilienceEvent const& event)
{
    auto const o = event.outage_times();
    auto const r = event.restore_times();
    double total = 0.0;
    for (std::size_t k = 0; k < o.size(); ++k)
        total += r[k] - o[k];
    return total / kMinutesPerHour;
}

std::vector<PerformanceStep> performance_curve(ResilienceEvent const& event,
                                               PerformanceForm form)
{
    struct Change
    {
        double time;
        double delta;
    };
    std::vector<Change> changes;
    changes.reserve(2 * event.size());
    for (auto const& c : event.components())
    {
        double const w =
            form == PerformanceForm::components ? 1.0 : static_cast<double>(c.customers);
        changes.push_back({c.start, -w});
        changes.push_back({c.restore, +w});
    }
    std::sort(changes.begin(), changes.end(), [](auto const& a, auto const& b) {
        if (a.time != b.time)
            return a.time < b.time;
        return a.delta < b.delta;
    });

    std::vector<PerformanceStep> steps;
    double level = 0.0;
    for (std::size_t i = 0; i < changes.size();)
    {
        double const t = changes[i].time;
        while (i < changes.size() && changes[i].time == t)
            level += changes[i++].delta;
        steps.push_back({t, level});
    }
    return steps;
}

double integrate_performance(std::span<PerformanceStep const> curve)
{
    double area = 0.0;
    for (std::size_t i = 0; i + 1 < curve.size(); ++i)
        area += curve[i].value * (curve[i + 1].time - curve[i].time);
    return area;
}

std::string_view size_class_name(SizeClass c)
{
    switch (c)
    {
    case SizeClass::small:
        return "small";
    case SizeClass::medium:
        return "medium";
    case SizeClass::large:
        return "large";
    }
    return "?";
}

std::optional<SizeClass> size_class_from_name(std::string_view name)
{
    for (auto c : kAllSizeClasses)
        if (size_class_name(c) == name)
            return c;
    return std::nullopt;
}

SizeClass classify(std::size_t n, SizeThresholds const& t)
{
    if (t.small_max >= t.medium_max)
        throw std::invalid_argument{"size thresholds must increase"};
    if (n <= t.small_max)
        return SizeClass::small;
    if (n <= t.medium_max)
        return SizeClass::medium;
    return SizeClass::large;
}

std::optional<MetricVector> average(std::span<MetricVector const> vectors)
{
    if (vectors.empty())
        return std::nullopt;
    MetricVector out;
    for (auto m : kAllMetrics)
    {
        double sum = 0.0;
        std::size_t count = 0;
        for (auto const& v : vectors)
        {
            if (auto x = v.get(m))
            {
                sum += *x;
                ++count;
            }
        }
        if (count > 0)
            out.set(m, sum / static_cast<double>(count));
    }
    return out;
}

std::optional<MetricVector> mean_metrics(std::span<ResilienceEvent const> events,
                                         SizeClass cls, SizeThresholds const& t,
                                         RateConvention convention)
{
    std::vector<MetricVector> selected;
    for (auto const& e : events)
        if (classify(e, t) == cls)
            selected.push_back(metrics(e, convention));
    return average(selected);
}

ClassMeans class_means(std::span<MetricVector const> vectors,
                       std::span<SizeClass const> classes)
{
    if (vectors.size() != classes.size())
        throw std::invalid_argument{"class_means: size mismatch"};
    std::array<std::vector<MetricVector>, kSizeClassCount> grouped;
    for (std::size_t i = 0; i < vectors.size(); ++i)
        grouped[static_cast<std::size_t>(classes[i])].push_back(vectors[i]);
    ClassMeans out;
    for (std::size_t c = 0; c < kSizeClassCount; ++c)
        out[c] = average(grouped[c]);
    return out;
}

} // namespace windres
