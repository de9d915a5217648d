#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "windres/ingest.hpp"

namespace windres
{

/// One outage inside an event. Times are minutes since the epoch, held as
/// doubles because restoration counterfactuals move restores off the grid.
struct Component
{
    double start = 0.0;
    double restore = 0.0;
    std::int64_t customers = 0;
    std::size_t index = 0; // position in the area's outage list

    friend bool operator==(Component const&, Component const&) = default;
};

std::vector<Component> to_components(std::span<OutageRecord const> outages);

/// A maximal set of outages whose [start, restore] intervals form one
/// connected span. Components are kept sorted by (start, restore, index);
/// each component carries its own restore, so the restore-order permutation
/// is implicit.
class ResilienceEvent
{
  public:
    ResilienceEvent() = default;
    explicit ResilienceEvent(std::vector<Component> components);

    std::span<Component const> components() const { return components_; }
    std::size_t size() const { return components_.size(); }
    bool empty() const { return components_.empty(); }

    double first_outage() const;  // o_1
    double last_outage() const;   // o_n
    double first_restore() const; // r_1
    double last_restore() const;  // r_n

    std::vector<double> outage_times() const;  // ascending
    std::vector<double> restore_times() const; // ascending

  private:
    std::vector<Component> components_;
};

/// Groups outages into events by a sweep over start times. An outage that
/// starts at the same minute another restores joins that event.
std::vector<ResilienceEvent> extract_events(std::span<Component const> components);
std::vector<ResilienceEvent> extract_events(std::span<OutageRecord const> outages);

enum class Metric : std::size_t
{
    event_size,
    outage_hours,
    event_duration,
    time_to_first_restore,
    restore_duration,
    restore_rate,
    outage_rate,
    customers_out,
    customer_hours,
};

inline constexpr std::size_t kMetricCount = 9;

inline constexpr std::array<Metric, kMetricCount> kAllMetrics = {
    Metric::event_size,       Metric::outage_hours, Metric::event_duration,
    Metric::time_to_first_restore, Metric::restore_duration, Metric::restore_rate,
    Metric::outage_rate,      Metric::customers_out, Metric::customer_hours};

std::string_view metric_name(Metric m);
std::optional<Metric> metric_from_name(std::string_view name);

/// The nine per-event metrics; time quantities in hours. A rate whose
/// denominator is zero is absent unless the convention says otherwise.
class MetricVector
{
  public:
    std::optional<double> get(Metric m) const { return values_[index(m)]; }
    double value(Metric m) const { return values_[index(m)].value_or(0.0); }
    bool has(Metric m) const { return values_[index(m)].has_value(); }
    void set(Metric m, std::optional<double> v) { values_[index(m)] = v; }

    static MetricVector zeros();

    friend bool operator==(MetricVector const&, MetricVector const&) = default;

  private:
    static constexpr std::size_t index(Metric m) { return static_cast<std::size_t>(m); }
    std::array<std::optional<double>, kMetricCount> values_{};
};

enum class RateConvention
{
    absent, // undefined rates are excluded from means
    zero,   // undefined rates are recorded as 0
};

MetricVector metrics(ResilienceEvent const& event,
                     RateConvention convention = RateConvention::absent);

/// outage_hours as the sum over sorted lists, r_k - o_k with both sorted
/// independently. Equals the per-component sum by rearrangement.
double outage_hours_sorted(ResilienceEvent const& event);

enum class PerformanceForm
{
    components,
    customers,
};

struct PerformanceStep
{
    double time = 0.0;
    double value = 0.0; // value from `time` until the next step
};

/// P(t) (or P^cust(t)) as a step function. Starts at 0 before o_1 and is 0
/// again from r_n. At equal times outages apply before restores.
std::vector<PerformanceStep> performance_curve(ResilienceEvent const& event,
                                               PerformanceForm form);

/// Integral of P over the event, in minutes times the curve unit.
double integrate_performance(std::span<PerformanceStep const> curve);

enum class SizeClass
{
    small,
    medium,
    large,
};

inline constexpr std::size_t kSizeClassCount = 3;
inline constexpr std::array<SizeClass, kSizeClassCount> kAllSizeClasses = {
    SizeClass::small, SizeClass::medium, SizeClass::large};

std::string_view size_class_name(SizeClass c);
std::optional<SizeClass> size_class_from_name(std::string_view name);

/// small: n <= small_max; medium: n <= medium_max; large otherwise.
struct SizeThresholds
{
    std::size_t small_max = 2;
    std::size_t medium_max = 15;
};

SizeClass classify(std::size_t n, SizeThresholds const& t = {});
inline SizeClass classify(ResilienceEvent const& e, SizeThresholds const& t = {})
{
    return classify(e.size(), t);
}

/// Arithmetic mean per metric; absent entries are skipped, and a metric
/// with no present entries is absent. Empty input gives nothing.
std::optional<MetricVector> average(std::span<MetricVector const> vectors);

std::optional<MetricVector> mean_metrics(std::span<ResilienceEvent const> events,
                                         SizeClass cls, SizeThresholds const& t = {},
                                         RateConvention convention = RateConvention::absent);

/// Means per size class; index by static_cast<size_t>(SizeClass).
using ClassMeans = std::array<std::optional<MetricVector>, kSizeClassCount>;

ClassMeans class_means(std::span<MetricVector const> vectors,
                       std::span<SizeClass const> classes);

} // namespace windres
