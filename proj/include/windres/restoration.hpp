#pragma once

#include <span>
#include <stdexcept>

#include "windres/counterfactual.hpp"
#include "windres/events.hpp"
#include "windres/execution.hpp"

namespace windres
{

class CalibrationError : public std::runtime_error
{
  public:
    CalibrationError(std::string const& what, double achieved)
        : std::runtime_error(what), achieved_(achieved)
    {
    }

    /// Best fractional change reachable inside the search bounds.
    double achieved() const { return achieved_; }

  private:
    double achieved_;
};

enum class RestorationMode
{
    earlier,
    faster,
};

std::string_view restoration_mode_name(RestorationMode m);

struct RestorationSpec
{
    RestorationMode mode = RestorationMode::earlier;
    double parameter = 0.0; // t_earlier in hours, or c_faster in (0, 1]

    static RestorationSpec earlier(double hours);
    static RestorationSpec faster(double factor);
};

/// Every restore moves t_earlier hours sooner, but never before its own
/// component's outage.
ResilienceEvent apply_earlier(ResilienceEvent const& event, double hours);

/// Each restore's lag behind the first restore shrinks by c_faster, but
/// never before its own component's outage.
ResilienceEvent apply_faster(ResilienceEvent const& event, double factor);

ResilienceEvent apply_restoration(ResilienceEvent const& event, RestorationSpec const& spec);

enum class Regrouping
{
    keep_original, // a transformed event is measured as one event
    re_extract,    // re-extract parts and aggregate as a super event
};

struct RestorationOptions
{
    SizeThresholds thresholds{};
    RateConvention rates = RateConvention::absent;
    Regrouping regrouping = Regrouping::keep_original;
};

/// Transforms every event and compares per-class means with the base.
/// Classes are those of the original events. Deterministic.
CounterfactualResult run_restoration(std::span<ResilienceEvent const> events,
                                     RestorationSpec const& spec,
                                     RestorationOptions const& options = {},
                                     Execution exec = Execution::parallel);

/// Finds t_earlier (hours) or c_faster so the class mean of `metric` drops
/// by `target` (0.10 means -10%). Bisection over [0, longest event duration]
/// for earlier, and [0.5, 1] widened toward 0 for faster. Throws
/// CalibrationError when the target lies beyond the bounds.
double calibrate_target(std::span<ResilienceEvent const> events, RestorationMode mode,
                        double target, Metric metric = Metric::outage_hours,
                        SizeClass cls = SizeClass::large,
                        RestorationOptions const& options = {});

} // namespace windres
