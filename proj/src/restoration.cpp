#include "windres/restoration.hpp"

#include <algorithm>
#include <cmath>

#include <fmt/format.h>

#include "windres/hardening.hpp"

namespace windres
{

std::string_view restoration_mode_name(RestorationMode m)
{
    return m == RestorationMode::earlier ? "earlier" : "faster";
}

RestorationSpec RestorationSpec::earlier(double hours)
{
    if (!(hours >= 0.0) || !std::isfinite(hours))
        throw std::invalid_argument{"t_earlier must be >= 0 hours"};
    return {RestorationMode::earlier, hours};
}

RestorationSpec RestorationSpec::faster(double factor)
{
    if (!(factor > 0.0 && factor <= 1.0))
        throw std::invalid_argument{"c_faster must lie in (0, 1]"};
    return {RestorationMode::faster, factor};
}

ResilienceEvent apply_earlier(ResilienceEvent const& event, double hours)
{
    if (!(hours >= 0.0))
        throw std::invalid_argument{"apply_earlier: t_earlier must be >= 0"};
    if (hours == 0.0)
        return event;
    double const shift = hours * kMinutesPerHour;
    std::vector<Component> comps(event.components().begin(), event.components().end());
    for (auto& c : comps)
        c.restore = std::max(c.restore - shift, c.start);
    return ResilienceEvent{std::move(comps)};
}

ResilienceEvent apply_faster(ResilienceEvent const& event, double factor)
{
    if (!(factor > 0.0 && factor <= 1.0))
        throw std::invalid_argument{"apply_faster: c_faster must lie in (0, 1]"};
    if (factor == 1.0 || event.empty())
        return event;
    double const r1 = event.first_restore();
    std::vector<Component> comps(event.components().begin(), event.components().end());
    for (auto& c : comps)
        c.restore = std::max(r1 + (c.restore - r1) * factor, c.start);
    return ResilienceEvent{std::move(comps)};
}

ResilienceEvent apply_restoration(ResilienceEvent const& event, RestorationSpec const& spec)
{
    return spec.mode == RestorationMode::earlier ? apply_earlier(event, spec.parameter)
                                                 : apply_faster(event, spec.parameter);
}

namespace
{

struct ClassifiedMetrics
{
    std::vector<MetricVector> base;
    std::vector<SizeClass> classes;
};

ClassifiedMetrics base_metrics(std::span<ResilienceEvent const> events,
                               RestorationOptions const& options)
{
    ClassifiedMetrics out;
    out.base.reserve(events.size());
    out.classes.reserve(events.size());
    for (auto const& e : events)
    {
        out.base.push_back(metrics(e, options.rates));
        out.classes.push_back(classify(e, options.thresholds));
    }
    return out;
}

MetricVector transformed_metrics(ResilienceEvent const& event, RestorationSpec const& spec,
                                 RestorationOptions const& options)
{
    auto const moved = apply_restoration(event, spec);
    if (options.regrouping == Regrouping::keep_original)
        return metrics(moved, options.rates);
    SuperEvent se{0, classify(event, options.thresholds),
                  extract_events(moved.components())};
    return super_metrics(se, options.rates);
}

ClassMeans transformed_means(std::span<ResilienceEvent const> events,
                             std::span<SizeClass const> classes, RestorationSpec const& spec,
                             RestorationOptions const& options, Execution exec)
{
    std::vector<MetricVector> after(events.size());
    auto const n = static_cast<std::int64_t>(events.size());
    if (exec == Execution::parallel)
    {
#pragma omp parallel for schedule(static)
        for (std::int64_t i = 0; i < n; ++i)
            after[i] = transformed_metrics(events[i], spec, options);
    }
    else
    {
        for (std::int64_t i = 0; i < n; ++i)
            after[i] = transformed_metrics(events[i], spec, options);
    }
    return class_means(after, classes);
}

} // namespace

CounterfactualResult run_restoration(std::span<ResilienceEvent const> events,
                                     RestorationSpec const& spec,
                                     RestorationOptions const& options, Execution exec)
{
    auto const base = base_metrics(events, options);
    CounterfactualResult result;
    result.label = std::string{restoration_mode_name(spec.mode)};
    result.base = class_means(base.base, base.classes);
    result.counterfactual = transformed_means(events, base.classes, spec, options, exec);
    result.percent_change = percent_changes(result.base, result.counterfactual);
    result.metadata = {
        {"counterfactual", result.label},
        {spec.mode == RestorationMode::earlier ? "t_earlier_hours" : "c_faster", spec.parameter},
        {"regrouping",
         options.regrouping == Regrouping::keep_original ? "keep_original" : "re_extract"},
        {"undefined_rates", options.rates == RateConvention::absent ? "absent" : "zero"},
    };
    return result;
}

double calibrate_target(std::span<ResilienceEvent const> events, RestorationMode mode,
                        double target, Metric metric, SizeClass cls,
                        RestorationOptions const& options)
{
    if (!(target >= 0.0 && target < 1.0))
        throw std::invalid_argument{"calibrate_target: target must lie in [0, 1)"};
    if (target == 0.0)
        return mode == RestorationMode::earlier ? 0.0 : 1.0;

    auto const base = base_metrics(events, options);
    auto const base_means = class_means(base.base, base.classes);
    auto const& b = base_means[class_index(cls)];
    if (!b || !b->get(metric) || *b->get(metric) == 0.0)
        throw CalibrationError{fmt::format("calibrate_target: no {} events with nonzero {}",
                                           size_class_name(cls), metric_name(metric)),
                               0.0};
    double const before = *b->get(metric);

    // Fractional change of the class mean at parameter p.
    auto change = [&](double p) {
        auto const after = transformed_means(events, base.classes, RestorationSpec{mode, p}, options,
                                             Execution::parallel);
        return after[class_index(cls)]->value(metric) / before - 1.0;
    };

    // `weak` gives no reduction, `strong` the most reduction in the bounds.
    double weak = 0.0;
    double strong = 0.0;
    if (mode == RestorationMode::earlier)
    {
        double longest = 0.0;
        for (auto const& e : events)
            longest = std::max(longest, (e.last_restore() - e.first_outage()) / kMinutesPerHour);
        weak = 0.0;
        strong = longest;
        double const achieved = change(strong);
        if (achieved > -target)
            throw CalibrationError{
                fmt::format("calibrate_target: earlier restoration reaches only {:.4f}%",
                            100 * achieved),
                achieved};
    }
    else
    {
        weak = 1.0;
        strong = 0.5;
        double achieved = change(strong);
        while (achieved > -target && strong > 1e-6)
        {
            strong *= 0.5;
            achieved = change(strong);
        }
        if (achieved > -target)
            throw CalibrationError{
                fmt::format("calibrate_target: faster restoration reaches only {:.4f}%",
                            100 * achieved),
                achieved};
    }

    for (int iter = 0; iter < 200; ++iter)
    {
        double const mid = 0.5 * (weak + strong);
        if (mid == weak || mid == strong)
            break;
        if (change(mid) > -target)
            weak = mid;
        else
            strong = mid;
    }
    return 0.5 * (weak + strong);
}

} // namespace windres
