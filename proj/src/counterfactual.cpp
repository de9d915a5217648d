#include "windres/counterfactual.hpp"

namespace windres
{

std::optional<double> percent_change(std::optional<double> before, std::optional<double> after)
{
    if (!before || !after || *before == 0.0)
        return std::nullopt;
    return 100.0 * (*after / *before - 1.0);
}

ClassTable percent_changes(ClassMeans const& base, ClassMeans const& after)
{
    ClassTable out{};
    for (auto c : kAllSizeClasses)
    {
        auto const ci = class_index(c);
        if (!base[ci] || !after[ci])
            continue;
        for (auto m : kAllMetrics)
            out[ci][metric_index(m)] = percent_change(base[ci]->get(m), after[ci]->get(m));
    }
    return out;
}

} // namespace windres
