#pragma once

#include <array>
#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "windres/events.hpp"

namespace windres
{

/// Per (size class, metric) table of optional numbers.
using ClassTable = std::array<std::array<std::optional<double>, kMetricCount>, kSizeClassCount>;

/// Base means and their counterfactual changes, shaped like one block of
/// the summary report.
struct CounterfactualResult
{
    std::string label; // column group name in reports
    ClassMeans base;
    ClassMeans counterfactual;
    ClassTable percent_change; // 100 * (new / base - 1)
    ClassTable half_width;     // CI half-width of new/base (Monte Carlo only)
    std::size_t replicates = 0;
    nlohmann::json metadata = nlohmann::json::object();
    std::vector<std::string> warnings;
};

/// 100 * (after / before - 1); absent when either side is absent or the
/// base is zero.
std::optional<double> percent_change(std::optional<double> before, std::optional<double> after);

ClassTable percent_changes(ClassMeans const& base, ClassMeans const& after);

inline std::size_t class_index(SizeClass c)
{
    return static_cast<std::size_t>(c);
}

inline std::size_t metric_index(Metric m)
{
    return static_cast<std::size_t>(m);
}

} // namespace windres
