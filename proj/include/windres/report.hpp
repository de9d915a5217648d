#pragma once

#include <iosfwd>
#include <span>
#include <string>

#include <json.hpp>

#include "windres/counterfactual.hpp"

namespace windres
{

/// Provenance stamped into every artifact.
struct Provenance
{
    std::string config_hash;
    std::uint64_t seed = 0;
    std::string flags;

    std::string csv_comment() const; // "# windres config_hash=... seed=... flags=..."
    nlohmann::json to_json() const;
};

/// Rows are the nine metrics. Columns are base small/medium/large, then
/// change in percent small/medium/large for each counterfactual, in order.
void write_summary_csv(std::ostream& out, ClassMeans const& base,
                       std::span<CounterfactualResult const> counterfactuals,
                       Provenance const& provenance);

nlohmann::json class_means_to_json(ClassMeans const& means);
ClassMeans class_means_from_json(nlohmann::json const& j);
nlohmann::json class_table_to_json(ClassTable const& table);
ClassTable class_table_from_json(nlohmann::json const& j);

nlohmann::json result_to_json(CounterfactualResult const& r);
CounterfactualResult result_from_json(nlohmann::json const& j);

/// Fixed-format number used in CSV artifacts; empty for absent.
std::string format_number(std::optional<double> x, int decimals);

} // namespace windres
