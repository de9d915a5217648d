#include "windres/report.hpp"

#include <ostream>

#include <fmt/format.h>

namespace windres
{

std::string Provenance::csv_comment() const
{
    return fmt::format("# windres config_hash={} seed={} flags={}", config_hash, seed, flags);
}

nlohmann::json Provenance::to_json() const
{
    return {{"config_hash", config_hash}, {"seed", seed}, {"flags", flags}};
}

std::string format_number(std::optional<double> x, int decimals)
{
    if (!x)
        return {};
    double v = *x;
    if (v == 0.0)
        v = 0.0; // no "-0.000"
    auto s = fmt::format("{:.{}f}", v, decimals);
    if (s.find_first_not_of("-0.") == std::string::npos)
        s = fmt::format("{:.{}f}", 0.0, decimals);
    return s;
}

void write_summary_csv(std::ostream& out, ClassMeans const& base,
                       std::span<CounterfactualResult const> counterfactuals,
                       Provenance const& provenance)
{
    out << provenance.csv_comment() << '\n';
    out << "metric";
    for (auto c : kAllSizeClasses)
        out << ",base_" << size_class_name(c);
    for (auto const& r : counterfactuals)
        for (auto c : kAllSizeClasses)
            out << ',' << r.label << "_pct_" << size_class_name(c);
    out << '\n';
    for (auto m : kAllMetrics)
    {
        out << metric_name(m);
        for (auto c : kAllSizeClasses)
        {
            auto const& cls = base[class_index(c)];
            out << ',' << format_number(cls ? cls->get(m) : std::nullopt, 4);
        }
        for (auto const& r : counterfactuals)
            for (auto c : kAllSizeClasses)
                out << ','
                    << format_number(r.percent_change[class_index(c)][metric_index(m)], 2);
        out << '\n';
    }
}

nlohmann::json class_means_to_json(ClassMeans const& means)
{
    nlohmann::json j = nlohmann::json::object();
    for (auto c : kAllSizeClasses)
    {
        auto const& v = means[class_index(c)];
        if (!v)
        {
            j[std::string{size_class_name(c)}] = nullptr;
            continue;
        }
        nlohmann::json row = nlohmann::json::object();
        for (auto m : kAllMetrics)
        {
            auto x = v->get(m);
            row[std::string{metric_name(m)}] = x ? nlohmann::json(*x) : nlohmann::json(nullptr);
        }
        j[std::string{size_class_name(c)}] = row;
    }
    return j;
}

ClassMeans class_means_from_json(nlohmann::json const& j)
{
    ClassMeans out;
    for (auto c : kAllSizeClasses)
    {
        auto const key = std::string{size_class_name(c)};
        if (!j.contains(key) || j[key].is_null())
            continue;
        MetricVector v;
        for (auto m : kAllMetrics)
        {
            auto const name = std::string{metric_name(m)};
            if (j[key].contains(name) && !j[key][name].is_null())
                v.set(m, j[key][name].get<double>());
        }
        out[class_index(c)] = v;
    }
    return out;
}

nlohmann::json class_table_to_json(ClassTable const& table)
{
    nlohmann::json j = nlohmann::json::object();
    for (auto c : kAllSizeClasses)
    {
        nlohmann::json row = nlohmann::json::object();
        for (auto m : kAllMetrics)
        {
            auto const& x = table[class_index(c)][metric_index(m)];
            row[std::string{metric_name(m)}] = x ? nlohmann::json(*x) : nlohmann::json(nullptr);
        }
        j[std::string{size_class_name(c)}] = row;
    }
    return j;
}

ClassTable class_table_from_json(nlohmann::json const& j)
{
    ClassTable t{};
    for (auto c : kAllSizeClasses)
    {
        auto const key = std::string{size_class_name(c)};
        if (!j.contains(key))
            continue;
        for (auto m : kAllMetrics)
        {
            auto const name = std::string{metric_name(m)};
            if (j[key].contains(name) && !j[key][name].is_null())
                t[class_index(c)][metric_index(m)] = j[key][name].get<double>();
        }
    }
    return t;
}

nlohmann::json result_to_json(CounterfactualResult const& r)
{
    return {{"label", r.label},
            {"base", class_means_to_json(r.base)},
            {"counterfactual", class_means_to_json(r.counterfactual)},
            {"percent_change", class_table_to_json(r.percent_change)},
            {"ci_half_width", class_table_to_json(r.half_width)},
            {"replicates", r.replicates},
            {"metadata", r.metadata},
            {"warnings", r.warnings}};
}

CounterfactualResult result_from_json(nlohmann::json const& j)
{
    CounterfactualResult r;
    r.label = j.at("label").get<std::string>();
    r.base = class_means_from_json(j.at("base"));
    r.counterfactual = class_means_from_json(j.at("counterfactual"));
    r.percent_change = class_table_from_json(j.at("percent_change"));
    r.half_width = class_table_from_json(j.value("ci_half_width", nlohmann::json::object()));
    r.replicates = j.value("replicates", std::size_t{0});
    r.metadata = j.value("metadata", nlohmann::json::object());
    r.warnings = j.value("warnings", std::vector<std::string>{});
    return r;
}

} // namespace windres
