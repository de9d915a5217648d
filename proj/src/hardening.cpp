#include "windres/hardening.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include <fmt/format.h>

#include "windres/stats.hpp"

namespace windres
{

namespace
{

std::string_view mode_name(SamplingMode m)
{
    return m == SamplingMode::without_replacement ? "without_replacement"
                                                  : "with_replacement_dedup";
}

std::size_t index_bound(std::span<ResilienceEvent const> events)
{
    std::size_t bound = 0;
    for (auto const& e : events)
        for (auto const& c : e.components())
            bound = std::max(bound, c.index + 1);
    return bound;
}

SuperEvent rebuild(std::size_t origin, ResilienceEvent const& event,
                   std::vector<char> const& alive, SizeThresholds const& thresholds)
{
    std::vector<Component> kept;
    kept.reserve(event.size());
    for (auto const& c : event.components())
        if (c.index < alive.size() && alive[c.index])
            kept.push_back(c);
    return {origin, classify(event, thresholds), extract_events(std::span<Component const>{kept})};
}

ClassMeans baseline(std::span<ResilienceEvent const> events, MonteCarloConfig const& cfg)
{
    std::vector<MetricVector> vecs;
    std::vector<SizeClass> classes;
    vecs.reserve(events.size());
    classes.reserve(events.size());
    for (auto const& e : events)
    {
        vecs.push_back(metrics(e, cfg.rates));
        classes.push_back(classify(e, cfg.thresholds));
    }
    return class_means(vecs, classes);
}

} // namespace

std::size_t WindBinIndex::total() const
{
    std::size_t n = 0;
    for (auto const& [_, ids] : bins)
        n += ids.size();
    return n;
}

WindBinIndex bin_outages(std::span<OutageRecord const> outages, InterpolatedWind const& wind)
{
    WindBinIndex index;
    for (std::size_t i = 0; i < outages.size(); ++i)
        index.bins[wind_at_outage(wind, outages[i])].push_back(i);
    return index;
}

BinCounts sample_counts(WindBinIndex const& index, double retention)
{
    if (!(retention > 0.0 && retention <= 1.0))
        throw std::invalid_argument{"sample_counts: retention must lie in (0, 1]"};
    return sample_counts(index, [retention](int) { return retention; });
}

BinCounts sample_counts(WindBinIndex const& index, std::function<double(int)> const& ratio)
{
    BinCounts out;
    for (auto const& [v, ids] : index.bins)
    {
        double const r = ratio(v);
        if (!(r >= 0.0) || !std::isfinite(r))
            throw std::invalid_argument{"sample_counts: ratio must be finite and >= 0"};
        out[v] = static_cast<std::size_t>(std::ceil(static_cast<double>(ids.size()) * r));
    }
    return out;
}

std::vector<std::size_t> draw_sample(WindBinIndex const& index, BinCounts const& counts,
                                     RandomStream& rng, SamplingMode mode)
{
    std::vector<std::size_t> survivors;
    for (auto const& [v, ids] : index.bins)
    {
        auto it = counts.find(v);
        std::size_t const want = it == counts.end() ? ids.size() : it->second;
        std::size_t const k = ids.size();
        if (mode == SamplingMode::without_replacement)
        {
            if (want > k)
                throw std::invalid_argument{
                    fmt::format("draw_sample: bin {} asks for {} of {} outages", v, want, k)};
            if (want == k)
            {
                survivors.insert(survivors.end(), ids.begin(), ids.end());
                continue;
            }
            std::vector<std::size_t> pool = ids;
            for (std::size_t j = 0; j < want; ++j)
                std::swap(pool[j], pool[j + rng.below(k - j)]);
            survivors.insert(survivors.end(), pool.begin(), pool.begin() + want);
        }
        else
        {
            for (std::size_t j = 0; j < want && k > 0; ++j)
                survivors.push_back(ids[rng.below(k)]);
        }
    }
    std::sort(survivors.begin(), survivors.end());
    survivors.erase(std::unique(survivors.begin(), survivors.end()), survivors.end());
    return survivors;
}

std::vector<SuperEvent> super_events(std::span<ResilienceEvent const> original,
                                     std::span<std::size_t const> survivors,
                                     SizeThresholds const& thresholds)
{
    std::vector<char> alive(index_bound(original), 0);
    for (auto id : survivors)
        if (id < alive.size())
            alive[id] = 1;
    std::vector<SuperEvent> out;
    out.reserve(original.size());
    for (std::size_t e = 0; e < original.size(); ++e)
        out.push_back(rebuild(e, original[e], alive, thresholds));
    return out;
}

MetricVector super_metrics(SuperEvent const& se, RateConvention convention)
{
    if (se.parts.empty())
        return MetricVector::zeros();
    if (se.parts.size() == 1)
        return metrics(se.parts.front(), convention);

    constexpr std::array summed = {Metric::event_size,       Metric::outage_hours,
                                   Metric::event_duration,   Metric::restore_duration,
                                   Metric::customers_out,    Metric::customer_hours};
    constexpr std::array averaged = {Metric::restore_rate, Metric::outage_rate,
                                     Metric::time_to_first_restore};

    std::vector<MetricVector> parts;
    parts.reserve(se.parts.size());
    for (auto const& p : se.parts)
        parts.push_back(metrics(p, convention));

    MetricVector out;
    for (auto m : summed)
    {
        double s = 0.0;
        for (auto const& p : parts)
            s += p.value(m);
        out.set(m, s);
    }
    for (auto m : averaged)
    {
        double s = 0.0;
        std::size_t n = 0;
        for (auto const& p : parts)
            if (auto x = p.get(m))
            {
                s += *x;
                ++n;
            }
        if (n > 0)
            out.set(m, s / static_cast<double>(n));
    }
    return out;
}

ClassMeans hardening_replicate(HardeningInput const& input, BinCounts const& counts,
                               MonteCarloConfig const& cfg, std::size_t replicate)
{
    auto rng = RandomStream::substream(cfg.seed, replicate);
    auto const survivors = draw_sample(*input.bins, counts, rng, cfg.mode);

    std::vector<char> alive(index_bound(input.events), 0);
    for (auto id : survivors)
        if (id < alive.size())
            alive[id] = 1;

    std::vector<MetricVector> vecs;
    std::vector<SizeClass> classes;
    vecs.reserve(input.events.size());
    classes.reserve(input.events.size());
    for (std::size_t e = 0; e < input.events.size(); ++e)
    {
        auto const se = rebuild(e, input.events[e], alive, cfg.thresholds);
        vecs.push_back(super_metrics(se, cfg.rates));
        classes.push_back(se.size_class);
    }
    return class_means(vecs, classes);
}

CounterfactualResult run_hardening(HardeningInput const& input, double retention,
                                   MonteCarloConfig const& cfg, Execution exec)
{
    if (input.bins == nullptr)
        throw std::invalid_argument{"run_hardening: missing wind bins"};
    if (cfg.replicates < 2 || !(cfg.half_width > 0.0))
        throw std::invalid_argument{"run_hardening: need replicates >= 2 and half_width > 0"};

    CounterfactualResult result;
    result.label = "hardening";
    result.base = baseline(input.events, cfg);
    auto const counts = sample_counts(*input.bins, retention);

    std::vector<ClassMeans> reps;
    auto extend = [&](std::size_t to) {
        auto const from = reps.size();
        reps.resize(to);
        auto const lo = static_cast<std::int64_t>(from);
        auto const hi = static_cast<std::int64_t>(to);
        if (exec == Execution::parallel)
        {
#pragma omp parallel for schedule(dynamic)
            for (std::int64_t i = lo; i < hi; ++i)
                reps[i] = hardening_replicate(input, counts, cfg, static_cast<std::size_t>(i));
        }
        else
        {
            for (std::int64_t i = lo; i < hi; ++i)
                reps[i] = hardening_replicate(input, counts, cfg, static_cast<std::size_t>(i));
        }
    };

    std::size_t const cap = cfg.replicates * std::max<std::size_t>(cfg.max_factor, 1);
    std::size_t m = cfg.replicates;
    extend(m);

    for (;;)
    {
        bool all_met = true;
        ClassMeans means{};
        ClassTable hw{};
        for (auto c : kAllSizeClasses)
        {
            auto const ci = class_index(c);
            if (!result.base[ci])
                continue;
            MetricVector mean;
            for (auto metric : kAllMetrics)
            {
                std::vector<double> xs;
                xs.reserve(reps.size());
                for (auto const& r : reps)
                    if (r[ci])
                        if (auto x = r[ci]->get(metric))
                            xs.push_back(*x);
                if (xs.empty())
                    continue;
                double sum = 0.0;
                for (double x : xs)
                    sum += x;
                auto const count = static_cast<double>(xs.size());
                mean.set(metric, sum / count);

                auto const base = result.base[ci]->get(metric);
                double const scale = (base && *base != 0.0) ? *base : 1.0;
                double const norm_mean = sum / count / scale;
                double ss = 0.0;
                for (double x : xs)
                {
                    double const d = x / scale - norm_mean;
                    ss += d * d;
                }
                double half = std::numeric_limits<double>::infinity();
                if (xs.size() >= 2)
                {
                    double const sd = std::sqrt(ss / (count - 1.0));
                    half = student_t_critical(cfg.confidence, count - 1.0) * sd / std::sqrt(count);
                }
                hw[ci][metric_index(metric)] = half;
                if (!(half <= cfg.half_width))
                    all_met = false;
            }
            means[ci] = mean;
        }
        result.counterfactual = means;
        result.half_width = hw;
        if (all_met || !cfg.adaptive || m * 2 > cap)
            break;
        m *= 2;
        extend(m);
    }

    result.replicates = m;
    result.percent_change = percent_changes(result.base, result.counterfactual);
    for (auto c : kAllSizeClasses)
        for (auto metric : kAllMetrics)
        {
            auto const& h = result.half_width[class_index(c)][metric_index(metric)];
            if (h && !(*h <= cfg.half_width))
                result.warnings.push_back(
                    fmt::format("CI half-width target {} not met for {}/{}: achieved {:.6g} at m={}",
                                cfg.half_width, size_class_name(c), metric_name(metric), *h, m));
        }

    result.metadata = {
        {"counterfactual", "hardening"},
        {"retention", retention},
        {"sampling_mode", mode_name(cfg.mode)},
        {"super_event_duration_aggregation", "sum"},
        {"seed", cfg.seed},
        {"replicates", m},
        {"replicates_requested", cfg.replicates},
        {"half_width_target", cfg.half_width},
        {"confidence", cfg.confidence},
        {"undefined_rates", cfg.rates == RateConvention::absent ? "absent" : "zero"},
        {"bin_outages", input.bins->total()},
    };
    std::size_t kept = 0;
    for (auto const& [_, k] : counts)
        kept += k;
    result.metadata["bin_outages_kept"] = kept;
    return result;
}

CounterfactualResult run_hardening(HardeningInput const& input, ExponentialFit const& fit,
                                   HardeningSpec const& spec, MonteCarloConfig const& cfg,
                                   Execution exec)
{
    auto const sf = shift_factor(fit, spec);
    auto result = run_hardening(input, sf.retention, cfg, exec);
    result.metadata["shift_mph"] = sf.shift_mph;
    result.metadata["fit_b"] = fit.b;
    return result;
}

} // namespace windres
