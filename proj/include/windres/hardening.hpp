#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <map>
#include <span>
#include <vector>

#include "windres/counterfactual.hpp"
#include "windres/curvefit.hpp"
#include "windres/events.hpp"
#include "windres/execution.hpp"
#include "windres/rng.hpp"
#include "windres/windalign.hpp"

namespace windres
{

/// Outage indices grouped by the rounded wind speed at their start.
struct WindBinIndex
{
    std::map<int, std::vector<std::size_t>> bins;

    std::size_t total() const;
};

WindBinIndex bin_outages(std::span<OutageRecord const> outages, InterpolatedWind const& wind);

using BinCounts = std::map<int, std::size_t>;

/// k_new(v) = ceil(k(v) * retention).
BinCounts sample_counts(WindBinIndex const& index, double retention);

/// k_new(v) = ceil(k(v) * ratio(v)), for curves where the reduction varies
/// with wind speed (ratio = F_new(v) / F(v)).
BinCounts sample_counts(WindBinIndex const& index, std::function<double(int)> const& ratio);

enum class SamplingMode
{
    without_replacement, // k_new distinct outages per bin
    with_replacement,    // k_new draws per bin, duplicates collapse
};

/// Surviving outage indices, ascending. Deterministic for a given stream
/// state. Throws std::invalid_argument when a count exceeds its bin in
/// without-replacement mode.
std::vector<std::size_t> draw_sample(WindBinIndex const& index, BinCounts const& counts,
                                     RandomStream& rng,
                                     SamplingMode mode = SamplingMode::without_replacement);

/// The events that one original event becomes after outages are removed
/// or restores move. Parts may be empty; the size class is the origin's.
struct SuperEvent
{
    std::size_t origin = 0;
    SizeClass size_class = SizeClass::small;
    std::vector<ResilienceEvent> parts;
};

/// Re-extracts the survivors of each original event. `survivors` holds
/// outage indices and must be sorted.
std::vector<SuperEvent> super_events(std::span<ResilienceEvent const> original,
                                     std::span<std::size_t const> survivors,
                                     SizeThresholds const& thresholds = {});

/// Sums event_size, outage_hours, event_duration, restore_duration,
/// customers_out, customer_hours across parts; averages restore_rate,
/// outage_rate, time_to_first_restore. An empty super event is all zeros.
MetricVector super_metrics(SuperEvent const& se,
                           RateConvention convention = RateConvention::absent);

struct MonteCarloConfig
{
    std::size_t replicates = 2000;
    double half_width = 0.01; // target CI half-width on new/base
    double confidence = 0.99;
    std::uint64_t seed = 0;
    bool adaptive = true;       // double the replicate count while the target fails
    std::size_t max_factor = 4; // cap: replicates * max_factor
    SamplingMode mode = SamplingMode::without_replacement;
    RateConvention rates = RateConvention::absent;
    SizeThresholds thresholds{};
};

struct HardeningInput
{
    std::span<ResilienceEvent const> events; // base events of one area
    WindBinIndex const* bins = nullptr;      // over the same outage indices
};

/// Monte Carlo over outage subsamples. Each replicate draws survivors,
/// rebuilds super events, and takes per-class means (one value per origin
/// event). Replicate i uses substream i of `cfg.seed`, and results reduce in
/// replicate order, so serial and parallel runs agree bit for bit.
CounterfactualResult run_hardening(HardeningInput const& input, double retention,
                                   MonteCarloConfig const& cfg,
                                   Execution exec = Execution::parallel);

CounterfactualResult run_hardening(HardeningInput const& input, ExponentialFit const& fit,
                                   HardeningSpec const& spec, MonteCarloConfig const& cfg,
                                   Execution exec = Execution::parallel);

/// Per-class means for replicate `replicate` alone.
ClassMeans hardening_replicate(HardeningInput const& input, BinCounts const& counts,
                               MonteCarloConfig const& cfg, std::size_t replicate);

} // namespace windres
