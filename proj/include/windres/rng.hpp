#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>
#include <random>

namespace windres
{

/// SplitMix64 finalizer; used to derive independent substream seeds.
constexpr std::uint64_t splitmix64(std::uint64_t x)
{
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

/// Seeded random stream with distributions written out explicitly, so draws
/// are identical across standard libraries (std:: distributions are not).
class RandomStream
{
  public:
    explicit RandomStream(std::uint64_t seed) : engine_(splitmix64(seed)) {}

    /// Substream `index` of a root seed; substreams are order-independent.
    static RandomStream substream(std::uint64_t seed, std::uint64_t index)
    {
        return RandomStream{splitmix64(seed) ^ splitmix64(~index)};
    }

    std::uint64_t bits() { return engine_(); }

    /// Uniform on [0, 1) with 53 random bits.
    double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

    /// Uniform integer in [0, n), unbiased (rejection on the top bits).
    std::uint64_t below(std::uint64_t n)
    {
        if (n <= 1)
            return 0;
        std::uint64_t const limit = ~std::uint64_t{0} - (~std::uint64_t{0} % n);
        std::uint64_t x;
        do
        {
            x = engine_();
        } while (x >= limit);
        return x % n;
    }

    double normal()
    {
        if (has_spare_)
        {
            has_spare_ = false;
            return spare_;
        }
        double u1;
        do
        {
            u1 = uniform();
        } while (u1 <= 0.0);
        double const u2 = uniform();
        double const r = std::sqrt(-2.0 * std::log(u1));
        double const theta = 2.0 * std::numbers::pi * u2;
        spare_ = r * std::sin(theta);
        has_spare_ = true;
        return r * std::cos(theta);
    }

    /// Poisson by sequential inversion; intended for small to moderate means.
    std::uint64_t poisson(double mean)
    {
        if (mean <= 0.0)
            return 0;
        if (mean > 500.0)
        {
            // Normal approximation far in the tail of what the generators use.
            double const x = std::round(mean + std::sqrt(mean) * normal());
            return x < 0.0 ? 0 : static_cast<std::uint64_t>(x);
        }
        double p = std::exp(-mean);
        double cdf = p;
        double const u = uniform();
        std::uint64_t k = 0;
        while (u >= cdf && p > 0.0)
        {
            ++k;
            p *= mean / static_cast<double>(k);
            cdf += p;
        }
        return k;
    }

  private:
    std::mt19937_64 engine_;
    double spare_ = 0.0;
    bool has_spare_ = false;
};

} // namespace windres
