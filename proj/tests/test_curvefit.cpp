#include <doctest.h>

#include <cmath>

#include "windres/curvefit.hpp"
#include "windres/rng.hpp"

using namespace windres;

namespace
{

OutageRateCurve exact_curve(double a, double b, int v_max)
{
    OutageRateCurve c;
    for (int v = 0; v <= v_max; ++v)
        c.points.push_back({v, a * std::exp(b * v), static_cast<std::size_t>(100 - 3 * v)});
    return c;
}

double rel(double x, double ref)
{
    return std::abs(x / ref - 1.0);
}

} // namespace

TEST_SUITE("curvefit")
{
    TEST_CASE("noiseless recovery")
    {
        for (bool weighted : {false, true})
        {
            FitOptions opts;
            opts.weighted = weighted;
            auto const f1 = fit_exponential(exact_curve(0.006, 0.48, 25), opts);
            CHECK(rel(f1.a, 0.006) <= 1e-6);
            CHECK(rel(f1.b, 0.48) <= 1e-6);
            auto const f2 = fit_exponential(exact_curve(1.44e-7, 0.6, 30), opts);
            CHECK(rel(f2.a, 1.44e-7) <= 1e-6);
            CHECK(rel(f2.b, 0.6) <= 1e-6);
            double total = 0.0;
            for (auto const& p : exact_curve(1.44e-7, 0.6, 30).points)
                total += p.mean_rate * p.mean_rate;
            CHECK(f2.residual_sse <= 1e-10 * total);
        }
    }

    TEST_CASE("zero rates stay in the fit")
    {
        auto c = exact_curve(0.006, 0.48, 20);
        c.points[0].mean_rate = 0.0;
        c.points[1].mean_rate = 0.0;
        auto const f = fit_exponential(c);
        CHECK(f.points == c.points.size());
        CHECK(rel(f.b, 0.48) < 1e-3);
    }

    TEST_CASE("99% intervals cover the generator")
    {
        auto rng = RandomStream::substream(3, 0);
        int covered_a = 0;
        int covered_b = 0;
        for (int trial = 0; trial < 100; ++trial)
        {
            auto c = exact_curve(0.006, 0.48, 24);
            c.points.erase(c.points.begin(), c.points.begin() + 12);
            for (auto& p : c.points)
                p.mean_rate += 0.3 * rng.normal();
            auto const f = fit_exponential(c);
            covered_a += std::abs(f.a - 0.006) <= f.ci99_a;
            covered_b += std::abs(f.b - 0.48) <= f.ci99_b;
        }
        CHECK(covered_a >= 95);
        CHECK(covered_b >= 95);
    }

    TEST_CASE("degenerate input")
    {
        OutageRateCurve zeros;
        for (int v = 0; v < 5; ++v)
            zeros.points.push_back({v, 0.0, 1});
        CHECK_THROWS_AS(fit_exponential(zeros), FitError);
        CHECK_THROWS_AS(fit_exponential(exact_curve(1, 0.1, 1)), FitError);
    }

    TEST_CASE("implied shift for a target reduction")
    {
        ExponentialFit f1;
        f1.a = 1.44e-7;
        f1.b = 0.6;
        auto const s1 = shift_factor(f1, HardeningSpec::reduction(0.10));
        CHECK(s1.retention == doctest::Approx(0.9));
        CHECK(s1.shift_mph == doctest::Approx(std::log(1 / 0.9) / 0.6).epsilon(1e-12));
        CHECK(std::round(s1.shift_mph * 100) / 100 == 0.18);

        ExponentialFit f2;
        f2.a = 0.006;
        f2.b = 0.48;
        auto const s2 = shift_factor(f2, HardeningSpec::reduction(0.10));
        CHECK(std::round(s2.shift_mph * 100) / 100 == 0.22);

        CHECK(shift_factor(f2, HardeningSpec::shift(0.0)).retention == 1.0);
        CHECK(shift_factor(f2, HardeningSpec::shift(1.0)).retention ==
              doctest::Approx(std::exp(-0.48)));
    }

    TEST_CASE("shifted curve")
    {
        ExponentialFit f;
        f.a = 0.006;
        f.b = 0.48;
        auto const same = shifted_curve(f, 0.0);
        auto const s = shifted_curve(f, 0.22);
        double prev = 0.0;
        for (double v = 0; v <= 40; v += 0.5)
        {
            CHECK(same(v) == f(v));
            CHECK(s(v) / f(v) == doctest::Approx(0.9).epsilon(0.003));
            CHECK(s(v) / f(v) == doctest::Approx(std::exp(-0.48 * 0.22)).epsilon(1e-12));
            CHECK(s(v) > prev);
            prev = s(v);
        }
        auto const twice = shifted_curve(f, 0.3);
        ExponentialFit g = f;
        g.a = shifted_curve(f, 0.1)(0.0);
        CHECK(shifted_curve(g, 0.2)(7.0) == doctest::Approx(twice(7.0)).epsilon(1e-12));
    }

    TEST_CASE("fit json round trip")
    {
        auto const f = fit_exponential(exact_curve(0.006, 0.48, 25));
        auto const back = fit_from_json(fit_to_json(f));
        CHECK(back.a == f.a);
        CHECK(back.b == f.b);
        CHECK(back.ci99_b == f.ci99_b);
    }
}
