#include "windres/curvefit.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <set>
#include <vector>

#include "windres/stats.hpp"

namespace windres
{

namespace
{

struct Observation
{
    double v;
    double y;
    double w;
};

struct Normal2
{
    // J^T W J, symmetric, and J^T W r.
    double h00 = 0, h01 = 0, h11 = 0;
    double g0 = 0, g1 = 0;
    double sse = 0;
};

Normal2 accumulate(std::vector<Observation> const& obs, double a, double b)
{
    Normal2 n;
    for (auto const& o : obs)
    {
        double const e = std::exp(b * o.v);
        double const model = a * e;
        double const r = o.y - model;
        double const ja = e;
        double const jb = a * o.v * e;
        n.h00 += o.w * ja * ja;
        n.h01 += o.w * ja * jb;
        n.h11 += o.w * jb * jb;
        n.g0 += o.w * ja * r;
        n.g1 += o.w * jb * r;
        n.sse += o.w * r * r;
    }
    return n;
}

double weighted_sse(std::vector<Observation> const& obs, double a, double b)
{
    double s = 0;
    for (auto const& o : obs)
    {
        double const r = o.y - a * std::exp(b * o.v);
        s += o.w * r * r;
    }
    return s;
}

// Least-squares line through (v, ln y) over the positive points.
std::pair<double, double> log_linear_start(std::vector<Observation> const& obs)
{
    double sv = 0, sy = 0, svv = 0, svy = 0;
    std::size_t n = 0;
    double v_min = 0, y_at_min = 0;
    for (auto const& o : obs)
    {
        if (o.y <= 0)
            continue;
        double const ly = std::log(o.y);
        if (n == 0 || o.v < v_min)
        {
            v_min = o.v;
            y_at_min = o.y;
        }
        sv += o.v;
        sy += ly;
        svv += o.v * o.v;
        svy += o.v * ly;
        ++n;
    }
    double b0 = 0.1;
    if (n >= 2)
    {
        double const den = static_cast<double>(n) * svv - sv * sv;
        if (den > 0)
            b0 = (static_cast<double>(n) * svy - sv * sy) / den;
    }
    if (!std::isfinite(b0))
        b0 = 0.1;
    return {y_at_min * std::exp(-b0 * v_min), b0};
}

} // namespace

double ExponentialFit::operator()(double v) const
{
    return a * std::exp(b * v);
}

ExponentialFit fit_exponential(OutageRateCurve const& curve, FitOptions const& options)
{
    std::vector<Observation> obs;
    std::set<int> speeds;
    for (auto const& p : curve.points)
    {
        if (p.mean_rate < 0 || !std::isfinite(p.mean_rate))
            throw FitError{"fit_exponential: negative or non-finite rate"};
        double const w = options.weighted ? static_cast<double>(p.exposure) : 1.0;
        obs.push_back({static_cast<double>(p.speed), p.mean_rate, w});
        speeds.insert(p.speed);
    }
    if (speeds.size() < 3)
        throw FitError{"fit_exponential: need at least three distinct wind speeds"};
    if (std::none_of(obs.begin(), obs.end(), [](auto const& o) { return o.y > 0; }))
        throw FitError{"fit_exponential: degenerate data, all rates are zero"};

    auto [a, b] = log_linear_start(obs);
    double lambda = 1e-3;
    auto n = accumulate(obs, a, b);
    bool converged = false;
    std::size_t iter = 0;
    for (; iter < options.max_iterations && !converged; ++iter)
    {
        bool accepted = false;
        while (!accepted)
        {
            // (H + lambda diag(H)) delta = g
            double const d00 = n.h00 * (1 + lambda);
            double const d11 = n.h11 * (1 + lambda);
            double const det = d00 * d11 - n.h01 * n.h01;
            if (!(det > 0) || !std::isfinite(det))
            {
                lambda *= 10;
                if (lambda > 1e20)
                    break;
                continue;
            }
            double const da = (d11 * n.g0 - n.h01 * n.g1) / det;
            double const db = (d00 * n.g1 - n.h01 * n.g0) / det;
            double const a_new = a + da;
            double const b_new = b + db;
            double const sse_new = weighted_sse(obs, a_new, b_new);
            if (std::isfinite(sse_new) && sse_new <= n.sse)
            {
                double const rel = std::max(std::abs(da) / std::max(std::abs(a), 1e-300),
                                            std::abs(db) / std::max(std::abs(b), 1e-300));
                a = a_new;
                b = b_new;
                n = accumulate(obs, a, b);
                lambda = std::max(lambda / 10, 1e-15);
                accepted = true;
                if (rel < options.tolerance)
                    converged = true;
            }
            else
            {
                lambda *= 10;
                if (lambda > 1e20)
                    break;
            }
        }
        // No downhill step at any damping: stationary to machine precision.
        if (!accepted)
            converged = true;
    }
    if (!converged)
        throw FitError{"fit_exponential: no convergence after max iterations"};
    if (!(a > 0) || !std::isfinite(a) || !std::isfinite(b))
        throw FitError{"fit_exponential: optimum has non-positive scale"};

    ExponentialFit fit;
    fit.a = a;
    fit.b = b;
    fit.residual_sse = n.sse;
    fit.points = obs.size();
    fit.iterations = iter;

    // Covariance s^2 (J^T W J)^-1 with s^2 = SSE / (n - 2).
    double const dof = static_cast<double>(obs.size()) - 2.0;
    double const det = n.h00 * n.h11 - n.h01 * n.h01;
    if (det > 0 && dof > 0)
    {
        double const s2 = n.sse / dof;
        double const t = student_t_critical(options.confidence, dof);
        fit.ci99_a = t * std::sqrt(s2 * n.h11 / det);
        fit.ci99_b = t * std::sqrt(s2 * n.h00 / det);
    }
    return fit;
}

HardeningSpec HardeningSpec::shift(double mph)
{
    if (!(mph >= 0) || !std::isfinite(mph))
        throw std::invalid_argument{"hardening shift must be >= 0 mph"};
    HardeningSpec s;
    s.shift_ = mph;
    return s;
}

HardeningSpec HardeningSpec::reduction(double fraction)
{
    if (!(fraction > 0 && fraction < 1))
        throw std::invalid_argument{"target reduction must lie in (0, 1)"};
    HardeningSpec s;
    s.reduction_ = fraction;
    return s;
}

ShiftFactor shift_factor(ExponentialFit const& fit, HardeningSpec const& spec)
{
    if (auto x = spec.shift_mph())
        return {std::exp(-fit.b * *x), *x};
    double const rho = 1.0 - *spec.target_reduction();
    return {rho, -std::log(rho) / fit.b};
}

double ShiftedCurve::operator()(double v) const
{
    return a * std::exp(b * (v - shift));
}

ShiftedCurve shifted_curve(ExponentialFit const& fit, double shift_mph)
{
    if (!(shift_mph >= 0))
        throw std::invalid_argument{"shifted_curve: shift must be >= 0"};
    return {fit.a, fit.b, shift_mph};
}

nlohmann::json fit_to_json(ExponentialFit const& fit)
{
    return {{"a", fit.a},
            {"b", fit.b},
            {"ci99_a", fit.ci99_a},
            {"ci99_b", fit.ci99_b},
            {"sse", fit.residual_sse},
            {"points", fit.points},
            {"iterations", fit.iterations},
            {"implied_x_for_10pct",
             shift_factor(fit, HardeningSpec::reduction(0.10)).shift_mph}};
}

ExponentialFit fit_from_json(nlohmann::json const& j)
{
    ExponentialFit f;
    f.a = j.at("a").get<double>();
    f.b = j.at("b").get<double>();
    f.ci99_a = j.value("ci99_a", 0.0);
    f.ci99_b = j.value("ci99_b", 0.0);
    f.residual_sse = j.value("sse", 0.0);
    f.points = j.value("points", std::size_t{0});
    f.iterations = j.value("iterations", std::size_t{0});
    return f;
}

} // namespace windres
