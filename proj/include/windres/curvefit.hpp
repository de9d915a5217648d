#pragma once

#include <cstddef>
#include <optional>
#include <stdexcept>

#include <json.hpp>

#include "windres/windalign.hpp"

namespace windres
{

class FitError : public std::runtime_error
{
  public:
    using std::runtime_error::runtime_error;
};

/// F(v) = a * exp(b * v), with 99% confidence half-widths from the
/// linearized covariance at the optimum.
struct ExponentialFit
{
    double a = 0.0; // outages per minute
    double b = 0.0; // per mph
    double ci99_a = 0.0;
    double ci99_b = 0.0;
    double residual_sse = 0.0;
    std::size_t points = 0;
    std::size_t iterations = 0;

    double operator()(double v) const;
};

struct FitOptions
{
    bool weighted = false; // weight each point by its exposure
    std::size_t max_iterations = 200;
    double tolerance = 1e-10; // relative parameter change
    double confidence = 0.99;
};

/// Damped least squares (Levenberg-Marquardt) with the analytic Jacobian.
/// Starts from a log-linear regression over the strictly positive points.
/// Throws FitError on fewer than three points, all-zero rates, or
/// non-convergence.
ExponentialFit fit_exponential(OutageRateCurve const& curve, FitOptions const& options = {});

/// A rightward shift of the curve by `shift_mph`, or a target fractional
/// reduction of the outage rate. Exactly one is set.
class HardeningSpec
{
  public:
    static HardeningSpec shift(double mph);
    static HardeningSpec reduction(double fraction);

    std::optional<double> shift_mph() const { return shift_; }
    std::optional<double> target_reduction() const { return reduction_; }

  private:
    std::optional<double> shift_;
    std::optional<double> reduction_;
};

struct ShiftFactor
{
    double retention = 1.0; // rho = exp(-b x), in (0, 1]
    double shift_mph = 0.0; // x
};

ShiftFactor shift_factor(ExponentialFit const& fit, HardeningSpec const& spec);

/// v -> a exp(b (v - x)).
struct ShiftedCurve
{
    double a = 0.0;
    double b = 0.0;
    double shift = 0.0;

    double operator()(double v) const;
};

ShiftedCurve shifted_curve(ExponentialFit const& fit, double shift_mph);

nlohmann::json fit_to_json(ExponentialFit const& fit);
ExponentialFit fit_from_json(nlohmann::json const& j);

} // namespace windres
