#pragma once

#include <span>

namespace biharm {

struct LineFit {
    double slope = 0.0;
    double intercept = 0.0;
    double correlation = 0.0;
};

/// Ordinary least squares y = slope * x + intercept.
LineFit fit_line(std::span<const double> x, std::span<const double> y);

/// Least-squares exponent of y ~ C x^e from positive samples.
LineFit fit_power_law(std::span<const double> x, std::span<const double> y);

} // namespace biharm
