#pragma once

#include <limits>
#include <optional>
#include <vector>

#include "biharm/profiles.hpp"

namespace biharm {

/// One factor x^(exponent * branch) of a power-law integrand, where x = r or
/// x = shift + r and branch is small_power for x <= 1, large_power for x >= 1.
struct PowerFactor {
    double small_power = 1.0;
    double large_power = 1.0;
    double exponent = 1.0;
    bool shifted = false;
};

/// profile(x)^exponent with x = r or shift + r.
PowerFactor profile_factor(ProfileKind kind, const ManifoldProfile& prof, const SourceProfile& src,
                           double exponent, bool shifted = false);
/// Plain power x^exponent.
PowerFactor power_factor(double exponent, bool shifted = false);

/// scale * prod(factors), optionally against dr/r. Between breakpoints
/// (r = 1 and shift + r = 1) it is exactly scale * r^A * (shift + r)^B.
struct PowerIntegrand {
    std::vector<PowerFactor> factors;
    double shift = 0.0;
    bool per_r = false;
    double scale = 1.0;

    double operator()(double r) const;
    /// Interior breakpoints of the piecewise form inside (lo, hi).
    std::vector<double> breakpoints(double lo, double hi) const;
};

struct QuadratureResult {
    double value = 0.0;
    double abs_error_estimate = 0.0;
    /// Decay exponent q of the r^(-q-1) tail when hi is infinite, NaN otherwise.
    double tail_exponent = std::numeric_limits<double>::quiet_NaN();
    bool diverged = false;
};

inline constexpr double kInfinity = std::numeric_limits<double>::infinity();

/// Integral over (lo, hi), hi may be kInfinity and lo may be 0. Tails and the
/// origin piece are closed-form; interior pieces use log-spaced Gauss-Legendre
/// panels doubled until the value settles to 1e-12 relative.
QuadratureResult integrate(const PowerIntegrand& integrand, double lo, double hi);

/// Single Gauss panel (in log r) per smooth piece of (lo, hi), 0 < lo < hi < inf.
/// For short cells where the full refinement loop would be wasted.
double integrate_cell(const PowerIntegrand& integrand, double lo, double hi, int order = 8);

/// Integral of r^a over (lo, hi), 0 < lo <= hi, stable as a -> -1.
double power_integral(double a, double lo, double hi);

/// Integral of r^(-q-1) over (T, inf): T^(-q)/q for q > 0, nothing otherwise.
std::optional<double> analytic_tail(double q, double T);

struct GaussRule {
    std::vector<double> nodes;   // on (-1, 1)
    std::vector<double> weights;
};
const GaussRule& gauss_legendre(int order);

} // namespace biharm
