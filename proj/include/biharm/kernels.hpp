#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "biharm/profiles.hpp"
#include "biharm/quad.hpp"
#include "biharm/radial_function.hpp"

namespace biharm {

enum class KernelMode { SplitComparison, SurrogateExact, EuclideanExact };

std::string to_string(KernelMode mode);
KernelMode parse_kernel_mode(const std::string& text);

struct KernelSpec {
    KernelMode mode = KernelMode::SplitComparison;
    ManifoldProfile prof;
};

/// Radial source scale * prod(factors)(r) for r < support, zero beyond.
struct ClosedSource {
    std::vector<PowerFactor> factors;
    double scale = 1.0;
    double support = kInfinity;

    static ClosedSource power(double exponent, double scale = 1.0);
    static ClosedSource ball(double radius, double scale = 1.0);

    double operator()(double r) const;
    /// Exponent of the source as r -> 0 and as r -> infinity (ignoring support).
    double left_exponent() const;
    double right_exponent() const;
};

/// Exact-mode kernel data: k(rho, r) = max(rho, r)^(-kappa) against c r^(mu-1) dr.
struct ExactKernel {
    double kappa;
    double mu;
    double c;
};
ExactKernel exact_kernel(const KernelSpec& spec);

/// Surface area of the unit sphere in R^n.
double sphere_area(int n);

/// int_0^inf g(rho + r) g(r) v(r) dr / r, the radial biharmonic kernel from the pole.
QuadratureResult compose_green(const ManifoldProfile& prof, double rho);

/// Potential of a closed-form source at one radius. Exact modes accept rho = 0.
double potential_at(const KernelSpec& spec, const ClosedSource& src, double rho);

RadialFunction potential(const KernelSpec& spec, const ClosedSource& src, const std::vector<double>& grid);

/// Potential of a tabulated source, evaluated on the source's own grid. Tails
/// beyond the grid follow the source's power-law extrapolation.
RadialFunction potential(const KernelSpec& spec, const RadialFunction& src);

/// Annulus lower bound R^(-(2 gamma - alpha)) with unit constant.
double annulus_lower_bound(const ManifoldProfile& prof, double R);

struct MonteCarloEstimate {
    double estimate = 0.0;
    double stderr_ = 0.0;
};

/// Importance-sampled int_{R^n} |x - y|^(2-n) src(|y|) dy with |x| = x_radius.
MonteCarloEstimate mc_oracle(int n, double x_radius, const ClosedSource& src, std::uint64_t samples,
                             std::uint64_t seed);

} // namespace biharm
