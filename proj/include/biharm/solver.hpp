#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "biharm/kernels.hpp"
#include "biharm/profiles.hpp"
#include "biharm/radial_function.hpp"

namespace biharm {

/// Everything the existence machinery needs: profiles, exponents and kernel.
struct Problem {
    ManifoldProfile prof;
    SourceProfile src;
    ExponentPlan plan;
    KernelMode mode = KernelMode::SurrogateExact;

    KernelSpec spec() const { return {mode, prof}; }
};

/// 1024 log-spaced nodes on [1e-3, 1e6].
std::vector<double> default_solver_grid();

/// Sup of a ratio sampled on a grid and how much it still moves over the last decade.
struct RatioScan {
    RadialFunction ratio;
    double sup = 0.0;
    /// max over the last decade divided by its value at the start of that decade, minus 1
    double last_decade_growth = 0.0;
    /// (max - min) / max over the last decade
    double last_decade_spread = 0.0;
    /// log-log slope over the last decade
    double last_decade_slope = 0.0;
};

RatioScan scan_ratio(RadialFunction ratio);

struct Prop1Result {
    RatioScan first;   ///< potential(Psi F^(ap)) / F^b
    RatioScan second;  ///< potential(F^b) / F^a
};

struct Prop2Result {
    RatioScan first;    ///< potential(Psi F^(a(p-1))) / F^(b-a)
    double global_sup;  ///< sup of potential(F^(b-a))
    RadialFunction global;
};

/// Both throw DivergenceError naming the failing exponent inequality before any
/// quadrature runs, and PreconditionError on a grid with fewer than two nodes.
Prop1Result verify_prop1(const Problem& pb, const std::vector<double>& grid);
Prop2Result verify_prop2(const Problem& pb, const std::vector<double>& grid);

struct Constants {
    double C = 0.0;       ///< sup KK(Psi F^(ap)) / F^a
    double Cprime = 0.0;  ///< sup KK(Psi F^(a(p-1)))
};

/// Optional [lo, hi] restricts the sup to part of the grid.
struct SupWindow {
    double lo;
    double hi;
};

Constants estimate_constants(const Problem& pb, const std::vector<double>& grid,
                             std::optional<SupWindow> window = std::nullopt);

/// l = 0.9 min((2C)^(-1/(p-1)), (C' p)^(-1/(p-1))).
double pick_l(double p, const Constants& k);

/// l F^a on the grid, with power-law tails.
RadialFunction envelope(const Problem& pb, const std::vector<double>& grid);

/// Psi (u^p + l^p F^(ap)) on u's grid.
RadialFunction nonlinear_source(const Problem& pb, const RadialFunction& u);

/// T u = K K(Psi (u^p + l^p F^(ap))). Requires 0 <= u <= l F^a nodewise.
RadialFunction apply_T(const Problem& pb, const RadialFunction& u);

/// Largest sup|T u1 - T u2| / sup|u1 - u2| over random pairs u = c l F^a w(rho) in S_l.
double measure_lipschitz(const Problem& pb, const std::vector<double>& grid, int pairs, std::uint64_t seed);

struct SolveReport {
    Problem problem;
    Constants constants;
    double l = 0.0;
    double lipschitz_predicted = 0.0;
    double lipschitz_measured = 0.0;
    int iterations = 0;
    int iteration_bound = 0;
    double final_step = 0.0;
    std::vector<double> steps;
    double margin = 0.0;           ///< min(l F^a - u)
    double margin_relative = 0.0;  ///< min(1 - u / (l F^a))
    double h_min = 0.0;
    RadialFunction u;
    RadialFunction h;
    RadialFunction source;
    std::optional<double> residual_first;
    std::optional<double> residual_second;
};

struct SolveOptions {
    double tol = 1e-10;
    int maxit = 500;
    int lipschitz_pairs = 50;
    std::uint64_t seed = 1;
};

SolveReport solve_fixed_point(Problem pb, const std::vector<double>& grid, const SolveOptions& opt = {});

struct Residuals {
    double first = 0.0;   ///< sup|L u - h| / sup|h|
    double second = 0.0;  ///< sup|L h - source| / sup|source|
};

/// Finite-difference residuals of the second-order system, surrogate mode only.
Residuals residual_check(const ManifoldProfile& prof, KernelMode mode, const RadialFunction& u,
                         const RadialFunction& h, const RadialFunction& source);
Residuals residual_check(const SolveReport& report);

} // namespace biharm
