#pragma once

#include <cstddef>
#include <vector>

#include "biharm/profiles.hpp"
#include "biharm/radial_function.hpp"

namespace biharm {

/// L u = -(1/w) (a u')' with a(r) = r^(gamma+1)/gamma and w(r) = alpha r^(alpha-1).
/// Its Green function from the pole is exactly rho^(-gamma) and the weighted
/// volume of (0, R) is R^alpha. Test mode uses a = w = 1.
struct SurrogateOperator {
    double alpha = 1.0;
    double gamma = 1.0;
    bool test_mode = false;

    static SurrogateOperator from(const ManifoldProfile& prof);
    static SurrogateOperator test();

    double stiffness(double r) const;
    double weight(double r) const;

    /// Three-point conservative discretization of L at nodes 1..N-2 of an
    /// arbitrary increasing grid; the result has the same size with the two
    /// end entries set to NaN.
    std::vector<double> apply(const std::vector<double>& grid, const std::vector<double>& u) const;
};

struct EigenResult {
    double lambda1 = 0.0;           ///< discrete value at the base mesh
    double lambda1_fine = 0.0;      ///< discrete value with twice as many intervals
    double extrapolated = 0.0;      ///< Richardson (4 fine - base) / 3
    double error_estimate = 0.0;
    std::size_t mesh = 0;           ///< node count including both endpoints
    int iterations = 0;
};

struct EigenPair {
    double lambda = 0.0;
    std::vector<double> grid;
    std::vector<double> vector;  ///< zero at both endpoints, max-normalized, positive
    int iterations = 0;
};

/// Lowest Dirichlet eigenpair on a uniform mesh of `mesh` nodes over (r_in, r_out).
EigenPair lowest_eigenpair(const SurrogateOperator& op, double r_in, double r_out, std::size_t mesh);

EigenResult lambda1_annulus(const SurrogateOperator& op, double r_in, double r_out, std::size_t mesh = 512);

struct InfBoundResult {
    double min_value = 0.0;
    double tau_fd = 0.0;
    double argmin = 0.0;
    bool holds() const { return min_value <= tau_fd; }
};

/// Finite-difference constant measured on sin(pi x) in test mode: the relative
/// error of the discrete L^2 per unit h^2.
double fd_constant();

/// min over interior nodes of L^2 f - lambda1^2 f for f sampled on the uniform
/// eigen mesh. Requires f >= 0 and L f >= 0 on the two boundary bands.
InfBoundResult check_inf_bound(const SurrogateOperator& op, const RadialFunction& f, const EigenResult& lam);

} // namespace biharm
