#include "biharm/spectral.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <numbers>
#include <string>

#include "biharm/errors.hpp"

namespace biharm {

namespace {

constexpr double kRayleighTol = 1e-12;
constexpr int kMaxIterations = 500;

std::vector<double> uniform_mesh(double lo, double hi, std::size_t mesh) {
    std::vector<double> g(mesh);
    const double h = (hi - lo) / static_cast<double>(mesh - 1);
    for (std::size_t i = 0; i < mesh; ++i) g[i] = lo + h * static_cast<double>(i);
    g.back() = hi;
    return g;
}

/// Solves a symmetric tridiagonal system (diag, off) x = rhs in place.
void thomas(const std::vector<double>& diag, const std::vector<double>& off, std::vector<double>& x) {
    const std::size_t n = diag.size();
    std::vector<double> c(n, 0.0);
    double denom = diag[0];
    c[0] = n > 1 ? off[0] / denom : 0.0;
    x[0] /= denom;
    for (std::size_t i = 1; i < n; ++i) {
        denom = diag[i] - off[i - 1] * c[i - 1];
        if (i + 1 < n) c[i] = off[i] / denom;
        x[i] = (x[i] - off[i - 1] * x[i - 1]) / denom;
    }
    for (std::size_t i = n - 1; i-- > 0;) x[i] -= c[i] * x[i + 1];
}

} // namespace

SurrogateOperator SurrogateOperator::from(const ManifoldProfile& prof) {
    return {prof.alpha.value(), prof.gamma.value(), false};
}

SurrogateOperator SurrogateOperator::test() {
    return {1.0, 1.0, true};
}

double SurrogateOperator::stiffness(double r) const {
    return test_mode ? 1.0 : std::pow(r, gamma + 1.0) / gamma;
}

double SurrogateOperator::weight(double r) const {
    return test_mode ? 1.0 : alpha * std::pow(r, alpha - 1.0);
}

std::vector<double> SurrogateOperator::apply(const std::vector<double>& grid, const std::vector<double>& u) const {
    if (grid.size() != u.size() || grid.size() < 3)
        throw PreconditionError("operator needs matching grid and values with at least three nodes");
    const std::size_t n = grid.size();
    std::vector<double> out(n, std::numeric_limits<double>::quiet_NaN());
    for (std::size_t i = 1; i + 1 < n; ++i) {
        const double hm = grid[i] - grid[i - 1], hp = grid[i + 1] - grid[i];
        const double am = stiffness(0.5 * (grid[i] + grid[i - 1]));
        const double ap = stiffness(0.5 * (grid[i + 1] + grid[i]));
        const double flux = ap * (u[i + 1] - u[i]) / hp - am * (u[i] - u[i - 1]) / hm;
        out[i] = -flux / (0.5 * (hm + hp)) / weight(grid[i]);
    }
    return out;
}

EigenPair lowest_eigenpair(const SurrogateOperator& op, double r_in, double r_out, std::size_t mesh) {
    if (!(r_out > r_in) || (!op.test_mode && !(r_in > 0.0)))
        throw PreconditionError("annulus needs 0 < r_in < r_out");
    if (op.test_mode && !(r_in >= 0.0))
        throw PreconditionError("test-mode interval needs 0 <= r_in < r_out");
    if (mesh < 64) throw PreconditionError("eigen mesh needs at least 64 nodes");

    const std::vector<double> grid = uniform_mesh(r_in, r_out, mesh);
    const double h = (r_out - r_in) / static_cast<double>(mesh - 1);
    const std::size_t m = mesh - 2;  // interior unknowns
    std::vector<double> diag(m), off(m > 0 ? m - 1 : 0), w(m);
    for (std::size_t k = 0; k < m; ++k) {
        const double r = grid[k + 1];
        const double am = op.stiffness(r - 0.5 * h), ap = op.stiffness(r + 0.5 * h);
        diag[k] = (am + ap) / (h * h);
        if (k + 1 < m) off[k] = -ap / (h * h);
        w[k] = op.weight(r);
    }
    // symmetric scaling by W^(-1/2) keeps the Rayleigh quotient well conditioned
    auto rayleigh = [&](const std::vector<double>& x) {
        double num = 0.0, den = 0.0;
        for (std::size_t k = 0; k < m; ++k) {
            double ax = diag[k] * x[k];
            if (k > 0) ax += off[k - 1] * x[k - 1];
            if (k + 1 < m) ax += off[k] * x[k + 1];
            num += x[k] * ax;
            den += w[k] * x[k] * x[k];
        }
        return num / den;
    };

    std::vector<double> x(m);
    for (std::size_t k = 0; k < m; ++k) {
        const double t = static_cast<double>(k + 1) / static_cast<double>(m + 1);
        x[k] = std::sin(std::numbers::pi * t);
    }
    double lambda = rayleigh(x);
    std::vector<double> trace{lambda};
    for (int it = 1; it <= kMaxIterations; ++it) {
        std::vector<double> y(m);
        for (std::size_t k = 0; k < m; ++k) y[k] = w[k] * x[k];
        thomas(diag, off, y);
        const double scale = *std::max_element(y.begin(), y.end(), [](double a, double b) {
            return std::abs(a) < std::abs(b);
        });
        for (double& v : y) v /= scale;
        x.swap(y);
        const double next = rayleigh(x);
        trace.push_back(next);
        const bool done = std::abs(next - lambda) <= kRayleighTol * std::abs(next);
        lambda = next;
        if (done) {
            EigenPair pair;
            pair.lambda = lambda;
            pair.grid = grid;
            pair.vector.assign(mesh, 0.0);
            for (std::size_t k = 0; k < m; ++k) pair.vector[k + 1] = std::max(0.0, x[k]);
            pair.iterations = it;
            return pair;
        }
    }
    std::string msg = "inverse iteration did not converge; last Rayleigh quotients:";
    for (std::size_t k = trace.size() > 5 ? trace.size() - 5 : 0; k < trace.size(); ++k) {
        char buf[40];
        std::snprintf(buf, sizeof buf, " %.15g", trace[k]);
        msg += buf;
    }
    throw ConvergenceError(msg);
}

EigenResult lambda1_annulus(const SurrogateOperator& op, double r_in, double r_out, std::size_t mesh) {
    const EigenPair base = lowest_eigenpair(op, r_in, r_out, mesh);
    const EigenPair fine = lowest_eigenpair(op, r_in, r_out, 2 * (mesh - 1) + 1);
    EigenResult res;
    res.lambda1 = base.lambda;
    res.lambda1_fine = fine.lambda;
    res.extrapolated = (4.0 * fine.lambda - base.lambda) / 3.0;
    res.error_estimate = std::abs(res.extrapolated - fine.lambda);
    res.mesh = mesh;
    res.iterations = base.iterations + fine.iterations;
    return res;
}

double fd_constant() {
    static const double value = [] {
        const SurrogateOperator op = SurrogateOperator::test();
        const std::size_t mesh = 257;
        const std::vector<double> grid = uniform_mesh(0.0, 1.0, mesh);
        std::vector<double> f(mesh);
        for (std::size_t i = 0; i < mesh; ++i) f[i] = std::sin(std::numbers::pi * grid[i]);
        const std::vector<double> lf = op.apply(grid, f);
        std::vector<double> lf_full = lf;
        lf_full.front() = lf_full.back() = 0.0;
        const std::vector<double> llf = op.apply(grid, lf_full);
        const double lam2 = std::pow(std::numbers::pi, 4);
        const double h = grid[1] - grid[0];
        double worst = 0.0;
        for (std::size_t i = 2; i + 2 < mesh; ++i) worst = std::max(worst, std::abs(llf[i] - lam2 * f[i]));
        return worst / (lam2 * h * h);
    }();
    return value;
}

InfBoundResult check_inf_bound(const SurrogateOperator& op, const RadialFunction& f, const EigenResult& lam) {
    f.validate();
    const std::size_t n = f.size();
    if (n < 5) throw PreconditionError("inf-bound check needs at least five nodes");
    const double h = f.grid[1] - f.grid[0];
    for (std::size_t i = 1; i < n; ++i)
        if (std::abs((f.grid[i] - f.grid[i - 1]) - h) > 1e-9 * (f.grid.back() - f.grid.front()))
            throw PreconditionError("inf-bound check needs a uniform annulus mesh");
    for (double v : f.values)
        if (v < 0.0) throw PreconditionError("inf-bound check needs f >= 0");

    const std::vector<double> lf = op.apply(f.grid, f.values);
    // roundoff allowance: a source vanishing on the band leaves |L f| at noise level
    double lf_scale = 0.0;
    for (std::size_t i = 1; i + 1 < n; ++i) lf_scale = std::max(lf_scale, std::abs(lf[i]));
    const double slack = 1e-8 * lf_scale;
    if (lf[1] < -slack || lf[n - 2] < -slack)
        throw PreconditionError("boundary hypothesis L f >= 0 fails on a boundary band; the bound does not apply");
    std::vector<double> lf_full = lf;
    lf_full.front() = lf_full.back() = 0.0;  // never read by the interior stencil below
    const std::vector<double> llf = op.apply(f.grid, lf_full);

    const double lam2 = lam.lambda1 * lam.lambda1;
    InfBoundResult res;
    res.min_value = std::numeric_limits<double>::infinity();
    for (std::size_t i = 2; i + 2 < n; ++i) {
        const double v = llf[i] - lam2 * f.values[i];
        if (v < res.min_value) {
            res.min_value = v;
            res.argmin = f.grid[i];
        }
    }
    const double h_rel = h / (f.grid.back() - f.grid.front());
    const double fmax = *std::max_element(f.values.begin(), f.values.end());
    res.tau_fd = fd_constant() * h_rel * h_rel * lam2 * fmax;
    return res;
}

} // namespace biharm
