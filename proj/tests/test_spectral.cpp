#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "biharm/errors.hpp"
#include "biharm/fit.hpp"
#include "biharm/kernels.hpp"
#include "biharm/spectral.hpp"

using namespace biharm;

namespace {

const double kPi2 = std::numbers::pi * std::numbers::pi;

ManifoldProfile make(long a_num, long a_den, long g_num, long g_den) {
    return ManifoldProfile::make(Rational(a_num, a_den), Rational(g_num, g_den), 6);
}

/// u(r_out) for the continuum problem (a u')' = -lambda w u, u(r_in) = 0, a u'(r_in) = 1, by RK4.
double shoot(const SurrogateOperator& op, double r_in, double r_out, double lambda) {
    const int steps = 4000;
    const double h = (r_out - r_in) / steps;
    double u = 0.0, flux = 1.0;
    auto du = [&](double r, double fl) { return fl / op.stiffness(r); };
    auto dflux = [&](double r, double uu) { return -lambda * op.weight(r) * uu; };
    for (int i = 0; i < steps; ++i) {
        const double r = r_in + i * h;
        const double k1u = du(r, flux), k1f = dflux(r, u);
        const double k2u = du(r + h / 2, flux + h / 2 * k1f), k2f = dflux(r + h / 2, u + h / 2 * k1u);
        const double k3u = du(r + h / 2, flux + h / 2 * k2f), k3f = dflux(r + h / 2, u + h / 2 * k2u);
        const double k4u = du(r + h, flux + h * k3f), k4f = dflux(r + h, u + h * k3u);
        u += h / 6 * (k1u + 2 * k2u + 2 * k3u + k4u);
        flux += h / 6 * (k1f + 2 * k2f + 2 * k3f + k4f);
    }
    return u;
}

/// First root of the shooting function, bracketed by a geometric scan then bisected.
double shooting_lambda1(const SurrogateOperator& op, double r_in, double r_out, double guess) {
    double lo = guess * 1e-3, hi = lo;
    while (shoot(op, r_in, r_out, hi) > 0.0) {
        lo = hi;
        hi *= 1.2;
    }
    for (int i = 0; i < 200 && hi - lo > 1e-13 * hi; ++i) {
        const double mid = 0.5 * (lo + hi);
        (shoot(op, r_in, r_out, mid) > 0.0 ? lo : hi) = mid;
    }
    return 0.5 * (lo + hi);
}

} // namespace

TEST_CASE("test mode on the unit interval gives pi squared") {
    const auto res = lambda1_annulus(SurrogateOperator::test(), 0.0, 1.0, 512);
    CHECK(std::abs(res.extrapolated - kPi2) < 1e-3);
    CHECK(std::abs(res.lambda1 - kPi2) < 1e-3);
    // the discrete Dirichlet Laplacian has eigenvalue 4/h^2 sin^2(pi h / 2) exactly
    const double h = 1.0 / 511.0;
    CHECK(res.lambda1 == doctest::Approx(4.0 / (h * h) * std::pow(std::sin(std::numbers::pi * h / 2), 2)).epsilon(1e-10));
    CHECK(res.mesh == 512);
    CHECK(res.error_estimate >= 0.0);
    CHECK(res.error_estimate < 1e-3);
}

TEST_CASE("eigenvalue scales like R^-(alpha - gamma)") {
    struct Case { ManifoldProfile prof; double expect; };
    for (const auto& c : {Case{make(6, 1, 4, 1), -2.0}, Case{make(5, 1, 3, 1), -2.0}, Case{make(9, 2, 3, 1), -1.5}}) {
        const auto op = SurrogateOperator::from(c.prof);
        std::vector<double> R{1e2, 1e3, 1e4}, L;
        for (double r : R) L.push_back(lambda1_annulus(op, r / 4, r).extrapolated);
        CHECK(fit_power_law(R, L).slope == doctest::Approx(c.expect).epsilon(0.05));
    }
}

TEST_CASE("scaled eigenvalue is constant on the witness annuli") {
    for (const auto& prof : {make(6, 1, 4, 1), make(5, 1, 3, 1), make(9, 2, 3, 1)}) {
        const auto op = SurrogateOperator::from(prof);
        const double e = prof.alpha.value() - prof.gamma.value();
        std::vector<double> scaled;
        for (double R : {1e2, 1e3, 1e4}) scaled.push_back(lambda1_annulus(op, 0.5 * R, 16 * R).extrapolated * std::pow(R, e));
        const auto [mn, mx] = std::minmax_element(scaled.begin(), scaled.end());
        CHECK(*mx / *mn < 1.1);
    }
}

TEST_CASE("domain monotonicity") {
    const auto op = SurrogateOperator::from(make(6, 1, 4, 1));
    CHECK(lambda1_annulus(op, 1, 2).extrapolated > lambda1_annulus(op, 1, 4).extrapolated);
    CHECK(lambda1_annulus(op, 2, 4).extrapolated > lambda1_annulus(op, 1, 4).extrapolated);
    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> u(1.1, 3.0);
    for (int k = 0; k < 10; ++k) {
        const double a = u(rng), b = a * u(rng);
        CHECK(lambda1_annulus(op, a, b * 1.5, 128).extrapolated < lambda1_annulus(op, a, b, 128).extrapolated);
    }
}

TEST_CASE("second-order convergence of the discrete eigenvalue") {
    const auto op = SurrogateOperator::from(make(6, 1, 4, 1));
    const double a = lowest_eigenpair(op, 1, 4, 64).lambda;
    const double b = lowest_eigenpair(op, 1, 4, 127).lambda;
    const double c = lowest_eigenpair(op, 1, 4, 253).lambda;
    const double ratio = (a - b) / (b - c);
    CHECK(ratio >= 3.5);
    CHECK(ratio <= 4.5);
}

TEST_CASE("extrapolated eigenvalue matches a shooting-method oracle") {
    for (const auto& prof : {make(6, 1, 4, 1), make(9, 2, 3, 1)}) {
        const auto op = SurrogateOperator::from(prof);
        const auto res = lambda1_annulus(op, 1.0, 4.0, 512);
        const double oracle = shooting_lambda1(op, 1.0, 4.0, res.lambda1);
        CHECK(res.extrapolated == doctest::Approx(oracle).epsilon(1e-7));
        CHECK(std::abs(res.extrapolated - oracle) <= 10 * res.error_estimate + 1e-9 * oracle);
    }
}

TEST_CASE("eigenvector is positive and max-normalized") {
    const auto pair = lowest_eigenpair(SurrogateOperator::from(make(6, 1, 4, 1)), 1, 4, 200);
    CHECK(pair.vector.front() == 0.0);
    CHECK(pair.vector.back() == 0.0);
    double mx = 0.0;
    for (std::size_t i = 1; i + 1 < pair.vector.size(); ++i) {
        CHECK(pair.vector[i] > 0.0);
        mx = std::max(mx, pair.vector[i]);
    }
    CHECK(mx == doctest::Approx(1.0));
}

TEST_CASE("eigen preconditions") {
    const auto op = SurrogateOperator::from(make(6, 1, 4, 1));
    CHECK_THROWS_AS(lambda1_annulus(op, 1, 4, 63), PreconditionError);
    CHECK_THROWS_AS(lambda1_annulus(op, 4, 1), PreconditionError);
    CHECK_THROWS_AS(lambda1_annulus(op, 0, 1), PreconditionError);
    CHECK_NOTHROW(lambda1_annulus(SurrogateOperator::test(), 0, 1, 64));
}

TEST_CASE("operator inverts the surrogate kernel") {
    // L applied to the potential of a smooth source returns the source
    const auto prof = make(6, 1, 4, 1);
    const auto op = SurrogateOperator::from(prof);
    const KernelSpec spec{KernelMode::SurrogateExact, prof};
    std::vector<double> grid;
    for (int i = 0; i <= 400; ++i) grid.push_back(1.0 + 3.0 * i / 400);
    const auto pot = potential(spec, ClosedSource::power(-4.0), grid);
    const auto lf = op.apply(grid, pot.values);
    CHECK(std::isnan(lf.front()));
    CHECK(std::isnan(lf.back()));
    for (std::size_t i = 1; i + 1 < grid.size(); ++i) CHECK(lf[i] == doctest::Approx(std::pow(grid[i], -4.0)).epsilon(1e-4));
}

TEST_CASE("inf bound: equality case on the eigenvector") {
    const auto op = SurrogateOperator::from(make(6, 1, 4, 1));
    const auto pair = lowest_eigenpair(op, 1, 4, 256);
    EigenResult lam;
    lam.lambda1 = pair.lambda;
    const auto res = check_inf_bound(op, RadialFunction{pair.grid, pair.vector, 0, 0}, lam);
    CHECK(std::abs(res.min_value) <= res.tau_fd);
    CHECK(res.holds());
    CHECK(res.tau_fd > 0.0);
}

TEST_CASE("inf bound on the potential of a positive bump") {
    const auto prof = make(6, 1, 4, 1);
    const auto op = SurrogateOperator::from(prof);
    const auto pair = lowest_eigenpair(op, 1, 4, 256);
    EigenResult lam;
    lam.lambda1 = pair.lambda;
    const KernelSpec spec{KernelMode::SurrogateExact, prof};
    const auto f = potential(spec, ClosedSource::ball(5.0), pair.grid);
    const auto res = check_inf_bound(op, f, lam);
    CHECK(res.holds());
    CHECK(res.min_value < 0.0);
}

TEST_CASE("inf bound holds on random admissible potentials") {
    std::mt19937_64 rng(99);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    const ManifoldProfile profs[] = {make(6, 1, 4, 1), make(5, 1, 3, 1), make(9, 2, 3, 1)};
    int checked = 0;
    for (int k = 0; k < 100; ++k) {
        const auto& prof = profs[k % 3];
        const double al = prof.alpha.value(), ga = prof.gamma.value();
        const auto op = SurrogateOperator::from(prof);
        const double r_in = 0.5 + 2.0 * u(rng), r_out = r_in * (1.5 + 4.0 * u(rng));
        const auto pair = lowest_eigenpair(op, r_in, r_out, 128);
        EigenResult lam;
        lam.lambda1 = pair.lambda;
        ClosedSource src;
        if (k % 2 == 0) {
            src = ClosedSource::ball(r_out * (1.0 + 2.0 * u(rng)), 0.1 + u(rng));
        } else {
            const double q = (al - ga) + 0.2 + (ga - 0.4) * u(rng);
            src = ClosedSource::power(-q, 0.1 + u(rng));
        }
        const auto f = potential(KernelSpec{KernelMode::SurrogateExact, prof}, src, pair.grid);
        const auto res = check_inf_bound(op, f, lam);
        CHECK(res.holds());
        ++checked;
    }
    CHECK(checked == 100);
}

TEST_CASE("inf bound rejects inputs outside its hypotheses") {
    const auto op = SurrogateOperator::from(make(6, 1, 4, 1));
    const auto pair = lowest_eigenpair(op, 1, 4, 128);
    EigenResult lam;
    lam.lambda1 = pair.lambda;
    // f = 10 + r^2 is increasing with L f < 0 everywhere
    std::vector<double> neg;
    for (double r : pair.grid) neg.push_back(10.0 + r * r);
    CHECK_THROWS_AS(check_inf_bound(op, RadialFunction{pair.grid, neg, 0, 0}, lam), PreconditionError);
    std::vector<double> negative = pair.vector;
    negative[5] = -1.0;
    CHECK_THROWS_AS(check_inf_bound(op, RadialFunction{pair.grid, negative, 0, 0}, lam), PreconditionError);
    std::vector<double> g = pair.grid;
    g[3] += 1e-3;
    CHECK_THROWS_AS(check_inf_bound(op, RadialFunction{g, pair.vector, 0, 0}, lam), PreconditionError);
}

TEST_CASE("finite-difference constant is calibrated and positive") {
    const double c = fd_constant();
    CHECK(c > 1.0);
    CHECK(c < 3.0);
    CHECK(fd_constant() == c);
}
