#include "biharm/kernels.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numbers>
#include <random>

#include "biharm/errors.hpp"
#include "biharm/parallel.hpp"

namespace biharm {

namespace {

/// Cells wider than this ratio get the adaptive rule instead of a single panel.
constexpr double kCellRatio = 2.5;

std::string fmt(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.6g", v);
    return buf;
}

const SourceProfile& no_source() {
    static const SourceProfile src{std::nullopt, Rational(0)};
    return src;
}

double checked(const QuadratureResult& q, const char* where) {
    if (q.diverged) {
        std::string msg = std::string("potential integral diverges at the ") + where;
        if (!std::isnan(q.tail_exponent)) msg += " (tail decay exponent " + fmt(q.tail_exponent) + " <= 0)";
        throw DivergenceError(msg);
    }
    return q.value;
}

/// Large-r and small-r kernel data used for tail exponents of split potentials.
ExactKernel split_far(const ManifoldProfile& prof) {
    return {prof.gamma.value(), prof.alpha.value(), 1.0};
}
ExactKernel split_near(const ManifoldProfile& prof) {
    const BranchPowers g = profile_powers(ProfileKind::G, prof, no_source());
    const BranchPowers v = profile_powers(ProfileKind::V, prof, no_source());
    return {-g.small, v.small, 1.0};
}

double right_tail(const ExactKernel& k, double src_right) {
    return src_right + k.mu <= 0.0 ? -k.kappa : src_right + k.mu - k.kappa;
}
double left_tail(const ExactKernel& k, double src_left) {
    const double e = src_left + k.mu - k.kappa;
    return e > 0.0 ? 0.0 : e;
}

/// Piece of a tabulated source: sum of coef * r^k on (lo, hi).
struct Segment {
    double lo;
    double hi;
    int terms;
    double coef[2];
    double k[2];
};

std::vector<Segment> segments(const RadialFunction& fn) {
    std::vector<Segment> out;
    const std::size_t n = fn.size();
    out.reserve(n + 1);
    out.push_back({0.0, fn.grid.front(), 1,
                   {fn.values.front() * std::pow(fn.grid.front(), -fn.left_exponent), 0.0},
                   {fn.left_exponent, 0.0}});
    for (std::size_t j = 0; j + 1 < n; ++j) {
        const CellForm c = cell_form(fn, j);
        if (c.power)
            out.push_back({fn.grid[j], fn.grid[j + 1], 1, {c.c, 0.0}, {c.k, 0.0}});
        else
            out.push_back({fn.grid[j], fn.grid[j + 1], 2, {c.lin_a, c.lin_b}, {0.0, 1.0}});
    }
    out.push_back({fn.grid.back(), kInfinity, 1,
                   {fn.values.back() * std::pow(fn.grid.back(), -fn.right_exponent), 0.0},
                   {fn.right_exponent, 0.0}});
    return out;
}

double piece_integral(const PowerIntegrand& f, double lo, double hi, const char* where) {
    if (lo > 0.0 && std::isfinite(hi) && hi / lo <= kCellRatio) return integrate_cell(f, lo, hi);
    return checked(integrate(f, lo, hi), where);
}

void check_source(const RadialFunction& src) {
    src.validate();
    for (double v : src.values)
        if (v < 0.0) throw PreconditionError("potential source must be nonnegative");
}

RadialFunction exact_potential(const ExactKernel& k, const RadialFunction& src) {
    const std::size_t n = src.size();
    const double left = src.left_exponent + k.mu;
    const double right = src.right_exponent + k.mu - k.kappa;
    const bool zero = std::all_of(src.values.begin(), src.values.end(), [](double v) { return v == 0.0; });
    if (!zero && left <= 0.0)
        throw DivergenceError("potential integral diverges at the origin (source exponent " +
                              fmt(src.left_exponent) + " + " + fmt(k.mu) + " <= 0)");
    if (!zero && right >= 0.0)
        throw DivergenceError("potential integral diverges at the tail (tail decay exponent " + fmt(-right) +
                              " <= 0)");

    // cumulative integrals of phi c r^(mu-1) from 0 and of phi c r^(mu-kappa-1) to infinity
    std::vector<double> inner(n, 0.0), outer(n, 0.0);
    if (!zero) {
        inner[0] = k.c * src.values[0] * std::pow(src.grid[0], k.mu) / left;
        outer[n - 1] = k.c * src.values[n - 1] * std::pow(src.grid[n - 1], k.mu - k.kappa) / -right;
    }
    auto cell = [&](std::size_t j, double e) {
        const CellForm f = cell_form(src, j);
        const double lo = src.grid[j], hi = src.grid[j + 1];
        if (f.power) return f.c * power_integral(f.k + e, lo, hi);
        return f.lin_a * power_integral(e, lo, hi) + f.lin_b * power_integral(e + 1.0, lo, hi);
    };
    for (std::size_t j = 0; j + 1 < n; ++j) inner[j + 1] = inner[j] + k.c * cell(j, k.mu - 1.0);
    for (std::size_t j = n - 1; j-- > 0;) outer[j] = outer[j + 1] + k.c * cell(j, k.mu - k.kappa - 1.0);

    RadialFunction out;
    out.grid = src.grid;
    out.values.resize(n);
    for (std::size_t i = 0; i < n; ++i) out.values[i] = std::pow(src.grid[i], -k.kappa) * inner[i] + outer[i];
    out.left_exponent = left_tail(k, src.left_exponent);
    out.right_exponent = right_tail(k, src.right_exponent);
    return out;
}

double split_at(const ManifoldProfile& prof, const std::vector<Segment>& segs, double rho) {
    const PowerFactor g_shift = profile_factor(ProfileKind::G, prof, no_source(), 1.0, true);
    const PowerFactor g = profile_factor(ProfileKind::G, prof, no_source(), 1.0);
    const PowerFactor v = profile_factor(ProfileKind::V, prof, no_source(), 1.0);
    double sum = 0.0;
    for (const Segment& s : segs) {
        for (int t = 0; t < s.terms; ++t) {
            if (s.coef[t] == 0.0) continue;
            PowerIntegrand first{{g_shift, v, power_factor(s.k[t])}, rho, true, s.coef[t]};
            sum += piece_integral(first, s.lo, s.hi, s.lo == 0.0 ? "origin" : "tail");
            const double hi = s.hi - rho;
            if (hi <= 0.0) continue;
            const double lo = std::max(s.lo - rho, 0.0);
            PowerIntegrand second{{g, v, power_factor(s.k[t], true)}, rho, true, s.coef[t]};
            sum += piece_integral(second, lo, hi, lo == 0.0 ? "origin" : "tail");
        }
    }
    return sum;
}

} // namespace

std::string to_string(KernelMode mode) {
    switch (mode) {
    case KernelMode::SplitComparison: return "split-comparison";
    case KernelMode::SurrogateExact: return "surrogate-exact";
    case KernelMode::EuclideanExact: return "euclidean-exact";
    }
    return "?";
}

KernelMode parse_kernel_mode(const std::string& text) {
    if (text == "split-comparison") return KernelMode::SplitComparison;
    if (text == "surrogate-exact") return KernelMode::SurrogateExact;
    if (text == "euclidean-exact") return KernelMode::EuclideanExact;
    throw PreconditionError("unknown kernel mode '" + text + "'");
}

ClosedSource ClosedSource::power(double exponent, double scale) {
    return ClosedSource{{power_factor(exponent)}, scale, kInfinity};
}

ClosedSource ClosedSource::ball(double radius, double scale) {
    if (!(radius > 0.0)) throw PreconditionError("ball radius must be positive");
    return ClosedSource{{}, scale, radius};
}

double ClosedSource::operator()(double r) const {
    if (r >= support) return 0.0;
    return PowerIntegrand{factors, 0.0, false, scale}(r);
}

double ClosedSource::left_exponent() const {
    double e = 0.0;
    for (const auto& f : factors) e += f.exponent * f.small_power;
    return e;
}

double ClosedSource::right_exponent() const {
    double e = 0.0;
    for (const auto& f : factors) e += f.exponent * f.large_power;
    return e;
}

double sphere_area(int n) {
    const double h = 0.5 * n;
    return 2.0 * std::pow(std::numbers::pi, h) / std::tgamma(h);
}

ExactKernel exact_kernel(const KernelSpec& spec) {
    switch (spec.mode) {
    case KernelMode::SurrogateExact: {
        const double a = spec.prof.alpha.value();
        return {spec.prof.gamma.value(), a, a};
    }
    case KernelMode::EuclideanExact: {
        const int n = spec.prof.dim_n;
        return {static_cast<double>(n - 2), static_cast<double>(n), sphere_area(n)};
    }
    default: throw PreconditionError("split-comparison mode has no exact kernel");
    }
}

QuadratureResult compose_green(const ManifoldProfile& prof, double rho) {
    if (!(rho > 0.0)) throw PreconditionError("compose_green needs rho > 0");
    PowerIntegrand f{{profile_factor(ProfileKind::G, prof, no_source(), 1.0, true),
                      profile_factor(ProfileKind::G, prof, no_source(), 1.0),
                      profile_factor(ProfileKind::V, prof, no_source(), 1.0)},
                     rho, true, 1.0};
    return integrate(f, 0.0, kInfinity);
}

double potential_at(const KernelSpec& spec, const ClosedSource& src, double rho) {
    if (src.scale == 0.0) return 0.0;
    if (spec.mode == KernelMode::SplitComparison) {
        if (!(rho > 0.0)) throw PreconditionError("split-comparison potential needs rho > 0");
        const ManifoldProfile& prof = spec.prof;
        PowerIntegrand first{src.factors, rho, true, src.scale};
        first.factors.push_back(profile_factor(ProfileKind::G, prof, no_source(), 1.0, true));
        first.factors.push_back(profile_factor(ProfileKind::V, prof, no_source(), 1.0));
        double sum = checked(integrate(first, 0.0, src.support), "tail");
        if (src.support > rho) {
            PowerIntegrand second{src.factors, rho, true, src.scale};
            for (auto& f : second.factors) f.shifted = true;
            second.factors.push_back(profile_factor(ProfileKind::G, prof, no_source(), 1.0));
            second.factors.push_back(profile_factor(ProfileKind::V, prof, no_source(), 1.0));
            sum += checked(integrate(second, 0.0, src.support - rho), "tail");
        }
        return sum;
    }
    if (!(rho >= 0.0)) throw PreconditionError("potential radius must be nonnegative");
    const ExactKernel k = exact_kernel(spec);
    double sum = 0.0;
    if (rho > 0.0) {
        PowerIntegrand inner{src.factors, 0.0, true, src.scale * k.c};
        inner.factors.push_back(power_factor(k.mu));
        sum += std::pow(rho, -k.kappa) * checked(integrate(inner, 0.0, std::min(rho, src.support)), "origin");
    }
    if (src.support > rho) {
        PowerIntegrand outer{src.factors, 0.0, true, src.scale * k.c};
        outer.factors.push_back(power_factor(k.mu - k.kappa));
        sum += checked(integrate(outer, rho, src.support), "tail");
    }
    return sum;
}

RadialFunction potential(const KernelSpec& spec, const ClosedSource& src, const std::vector<double>& grid) {
    RadialFunction out;
    out.grid = grid;
    out.values.assign(grid.size(), 0.0);
    parallel_for(grid.size(), [&](std::size_t i) { out.values[i] = potential_at(spec, src, grid[i]); });
    const double right = std::isfinite(src.support) ? -1e300 : src.right_exponent();
    const ExactKernel far = spec.mode == KernelMode::SplitComparison ? split_far(spec.prof) : exact_kernel(spec);
    const ExactKernel near = spec.mode == KernelMode::SplitComparison ? split_near(spec.prof) : exact_kernel(spec);
    out.right_exponent = right_tail(far, right);
    out.left_exponent = left_tail(near, src.left_exponent());
    out.validate();
    return out;
}

RadialFunction potential(const KernelSpec& spec, const RadialFunction& src) {
    check_source(src);
    if (spec.mode != KernelMode::SplitComparison) return exact_potential(exact_kernel(spec), src);

    RadialFunction out;
    out.grid = src.grid;
    out.values.assign(src.size(), 0.0);
    const bool zero = std::all_of(src.values.begin(), src.values.end(), [](double v) { return v == 0.0; });
    if (!zero) {
        const auto segs = segments(src);
        parallel_for(src.size(), [&](std::size_t i) { out.values[i] = split_at(spec.prof, segs, src.grid[i]); });
    }
    out.left_exponent = left_tail(split_near(spec.prof), src.left_exponent);
    out.right_exponent = right_tail(split_far(spec.prof), src.right_exponent);
    return out;
}

double annulus_lower_bound(const ManifoldProfile& prof, double R) {
    if (!(R >= 1.0)) throw PreconditionError("annulus lower bound needs R >= 1");
    return std::pow(R, -prof.biharmonic_decay().value());
}

MonteCarloEstimate mc_oracle(int n, double x_radius, const ClosedSource& src, std::uint64_t samples,
                             std::uint64_t seed) {
    if (n < 5) throw PreconditionError("mc_oracle needs n >= 5");
    if (!(x_radius >= 0.0)) throw PreconditionError("mc_oracle needs |x| >= 0");
    if (samples < 2) throw PreconditionError("mc_oracle needs at least two samples");
    if (src.scale == 0.0) return {};

    // Defensive mixture of two radial densities: one centred at x (absorbs the
    // kernel singularity) and one centred at the origin (covers the source).
    const double omega = sphere_area(n);
    const double dn = static_cast<double>(n);
    const bool bounded = std::isfinite(src.support);
    const double S = bounded ? src.support : 1.0;
    const double T = x_radius + S;
    double beta = 0.0;
    if (!bounded) {
        beta = -src.right_exponent() - 2.0;
        if (!(beta > 0.0)) throw PreconditionError("mc_oracle source tail is not integrable in R^n");
    }
    // radial densities on [0, inf) in the distance t from x and rho from the origin
    auto near_x = [&](double t) { return t <= T ? 2.0 * t / (T * T) : 0.0; };
    auto near_o = [&](double rho) {
        if (bounded) return rho <= S ? dn * std::pow(rho, dn - 1.0) / std::pow(S, dn) : 0.0;
        return rho <= 1.0 ? 0.5 * dn * std::pow(rho, dn - 1.0) : 0.5 * beta * std::pow(rho, -beta - 1.0);
    };

    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> unif(0.0, 1.0);
    std::normal_distribution<double> normal(0.0, 1.0);
    auto random_cosine = [&] {
        double first = 0.0, norm2 = 0.0;
        for (int d = 0; d < n; ++d) {
            const double z = normal(rng);
            if (d == 0) first = z;
            norm2 += z * z;
        }
        return first / std::sqrt(norm2);
    };

    double mean = 0.0, m2 = 0.0;
    for (std::uint64_t k = 0; k < samples; ++k) {
        const double c = random_cosine();
        const double u = 1.0 - unif(rng);
        double t, rho;
        if (unif(rng) < 0.5) {
            t = T * std::sqrt(u);
            rho = std::sqrt(std::max(0.0, x_radius * x_radius + 2.0 * x_radius * t * c + t * t));
        } else {
            if (bounded)
                rho = S * std::pow(u, 1.0 / dn);
            else if (unif(rng) < 0.5)
                rho = std::pow(u, 1.0 / dn);
            else
                rho = std::pow(u, -1.0 / beta);
            t = std::sqrt(std::max(0.0, rho * rho - 2.0 * rho * x_radius * c + x_radius * x_radius));
        }
        double w = 0.0;
        if (t > 0.0 && rho > 0.0) {
            const double value = src(rho);
            if (value != 0.0) {
                const double q = 0.5 * near_x(t) / (omega * std::pow(t, dn - 1.0)) +
                                 0.5 * near_o(rho) / (omega * std::pow(rho, dn - 1.0));
                w = std::pow(t, 2.0 - dn) * value / q;
            }
        }
        const double delta = w - mean;
        mean += delta / static_cast<double>(k + 1);
        m2 += delta * (w - mean);
    }
    const double var = m2 / static_cast<double>(samples - 1);
    return {mean, std::sqrt(var / static_cast<double>(samples))};
}

} // namespace biharm
