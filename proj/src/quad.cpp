#include "biharm/quad.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <mutex>
#include <numbers>

#include "biharm/errors.hpp"

namespace biharm {

namespace {

constexpr double kExponentEps = 1e-12;
constexpr double kRelTol = 1e-12;
constexpr long kNodeCap = 1L << 20;
constexpr int kOrder = 16;

/// Exponents of r and (shift + r) on the piece containing r.
struct PieceForm {
    double a = 0.0;  // power of r
    double b = 0.0;  // power of (shift + r)
};

PieceForm piece_form(const PowerIntegrand& f, double r) {
    PieceForm form;
    for (const auto& fac : f.factors) {
        const bool use_shift = fac.shifted && f.shift > 0.0;
        const double x = fac.shifted ? f.shift + r : r;
        const double pw = fac.exponent * (x <= 1.0 ? fac.small_power : fac.large_power);
        (use_shift ? form.b : form.a) += pw;
    }
    if (f.per_r) form.a -= 1.0;
    return form;
}

double piece_value(const PowerIntegrand& f, const PieceForm& form, double r) {
    double log_v = form.a * std::log(r);
    if (form.b != 0.0) log_v += form.b * std::log(f.shift + r);
    return f.scale * std::exp(log_v);
}

/// Gauss-Legendre in t = ln r on [lo, hi] with `panels` equal panels.
double gauss_log(const PowerIntegrand& f, const PieceForm& form, double lo, double hi, long panels, int order) {
    const GaussRule& rule = gauss_legendre(order);
    const double t0 = std::log(lo);
    const double width = (std::log(hi) - t0) / static_cast<double>(panels);
    double sum = 0.0;
    for (long k = 0; k < panels; ++k) {
        const double mid = t0 + (static_cast<double>(k) + 0.5) * width;
        double panel = 0.0;
        for (std::size_t i = 0; i < rule.nodes.size(); ++i) {
            const double r = std::exp(mid + 0.5 * width * rule.nodes[i]);
            panel += rule.weights[i] * piece_value(f, form, r) * r;
        }
        sum += 0.5 * width * panel;
    }
    return sum;
}

struct Partial {
    double value = 0.0;
    double error = 0.0;
};

Partial refine_piece(const PowerIntegrand& f, double lo, double hi, long& nodes_used) {
    const PieceForm form = piece_form(f, std::sqrt(lo * hi));
    long panels = std::max(1L, static_cast<long>(std::ceil(std::log(hi / lo))));
    double prev = gauss_log(f, form, lo, hi, panels, kOrder);
    nodes_used += panels * kOrder;
    for (;;) {
        panels *= 2;
        const double cur = gauss_log(f, form, lo, hi, panels, kOrder);
        nodes_used += panels * kOrder;
        const double diff = std::abs(cur - prev);
        if (diff <= kRelTol * std::abs(cur) || nodes_used >= kNodeCap)
            return {cur, std::max(diff, 1e-15 * std::abs(cur))};
        prev = cur;
    }
}

} // namespace

double power_integral(double a, double lo, double hi) {
    const double e = a + 1.0;
    const double len = std::log(hi / lo);
    const double x = e * len;
    const double rel = std::abs(x) < 1e-300 ? 1.0 : std::expm1(x) / x;
    return std::pow(lo, e) * len * rel;
}

namespace {

/// integral over (0, t) of r^a (s + r)^b with t <= s/10, a > -1.
Partial origin_series(const PowerIntegrand& f, const PieceForm& form, double t) {
    const double s = f.shift;
    const double base = f.scale * std::pow(s, form.b) * std::pow(t, form.a + 1.0);
    const double ratio = t / s;
    double coeff = 1.0;
    double power = 1.0;
    double sum = 0.0;
    double term = 0.0;
    for (int j = 0; j < 400; ++j) {
        if (j > 0) {
            coeff *= (form.b - (j - 1)) / j;
            power *= ratio;
        }
        term = base * coeff * power / (form.a + 1.0 + j);
        sum += term;
        if (coeff == 0.0 || (j > 0 && std::abs(term) <= 1e-17 * std::abs(sum))) break;
    }
    return {sum, std::abs(term)};
}

/// integral over (T, inf) of r^a (s + r)^b with T >= 10 s, q = -(a + b + 1) > 0.
Partial tail_series(const PowerIntegrand& f, const PieceForm& form, double T, double q) {
    const double s = f.shift;
    const double base = f.scale * std::pow(T, -q);
    const double ratio = s / T;
    double coeff = 1.0;
    double power = 1.0;
    double sum = 0.0;
    double term = 0.0;
    for (int j = 0; j < 400; ++j) {
        if (j > 0) {
            coeff *= (form.b - (j - 1)) / j;
            power *= ratio;
        }
        term = base * coeff * power / (q + j);
        sum += term;
        if (coeff == 0.0 || (j > 0 && std::abs(term) <= 1e-17 * std::abs(sum))) break;
    }
    return {sum, std::abs(term)};
}

} // namespace

PowerFactor profile_factor(ProfileKind kind, const ManifoldProfile& prof, const SourceProfile& src,
                           double exponent, bool shifted) {
    const BranchPowers pw = profile_powers(kind, prof, src);
    return PowerFactor{pw.small, pw.large, exponent, shifted};
}

PowerFactor power_factor(double exponent, bool shifted) {
    return PowerFactor{1.0, 1.0, exponent, shifted};
}

double PowerIntegrand::operator()(double r) const {
    return piece_value(*this, piece_form(*this, r), r);
}

std::vector<double> PowerIntegrand::breakpoints(double lo, double hi) const {
    std::vector<double> out;
    auto add = [&](double x) {
        if (x > lo && x < hi) out.push_back(x);
    };
    bool plain = false;
    bool moved = false;
    for (const auto& fac : factors) {
        if (fac.small_power == fac.large_power) continue;
        (fac.shifted && shift > 0.0 ? moved : plain) = true;
    }
    if (plain) add(1.0);
    if (moved && shift < 1.0) add(1.0 - shift);
    std::sort(out.begin(), out.end());
    out.erase(std::unique(out.begin(), out.end()), out.end());
    return out;
}

std::optional<double> analytic_tail(double q, double T) {
    if (!(T > 0.0))
        throw PreconditionError("tail start must be positive");
    if (q <= kExponentEps) return std::nullopt;
    return std::pow(T, -q) / q;
}

QuadratureResult integrate(const PowerIntegrand& f, double lo, double hi) {
    if (!(lo >= 0.0) || !(hi >= lo) || std::isnan(hi))
        throw PreconditionError("integration bounds must satisfy 0 <= lo <= hi");
    if (f.shift < 0.0)
        throw PreconditionError("integrand shift must be non-negative");

    QuadratureResult res;
    const bool infinite = std::isinf(hi);
    if (hi == lo) return res;

    std::vector<double> cuts;
    cuts.push_back(lo);
    for (double b : f.breakpoints(lo, hi)) cuts.push_back(b);
    if (!infinite) cuts.push_back(hi);
    if (infinite && cuts.size() == 1) cuts.push_back(std::max(2.0 * lo, 1.0));

    // divergence is decided from exponents alone so that a zero scale still reports it
    if (lo == 0.0) {
        const PieceForm form = piece_form(f, 0.5 * cuts[1]);
        const double total_origin = f.shift > 0.0 ? form.a : form.a + form.b;
        if (total_origin + 1.0 <= kExponentEps) res.diverged = true;
    }
    if (infinite) {
        const PieceForm form = piece_form(f, 2.0 * cuts.back() + 2.0);
        res.tail_exponent = -(form.a + form.b + 1.0);
        if (res.tail_exponent <= kExponentEps) res.diverged = true;
    }
    if (res.diverged) {
        res.value = f.scale == 0.0 ? 0.0 : std::copysign(kInfinity, f.scale);
        return res;
    }
    if (f.scale == 0.0) return res;

    long nodes = 0;
    auto accumulate = [&](Partial p) {
        res.value += p.value;
        res.abs_error_estimate += p.error;
    };

    std::size_t first = 0;
    if (lo == 0.0) {
        const double b1 = cuts[1];
        const PieceForm form = piece_form(f, 0.5 * b1);
        if (form.b == 0.0 || f.shift == 0.0) {
            const double e = form.a + form.b + 1.0;
            accumulate({f.scale * std::pow(b1, e) / e, 0.0});
        } else {
            const double t0 = std::min(b1, 0.1 * f.shift);
            accumulate(origin_series(f, form, t0));
            if (t0 < b1) accumulate(refine_piece(f, t0, b1, nodes));
        }
        first = 1;
    }
    for (std::size_t k = first; k + 1 < cuts.size(); ++k) {
        const PieceForm form = piece_form(f, std::sqrt(cuts[k] * cuts[k + 1]));
        if (form.b == 0.0 || f.shift == 0.0)
            accumulate({f.scale * power_integral(form.a + form.b, cuts[k], cuts[k + 1]) , 0.0});
        else
            accumulate(refine_piece(f, cuts[k], cuts[k + 1], nodes));
    }
    if (infinite) {
        const double start = cuts.back();
        const PieceForm form = piece_form(f, 2.0 * start + 2.0);
        const double q = res.tail_exponent;
        if (form.b == 0.0 || f.shift == 0.0) {
            accumulate({f.scale * *analytic_tail(q, start), 0.0});
        } else {
            const double T = std::max(start, 10.0 * f.shift);
            if (T > start) accumulate(refine_piece(f, start, T, nodes));
            accumulate(tail_series(f, form, T, q));
        }
    }
    res.abs_error_estimate = std::max(res.abs_error_estimate, 1e-15 * std::abs(res.value));
    return res;
}

double integrate_cell(const PowerIntegrand& f, double lo, double hi, int order) {
    if (!(lo > 0.0) || !(hi > lo) || std::isinf(hi))
        throw PreconditionError("cell bounds must satisfy 0 < lo < hi < inf");
    double sum = 0.0;
    double a = lo;
    auto cuts = f.breakpoints(lo, hi);
    cuts.push_back(hi);
    for (double b : cuts) {
        const PieceForm form = piece_form(f, std::sqrt(a * b));
        sum += gauss_log(f, form, a, b, 1, order);
        a = b;
    }
    return sum;
}

const GaussRule& gauss_legendre(int order) {
    static std::mutex mutex;
    static std::map<int, GaussRule> cache;
    std::lock_guard lock(mutex);
    auto it = cache.find(order);
    if (it != cache.end()) return it->second;

    GaussRule rule;
    rule.nodes.resize(order);
    rule.weights.resize(order);
    for (int i = 0; i < order; ++i) {
        double x = std::cos(std::numbers::pi * (i + 0.75) / (order + 0.5));
        double dp = 0.0;
        for (int iter = 0; iter < 100; ++iter) {
            double p0 = 1.0;
            double p1 = x;
            for (int k = 2; k <= order; ++k) {
                const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
                p0 = p1;
                p1 = p2;
            }
            dp = order * (x * p1 - p0) / (x * x - 1.0);
            const double dx = p1 / dp;
            x -= dx;
            if (std::abs(dx) < 1e-16) break;
        }
        rule.nodes[i] = x;
        rule.weights[i] = 2.0 / ((1.0 - x * x) * dp * dp);
    }
    return cache.emplace(order, std::move(rule)).first->second;
}

} // namespace biharm
