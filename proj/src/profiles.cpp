#include "biharm/profiles.hpp"

#include <cmath>

#include "biharm/errors.hpp"

namespace biharm {

std::string to_string(ProfileMode mode) {
    return mode == ProfileMode::TwoRegime ? "two-regime" : "pure-power";
}

ProfileMode parse_profile_mode(const std::string& text) {
    if (text == "two-regime") return ProfileMode::TwoRegime;
    if (text == "pure-power") return ProfileMode::PurePower;
    throw PreconditionError("unknown profile mode '" + text + "' (expected two-regime or pure-power)");
}

ManifoldProfile ManifoldProfile::make(Rational alpha, Rational gamma, int dim_n, ProfileMode mode) {
    if (alpha.sign() <= 0)
        throw PreconditionError("alpha must be positive, got " + alpha.to_string());
    if (gamma.sign() <= 0)
        throw PreconditionError("gamma must be positive, got " + gamma.to_string());
    if (dim_n < 3)
        throw PreconditionError("n must be at least 3, got " + std::to_string(dim_n));
    return ManifoldProfile{alpha, gamma, dim_n, mode};
}

void ManifoldProfile::require_green_composition_finite() const {
    if (!green_composition_finite())
        throw PreconditionError("gamma > alpha/2 required (alpha=" + alpha.to_string() +
                                ", gamma=" + gamma.to_string() + ")");
}

void ManifoldProfile::require_existence_window() const {
    if (!in_existence_window())
        throw PreconditionError("gamma < alpha < 2 gamma required (alpha=" + alpha.to_string() +
                                ", gamma=" + gamma.to_string() + ")");
}

SourceProfile SourceProfile::make(const ManifoldProfile& prof, std::optional<Rational> s, Rational m) {
    const Rational floor = Rational(2) * (prof.gamma - prof.alpha);
    if (!(m > floor))
        throw PreconditionError("m must exceed 2(gamma - alpha) = " + floor.to_string() + ", got " +
                                m.to_string());
    if (s) {
        if (!(*s > floor) || s->sign() > 0)
            throw PreconditionError("s must satisfy 2(gamma - alpha) = " + floor.to_string() +
                                    " < s <= 0, got " + s->to_string());
    }
    return SourceProfile{s, m};
}

const Rational& SourceProfile::require_s() const {
    if (!s)
        throw PreconditionError("the Psi exponent s is required here");
    return *s;
}

BranchPowers profile_powers(ProfileKind kind, const ManifoldProfile& prof, const SourceProfile& src) {
    const double alpha = prof.alpha.value();
    const double gamma = prof.gamma.value();
    const double n = prof.dim_n;
    const bool pure = prof.mode == ProfileMode::PurePower;
    switch (kind) {
    case ProfileKind::V:
        return {pure ? alpha : n, alpha};
    case ProfileKind::G:
        return {pure ? -gamma : 2.0 - n, -gamma};
    case ProfileKind::Psi:
        return {0.0, src.require_s().value()};
    case ProfileKind::F:
        return {0.0, alpha - 2.0 * gamma};
    }
    return {0.0, 0.0};
}

double eval_profile(ProfileKind kind, const ManifoldProfile& prof, const SourceProfile& src, double r) {
    if (!(r > 0.0))
        throw PreconditionError("profile radius must be positive");
    const BranchPowers pw = profile_powers(kind, prof, src);
    return std::pow(r, r <= ManifoldProfile::r0() ? pw.small : pw.large);
}

Rational critical_exponent(const Rational& alpha, const Rational& gamma, const Rational& weight_exponent) {
    const Rational decay = Rational(2) * gamma - alpha;
    if (decay.sign() <= 0)
        throw PreconditionError("critical exponent undefined unless 2 gamma > alpha");
    if (weight_exponent < Rational(2) * (gamma - alpha))
        throw PreconditionError("weight exponent must be at least 2(gamma - alpha)");
    return (alpha + weight_exponent) / decay;
}

std::string to_string(Regime regime) {
    switch (regime) {
    case Regime::Nonexistence: return "NONEXISTENCE";
    case Regime::Existence: return "EXISTENCE";
    case Regime::Boundary: return "BOUNDARY";
    }
    return "?";
}

ClassificationReport classify(const ManifoldProfile& prof, const SourceProfile& src, const Rational& p) {
    prof.require_green_composition_finite();
    if (!(p > Rational(1)))
        throw PreconditionError("p must exceed 1, got " + p.to_string());

    ClassificationReport rep;
    rep.p = p;
    rep.p_star_nonexistence = critical_exponent(prof.alpha, prof.gamma, src.m);
    if (src.s) rep.p_star_existence = critical_exponent(prof.alpha, prof.gamma, *src.s);

    const bool nonexistence = p <= rep.p_star_nonexistence;
    bool existence = false;
    if (!rep.p_star_existence) {
        rep.notes.push_back("existence side not evaluated: no Psi exponent s given");
    } else if (!prof.in_existence_window()) {
        rep.notes.push_back("existence side not applicable: needs gamma < alpha < 2 gamma");
    } else {
        existence = p > *rep.p_star_existence;
    }

    if (p == rep.p_star_nonexistence)
        rep.notes.push_back("p equals the nonexistence threshold; the threshold is inclusive");
    if (rep.p_star_existence && *rep.p_star_existence != rep.p_star_nonexistence) {
        rep.notes.push_back("m != s: thresholds differ (nonexistence " + rep.p_star_nonexistence.to_string() +
                            ", existence " + rep.p_star_existence->to_string() + ")");
        if (nonexistence && existence)
            rep.notes.push_back("both results apply: nonexistence for Phi >~ r^m, existence for Psi ~ r^s");
    }

    if (nonexistence) {
        rep.regime = Regime::Nonexistence;
    } else if (existence) {
        rep.regime = Regime::Existence;
    } else {
        rep.regime = Regime::Boundary;
        rep.notes.push_back("p lies in the gap between the two thresholds");
    }
    return rep;
}

std::string WindowCondition::describe() const {
    return "condition " + std::to_string(index) + ": " + formula + " [" + lhs.to_string() +
           (strict ? " < " : " <= ") + rhs.to_string() + "]";
}

std::array<WindowCondition, 4> interval_conditions(const ManifoldProfile& prof, const SourceProfile& src,
                                                   const ExponentPlan& plan) {
    const Rational& s = src.require_s();
    const Rational d = prof.biharmonic_decay();
    const Rational& al = prof.alpha;
    const Rational& ga = prof.gamma;
    return {{
        {1, "(alpha + s) / ((2 gamma - alpha) p) < a", (al + s) / (d * plan.p), plan.a, true},
        {2, "a < 1", plan.a, Rational(1), true},
        {3, "a + (alpha - gamma) / (2 gamma - alpha) < b", plan.a + (al - ga) / d, plan.b, true},
        {4, "b <= gamma / (2 gamma - alpha)", plan.b, ga / d, false},
    }};
}

std::array<WindowCondition, 5> derived_conditions(const ManifoldProfile& prof, const SourceProfile& src,
                                                  const ExponentPlan& plan) {
    const Rational& s = src.require_s();
    const Rational d = prof.biharmonic_decay();
    const Rational& al = prof.alpha;
    const Rational& ga = prof.gamma;
    const Rational& a = plan.a;
    const Rational& b = plan.b;
    const Rational& p = plan.p;
    return {{
        {1, "(2 gamma - alpha) a < gamma", d * a, ga, true},
        {2, "(2 gamma - alpha) b <= gamma", d * b, ga, false},
        {3, "-s + (2 gamma - alpha) a p > alpha", al, -s + d * a * p, true},
        {4, "gamma + (2 gamma - alpha)(b - a) > alpha", al, ga + d * (b - a), true},
        {5, "gamma - s + (2 gamma - alpha)(a p - b) > alpha", al, ga - s + d * (a * p - b), true},
    }};
}

std::array<WindowCondition, 3> contraction_conditions(const ManifoldProfile& prof, const SourceProfile& src,
                                                      const ExponentPlan& plan) {
    const Rational& s = src.require_s();
    const Rational d = prof.biharmonic_decay();
    const Rational& al = prof.alpha;
    const Rational& ga = prof.gamma;
    const Rational mixed = d * (plan.b - plan.a);
    return {{
        {1, "(2 gamma - alpha)(b - a) < gamma - s + a (p - 1)(2 gamma - alpha) - alpha", mixed,
         ga - s + plan.a * (plan.p - Rational(1)) * d - al, true},
        {2, "alpha - gamma < (2 gamma - alpha)(b - a)", al - ga, mixed, true},
        {3, "0 < alpha - gamma", Rational(0), al - ga, true},
    }};
}

ExponentPlan plan_exponents(const ManifoldProfile& prof, const SourceProfile& src, const Rational& p,
                            std::optional<Rational> forced_a, std::optional<Rational> forced_b) {
    prof.require_existence_window();
    const Rational& s = src.require_s();
    const Rational d = prof.biharmonic_decay();
    const Rational threshold = (prof.alpha + s) / d;
    if (!(p > threshold))
        throw PreconditionError("p = " + p.to_string() + " is not above the existence threshold (alpha + s)/(2 gamma - alpha) = " +
                                threshold.to_string());

    ExponentPlan plan;
    plan.p = p;
    plan.a = forced_a ? *forced_a : (threshold / p + Rational(1)) / Rational(2);
    plan.b = forced_b ? *forced_b : prof.gamma / d;

    for (const auto& c : interval_conditions(prof, src, plan))
        if (!c.holds())
            throw PreconditionError("exponent window violated, " + c.describe());
    for (const auto& c : derived_conditions(prof, src, plan))
        if (!c.holds())
            throw PreconditionError("derived inequality violated, " + c.describe());
    return plan;
}

} // namespace biharm
