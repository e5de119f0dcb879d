#pragma once

#include <array>
#include <optional>
#include <string>
#include <vector>

#include "biharm/rational.hpp"

namespace biharm {

enum class ProfileMode { TwoRegime, PurePower };
enum class ProfileKind { V, G, Psi, F };

std::string to_string(ProfileMode mode);
ProfileMode parse_profile_mode(const std::string& text);

/// Volume-growth / Green-decay data of the manifold, in units where the crossover
/// radius is 1. Only alpha > 0, gamma > 0, n >= 3 are enforced on construction;
/// routines that need the biharmonic kernel or the existence window check the
/// stronger conditions themselves (see require_*).
struct ManifoldProfile {
    Rational alpha;
    Rational gamma;
    int dim_n = 3;
    ProfileMode mode = ProfileMode::TwoRegime;

    static ManifoldProfile make(Rational alpha, Rational gamma, int dim_n,
                                ProfileMode mode = ProfileMode::TwoRegime);

    static constexpr double r0() { return 1.0; }

    /// 2*gamma - alpha, the decay exponent of the biharmonic kernel and of F.
    Rational biharmonic_decay() const { return Rational(2) * gamma - alpha; }

    bool green_composition_finite() const { return biharmonic_decay().sign() > 0; }
    bool in_existence_window() const { return gamma < alpha && alpha < Rational(2) * gamma; }

    void require_green_composition_finite() const;
    void require_existence_window() const;
};

/// Exponents of the weights: Psi ~ r^s (existence side, optional) and Phi >~ r^m.
struct SourceProfile {
    std::optional<Rational> s;
    Rational m;

    /// Checks m > 2(gamma - alpha) and, when given, 2(gamma - alpha) < s <= 0.
    static SourceProfile make(const ManifoldProfile& prof, std::optional<Rational> s, Rational m);

    const Rational& require_s() const;
};

/// Piecewise power-law profile v, g, psi or f at radius r > 0.
double eval_profile(ProfileKind kind, const ManifoldProfile& prof, const SourceProfile& src, double r);

/// Branch exponents of a profile: value is r^small for r <= 1 and r^large for r >= 1.
struct BranchPowers {
    double small;
    double large;
};
BranchPowers profile_powers(ProfileKind kind, const ManifoldProfile& prof, const SourceProfile& src);

/// (alpha + weight) / (2 gamma - alpha), exactly.
Rational critical_exponent(const Rational& alpha, const Rational& gamma, const Rational& weight_exponent);

enum class Regime { Nonexistence, Existence, Boundary };
std::string to_string(Regime regime);

struct ClassificationReport {
    Rational p;
    Rational p_star_nonexistence;
    std::optional<Rational> p_star_existence;
    Regime regime = Regime::Boundary;
    std::vector<std::string> notes;
};

ClassificationReport classify(const ManifoldProfile& prof, const SourceProfile& src, const Rational& p);

struct ExponentPlan {
    Rational p;
    Rational a;
    Rational b;
    std::optional<double> l;
};

/// One admissibility inequality lhs (< or <=) rhs, evaluated exactly.
struct WindowCondition {
    int index = 0;
    std::string formula;
    Rational lhs;
    Rational rhs;
    bool strict = true;

    bool holds() const { return strict ? lhs < rhs : lhs <= rhs; }
    std::string describe() const;
};

/// The two-sided window for a and b: lower/upper bound on a, lower/upper bound on b.
std::array<WindowCondition, 4> interval_conditions(const ManifoldProfile& prof, const SourceProfile& src,
                                                   const ExponentPlan& plan);

/// The five derived inequalities that make every tail integral in the bounds finite.
std::array<WindowCondition, 5> derived_conditions(const ManifoldProfile& prof, const SourceProfile& src,
                                                  const ExponentPlan& plan);

/// The chained inequality needed by the contraction bounds:
/// (2g-a)(b-a) < g - s + a(p-1)(2g-a) - alpha, alpha - gamma < (2g-a)(b-a), 0 < alpha - gamma.
std::array<WindowCondition, 3> contraction_conditions(const ManifoldProfile& prof, const SourceProfile& src,
                                                      const ExponentPlan& plan);

/// Picks a at the midpoint of its window and b at its inclusive upper end unless
/// forced; throws PreconditionError naming the first violated inequality.
ExponentPlan plan_exponents(const ManifoldProfile& prof, const SourceProfile& src, const Rational& p,
                            std::optional<Rational> forced_a = std::nullopt,
                            std::optional<Rational> forced_b = std::nullopt);

} // namespace biharm
