#include <doctest.h>

#include <cmath>
#include <random>
#include <sstream>

#include "biharm/config.hpp"
#include "biharm/errors.hpp"
#include "biharm/profiles.hpp"

using namespace biharm;

namespace {

ManifoldProfile prof64() { return ManifoldProfile::make(Rational(6), Rational(4), 6); }

Rational R(const char* s) { return Rational::parse(s); }

/// Random admissible (alpha, gamma) with gamma < alpha < 2 gamma, as small rationals.
ManifoldProfile random_window_profile(std::mt19937_64& rng) {
    std::uniform_int_distribution<int> g4(8, 32);  // gamma in quarters
    const Rational gamma(g4(rng), 4);
    std::uniform_int_distribution<int> t(1, 7);    // alpha = gamma (1 + t/8)
    const Rational alpha = gamma * (Rational(1) + Rational(t(rng), 8));
    return ManifoldProfile::make(alpha, gamma, 3 + static_cast<int>(rng() % 4));
}

} // namespace

TEST_CASE("rational arithmetic is exact and reduced") {
    CHECK(R("3/6") == Rational(1, 2));
    CHECK(R("0.875") == Rational(7, 8));
    CHECK(R("-1e-2") == Rational(-1, 100));
    CHECK((Rational(1, 3) + Rational(1, 6)).to_string() == "1/2");
    CHECK((Rational(2, 3) / Rational(4, 9)).to_string() == "3/2");
    CHECK(Rational(7).to_string() == "7");
    CHECK(Rational(1, 3) < Rational(1, 2));
    CHECK(max(Rational(1, 3), Rational(1, 2)) == Rational(1, 2));
    CHECK_THROWS(R("abc"));
    CHECK_THROWS(Rational(1, 0));
}

TEST_CASE("eval_profile piecewise values") {
    const auto prof = prof64();
    const SourceProfile src{std::nullopt, Rational(0)};
    CHECK(eval_profile(ProfileKind::V, prof, src, 0.5) == doctest::Approx(0.015625).epsilon(1e-15));
    CHECK(eval_profile(ProfileKind::G, prof, src, 2.0) == doctest::Approx(0.0625).epsilon(1e-15));
    CHECK(eval_profile(ProfileKind::F, prof, src, 10.0) == doctest::Approx(0.01).epsilon(1e-15));
    CHECK(eval_profile(ProfileKind::Psi, prof, SourceProfile{Rational(-1), Rational(0)}, 0.3) == 1.0);
    CHECK(eval_profile(ProfileKind::Psi, prof, SourceProfile{Rational(-1), Rational(0)}, 4.0) == 0.25);
    CHECK_THROWS_AS(eval_profile(ProfileKind::Psi, prof, src, 0.3), PreconditionError);
    CHECK_THROWS_AS(eval_profile(ProfileKind::V, prof, src, 0.0), PreconditionError);
    CHECK_THROWS_AS(eval_profile(ProfileKind::V, prof, src, -1.0), PreconditionError);
}

TEST_CASE("pure-power mode extends the large-r branch of v and g") {
    const auto prof = ManifoldProfile::make(Rational(6), Rational(4), 3, ProfileMode::PurePower);
    const SourceProfile src{std::nullopt, Rational(0)};
    CHECK(eval_profile(ProfileKind::V, prof, src, 0.5) == doctest::Approx(std::pow(0.5, 6)));
    CHECK(eval_profile(ProfileKind::G, prof, src, 0.5) == doctest::Approx(std::pow(0.5, -4)));
    CHECK(eval_profile(ProfileKind::F, prof, src, 0.5) == 1.0);
}

TEST_CASE("profiles are continuous at r = 1 except g when gamma != n - 2") {
    std::mt19937_64 rng(7);
    for (int k = 0; k < 50; ++k) {
        const auto prof = random_window_profile(rng);
        const SourceProfile src{Rational(0), Rational(0)};
        for (auto kind : {ProfileKind::V, ProfileKind::Psi, ProfileKind::F}) {
            const double lo = eval_profile(kind, prof, src, 1.0 - 1e-12);
            const double hi = eval_profile(kind, prof, src, 1.0 + 1e-12);
            CHECK(lo == doctest::Approx(hi).epsilon(1e-9));
        }
    }
    // both branches of g equal 1 at r = 1 whatever the exponents
    const auto prof = ManifoldProfile::make(Rational(6), Rational(4), 6);
    const SourceProfile src{std::nullopt, Rational(0)};
    CHECK(eval_profile(ProfileKind::G, prof, src, 1.0 - 1e-12) == doctest::Approx(1.0));
    CHECK(eval_profile(ProfileKind::G, prof, src, 1.0 + 1e-12) == doctest::Approx(1.0));
}

TEST_CASE("critical exponent reproduces the Euclidean table (n + m)/(n - 4)") {
    // independent oracle: alpha = n, gamma = n - 2 gives (n + m)/(n - 4)
    for (auto [n, m] : {std::pair{5, 0}, {6, 0}, {6, 2}, {7, 1}, {9, -3}}) {
        const Rational expected = Rational(n + m) / Rational(n - 4);
        CHECK(critical_exponent(Rational(n), Rational(n - 2), Rational(m)) == expected);
    }
    CHECK(critical_exponent(Rational(5), Rational(3), Rational(0)) == Rational(5));
    CHECK(critical_exponent(Rational(6), Rational(4), Rational(0)) == Rational(3));
    CHECK(critical_exponent(Rational(6), Rational(4), Rational(2)) == Rational(4));
    CHECK(critical_exponent(Rational(6), Rational(4), Rational(-4)) == Rational(1));
    CHECK_THROWS_AS(critical_exponent(Rational(6), Rational(3), Rational(0)), PreconditionError);
}

TEST_CASE("critical exponent monotonicity on random tuples") {
    std::mt19937_64 rng(11);
    for (int k = 0; k < 200; ++k) {
        const auto prof = random_window_profile(rng);
        const Rational lo_w = Rational(2) * (prof.gamma - prof.alpha);
        const Rational m = lo_w + Rational(static_cast<int>(rng() % 16) + 1, 4);
        const Rational dm(1, 8);
        const Rational base = critical_exponent(prof.alpha, prof.gamma, m);
        CHECK(critical_exponent(prof.alpha, prof.gamma, m + dm) > base);
        CHECK(critical_exponent(prof.alpha + dm / Rational(4), prof.gamma, m) > base);
        CHECK(critical_exponent(prof.alpha, prof.gamma + dm / Rational(4), m) < base);
    }
}

TEST_CASE("classification at alpha = 6, gamma = 4, m = s = 0") {
    const auto prof = prof64();
    const auto src = SourceProfile::make(prof, Rational(0), Rational(0));
    CHECK(classify(prof, src, Rational(2)).regime == Regime::Nonexistence);
    CHECK(classify(prof, src, Rational(3)).regime == Regime::Nonexistence);
    CHECK(classify(prof, src, Rational(4)).regime == Regime::Existence);
    const auto rep = classify(prof, src, R("3.0001"));
    CHECK(rep.regime == Regime::Existence);
    CHECK(rep.p_star_nonexistence == Rational(3));
    CHECK(*rep.p_star_existence == Rational(3));
}

TEST_CASE("classification with m != s reports both thresholds") {
    const auto prof = prof64();
    const auto src = SourceProfile::make(prof, Rational(-2), Rational(0));
    const auto rep = classify(prof, src, R("2.5"));
    CHECK(rep.p_star_nonexistence == Rational(3));
    CHECK(*rep.p_star_existence == Rational(2));
    CHECK(rep.regime == Regime::Nonexistence);
    CHECK(rep.notes.size() >= 2);
    const auto src2 = SourceProfile::make(prof, Rational(0), Rational(-2));
    const auto gap = classify(prof, src2, R("2.5"));
    CHECK(gap.regime == Regime::Boundary);
}

TEST_CASE("source profile range checks") {
    const auto prof = prof64();
    CHECK_THROWS_AS(SourceProfile::make(prof, Rational(1), Rational(0)), PreconditionError);
    CHECK_THROWS_AS(SourceProfile::make(prof, Rational(-4), Rational(0)), PreconditionError);
    CHECK_THROWS_AS(SourceProfile::make(prof, Rational(0), Rational(-4)), PreconditionError);
    CHECK_NOTHROW(SourceProfile::make(prof, R("-3.9"), R("-3.9")));
}

TEST_CASE("plan_exponents example and its inequalities") {
    const auto prof = prof64();
    const auto src = SourceProfile::make(prof, Rational(0), Rational(0));
    const auto plan = plan_exponents(prof, src, Rational(4));
    CHECK(plan.a == Rational(7, 8));
    CHECK(plan.b == Rational(2));
    CHECK_FALSE(plan.l.has_value());
    // hand evaluation: -s + (2 gamma - alpha) a p = 2 * 7/8 * 4 = 7 > 6
    const auto d = derived_conditions(prof, src, plan);
    CHECK(d[2].rhs == Rational(7));
    CHECK(d[2].lhs == Rational(6));
    for (const auto& c : d) CHECK(c.holds());
    for (const auto& c : contraction_conditions(prof, src, plan)) CHECK(c.holds());
}

TEST_CASE("plan_exponents rejects infeasible windows by name") {
    const auto prof = prof64();
    const auto src = SourceProfile::make(prof, Rational(0), Rational(0));
    try {
        plan_exponents(prof, src, Rational(4), R("0.7"));
        FAIL("expected a window violation");
    } catch (const PreconditionError& e) {
        CHECK(std::string(e.what()).find("(alpha + s) / ((2 gamma - alpha) p) < a") != std::string::npos);
    }
    CHECK_NOTHROW(plan_exponents(prof, src, Rational(4), std::nullopt, Rational(2)));
    CHECK_THROWS_AS(plan_exponents(prof, src, Rational(4), std::nullopt, R("2.000001")), PreconditionError);
    CHECK_THROWS_AS(plan_exponents(prof, src, Rational(3)), PreconditionError);
    CHECK_THROWS_AS(plan_exponents(prof, src, Rational(2)), PreconditionError);
    const auto outside = ManifoldProfile::make(Rational(4), Rational(4), 6);
    CHECK_THROWS_AS(plan_exponents(outside, SourceProfile{Rational(0), Rational(0)}, Rational(9)),
                    PreconditionError);
}

TEST_CASE("random supercritical plans satisfy every derived inequality") {
    std::mt19937_64 rng(3);
    int checked = 0;
    for (int k = 0; k < 300; ++k) {
        const auto prof = random_window_profile(rng);
        const Rational lo_s = Rational(2) * (prof.gamma - prof.alpha);
        const Rational s = lo_s * Rational(static_cast<int>(rng() % 8), 8);  // in (2(g-a), 0]
        const auto src = SourceProfile::make(prof, s, s);
        const Rational threshold = (prof.alpha + s) / prof.biharmonic_decay();
        const Rational p = threshold + Rational(static_cast<int>(rng() % 20) + 1, 8);
        if (!(p > Rational(1))) continue;
        const auto plan = plan_exponents(prof, src, p);
        // independent re-evaluation in floating point
        const double al = prof.alpha.value(), ga = prof.gamma.value(), d = 2 * ga - al;
        const double a = plan.a.value(), b = plan.b.value(), pd = p.value(), sd = s.value();
        CHECK(d * a < ga);
        CHECK(d * b <= ga + 1e-12);
        CHECK(-sd + d * a * pd > al);
        CHECK(ga + d * (b - a) > al);
        CHECK(ga - sd + d * (a * pd - b) > al);
        CHECK((al + sd) / (d * pd) < a);
        CHECK(a < 1.0);
        ++checked;
    }
    CHECK(checked > 100);
}

TEST_CASE("profile config round trip") {
    const auto prof = ManifoldProfile::make(R("9/2"), Rational(3), 5, ProfileMode::PurePower);
    const ProfileConfig cfg{prof, SourceProfile::make(prof, R("-1/2"), Rational(1)), R("7/3")};
    std::stringstream ss;
    write_key_values(ss, to_key_values(cfg));
    const ProfileConfig back = profile_config_from(parse_key_values(ss));
    CHECK(back.prof.alpha == prof.alpha);
    CHECK(back.prof.gamma == prof.gamma);
    CHECK(back.prof.dim_n == 5);
    CHECK(back.prof.mode == ProfileMode::PurePower);
    CHECK(*back.src.s == R("-1/2"));
    CHECK(back.src.m == Rational(1));
    CHECK(*back.p == R("7/3"));
    std::stringstream again;
    write_key_values(again, to_key_values(back));
    std::stringstream first;
    write_key_values(first, to_key_values(cfg));
    CHECK(again.str() == first.str());
}

TEST_CASE("manifold profile validation") {
    CHECK_THROWS_AS(ManifoldProfile::make(Rational(0), Rational(1), 3), PreconditionError);
    CHECK_THROWS_AS(ManifoldProfile::make(Rational(1), Rational(0), 3), PreconditionError);
    CHECK_THROWS_AS(ManifoldProfile::make(Rational(6), Rational(4), 2), PreconditionError);
    CHECK(ManifoldProfile::make(Rational(6), Rational(4), 6).r0() == 1.0);
}
