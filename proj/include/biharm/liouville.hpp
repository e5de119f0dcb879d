#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "biharm/profiles.hpp"

namespace biharm {

struct WitnessConfig {
    double tau = 0.5;
    double bigN = 4.0;
    double r_inner = 2.0;
    std::vector<double> R_list;
    std::size_t mesh = 512;

    /// tau = 1/2, N = 4, r = 2, R = 2^10 .. 2^20.
    static WitnessConfig defaults();
    void validate() const;
};

/// Largest k with tau^(k+1) >= r / (N^2 R) >= tau^(k+2).
int annulus_count(const WitnessConfig& cfg, double R);

/// One shell of the annulus sum: (tau^i N^2 R)^(alpha + m - p(2 gamma - alpha)).
double annulus_term(const ManifoldProfile& prof, const SourceProfile& src, double p, const WitnessConfig& cfg,
                    double R, int i);

/// Green-potential side: R^(alpha - 2 gamma) * sum_{i=0..k} (tau^i N^2 R)^(alpha + m - p(2 gamma - alpha))
/// times the infimum of Phi^(1/(p-1)) over the annulus (tau R, N^2 R).
double rhs_lower(const ManifoldProfile& prof, const SourceProfile& src, double p, const WitnessConfig& cfg,
                 double R);

/// Eigenvalue side: lambda1(tau R, N^2 R)^(2/(p-1)) of the surrogate operator.
double lhs_upper(const ManifoldProfile& prof, double p, const WitnessConfig& cfg, double R);

/// Exact asymptotic exponent gap e_rhs - e_lambda; zero marks the logarithmic case.
Rational predicted_gap(const ManifoldProfile& prof, const SourceProfile& src, const Rational& p);

enum class Verdict { Contradiction, NoContradiction, Inconclusive };
std::string to_string(Verdict v);

struct WitnessRow {
    double R = 0.0;
    int k = 0;
    double lhs = 0.0;
    double rhs = 0.0;
    double ratio = 0.0;
};

struct WitnessReport {
    std::vector<WitnessRow> rows;
    double e_lambda = 0.0;
    double e_rhs = 0.0;
    double e_rhs_log = 0.0;       ///< exponent of rhs / ln R
    double log_correlation = 0.0; ///< correlation of ratio against ln R
    double gap = 0.0;             ///< e_rhs - e_lambda
    Rational predicted_gap;
    bool log_flag = false;
    bool growth_flag = false;
    Verdict verdict = Verdict::Inconclusive;
    std::vector<std::string> notes;
};

/// Decision constants, reported verbatim.
struct VerdictRule {
    static constexpr double kLogCorrelation = 0.999;
    static constexpr double kLogExponentTol = 0.1;
    static constexpr double kGapMargin = 0.05;
    static constexpr double kGrowthFactor = 2.0;
};

WitnessReport verdict(const ManifoldProfile& prof, const SourceProfile& src, const Rational& p,
                      const WitnessConfig& cfg);

} // namespace biharm
