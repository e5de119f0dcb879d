#include "biharm/liouville.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>

#include "biharm/errors.hpp"
#include "biharm/fit.hpp"
#include "biharm/parallel.hpp"
#include "biharm/spectral.hpp"

namespace biharm {

WitnessConfig WitnessConfig::defaults() {
    WitnessConfig cfg;
    for (int e = 10; e <= 20; ++e) cfg.R_list.push_back(std::ldexp(1.0, e));
    return cfg;
}

void WitnessConfig::validate() const {
    if (!(tau > 0.0 && tau < 1.0)) throw PreconditionError("witness tau must lie in (0, 1)");
    if (!(bigN > 2.0)) throw PreconditionError("witness N must exceed 2");
    if (!(r_inner >= 1.0)) throw PreconditionError("witness inner radius must be >= 1");
    if (R_list.size() < 3) throw PreconditionError("witness needs at least three radii");
    for (std::size_t i = 0; i < R_list.size(); ++i) {
        if (i > 0 && !(R_list[i] > R_list[i - 1])) throw PreconditionError("witness radii must increase");
        if (!(R_list[i] > r_inner / tau)) throw PreconditionError("witness radius must exceed r / tau");
    }
}

int annulus_count(const WitnessConfig& cfg, double R) {
    const double x = std::log(cfg.r_inner / (cfg.bigN * cfg.bigN * R)) / std::log(cfg.tau);
    const int k = static_cast<int>(std::floor(x + 1e-9)) - 1;
    if (k < 1) throw PreconditionError("radius too small: fewer than two annuli fit between r and N^2 R");
    return k;
}

double annulus_term(const ManifoldProfile& prof, const SourceProfile& src, double p, const WitnessConfig& cfg,
                    double R, int i) {
    const double alpha = prof.alpha.value(), gamma = prof.gamma.value(), m = src.m.value();
    const double e = alpha + m - p * (2.0 * gamma - alpha);
    return std::pow(std::pow(cfg.tau, i) * cfg.bigN * cfg.bigN * R, e);
}

double rhs_lower(const ManifoldProfile& prof, const SourceProfile& src, double p, const WitnessConfig& cfg,
                 double R) {
    if (!(p > 1.0)) throw PreconditionError("witness needs p > 1");
    const int k = annulus_count(cfg, R);
    const double alpha = prof.alpha.value(), gamma = prof.gamma.value(), m = src.m.value();
    const double outer = cfg.bigN * cfg.bigN * R;
    double sum = 0.0;
    for (int i = 0; i <= k; ++i) sum += annulus_term(prof, src, p, cfg, R, i);
    const double inf_phi = std::pow(m <= 0.0 ? outer : cfg.tau * R, m / (p - 1.0));
    return std::pow(R, alpha - 2.0 * gamma) * sum * inf_phi;
}

double lhs_upper(const ManifoldProfile& prof, double p, const WitnessConfig& cfg, double R) {
    if (!(p > 1.0)) throw PreconditionError("witness needs p > 1");
    const EigenResult lam =
        lambda1_annulus(SurrogateOperator::from(prof), cfg.tau * R, cfg.bigN * cfg.bigN * R, cfg.mesh);
    return std::pow(lam.extrapolated, 2.0 / (p - 1.0));
}

Rational predicted_gap(const ManifoldProfile& prof, const SourceProfile& src, const Rational& p) {
    if (!(p > Rational(1))) throw PreconditionError("witness needs p > 1");
    const Rational& a = prof.alpha;
    const Rational& g = prof.gamma;
    const Rational q = p - Rational(1);
    const Rational e = a + src.m - p * prof.biharmonic_decay();
    return a - Rational(2) * g + src.m / q + max(e, Rational(0)) + Rational(2) * (a - g) / q;
}

std::string to_string(Verdict v) {
    switch (v) {
    case Verdict::Contradiction: return "CONTRADICTION";
    case Verdict::NoContradiction: return "NO_CONTRADICTION";
    case Verdict::Inconclusive: return "INCONCLUSIVE";
    }
    return "?";
}

WitnessReport verdict(const ManifoldProfile& prof, const SourceProfile& src, const Rational& p,
                      const WitnessConfig& cfg) {
    cfg.validate();
    const double pd = p.value();
    WitnessReport rep;
    rep.predicted_gap = predicted_gap(prof, src, p);
    rep.rows.resize(cfg.R_list.size());
    parallel_for(cfg.R_list.size(), [&](std::size_t i) {
        WitnessRow& row = rep.rows[i];
        row.R = cfg.R_list[i];
        row.k = annulus_count(cfg, row.R);
        row.lhs = lhs_upper(prof, pd, cfg, row.R);
        row.rhs = rhs_lower(prof, src, pd, cfg, row.R);
        row.ratio = row.rhs / row.lhs;
    });

    const std::size_t n = rep.rows.size();
    std::vector<double> R(n), lhs(n), rhs(n), rhs_log(n), ratio(n), logR(n);
    for (std::size_t i = 0; i < n; ++i) {
        R[i] = rep.rows[i].R;
        lhs[i] = rep.rows[i].lhs;
        rhs[i] = rep.rows[i].rhs;
        logR[i] = std::log(R[i]);
        rhs_log[i] = rhs[i] / logR[i];
        ratio[i] = rep.rows[i].ratio;
    }
    rep.e_lambda = fit_power_law(R, lhs).slope;
    rep.e_rhs = fit_power_law(R, rhs).slope;
    rep.e_rhs_log = fit_power_law(R, rhs_log).slope;
    rep.gap = rep.e_rhs - rep.e_lambda;
    const LineFit ratio_fit = fit_line(logR, ratio);
    rep.log_correlation = ratio_fit.correlation;
    rep.log_flag = ratio_fit.correlation >= VerdictRule::kLogCorrelation && ratio_fit.slope > 0.0 &&
                   std::abs(rep.e_rhs_log - rep.e_lambda) <= VerdictRule::kLogExponentTol;
    rep.growth_flag = ratio[n - 1] > ratio[n - 2] && ratio[n - 2] > ratio[n - 3] &&
                      ratio[n - 1] >= VerdictRule::kGrowthFactor * ratio[n - 3];

    if (rep.log_flag) {
        rep.verdict = Verdict::Contradiction;
        rep.notes.push_back("equal exponents with a logarithmic factor: ratio grows like ln R");
    } else if (rep.gap > VerdictRule::kGapMargin || rep.growth_flag) {
        rep.verdict = Verdict::Contradiction;
        rep.notes.push_back(rep.gap > VerdictRule::kGapMargin ? "positive fitted exponent gap"
                                                              : "ratio at least doubles over the last three radii");
    } else if (rep.gap < -VerdictRule::kGapMargin) {
        rep.verdict = Verdict::NoContradiction;
        rep.notes.push_back("negative fitted exponent gap: ratio decays");
    } else {
        rep.verdict = Verdict::Inconclusive;
        rep.notes.push_back("fitted gap within the decision margin and no logarithmic growth detected");
    }
    const int predicted_sign = rep.predicted_gap.sign();
    const int fitted_sign = rep.gap > VerdictRule::kGapMargin ? 1 : (rep.gap < -VerdictRule::kGapMargin ? -1 : 0);
    if (predicted_sign != fitted_sign && !(predicted_sign == 0 && rep.log_flag))
        rep.notes.push_back("fitted gap sign differs from the exact predictor " + rep.predicted_gap.to_string());
    rep.notes.push_back("Green lower bound constant normalized to 1 (enters as R^(-2 gamma))");
    return rep;
}

} // namespace biharm
