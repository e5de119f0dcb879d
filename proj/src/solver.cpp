#include "biharm/solver.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numbers>
#include <random>
#include <string>

#include "biharm/errors.hpp"
#include "biharm/fit.hpp"
#include "biharm/spectral.hpp"

namespace biharm {

namespace {

std::string fmt(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.6g", v);
    return buf;
}

void require_grid(const std::vector<double>& grid) {
    if (grid.size() < 2) throw PreconditionError("degenerate grid: at least two nodes are needed");
    for (std::size_t i = 0; i < grid.size(); ++i)
        if (!(grid[i] > 0.0) || (i > 0 && !(grid[i] > grid[i - 1])))
            throw PreconditionError("grid must be positive and strictly increasing");
}

template <std::size_t N>
void require_all(const std::array<WindowCondition, N>& conds, const char* group, bool numbered) {
    for (const auto& c : conds)
        if (!c.holds())
            throw DivergenceError(std::string("sup-ratio diverges at the tail: ") + group + " " + c.describe(),
                                  numbered ? c.index : 0);
}

ClosedSource closed(const Problem& pb, double psi_power, double f_power) {
    ClosedSource out;
    if (psi_power != 0.0) out.factors.push_back(profile_factor(ProfileKind::Psi, pb.prof, pb.src, psi_power));
    if (f_power != 0.0) out.factors.push_back(profile_factor(ProfileKind::F, pb.prof, pb.src, f_power));
    return out;
}

RadialFunction divide_by_f(const Problem& pb, const RadialFunction& num, double f_power) {
    RadialFunction out = num;
    const BranchPowers f = profile_powers(ProfileKind::F, pb.prof, pb.src);
    for (std::size_t i = 0; i < out.size(); ++i)
        out.values[i] /= std::pow(eval_profile(ProfileKind::F, pb.prof, pb.src, out.grid[i]), f_power);
    out.left_exponent -= f_power * f.small;
    out.right_exponent -= f_power * f.large;
    return out;
}

double sup_in(const RadialFunction& fn, std::optional<SupWindow> window) {
    double s = 0.0;
    bool any = false;
    for (std::size_t i = 0; i < fn.size(); ++i) {
        if (window && (fn.grid[i] < window->lo || fn.grid[i] > window->hi)) continue;
        s = std::max(s, fn.values[i]);
        any = true;
    }
    if (!any) throw PreconditionError("sup window contains no grid node");
    return s;
}

double plan_a(const Problem& pb) { return pb.plan.a.value(); }
double plan_p(const Problem& pb) { return pb.plan.p.value(); }

double require_l(const Problem& pb) {
    if (!pb.plan.l || !(*pb.plan.l > 0.0)) throw PreconditionError("plan has no positive smallness parameter l");
    return *pb.plan.l;
}

double sup_abs_diff(const RadialFunction& x, const RadialFunction& y) {
    double s = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) s = std::max(s, std::abs(x.values[i] - y.values[i]));
    return s;
}

} // namespace

std::vector<double> default_solver_grid() {
    return RadialFunction::log_grid(1e-3, 1e6, 1024);
}

RatioScan scan_ratio(RadialFunction ratio) {
    RatioScan scan;
    const double top = ratio.grid.back();
    std::size_t start = 0;
    while (start + 1 < ratio.size() && ratio.grid[start] < top / 10.0) ++start;
    double hi = 0.0, lo = kInfinity;
    for (std::size_t i = start; i < ratio.size(); ++i) {
        hi = std::max(hi, ratio.values[i]);
        lo = std::min(lo, ratio.values[i]);
    }
    for (double v : ratio.values) scan.sup = std::max(scan.sup, v);
    scan.last_decade_growth = hi / ratio.values[start] - 1.0;
    scan.last_decade_spread = hi > 0.0 ? (hi - lo) / hi : 0.0;
    if (ratio.size() - start >= 2 && lo > 0.0) scan.last_decade_slope = ratio.fitted_slope(ratio.grid[start], top);
    scan.ratio = std::move(ratio);
    return scan;
}

Prop1Result verify_prop1(const Problem& pb, const std::vector<double>& grid) {
    require_grid(grid);
    require_all(derived_conditions(pb.prof, pb.src, pb.plan), "derived inequality", true);
    const double a = plan_a(pb), p = plan_p(pb), b = pb.plan.b.value();
    const KernelSpec spec = pb.spec();
    Prop1Result res;
    res.first = scan_ratio(divide_by_f(pb, potential(spec, closed(pb, 1.0, a * p), grid), b));
    res.second = scan_ratio(divide_by_f(pb, potential(spec, closed(pb, 0.0, b), grid), a));
    return res;
}

Prop2Result verify_prop2(const Problem& pb, const std::vector<double>& grid) {
    require_grid(grid);
    require_all(contraction_conditions(pb.prof, pb.src, pb.plan), "contraction inequality", false);
    const double a = plan_a(pb), p = plan_p(pb), b = pb.plan.b.value();
    const KernelSpec spec = pb.spec();
    Prop2Result res;
    res.first = scan_ratio(divide_by_f(pb, potential(spec, closed(pb, 1.0, a * (p - 1.0)), grid), b - a));
    res.global = potential(spec, closed(pb, 0.0, b - a), grid);
    res.global_sup = *std::max_element(res.global.values.begin(), res.global.values.end());
    return res;
}

Constants estimate_constants(const Problem& pb, const std::vector<double>& grid, std::optional<SupWindow> window) {
    require_grid(grid);
    require_all(derived_conditions(pb.prof, pb.src, pb.plan), "derived inequality", true);
    require_all(contraction_conditions(pb.prof, pb.src, pb.plan), "contraction inequality", false);
    const double a = plan_a(pb), p = plan_p(pb);
    const KernelSpec spec = pb.spec();
    const RadialFunction kk1 = potential(spec, potential(spec, closed(pb, 1.0, a * p), grid));
    const RadialFunction kk2 = potential(spec, potential(spec, closed(pb, 1.0, a * (p - 1.0)), grid));
    Constants k;
    k.C = sup_in(divide_by_f(pb, kk1, a), window);
    k.Cprime = sup_in(kk2, window);
    return k;
}

double pick_l(double p, const Constants& k) {
    if (!(p > 1.0)) throw PreconditionError("pick_l needs p > 1");
    if (!(k.C > 0.0) || !(k.Cprime >= 0.0)) throw PreconditionError("pick_l needs C > 0 and C' >= 0");
    const double e = -1.0 / (p - 1.0);
    const double first = std::pow(2.0 * k.C, e);
    const double second = k.Cprime > 0.0 ? std::pow(k.Cprime * p, e) : kInfinity;
    const double l = 0.9 * std::min(first, second);
    if (!(2.0 * k.C * std::pow(l, p) < l) || !(k.Cprime * p * std::pow(l, p - 1.0) < 1.0))
        throw PreconditionError("pick_l: smallness conditions fail after the safety factor");
    return l;
}

RadialFunction envelope(const Problem& pb, const std::vector<double>& grid) {
    const double l = require_l(pb), a = plan_a(pb);
    const BranchPowers f = profile_powers(ProfileKind::F, pb.prof, pb.src);
    RadialFunction env;
    env.grid = grid;
    env.values.resize(grid.size());
    for (std::size_t i = 0; i < grid.size(); ++i)
        env.values[i] = l * std::pow(eval_profile(ProfileKind::F, pb.prof, pb.src, grid[i]), a);
    env.left_exponent = a * f.small;
    env.right_exponent = a * f.large;
    return env;
}

RadialFunction nonlinear_source(const Problem& pb, const RadialFunction& u) {
    const double l = require_l(pb), a = plan_a(pb), p = plan_p(pb);
    const BranchPowers psi = profile_powers(ProfileKind::Psi, pb.prof, pb.src);
    const BranchPowers f = profile_powers(ProfileKind::F, pb.prof, pb.src);
    RadialFunction out;
    out.grid = u.grid;
    out.values.resize(u.size());
    const double lp = std::pow(l, p);
    for (std::size_t i = 0; i < u.size(); ++i) {
        const double r = u.grid[i];
        const double fap = std::pow(eval_profile(ProfileKind::F, pb.prof, pb.src, r), a * p);
        out.values[i] = eval_profile(ProfileKind::Psi, pb.prof, pb.src, r) * (std::pow(u.values[i], p) + lp * fap);
    }
    double left = a * p * f.small, right = a * p * f.large;
    if (u.values.front() > 0.0) left = std::min(left, p * u.left_exponent);
    if (u.values.back() > 0.0) right = std::max(right, p * u.right_exponent);
    out.left_exponent = psi.small + left;
    out.right_exponent = psi.large + right;
    return out;
}

RadialFunction apply_T(const Problem& pb, const RadialFunction& u) {
    const RadialFunction env = envelope(pb, u.grid);
    for (std::size_t i = 0; i < u.size(); ++i)
        if (!(u.values[i] >= 0.0) || u.values[i] > env.values[i])
            throw PreconditionError("apply_T: u leaves S_l at rho = " + fmt(u.grid[i]));
    const KernelSpec spec = pb.spec();
    return potential(spec, potential(spec, nonlinear_source(pb, u)));
}

double measure_lipschitz(const Problem& pb, const std::vector<double>& grid, int pairs, std::uint64_t seed) {
    const RadialFunction env = envelope(pb, grid);
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> unif(0.0, 1.0);
    // even pairs hug the envelope, where the local slope p u^(p-1) is largest;
    // odd pairs spread over the whole order interval
    auto sample = [&](bool near_top) {
        const double c = unif(rng);
        const double omega = 0.2 + 1.8 * unif(rng);
        const double phase = 2.0 * std::numbers::pi * unif(rng);
        RadialFunction u = env;
        for (std::size_t i = 0; i < grid.size(); ++i) {
            const double wave = std::sin(omega * std::log(grid[i]) + phase);
            u.values[i] *= near_top ? 1.0 - 0.05 * c * (1.0 + 0.05 * wave) : c * (0.5 + 0.5 * wave);
        }
        return u;
    };
    double worst = 0.0;
    for (int k = 0; k < pairs; ++k) {
        const RadialFunction u1 = sample(k % 2 == 0), u2 = sample(k % 2 == 0);
        const double du = sup_abs_diff(u1, u2);
        if (du == 0.0) continue;
        worst = std::max(worst, sup_abs_diff(apply_T(pb, u1), apply_T(pb, u2)) / du);
    }
    return worst;
}

SolveReport solve_fixed_point(Problem pb, const std::vector<double>& grid, const SolveOptions& opt) {
    require_grid(grid);
    if (!(opt.tol > 0.0) || opt.maxit < 1) throw PreconditionError("solve needs tol > 0 and maxit >= 1");
    SolveReport rep;
    rep.constants = estimate_constants(pb, grid);
    if (!pb.plan.l) pb.plan.l = pick_l(plan_p(pb), rep.constants);
    rep.l = *pb.plan.l;
    const double p = plan_p(pb);
    rep.lipschitz_predicted = rep.constants.Cprime * p * std::pow(rep.l, p - 1.0);
    if (!(rep.lipschitz_predicted < 1.0))
        throw PreconditionError("contraction predictor C' p l^(p-1) = " + fmt(rep.lipschitz_predicted) + " is not < 1");
    rep.lipschitz_measured = measure_lipschitz(pb, grid, opt.lipschitz_pairs, opt.seed);
    const double L = std::max(rep.lipschitz_measured, 1e-300);
    rep.iteration_bound = L < 1.0 ? static_cast<int>(std::ceil(std::log(opt.tol) / std::log(L))) + 2 : opt.maxit;

    RadialFunction u = envelope(pb, grid);
    std::fill(u.values.begin(), u.values.end(), 0.0);
    for (int it = 1; it <= opt.maxit; ++it) {
        RadialFunction next = apply_T(pb, u);
        const double step = sup_abs_diff(next, u);
        rep.steps.push_back(step);
        u = std::move(next);
        rep.iterations = it;
        rep.final_step = step;
        if (step < opt.tol) break;
        if (it == opt.maxit) {
            const std::size_t n = rep.steps.size();
            const bool geometric = n >= 3 && rep.steps[n - 1] < rep.steps[n - 2] && rep.steps[n - 2] < rep.steps[n - 3];
            std::string msg = geometric ? "Picard iteration hit maxit while still contracting; last steps:"
                                        : "Picard iteration hit maxit with non-geometric decay; last steps:";
            for (std::size_t k = n > 5 ? n - 5 : 0; k < n; ++k) msg += " " + fmt(rep.steps[k]);
            throw ConvergenceError(msg);
        }
    }

    rep.problem = pb;
    rep.source = nonlinear_source(pb, u);
    rep.h = potential(pb.spec(), rep.source);
    const RadialFunction env = envelope(pb, grid);
    rep.margin = kInfinity;
    rep.margin_relative = kInfinity;
    for (std::size_t i = 0; i < grid.size(); ++i) {
        rep.margin = std::min(rep.margin, env.values[i] - u.values[i]);
        rep.margin_relative = std::min(rep.margin_relative, 1.0 - u.values[i] / env.values[i]);
    }
    rep.h_min = *std::min_element(rep.h.values.begin(), rep.h.values.end());
    rep.u = std::move(u);
    if (pb.mode == KernelMode::SurrogateExact) {
        const Residuals res = residual_check(rep);
        rep.residual_first = res.first;
        rep.residual_second = res.second;
    }
    return rep;
}

Residuals residual_check(const ManifoldProfile& prof, KernelMode mode, const RadialFunction& u,
                         const RadialFunction& h, const RadialFunction& source) {
    if (mode != KernelMode::SurrogateExact)
        throw PreconditionError("residual check needs the surrogate-exact kernel, the only exact inverse of L");
    if (u.grid != h.grid || u.grid != source.grid) throw PreconditionError("residual check needs a common grid");
    const SurrogateOperator op = SurrogateOperator::from(prof);
    const std::vector<double> lu = op.apply(u.grid, u.values);
    const std::vector<double> lh = op.apply(h.grid, h.values);
    double e1 = 0.0, e2 = 0.0, s1 = 0.0, s2 = 0.0;
    for (std::size_t i = 0; i < u.size(); ++i) {
        s1 = std::max(s1, std::abs(h.values[i]));
        s2 = std::max(s2, std::abs(source.values[i]));
        if (i == 0 || i + 1 == u.size()) continue;
        // the profiles switch branch at r = 1, so the source is only Lipschitz
        // there and a stencil straddling it is not second-order consistent
        if (u.grid[i - 1] < 1.0 && u.grid[i + 1] > 1.0) continue;
        e1 = std::max(e1, std::abs(lu[i] - h.values[i]));
        e2 = std::max(e2, std::abs(lh[i] - source.values[i]));
    }
    return {s1 > 0.0 ? e1 / s1 : e1, s2 > 0.0 ? e2 / s2 : e2};
}

Residuals residual_check(const SolveReport& report) {
    return residual_check(report.problem.prof, report.problem.mode, report.u, report.h, report.source);
}

} // namespace biharm
