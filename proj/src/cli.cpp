#include "biharm/cli.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <numbers>
#include <sstream>

#include "biharm/errors.hpp"
#include "biharm/fit.hpp"
#include "biharm/kernels.hpp"
#include "biharm/liouville.hpp"
#include "biharm/parallel.hpp"
#include "biharm/solver.hpp"
#include "biharm/spectral.hpp"

namespace biharm {

namespace {

namespace fs = std::filesystem;
using nlohmann::json;

struct ParamSpec {
    const char* key;
    const char* fallback;
    const char* help;
};

const std::map<std::string, std::pair<std::string, std::vector<ParamSpec>>>& command_table() {
    static const std::map<std::string, std::pair<std::string, std::vector<ParamSpec>>> table = {
        {"classify",
         {"Critical exponents and regime for (alpha, gamma, m, s, p)",
          {{"alpha", "", "volume growth exponent"},
           {"gamma", "", "Green decay exponent"},
           {"n", "6", "small-scale dimension"},
           {"mode", "two-regime", "profile mode: two-regime | pure-power"},
           {"m", "0", "Phi exponent"},
           {"s", "", "Psi exponent (enables the existence side)"},
           {"p", "", "nonlinearity exponent"}}}},
        {"kernel-table",
         {"Radial biharmonic kernel from the pole on a log grid",
          {{"alpha", "", "volume growth exponent"},
           {"gamma", "", "Green decay exponent"},
           {"n", "6", "small-scale dimension"},
           {"mode", "two-regime", "profile mode"},
           {"rho-min", "1", "smallest radius"},
           {"rho-max", "1e4", "largest radius"},
           {"points", "41", "number of log-spaced radii"}}}},
        {"verify-bounds",
         {"Sup-ratios of the four potential bounds and the contraction constants",
          {{"alpha", "", "volume growth exponent"},
           {"gamma", "", "Green decay exponent"},
           {"n", "6", "small-scale dimension"},
           {"mode", "two-regime", "profile mode"},
           {"m", "0", "Phi exponent"},
           {"s", "0", "Psi exponent"},
           {"p", "", "nonlinearity exponent"},
           {"a", "", "force the decay exponent a"},
           {"b", "", "force the intermediate exponent b"},
           {"kernel", "split-comparison", "split-comparison | surrogate-exact | euclidean-exact"},
           {"rho-min", "1e-2", "smallest radius"},
           {"rho-max", "1e4", "largest radius"},
           {"nodes", "600", "log-spaced grid nodes"},
           {"constants", "true", "also estimate C and C' (true | false)"}}}},
        {"eigen",
         {"First Dirichlet eigenvalue of the surrogate operator on annuli",
          {{"alpha", "", "volume growth exponent"},
           {"gamma", "", "Green decay exponent"},
           {"radii", "100,1000,10000", "outer radii R, comma separated"},
           {"inner-ratio", "0.25", "inner radius as a fraction of R"},
           {"mesh", "512", "mesh nodes including endpoints"}}}},
        {"witness",
         {"Scaling comparison of the eigenvalue side and the Green side",
          {{"alpha", "", "volume growth exponent"},
           {"gamma", "", "Green decay exponent"},
           {"n", "6", "small-scale dimension"},
           {"mode", "two-regime", "profile mode"},
           {"m", "0", "Phi exponent"},
           {"p", "", "nonlinearity exponent"},
           {"tau", "0.5", "annulus ratio in (0, 1)"},
           {"big-n", "4", "outer radius factor N (ball of radius N^2 R)"},
           {"r-inner", "2", "radius r of the inner ball"},
           {"r-exp-min", "10", "smallest R as a power of two"},
           {"r-exp-max", "20", "largest R as a power of two"},
           {"mesh", "512", "eigen mesh nodes"}}}},
        {"solve",
         {"Fixed point of the existence operator by Picard iteration",
          {{"alpha", "", "volume growth exponent"},
           {"gamma", "", "Green decay exponent"},
           {"n", "6", "small-scale dimension"},
           {"mode", "two-regime", "profile mode"},
           {"m", "0", "Phi exponent"},
           {"s", "0", "Psi exponent"},
           {"p", "", "nonlinearity exponent"},
           {"a", "", "force the decay exponent a"},
           {"b", "", "force the intermediate exponent b"},
           {"l", "", "force the smallness parameter l"},
           {"kernel", "surrogate-exact", "kernel mode"},
           {"rho-min", "1e-3", "smallest radius"},
           {"rho-max", "1e6", "largest radius"},
           {"nodes", "1024", "log-spaced grid nodes"},
           {"tol", "1e-10", "sup-norm step tolerance"},
           {"maxit", "500", "iteration cap"},
           {"pairs", "50", "random pairs for the Lipschitz measurement"},
           {"seed", "1", "random seed"}}}},
        {"oracle",
         {"Euclidean potential of a ball source against Monte Carlo",
          {{"n", "6", "dimension (>= 5)"},
           {"x", "0,10", "evaluation radii, comma separated"},
           {"ball-radius", "1", "radius of the indicator source"},
           {"samples", "1000000", "Monte Carlo samples per radius"},
           {"seed", "1", "random seed"}}}},
    };
    return table;
}

class UsageError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

const std::string& need(const KeyValues& kv, const std::string& key) {
    auto it = kv.find(key);
    if (it == kv.end() || it->second.empty()) throw PreconditionError("missing required parameter --" + key);
    return it->second;
}

bool has(const KeyValues& kv, const std::string& key) {
    auto it = kv.find(key);
    return it != kv.end() && !it->second.empty();
}

double get_double(const KeyValues& kv, const std::string& key) {
    const std::string& text = need(kv, key);
    try {
        std::size_t used = 0;
        const double v = std::stod(text, &used);
        if (used != text.size()) throw std::invalid_argument(text);
        return v;
    } catch (const std::exception&) {
        throw PreconditionError("parameter --" + key + " is not a number: '" + text + "'");
    }
}

long get_long(const KeyValues& kv, const std::string& key) {
    const double v = get_double(kv, key);
    if (v != std::floor(v)) throw PreconditionError("parameter --" + key + " must be an integer");
    return static_cast<long>(v);
}

std::vector<double> get_list(const KeyValues& kv, const std::string& key) {
    std::vector<double> out;
    std::stringstream ss(need(kv, key));
    std::string item;
    while (std::getline(ss, item, ',')) {
        KeyValues one{{key, item}};
        out.push_back(get_double(one, key));
    }
    return out;
}

bool get_bool(const KeyValues& kv, const std::string& key) {
    const std::string& v = need(kv, key);
    if (v == "true" || v == "1") return true;
    if (v == "false" || v == "0") return false;
    throw PreconditionError("parameter --" + key + " must be true or false");
}

std::optional<Rational> get_rational(const KeyValues& kv, const std::string& key) {
    if (!has(kv, key)) return std::nullopt;
    return Rational::parse(kv.at(key));
}

ProfileConfig profiles_of(const KeyValues& kv) {
    KeyValues sub;
    for (const char* key : {"alpha", "gamma", "n", "mode", "s", "m", "p"})
        if (has(kv, key)) sub[key] = kv.at(key);
    need(kv, "alpha");
    need(kv, "gamma");
    return profile_config_from(sub);
}

std::string num(double v) {
    return format_double(v);
}

void write_atomic(const fs::path& path, const std::string& content) {
    fs::path tmp = path;
    tmp += ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw std::runtime_error("cannot write " + tmp.string());
        out << content;
        if (!out) throw std::runtime_error("write failed for " + tmp.string());
    }
    fs::rename(tmp, path);
}

json disclaimers() {
    return json::array({
        "comparability constants of the volume, Green and weight hypotheses are set to 1",
        "crossover radius R0 is normalized to 1; all radii are in units of R0",
        "the Green lower bound on annuli uses constant 1 (enters the witness as R^(-2 gamma))",
        "the annulus constant N is a parameter (default 4), not derived",
        "measured constants C, C' are sups over a finite grid, hence lower bounds on the true sup",
    });
}

json rational_json(const Rational& r) {
    return json{{"exact", r.to_string()}, {"value", r.value()}};
}

json plan_json(const ExponentPlan& plan) {
    json j{{"p", rational_json(plan.p)}, {"a", rational_json(plan.a)}, {"b", rational_json(plan.b)}};
    j["l"] = plan.l ? json(*plan.l) : json(nullptr);
    return j;
}

json scan_json(const RatioScan& s) {
    return json{{"sup", s.sup},
                {"last_decade_growth", s.last_decade_growth},
                {"last_decade_spread", s.last_decade_spread},
                {"last_decade_slope", s.last_decade_slope}};
}

struct Output {
    json report;
    std::vector<std::pair<std::string, std::string>> files;  // name, content
};

Output cmd_classify(const KeyValues& kv) {
    const ProfileConfig pc = profiles_of(kv);
    if (!pc.p) throw PreconditionError("missing required parameter --p");
    const ClassificationReport rep = classify(pc.prof, pc.src, *pc.p);
    Output out;
    out.report = json{{"p", rep.p.to_string()},
                      {"p_star", rep.p_star_nonexistence.to_string()},
                      {"p_star_value", rep.p_star_nonexistence.value()},
                      {"regime", to_string(rep.regime)},
                      {"notes", rep.notes}};
    out.report["p_star_existence"] =
        rep.p_star_existence ? json(rep.p_star_existence->to_string()) : json(nullptr);
    return out;
}

Output cmd_kernel_table(const KeyValues& kv) {
    const ProfileConfig pc = profiles_of(kv);
    const double lo = get_double(kv, "rho-min"), hi = get_double(kv, "rho-max");
    const long points = get_long(kv, "points");
    if (points < 2) throw PreconditionError("--points must be at least 2");
    const std::vector<double> grid = RadialFunction::log_grid(lo, hi, static_cast<std::size_t>(points));
    std::vector<QuadratureResult> vals(grid.size());
    parallel_for(grid.size(), [&](std::size_t i) { vals[i] = compose_green(pc.prof, grid[i]); });
    if (std::any_of(vals.begin(), vals.end(), [](const QuadratureResult& q) { return q.diverged; }))
        throw DivergenceError("biharmonic kernel diverges: 2 gamma - alpha = " +
                              pc.prof.biharmonic_decay().to_string() + " <= 0");
    std::string csv = "rho,value\n";
    std::vector<double> fx, fy;
    for (std::size_t i = 0; i < grid.size(); ++i) {
        csv += num(grid[i]) + "," + num(vals[i].value) + "\n";
        if (grid[i] >= 1e2 * (1 - 1e-12) && grid[i] <= 1e4 * (1 + 1e-12)) {
            fx.push_back(grid[i]);
            fy.push_back(vals[i].value);
        }
    }
    if (fx.size() < 2) {
        fx = grid;
        fy.clear();
        for (const auto& q : vals) fy.push_back(q.value);
    }
    Output out;
    out.report = json{{"slope", fit_power_law(fx, fy).slope},
                      {"slope_range", {fx.front(), fx.back()}},
                      {"expected_slope", -pc.prof.biharmonic_decay().value()},
                      {"rows", grid.size()}};
    out.files.emplace_back("kernel_table.csv", csv);
    return out;
}

Problem problem_of(const KeyValues& kv) {
    const ProfileConfig pc = profiles_of(kv);
    if (!pc.p) throw PreconditionError("missing required parameter --p");
    Problem pb{pc.prof, pc.src, {}, parse_kernel_mode(need(kv, "kernel"))};
    const auto forced_a = get_rational(kv, "a"), forced_b = get_rational(kv, "b");
    pb.plan = plan_exponents(pc.prof, pc.src, *pc.p, forced_a, forced_b);
    if (has(kv, "l")) pb.plan.l = get_double(kv, "l");
    return pb;
}

std::vector<double> grid_of(const KeyValues& kv) {
    const long nodes = get_long(kv, "nodes");
    if (nodes < 2) throw PreconditionError("--nodes must be at least 2");
    return RadialFunction::log_grid(get_double(kv, "rho-min"), get_double(kv, "rho-max"),
                                    static_cast<std::size_t>(nodes));
}

Output cmd_verify_bounds(const KeyValues& kv) {
    const Problem pb = problem_of(kv);
    const std::vector<double> grid = grid_of(kv);
    const Prop1Result p1 = verify_prop1(pb, grid);
    const Prop2Result p2 = verify_prop2(pb, grid);
    Output out;
    out.report = json{{"plan", plan_json(pb.plan)},
                      {"kernel", to_string(pb.mode)},
                      {"prop1_first", scan_json(p1.first)},
                      {"prop1_second", scan_json(p1.second)},
                      {"prop2_first", scan_json(p2.first)},
                      {"prop2_global_sup", p2.global_sup}};
    if (get_bool(kv, "constants")) {
        const Constants k = estimate_constants(pb, grid);
        out.report["C"] = k.C;
        out.report["C_prime"] = k.Cprime;
    }
    std::string a = "rho,ratio1,ratio2\n", b = "rho,ratio,global\n";
    for (std::size_t i = 0; i < grid.size(); ++i) {
        a += num(grid[i]) + "," + num(p1.first.ratio.values[i]) + "," + num(p1.second.ratio.values[i]) + "\n";
        b += num(grid[i]) + "," + num(p2.first.ratio.values[i]) + "," + num(p2.global.values[i]) + "\n";
    }
    out.files.emplace_back("prop1.csv", a);
    out.files.emplace_back("prop2.csv", b);
    return out;
}

Output cmd_eigen(const KeyValues& kv) {
    const Rational alpha = Rational::parse(need(kv, "alpha")), gamma = Rational::parse(need(kv, "gamma"));
    const ManifoldProfile prof = ManifoldProfile::make(alpha, gamma, 3);
    const std::vector<double> radii = get_list(kv, "radii");
    if (radii.size() < 2) throw PreconditionError("--radii needs at least two values");
    const double ratio = get_double(kv, "inner-ratio");
    if (!(ratio > 0.0 && ratio < 1.0)) throw PreconditionError("--inner-ratio must lie in (0, 1)");
    const long mesh = get_long(kv, "mesh");
    if (mesh < 64) throw PreconditionError("--mesh must be at least 64");
    const SurrogateOperator op = SurrogateOperator::from(prof);
    std::vector<EigenResult> res(radii.size());
    parallel_for(radii.size(), [&](std::size_t i) {
        res[i] = lambda1_annulus(op, ratio * radii[i], radii[i], static_cast<std::size_t>(mesh));
    });
    std::vector<double> lam;
    std::string csv = "R,lambda1\n";
    for (std::size_t i = 0; i < radii.size(); ++i) {
        lam.push_back(res[i].extrapolated);
        csv += num(radii[i]) + "," + num(res[i].extrapolated) + "\n";
    }
    const EigenResult test = lambda1_annulus(SurrogateOperator::test(), 0.0, 1.0, static_cast<std::size_t>(mesh));
    Output out;
    out.report = json{{"slope", fit_power_law(radii, lam).slope},
                      {"expected_slope", -(alpha - gamma).value()},
                      {"test_mode_lambda1", test.extrapolated},
                      {"test_mode_error", std::abs(test.extrapolated - std::numbers::pi * std::numbers::pi)},
                      {"max_error_estimate", std::max_element(res.begin(), res.end(),
                                                              [](const EigenResult& x, const EigenResult& y) {
                                                                  return x.error_estimate / x.extrapolated <
                                                                         y.error_estimate / y.extrapolated;
                                                              })->error_estimate}};
    out.files.emplace_back("eigen.csv", csv);
    return out;
}

Output cmd_witness(const KeyValues& kv) {
    const ProfileConfig pc = profiles_of(kv);
    if (!pc.p) throw PreconditionError("missing required parameter --p");
    WitnessConfig cfg;
    cfg.tau = get_double(kv, "tau");
    cfg.bigN = get_double(kv, "big-n");
    cfg.r_inner = get_double(kv, "r-inner");
    cfg.mesh = static_cast<std::size_t>(get_long(kv, "mesh"));
    const long e0 = get_long(kv, "r-exp-min"), e1 = get_long(kv, "r-exp-max");
    for (long e = e0; e <= e1; ++e) cfg.R_list.push_back(std::ldexp(1.0, static_cast<int>(e)));
    const WitnessReport rep = verdict(pc.prof, pc.src, *pc.p, cfg);
    Output out;
    out.report = json{{"verdict", to_string(rep.verdict)},
                      {"e_lambda", rep.e_lambda},
                      {"e_rhs", rep.e_rhs},
                      {"e_rhs_log", rep.e_rhs_log},
                      {"gap", rep.gap},
                      {"predicted_gap", rational_json(rep.predicted_gap)},
                      {"log_flag", rep.log_flag},
                      {"growth_flag", rep.growth_flag},
                      {"log_correlation", rep.log_correlation},
                      {"notes", rep.notes},
                      {"rule",
                       {{"log_correlation_min", VerdictRule::kLogCorrelation},
                        {"log_exponent_tol", VerdictRule::kLogExponentTol},
                        {"gap_margin", VerdictRule::kGapMargin},
                        {"growth_factor_last_three", VerdictRule::kGrowthFactor}}}};
    std::string csv = "R,lhs,rhs\n";
    for (const auto& row : rep.rows) csv += num(row.R) + "," + num(row.lhs) + "," + num(row.rhs) + "\n";
    out.files.emplace_back("witness.csv", csv);
    return out;
}

Output cmd_solve(const KeyValues& kv) {
    const Problem pb = problem_of(kv);
    SolveOptions opt;
    opt.tol = get_double(kv, "tol");
    opt.maxit = static_cast<int>(get_long(kv, "maxit"));
    opt.lipschitz_pairs = static_cast<int>(get_long(kv, "pairs"));
    opt.seed = static_cast<std::uint64_t>(get_long(kv, "seed"));
    const SolveReport rep = solve_fixed_point(pb, grid_of(kv), opt);
    Output out;
    out.report = json{{"plan", plan_json(rep.problem.plan)},
                      {"kernel", to_string(rep.problem.mode)},
                      {"C", rep.constants.C},
                      {"C_prime", rep.constants.Cprime},
                      {"l", rep.l},
                      {"iterations", rep.iterations},
                      {"iteration_bound", rep.iteration_bound},
                      {"final_step", rep.final_step},
                      {"steps", rep.steps},
                      {"lipschitz_measured", rep.lipschitz_measured},
                      {"lipschitz_predicted", rep.lipschitz_predicted},
                      {"membership_margin", rep.margin},
                      {"membership_margin_relative", rep.margin_relative},
                      {"h_min", rep.h_min}};
    out.report["residual_first"] = rep.residual_first ? json(*rep.residual_first) : json(nullptr);
    out.report["residual_second"] = rep.residual_second ? json(*rep.residual_second) : json(nullptr);
    std::string csv = "rho,u,h\n";
    for (std::size_t i = 0; i < rep.u.size(); ++i)
        csv += num(rep.u.grid[i]) + "," + num(rep.u.values[i]) + "," + num(rep.h.values[i]) + "\n";
    out.files.emplace_back("solution.csv", csv);
    return out;
}

Output cmd_oracle(const KeyValues& kv) {
    const long n = get_long(kv, "n");
    const std::vector<double> xs = get_list(kv, "x");
    const double radius = get_double(kv, "ball-radius");
    const long samples = get_long(kv, "samples");
    const auto seed = static_cast<std::uint64_t>(get_long(kv, "seed"));
    if (n < 5) throw PreconditionError("--n must be at least 5");
    if (samples < 2) throw PreconditionError("--samples must be at least 2");
    const ClosedSource ball = ClosedSource::ball(radius);
    const KernelSpec spec{KernelMode::EuclideanExact,
                          ManifoldProfile::make(Rational(n), Rational(n - 2), static_cast<int>(n))};
    std::string csv = "x,estimate,stderr,exact,z\n";
    double worst = 0.0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        const MonteCarloEstimate mc = mc_oracle(static_cast<int>(n), xs[i], ball,
                                                static_cast<std::uint64_t>(samples), seed + i);
        const double exact = potential_at(spec, ball, xs[i]);
        const double z = mc.stderr_ > 0.0 ? (mc.estimate - exact) / mc.stderr_ : 0.0;
        worst = std::max(worst, std::abs(z));
        csv += num(xs[i]) + "," + num(mc.estimate) + "," + num(mc.stderr_) + "," + num(exact) + "," + num(z) + "\n";
    }
    Output out;
    out.report = json{{"max_abs_z", worst}, {"within_3_stderr", worst <= 3.0}, {"cases", xs.size()}};
    out.files.emplace_back("oracle.csv", csv);
    return out;
}

Output dispatch(const RunConfig& rc) {
    const KeyValues& kv = rc.values;
    if (rc.command == "classify") return cmd_classify(kv);
    if (rc.command == "kernel-table") return cmd_kernel_table(kv);
    if (rc.command == "verify-bounds") return cmd_verify_bounds(kv);
    if (rc.command == "eigen") return cmd_eigen(kv);
    if (rc.command == "witness") return cmd_witness(kv);
    if (rc.command == "solve") return cmd_solve(kv);
    if (rc.command == "oracle") return cmd_oracle(kv);
    throw UsageError("unknown command '" + rc.command + "'");
}

} // namespace

KeyValues RunConfig::to_key_values() const {
    KeyValues kv = values;
    kv["command"] = command;
    return kv;
}

RunConfig RunConfig::from_key_values(const KeyValues& kv) {
    RunConfig rc;
    for (const auto& [k, v] : kv) {
        if (k == "command")
            rc.command = v;
        else
            rc.values[k] = v;
    }
    return rc;
}

const std::vector<std::string>& command_names() {
    static const std::vector<std::string> names = [] {
        std::vector<std::string> out;
        for (const auto& [name, entry] : command_table()) out.push_back(name);
        return out;
    }();
    return names;
}

KeyValues command_defaults(const std::string& command) {
    auto it = command_table().find(command);
    if (it == command_table().end()) throw PreconditionError("unknown command '" + command + "'");
    KeyValues kv;
    for (const auto& p : it->second.second)
        if (*p.fallback) kv[p.key] = p.fallback;
    return kv;
}

int run(int argc, const char* const* argv) {
    CLI::App app{"Numerical checks for biharmonic semilinear inequalities on manifolds with power-law volume growth"};
    app.require_subcommand(1);
    std::map<std::string, std::map<std::string, std::string>> raw;
    std::map<std::string, std::map<std::string, CLI::Option*>> opts;
    std::map<std::string, std::string> config_path, out_dir;
    for (const auto& [name, entry] : command_table()) {
        CLI::App* sub = app.add_subcommand(name, entry.first);
        for (const auto& p : entry.second) {
            std::string help = p.help;
            if (*p.fallback) help += " (default " + std::string(p.fallback) + ")";
            opts[name][p.key] = sub->add_option(std::string("--") + p.key, raw[name][p.key], help);
        }
        sub->add_option("--config", config_path[name], "key=value file; explicit flags override it");
        out_dir[name] = ".";
        sub->add_option("--out", out_dir[name], "output directory (default .)");
    }

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        std::cout << app.help();
        return 0;
    } catch (const CLI::ParseError& e) {
        std::cerr << "error: " << e.what() << "\n\n" << app.help();
        return 1;
    }

    CLI::App* sub = app.get_subcommands().front();
    const std::string name = sub->get_name();
    try {
        RunConfig rc;
        rc.command = name;
        rc.values = command_defaults(name);
        if (!config_path[name].empty()) {
            const RunConfig file = RunConfig::from_key_values(read_key_values(config_path[name]));
            if (!file.command.empty() && file.command != name)
                throw UsageError("config file is for command '" + file.command + "', not '" + name + "'");
            for (const auto& [k, v] : file.values) {
                if (!opts[name].count(k)) throw UsageError("unknown config key '" + k + "' for " + name);
                rc.values[k] = v;
            }
        }
        for (const auto& [k, opt] : opts[name])
            if (opt->count() > 0) rc.values[k] = raw[name][k];
        for (auto it = rc.values.begin(); it != rc.values.end();) it = it->second.empty() ? rc.values.erase(it) : ++it;

        Output out = dispatch(rc);
        json config;
        for (const auto& [k, v] : rc.to_key_values()) config[k] = v;
        out.report["command"] = name;
        out.report["config"] = config;
        out.report["disclaimers"] = disclaimers();
        out.report["status"] = "ok";

        const fs::path dir = out_dir[name];
        fs::create_directories(dir);
        for (const auto& [file, content] : out.files) write_atomic(dir / file, content);
        write_atomic(dir / "report.json", out.report.dump(2) + "\n");
        std::ostringstream cfg;
        write_key_values(cfg, rc.to_key_values());
        write_atomic(dir / "run.cfg", cfg.str());
        return 0;
    } catch (const UsageError& e) {
        std::cerr << "error: " << e.what() << "\n\n" << sub->help();
        return 1;
    } catch (const ConvergenceError& e) {
        std::cerr << "non-convergence: " << e.what() << "\n";
        return 3;
    } catch (const DivergenceError& e) {
        std::cerr << "divergence: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
}

} // namespace biharm
