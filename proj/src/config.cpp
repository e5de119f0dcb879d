#include "biharm/config.hpp"

#include <fstream>
#include <istream>
#include <ostream>

#include "biharm/errors.hpp"

namespace biharm {

namespace {

std::string trim(const std::string& s) {
    const auto first = s.find_first_not_of(" \t\r");
    if (first == std::string::npos) return {};
    const auto last = s.find_last_not_of(" \t\r");
    return s.substr(first, last - first + 1);
}

const std::string& require(const KeyValues& kv, const std::string& key) {
    auto it = kv.find(key);
    if (it == kv.end())
        throw PreconditionError("config is missing key '" + key + "'");
    return it->second;
}

} // namespace

KeyValues parse_key_values(std::istream& in) {
    KeyValues kv;
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
        line = trim(line);
        if (line.empty()) continue;
        auto eq = line.find('=');
        if (eq == std::string::npos)
            throw PreconditionError("config line " + std::to_string(lineno) + " is not key=value");
        std::string key = trim(line.substr(0, eq));
        if (key.empty())
            throw PreconditionError("config line " + std::to_string(lineno) + " has an empty key");
        kv[key] = trim(line.substr(eq + 1));
    }
    return kv;
}

KeyValues read_key_values(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in)
        throw PreconditionError("cannot open config file " + path.string());
    return parse_key_values(in);
}

void write_key_values(std::ostream& out, const KeyValues& kv) {
    for (const auto& [k, v] : kv) out << k << '=' << v << '\n';
}

KeyValues to_key_values(const ProfileConfig& cfg) {
    KeyValues kv;
    kv["alpha"] = cfg.prof.alpha.to_string();
    kv["gamma"] = cfg.prof.gamma.to_string();
    kv["n"] = std::to_string(cfg.prof.dim_n);
    kv["mode"] = to_string(cfg.prof.mode);
    kv["m"] = cfg.src.m.to_string();
    if (cfg.src.s) kv["s"] = cfg.src.s->to_string();
    if (cfg.p) kv["p"] = cfg.p->to_string();
    return kv;
}

ProfileConfig profile_config_from(const KeyValues& kv) {
    const Rational alpha = Rational::parse(require(kv, "alpha"));
    const Rational gamma = Rational::parse(require(kv, "gamma"));
    int n = 3;
    if (auto it = kv.find("n"); it != kv.end()) n = std::stoi(it->second);
    ProfileMode mode = ProfileMode::TwoRegime;
    if (auto it = kv.find("mode"); it != kv.end()) mode = parse_profile_mode(it->second);
    auto prof = ManifoldProfile::make(alpha, gamma, n, mode);

    Rational m(0);
    if (auto it = kv.find("m"); it != kv.end()) m = Rational::parse(it->second);
    std::optional<Rational> s;
    if (auto it = kv.find("s"); it != kv.end()) s = Rational::parse(it->second);
    std::optional<Rational> p;
    if (auto it = kv.find("p"); it != kv.end()) p = Rational::parse(it->second);
    return ProfileConfig{prof, SourceProfile::make(prof, s, m), p};
}

} // namespace biharm
