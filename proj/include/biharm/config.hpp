#pragma once

#include <filesystem>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>

#include "biharm/profiles.hpp"

namespace biharm {

/// Flat key=value configuration, one pair per line, '#' starts a comment.
/// Keys are kept sorted so that writing is deterministic.
using KeyValues = std::map<std::string, std::string>;

KeyValues parse_key_values(std::istream& in);
KeyValues read_key_values(const std::filesystem::path& path);
void write_key_values(std::ostream& out, const KeyValues& kv);

/// Profile, source and exponent as stored in a config file
/// (keys alpha, gamma, n, mode, s, m, p).
struct ProfileConfig {
    ManifoldProfile prof;
    SourceProfile src;
    std::optional<Rational> p;
};

KeyValues to_key_values(const ProfileConfig& cfg);
ProfileConfig profile_config_from(const KeyValues& kv);

} // namespace biharm
