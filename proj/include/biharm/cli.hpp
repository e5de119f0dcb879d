#pragma once

#include <string>
#include <vector>

#include "biharm/config.hpp"

namespace biharm {

/// A command plus every resolved parameter, as stored in a key=value file.
struct RunConfig {
    std::string command;
    KeyValues values;

    KeyValues to_key_values() const;
    static RunConfig from_key_values(const KeyValues& kv);
};

/// Commands understood by run().
const std::vector<std::string>& command_names();

/// Defaults for one command's parameters; empty values mean "unset".
KeyValues command_defaults(const std::string& command);

/// Entry point behind the biharm executable. Exit codes: 0 ok, 1 usage,
/// 2 precondition or divergence, 3 numerical non-convergence.
int run(int argc, const char* const* argv);

} // namespace biharm
