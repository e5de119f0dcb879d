#pragma once

#include <stdexcept>
#include <string>

namespace biharm {

/// Input or hypothesis violated before any numerics ran.
class PreconditionError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// An integral (or sup-ratio) is infinite because an exponent inequality fails.
/// `condition` is the 1-based index of the violated admissibility inequality when
/// one applies, 0 otherwise.
class DivergenceError : public std::runtime_error {
public:
    DivergenceError(const std::string& what, int condition = 0)
        : std::runtime_error(what), condition_(condition) {}
    int condition() const noexcept { return condition_; }

private:
    int condition_;
};

/// Iterative method failed to converge; the message carries the iteration trace.
class ConvergenceError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

} // namespace biharm
