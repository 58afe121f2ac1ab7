#pragma once

#include <stdexcept>
#include <string>

namespace dyngal {

/// Invalid setup: grid sizes, incompatible families, malformed scenario files.
class ConfigurationError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// A value that should satisfy a structural invariant does not
/// (broken Hermitian symmetry, layout mismatch, non-zero-mean vorticity).
class IntegrityError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// A caller-supplied argument is outside the operation's domain.
class ArgumentError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// The state became non-finite during time integration.
class BlowUpError : public std::runtime_error {
public:
    explicit BlowUpError(double t)
        : std::runtime_error("non-finite state at t=" + std::to_string(t)), time_(t) {}
    double time() const noexcept { return time_; }

private:
    double time_;
};

} // namespace dyngal
