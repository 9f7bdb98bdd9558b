// errors.hpp: Exception types shared across the library; each maps to a CLI exit code.

#pragma once

#include <stdexcept>
#include <string>

namespace dicke {

// Invalid user-facing input: model/ion parameters, config files, preset names.
class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Integrator or linear-algebra failure: norm/trace drift, non-finite values,
// invariant violations of a computed state.
class NumericalError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Requested Hilbert space exceeds the configured dimension limit.
class MemoryGuardError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

namespace exit_code {
inline constexpr int success = 0;
inline constexpr int config_error = 2;
inline constexpr int numerical_failure = 3;
inline constexpr int memory_guard = 4;
}  // namespace exit_code

}  // namespace dicke
