#pragma once

#include <stdexcept>
#include <string>

namespace rotorlab {

// Error categories mapped to CLI exit codes (see tools/).
struct ConfigError : std::runtime_error {
    explicit ConfigError(const std::string& msg) : std::runtime_error(msg) {}
};

struct InputError : std::runtime_error {
    explicit InputError(const std::string& msg) : std::runtime_error(msg) {}
};

struct NumericError : std::runtime_error {
    explicit NumericError(const std::string& msg) : std::runtime_error(msg) {}
};

inline constexpr int kExitConfigError = 2;
inline constexpr int kExitInputError = 3;
inline constexpr int kExitNumericError = 4;

} // namespace rotorlab
