#pragma once

#include <stdexcept>
#include <string>

namespace orthowave {

// Bad inputs: unknown keys, mismatched orders/rings, violated call contracts.
// The CLI maps this to exit code 2.
class UsageError : public std::runtime_error {
public:
    explicit UsageError(const std::string& msg) : std::runtime_error(msg) {}
};

// Numerical failures: validation, iteration divergence, precision exhaustion,
// assertion of a vanishing/positivity invariant. The CLI maps this to exit 3.
class NumericError : public std::runtime_error {
public:
    explicit NumericError(const std::string& msg) : std::runtime_error(msg) {}
};

} // namespace orthowave
