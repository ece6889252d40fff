#pragma once

#include <stdexcept>
#include <string>

namespace pulsq {

// One exception class per failure mode, each with a stable process exit code
// so the CLI can report distinct statuses per error class. kind() is the
// short machine-readable tag used in dataset status columns.
class Error : public std::runtime_error {
public:
    Error(std::string msg, int exit_code, const char* kind)
        : std::runtime_error(std::move(msg)), exit_code_(exit_code), kind_(kind) {}
    int exit_code() const noexcept { return exit_code_; }
    const char* kind() const noexcept { return kind_; }

private:
    int exit_code_;
    const char* kind_;
};

// Invalid parameters, flags, or config files.
class ConfigError : public Error {
public:
    explicit ConfigError(const std::string& msg) : Error(msg, 2, "config") {}
};

// Photon-number evaluation requested outside the above-threshold regime.
class BelowThresholdError : public Error {
public:
    explicit BelowThresholdError(const std::string& msg) : Error(msg, 3, "below_threshold") {}
};

// The semi-infinite integral has no decaying envelope (stationary drive at
// threshold makes the photon-number integrand non-integrable).
class DivergentIntegralError : public Error {
public:
    explicit DivergentIntegralError(const std::string& msg)
        : Error(msg, 4, "divergent_integral") {}
};

// Adaptive quadrature exhausted its evaluation budget.
class NonConvergentError : public Error {
public:
    explicit NonConvergentError(const std::string& msg) : Error(msg, 5, "non_convergent") {}
};

// Envelope handed to the quadrature has non-positive decay rate.
class InvalidEnvelopeError : public Error {
public:
    explicit InvalidEnvelopeError(const std::string& msg)
        : Error(msg, 4, "invalid_envelope") {}
};

// Period-mean damping of the variance kernel is non-positive; the memory
// integral diverges.
class NegativeDecayError : public Error {
public:
    explicit NegativeDecayError(const std::string& msg) : Error(msg, 6, "negative_decay") {}
};

// ODE solver did not reach a periodic steady state within the period budget.
class NoConvergenceError : public Error {
public:
    explicit NoConvergenceError(const std::string& msg) : Error(msg, 7, "no_convergence") {}
};

// ODE solution escaped past the overflow guard.
class OverflowError : public Error {
public:
    explicit OverflowError(const std::string& msg) : Error(msg, 8, "overflow") {}
};

// Exit code used by `check` when the formula-vs-oracle residual exceeds the
// gate; not an exception, the command returns it directly.
inline constexpr int kExitResidualExceeded = 9;

} // namespace pulsq
