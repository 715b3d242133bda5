#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace rhc {

/// Non-finite value produced while stepping an ODE or sweeping the horizon.
class NumericalError : public std::runtime_error {
public:
    NumericalError(const std::string& what, double time, std::ptrdiff_t node = -1)
        : std::runtime_error(what), time_(time), node_(node) {}

    [[nodiscard]] double time() const noexcept { return time_; }
    /// Index on the tau grid, or -1 when the failure is on the real-time axis.
    [[nodiscard]] std::ptrdiff_t node() const noexcept { return node_; }

private:
    double time_;
    std::ptrdiff_t node_;
};

/// The continuation residual exceeded the configured divergence threshold.
class DivergenceError : public NumericalError {
public:
    DivergenceError(const std::string& what, double time, double residual_norm)
        : NumericalError(what, time), residual_norm_(residual_norm) {}

    [[nodiscard]] double residual_norm() const noexcept { return residual_norm_; }

private:
    double residual_norm_;
};

/// Invalid scenario or configuration input. `key()` names the offending entry.
class ConfigError : public std::runtime_error {
public:
    ConfigError(std::string key, const std::string& what)
        : std::runtime_error(key.empty() ? what : key + ": " + what), key_(std::move(key)) {}

    [[nodiscard]] const std::string& key() const noexcept { return key_; }

private:
    std::string key_;
};

}  // namespace rhc
