#pragma once

#include <stdexcept>
#include <string>

namespace flockring {

/// Bad or inconsistent scenario/optimizer configuration. `field` names the
/// offending entry so the CLI can print a field-level diagnostic.
class ConfigError : public std::runtime_error {
public:
    ConfigError(std::string field, const std::string& message)
        : std::runtime_error("config field '" + field + "': " + message),
          field_(std::move(field)) {}

    const std::string& field() const noexcept { return field_; }

private:
    std::string field_;
};

/// A multi-circle plan violating one of its geometric invariants.
class PlanError : public std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Non-finite agent state encountered during integration.
class DivergenceError : public std::runtime_error {
public:
    DivergenceError(int agent_id, double t)
        : std::runtime_error("non-finite state for agent " + std::to_string(agent_id) +
                             " at t=" + std::to_string(t)),
          agent_id_(agent_id) {}

    int agent_id() const noexcept { return agent_id_; }

private:
    int agent_id_;
};

/// Requested polygon spacing fell below the d >= 1 feasibility bound.
class InfeasibleSpacingError : public std::runtime_error {
    using std::runtime_error::runtime_error;
};

} // namespace flockring
