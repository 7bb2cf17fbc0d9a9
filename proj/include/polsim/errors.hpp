#pragma once

#include <stdexcept>
#include <string>

namespace polsim {

// Bad or contradictory configuration input (CLI exit code 1).
struct config_error : std::runtime_error {
  explicit config_error(const std::string& what) : std::runtime_error(what) {}
};

// Beamline geometry violations: ordering, overlap, travel limits (CLI exit code 2).
struct geometry_error : std::runtime_error {
  explicit geometry_error(const std::string& what) : std::runtime_error(what) {}
};

// Physics-level precondition violations: unnormalized states, negative fields,
// integrator step limits (CLI exit code 2).
struct physics_error : std::runtime_error {
  explicit physics_error(const std::string& what) : std::runtime_error(what) {}
};

// Fit failures: no oscillation detected, span too short, degenerate abscissae
// (CLI exit code 2).
struct fit_error : std::runtime_error {
  explicit fit_error(const std::string& what) : std::runtime_error(what) {}
};

// Requested computation exceeds the configured resource budget (CLI exit code 2).
struct resource_error : std::runtime_error {
  explicit resource_error(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace polsim
