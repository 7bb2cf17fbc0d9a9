#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "polsim/elements.hpp"
#include "polsim/propagate.hpp"
#include "polsim/spinor.hpp"

namespace polsim {

// One piecewise-constant-envelope interval of the lab-frame field
//   B(t) = static_field + b1 * cos(omega*t + phase) * rf_axis.
struct FieldSegment {
  double t_start = 0.0;
  double t_end = 0.0;
  Vec3 static_field{0.0, 0.0, 0.0};
  bool has_rf = false;
  double rf_b1 = 0.0;
  Vec3 rf_axis{1.0, 0.0, 0.0};
  double rf_omega = 0.0;  // rad/s
  double rf_phase = 0.0;
};

struct FieldProfile {
  std::vector<FieldSegment> segments;

  // Contiguous, non-overlapping, strictly increasing in time.
  void validate() const;
  double t_start() const;
  double t_end() const;
};

// Lab-frame field at time t (t must lie inside the profile).
Vec3 field_at(const FieldProfile& profile, double t);

enum class IntegratorMethod {
  RungeKutta4,          // classic fixed-step 4th-order
  ExponentialMidpoint,  // exp(-i H(t_mid) dt / hbar), exactly unitary
};

struct IntegratorConfig {
  // 0 = auto: each segment is stepped at 1/200 of its own fastest period
  // (Larmor, drive, or Rabi), scaled by step_scale. A positive value is a
  // global step applied to every segment.
  double step_size = 0.0;
  double step_scale = 1.0;  // multiplies the auto step; must keep steps legal
  IntegratorMethod method = IntegratorMethod::ExponentialMidpoint;
};

struct IntegrationStats {
  double norm_drift = 0.0;  // |1 - ||psi||| accumulated before renormalization
  std::uint64_t steps = 0;
  bool renormalized = false;
};

// Fastest angular frequency (rad/s) in one segment / in the whole profile:
// Larmor from the static magnitude, the RF drive frequency, and the Rabi rate
// gamma*b1/2. Drives the step-size guard and the default step.
double limiting_angular_frequency(const FieldSegment& segment, double gamma);
double limiting_angular_frequency(const FieldProfile& profile, double gamma);

// 1/200 of the shortest period in the whole profile — the global auto step.
// (Integration itself uses the per-segment analogue, so one fast segment does
// not force its step on slow ones.)
double default_step(const FieldProfile& profile, double gamma);

// Time-dependent Schroedinger integration of H(t) = -(hbar*gamma/2) sigma.B(t)
// starting from `initial` at profile.t_start(). Each segment's step must stay
// below 1/50 of that segment's fastest period; a violation throws a
// physics_error naming the limiting frequency. Norm drift must stay below
// 1e-9; the state is renormalized at most once, on exit, with the drift
// recorded in stats.
Spinor integrate(const FieldProfile& profile, const Spinor& initial,
                 const IntegratorConfig& config, double gamma,
                 IntegrationStats* stats = nullptr);

// Same field, classical Bloch picture: dP/dt = gamma * P x B. Agrees with the
// quantum propagation on pure states.
PolarizationVector bloch_integrate(const FieldProfile& profile,
                                   const PolarizationVector& initial,
                                   const IntegratorConfig& config,
                                   double gamma,
                                   IntegrationStats* stats = nullptr);

// How a beamline is rendered into a field profile for the oracle.
struct OracleOptions {
  double dc_width = 1e-3;  // physical width given to thin DC rotations (m)
  double step_scale = 1.0; // multiplies the default step
  IntegratorMethod method = IntegratorMethod::ExponentialMidpoint;
};

// Render the beamline the oracle sees: guide-field drifts between elements,
// RF coils as static local field + linear oscillating drive over the transit
// time, thin DC rotations as short segments whose field magnitude reproduces
// the rotation angle over dc_width.
FieldProfile field_profile_of(const Beamline& beamline, double t_origin = 0.0,
                              const OracleOptions& opts = {});

// Exact-dynamics counterpart of propagate(): integrate the full lab-frame
// Hamiltonian over the rendered profile and project on the analyzer.
PropagationResult oracle_propagate(const Beamline& beamline,
                                   double t_origin = 0.0,
                                   const OracleOptions& opts = {});

}  // namespace polsim
