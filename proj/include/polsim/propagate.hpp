#pragma once

#include "polsim/elements.hpp"
#include "polsim/spinor.hpp"

namespace polsim {

// DC rotation: rotation_propagator(axis, angle) when enabled, identity when
// disabled. Thin element (zero flight time).
SpinOperator dc_propagator(const Element& flipper);

// Lab-frame RF coil propagator under the rotating-wave approximation.
//
//   U = Rz(w*t_exit + phi)^dagger * U_rot * Rz(w*t_entry + phi)
//
// with Rz(a) = exp(-i a sigma_z / 2) and U_rot = exp(-i (delta sigma_z -
// w1 sigma_x) tau / 2) the rotating-frame Rabi rotation over the coil time
// tau = coil_length / velocity; w1 = gamma*b1/2, detuning delta = w - gamma*B_loc.
//
// On resonance at the flip condition w1*tau = pi this is a pure flip whose
// amplitudes carry exp(-/+ i(w*t_mid + phi)) with t_mid the coil's temporal
// midpoint — the time-stamped phase imprint that produces the guide-field-free
// precession. Off resonance the flip probability obeys the Rabi formula.
//
// A disabled flipper contributes only its drift through the coil's static field.
// Enabled with b1 = 0 is an error.
SpinOperator rf_propagator(double entry_time, const Element& flipper,
                           const Beamline& beamline);

// Flip probability (w1^2/(w1^2+delta^2)) sin^2(sqrt(w1^2+delta^2) tau/2) of an
// RF coil in the given beamline context.
double rabi_flip_probability(const Element& flipper, const Beamline& beamline);

struct PropagationResult {
  Spinor state;      // state arriving at the analyzer
  double intensity;  // 1/2 + P_eff*(projection - 1/2), in [0, 1]
};

// Analytic engine: compose drift and element propagators over the schedule,
// starting in the polarizer eigenstate. The incident polarization scales the
// oscillating part of the transmitted intensity (mixture of the polarized and
// isotropic beam fractions).
PropagationResult propagate(const Beamline& beamline, double t_origin = 0.0);

}  // namespace polsim
