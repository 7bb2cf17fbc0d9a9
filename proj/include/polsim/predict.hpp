#pragma once

#include <cmath>
#include <string>

#include "polsim/elements.hpp"

namespace polsim {

// Closed-form fringe phase for a translator sweep: the ideal projection at
// group displacement dx is (1 + cos(alpha0 + slope_per_offset * dx)) / 2.
// slope_per_offset is canonicalized positive (cos is even, so (alpha, slope)
// and (-alpha, -slope) describe the same curve).
struct PhasePrediction {
  double alpha0 = 0.0;            // rad, reduced to (-pi, pi]
  double slope_per_offset = 0.0;  // rad per metre of translator displacement
};

inline double predicted_projection(const PhasePrediction& p, double dx) {
  return 0.5 * (1.0 + std::cos(p.alpha0 + p.slope_per_offset * dx));
}

// Larmor configuration (RF coils idle, DC flipper active): translating the
// flipper by dx re-partitions the guide-field precession around the spin echo,
// giving alpha(dx) = alpha0 + (2*gamma*B0/v) * dx.
PhasePrediction predict_phase_larmor(const Beamline& beamline,
                                     const std::string& translator_group = "g1");

// Zero-field configuration (both RF coils driven, DC flipper active): the
// second coil's time-stamped phase imprint makes alpha'(dx) advance with the
// drive clock, not the guide field. Tracing the exact resonant-flip propagators
// gives alpha'(dx) = alpha'0 + (2*omega_rf/v) * dx: each full flip transfers
// one drive quantum per spin component with opposite signs, so the two
// interfering components separate by 2*hbar*omega and the spatial fringe
// frequency is 2*omega_rf/v. The guide field cancels from the slope entirely.
PhasePrediction predict_phase_zerofield(const Beamline& beamline,
                                        const std::string& translator_group = "g1");

// Dispatch on the configuration the beamline is meant to run in. The beamline's
// element enables must already match (apply_configuration does that).
PhasePrediction phase_prediction(const Beamline& beamline,
                                 Configuration configuration,
                                 const std::string& translator_group = "g1");

}  // namespace polsim
