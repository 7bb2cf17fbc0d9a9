#include "polsim/propagate.hpp"

#include <cmath>
#include <complex>

#include "polsim/errors.hpp"

namespace polsim {
namespace {

constexpr std::complex<double> kI{0.0, 1.0};

// exp(-i a sigma_z / 2) as a diagonal matrix.
SpinOperator z_phase(double a) {
  SpinOperator m = SpinOperator::Zero();
  m(0, 0) = std::exp(-kI * (a / 2.0));
  m(1, 1) = std::exp(kI * (a / 2.0));
  return m;
}

struct RabiParams {
  double tau;     // transit time of the coil
  double omega1;  // gamma*b1/2 (RWA drive strength)
  double delta;   // detuning w - gamma*B_loc
};

RabiParams rabi_params(const Element& flipper, const Beamline& beamline) {
  const double tau = flipper.coil_length / beamline.beam.velocity;
  const double b1 = beamline.rf_b1(flipper);
  const double omega1 = beamline.constants.gamma_n * b1 / 2.0;
  const double delta =
      flipper.frequency -
      beamline.constants.gamma_n * beamline.rf_local_field(flipper);
  return {tau, omega1, delta};
}

}  // namespace

SpinOperator dc_propagator(const Element& flipper) {
  if (flipper.type != ElementType::DCFlipper &&
      flipper.type != ElementType::PiHalfRotator) {
    throw physics_error("dc_propagator: element is not a DC rotation");
  }
  if (!flipper.enabled) return SpinOperator::Identity();
  return rotation_propagator(flipper.axis, flipper.angle);
}

SpinOperator rf_propagator(double entry_time, const Element& flipper,
                           const Beamline& beamline) {
  if (flipper.type != ElementType::RFFlipper) {
    throw physics_error("rf_propagator: element is not an RF flipper");
  }
  const double tau = flipper.coil_length / beamline.beam.velocity;
  if (!flipper.enabled) {
    // Idle coil: the packet still drifts through the coil's static field.
    const double b_loc = beamline.rf_local_field(flipper);
    return drift_propagator(tau, b_loc, beamline.constants.gamma_n);
  }
  if (flipper.b1.has_value() && *flipper.b1 == 0.0) {
    throw physics_error("rf_propagator: enabled flipper with b1 = 0");
  }
  const RabiParams p = rabi_params(flipper, beamline);
  const double omega_eff = std::hypot(p.delta, p.omega1);

  // Rotating-frame rotation exp(-i (delta sigma_z - omega1 sigma_x) tau / 2).
  SpinOperator u_rot;
  const double half = omega_eff * p.tau / 2.0;
  if (omega_eff == 0.0) {
    u_rot = SpinOperator::Identity();
  } else {
    const SpinOperator gen =
        (p.delta * pauli_z() - p.omega1 * pauli_x()) / omega_eff;
    u_rot = std::cos(half) * SpinOperator::Identity() -
            kI * std::sin(half) * gen;
  }

  const double w = flipper.frequency;
  const double phi = flipper.rf_phase;
  const double exit_time = entry_time + tau;
  return z_phase(w * exit_time + phi).adjoint() * u_rot *
         z_phase(w * entry_time + phi);
}

double rabi_flip_probability(const Element& flipper, const Beamline& beamline) {
  if (flipper.type != ElementType::RFFlipper) {
    throw physics_error("rabi_flip_probability: element is not an RF flipper");
  }
  const RabiParams p = rabi_params(flipper, beamline);
  const double omega_eff = std::hypot(p.delta, p.omega1);
  if (omega_eff == 0.0) return 0.0;
  const double s = std::sin(omega_eff * p.tau / 2.0);
  return (p.omega1 * p.omega1) / (omega_eff * omega_eff) * s * s;
}

PropagationResult propagate(const Beamline& beamline, double t_origin) {
  beamline.validate();
  const auto schedule = element_schedule(beamline, t_origin);
  const double gamma = beamline.constants.gamma_n;

  // The polarizer defines the initial spin direction.
  const Element& polarizer = *schedule.front().element;
  Spinor psi = spinor_from_direction(polarizer.direction);

  double t = schedule.front().exit_time;
  for (std::size_t i = 1; i < schedule.size(); ++i) {
    const ScheduleEntry& entry = schedule[i];
    // Drift in the guide field from the previous element to this one.
    psi = drift_propagator(entry.entry_time - t, beamline.guide_field, gamma) *
          psi;
    const Element& el = *entry.element;
    switch (el.type) {
      case ElementType::Polarizer:
        throw geometry_error("propagate: polarizer not at the head");
      case ElementType::Analyzer:
        break;  // handled below as a projection
      case ElementType::PiHalfRotator:
      case ElementType::DCFlipper:
        psi = dc_propagator(el) * psi;
        break;
      case ElementType::RFFlipper:
        psi = rf_propagator(entry.entry_time, el, beamline) * psi;
        break;
    }
    t = entry.exit_time;
  }

  const Element& analyzer = *schedule.back().element;
  const double projection = projection_intensity(psi, analyzer.direction);
  const double p_eff = beamline.beam.incident_polarization;
  // Mixture: polarized fraction projects, the rest transmits at 1/2.
  const double intensity = 0.5 + p_eff * (projection - 0.5);
  return {psi, intensity};
}

}  // namespace polsim
