#pragma once

#include <Eigen/Dense>
#include <complex>

#include "polsim/constants.hpp"

namespace polsim {

using Spinor = Eigen::Vector2cd;        // (c_plus, c_minus) in the sigma_z basis
using SpinOperator = Eigen::Matrix2cd;  // unitary 2x2 propagator
using Vec3 = Eigen::Vector3d;

struct PolarizationVector {
  double px = 0.0, py = 0.0, pz = 0.0;
  Vec3 vec() const { return {px, py, pz}; }
  double norm() const { return vec().norm(); }
};

const SpinOperator& pauli_x();
const SpinOperator& pauli_y();
const SpinOperator& pauli_z();

// n.sigma for an arbitrary (not necessarily unit) vector n.
SpinOperator pauli_along(const Vec3& n);

// exp(-i*angle*(sigma.axis)/2). |axis| must be 1 within 1e-9.
SpinOperator rotation_propagator(const Vec3& axis, double angle);

// Free precession for `duration` in a static field of magnitude `field_tesla`
// along +z: exp(+i*gamma*duration*(sigma_z*field)/2), i.e. the propagator of
// H = -(hbar*gamma/2) sigma.B. Transverse polarization precesses by
// gamma*field*duration about z (clockwise viewed from +z for gamma > 0).
SpinOperator drift_propagator(double duration, double field_tesla,
                              double gamma = PhysicalConstants{}.gamma_n);

// Free precession in an arbitrary static field vector.
SpinOperator static_field_propagator(double duration, const Vec3& field_tesla,
                                     double gamma = PhysicalConstants{}.gamma_n);

// omega_L = gamma * B. B is a magnitude; negative input is an error.
double larmor_frequency(double field_tesla,
                        double gamma = PhysicalConstants{}.gamma_n);

// +1 eigenstate of sigma.direction (unit direction required).
Spinor spinor_from_direction(const Vec3& direction);

// <sigma_x>, <sigma_y>, <sigma_z>. Requires a normalized spinor (1e-9).
PolarizationVector polarization_of(const Spinor& state);

// Transmission through an ideal analyzer along `direction`: (1 + P.d)/2.
double projection_intensity(const Spinor& state, const Vec3& direction);

// |<a|b>| = 1 test helper: true when the states differ only by a global phase.
bool equal_up_to_global_phase(const Spinor& a, const Spinor& b, double tol = 1e-12);
bool equal_up_to_global_phase(const SpinOperator& a, const SpinOperator& b,
                              double tol = 1e-12);

}  // namespace polsim
