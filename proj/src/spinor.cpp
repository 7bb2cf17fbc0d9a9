#include "polsim/spinor.hpp"

#include <cmath>

#include "polsim/errors.hpp"

namespace polsim {

namespace {
constexpr std::complex<double> kI{0.0, 1.0};
}

const SpinOperator& pauli_x() {
  static const SpinOperator m = (SpinOperator() << 0, 1, 1, 0).finished();
  return m;
}

const SpinOperator& pauli_y() {
  static const SpinOperator m = (SpinOperator() << 0, -kI, kI, 0).finished();
  return m;
}

const SpinOperator& pauli_z() {
  static const SpinOperator m = (SpinOperator() << 1, 0, 0, -1).finished();
  return m;
}

SpinOperator pauli_along(const Vec3& n) {
  return n.x() * pauli_x() + n.y() * pauli_y() + n.z() * pauli_z();
}

SpinOperator rotation_propagator(const Vec3& axis, double angle) {
  if (std::abs(axis.norm() - 1.0) > 1e-9) {
    throw physics_error("rotation_propagator: axis must be a unit vector (|axis| = " +
                        std::to_string(axis.norm()) + ")");
  }
  return std::cos(angle / 2) * SpinOperator::Identity() -
         kI * std::sin(angle / 2) * pauli_along(axis);
}

SpinOperator drift_propagator(double duration, double field_tesla, double gamma) {
  if (duration < 0) throw physics_error("drift_propagator: negative duration");
  const double half = larmor_frequency(field_tesla, gamma) * duration / 2;
  SpinOperator u = SpinOperator::Zero();
  u(0, 0) = std::exp(kI * half);
  u(1, 1) = std::exp(-kI * half);
  return u;
}

SpinOperator static_field_propagator(double duration, const Vec3& field_tesla,
                                     double gamma) {
  if (duration < 0) throw physics_error("static_field_propagator: negative duration");
  const double b = field_tesla.norm();
  if (b == 0.0) return SpinOperator::Identity();
  // exp(+i*gamma*duration*(sigma.B)/2) = rotation by -gamma*B*duration about B.
  return rotation_propagator(field_tesla / b, -gamma * b * duration);
}

double larmor_frequency(double field_tesla, double gamma) {
  if (field_tesla < 0) {
    throw physics_error("larmor_frequency: field strength is a magnitude, got " +
                        std::to_string(field_tesla));
  }
  return gamma * field_tesla;
}

Spinor spinor_from_direction(const Vec3& direction) {
  if (std::abs(direction.norm() - 1.0) > 1e-9) {
    throw physics_error("spinor_from_direction: direction must be a unit vector");
  }
  // +1 eigenstate of sigma.n: (cos(t/2), e^{i phi} sin(t/2)).
  const double theta = std::acos(std::clamp(direction.z(), -1.0, 1.0));
  const double phi = std::atan2(direction.y(), direction.x());
  Spinor s;
  s << std::cos(theta / 2), std::exp(kI * phi) * std::sin(theta / 2);
  return s;
}

namespace {
void require_normalized(const Spinor& state, const char* where) {
  if (std::abs(state.squaredNorm() - 1.0) > 1e-9) {
    throw physics_error(std::string(where) + ": spinor not normalized (|psi|^2 = " +
                        std::to_string(state.squaredNorm()) + ")");
  }
}
}  // namespace

PolarizationVector polarization_of(const Spinor& state) {
  require_normalized(state, "polarization_of");
  const std::complex<double> cross = std::conj(state(0)) * state(1);
  PolarizationVector p;
  p.px = 2 * cross.real();
  p.py = 2 * cross.imag();
  p.pz = std::norm(state(0)) - std::norm(state(1));
  return p;
}

double projection_intensity(const Spinor& state, const Vec3& direction) {
  if (std::abs(direction.norm() - 1.0) > 1e-9) {
    throw physics_error("projection_intensity: direction must be a unit vector");
  }
  const PolarizationVector p = polarization_of(state);
  return (1.0 + p.vec().dot(direction)) / 2.0;
}

bool equal_up_to_global_phase(const Spinor& a, const Spinor& b, double tol) {
  return std::abs(std::abs(a.dot(b)) - 1.0) < tol;
}

bool equal_up_to_global_phase(const SpinOperator& a, const SpinOperator& b, double tol) {
  // |tr(a^dagger b)| = 2 iff a = e^{i phi} b for unitary a, b.
  return std::abs(std::abs((a.adjoint() * b).trace()) - 2.0) < tol;
}

}  // namespace polsim
