#include "polsim/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <limits>
#include <sstream>

#include "polsim/errors.hpp"

namespace polsim {
namespace {

constexpr std::complex<double> kI{0.0, 1.0};
constexpr double kTwoPi = 6.283185307179586476925286766559;

Vec3 segment_field(const FieldSegment& seg, double t) {
  Vec3 b = seg.static_field;
  if (seg.has_rf) {
    b += seg.rf_b1 * std::cos(seg.rf_omega * t + seg.rf_phase) * seg.rf_axis;
  }
  return b;
}

// dpsi/dt = -i H psi / hbar = +i (gamma/2) (sigma.B) psi
Spinor schrodinger_rhs(double gamma, const Vec3& b, const Spinor& psi) {
  SpinOperator h = pauli_x() * b.x() + pauli_y() * b.y() + pauli_z() * b.z();
  return kI * (gamma / 2.0) * (h * psi);
}

Vec3 bloch_rhs(double gamma, const Vec3& b, const Vec3& p) {
  return gamma * p.cross(b);
}

// exp(-i a (sigma.n)/2) for a = gamma*|B|*dt evaluated at the midpoint field.
SpinOperator midpoint_step_op(double gamma, const Vec3& b, double dt) {
  const double mag = b.norm();
  if (mag == 0.0) return SpinOperator::Identity();
  return rotation_propagator(b / mag, -gamma * mag * dt);
}

struct SegmentGrid {
  const FieldSegment* seg;
  double dt;
  std::uint64_t n;
};

// Per-segment stepping: auto mode resolves each segment's own fastest process
// at 200 steps per period; a user-provided global step is checked against
// every segment. Either way a step above 1/50 of a segment's fastest period is
// rejected, naming the frequency that sets the bound.
std::vector<SegmentGrid> build_grid(const FieldProfile& profile,
                                    const IntegratorConfig& cfg,
                                    double gamma) {
  profile.validate();
  if (cfg.step_size < 0 || cfg.step_scale <= 0) {
    throw physics_error("integrator step_size/step_scale must be positive");
  }
  std::vector<SegmentGrid> grid;
  grid.reserve(profile.segments.size());
  for (const auto& seg : profile.segments) {
    const double span = seg.t_end - seg.t_start;
    const double w = limiting_angular_frequency(seg, gamma);
    const double auto_step =
        (w > 0.0 ? kTwoPi / w / 200.0 : span / 200.0) * cfg.step_scale;
    const double step = cfg.step_size > 0.0 ? cfg.step_size : auto_step;
    if (w > 0.0) {
      const double limit = kTwoPi / w / 50.0;  // 1/50 of the fastest period
      if (step > limit * (1.0 + 1e-12)) {
        std::ostringstream msg;
        msg << "integrator step " << step
            << " s exceeds 1/50 of the fastest period; limiting angular "
               "frequency "
            << w << " rad/s (" << w / kTwoPi << " Hz) requires step <= "
            << limit << " s";
        throw physics_error(msg.str());
      }
    }
    auto n = static_cast<std::uint64_t>(std::ceil(span / step));
    n = std::max<std::uint64_t>(n, 1);
    grid.push_back({&seg, span / static_cast<double>(n), n});
  }
  return grid;
}

}  // namespace

void FieldProfile::validate() const {
  if (segments.empty()) {
    throw physics_error("field profile has no segments");
  }
  for (std::size_t i = 0; i < segments.size(); ++i) {
    const auto& s = segments[i];
    if (!(s.t_end > s.t_start)) {
      throw physics_error("field profile segment has non-positive duration");
    }
    if (i > 0 &&
        std::abs(s.t_start - segments[i - 1].t_end) >
            1e-12 * std::max(1.0, std::abs(s.t_start))) {
      throw physics_error("field profile segments are not contiguous");
    }
    if (s.has_rf) {
      const double norm = s.rf_axis.norm();
      if (std::abs(norm - 1.0) > 1e-9) {
        throw physics_error("RF axis must be a unit vector");
      }
    }
  }
}

double FieldProfile::t_start() const {
  if (segments.empty()) throw physics_error("field profile has no segments");
  return segments.front().t_start;
}

double FieldProfile::t_end() const {
  if (segments.empty()) throw physics_error("field profile has no segments");
  return segments.back().t_end;
}

Vec3 field_at(const FieldProfile& profile, double t) {
  for (const auto& seg : profile.segments) {
    if (t >= seg.t_start && t <= seg.t_end) return segment_field(seg, t);
  }
  throw physics_error("field_at: time outside the profile");
}

double limiting_angular_frequency(const FieldSegment& seg, double gamma) {
  double w = std::abs(gamma) * seg.static_field.norm();
  if (seg.has_rf) {
    w = std::max(w, seg.rf_omega);
    w = std::max(w, std::abs(gamma) * seg.rf_b1 / 2.0);  // Rabi rate
  }
  return w;
}

double limiting_angular_frequency(const FieldProfile& profile, double gamma) {
  double w = 0.0;
  for (const auto& seg : profile.segments) {
    w = std::max(w, limiting_angular_frequency(seg, gamma));
  }
  return w;
}

double default_step(const FieldProfile& profile, double gamma) {
  const double w = limiting_angular_frequency(profile, gamma);
  if (w <= 0.0) {
    // Field-free profile: resolve the total span instead.
    return (profile.t_end() - profile.t_start()) / 200.0;
  }
  return kTwoPi / w / 200.0;
}

Spinor integrate(const FieldProfile& profile, const Spinor& initial,
                 const IntegratorConfig& config, double gamma,
                 IntegrationStats* stats) {
  if (std::abs(initial.norm() - 1.0) > 1e-9) {
    throw physics_error("integrate: initial state is not normalized");
  }

  Spinor psi = initial;
  IntegrationStats local;
  for (const auto& g : build_grid(profile, config, gamma)) {
    double t = g.seg->t_start;
    for (std::uint64_t i = 0; i < g.n; ++i) {
      const double dt = g.dt;
      if (config.method == IntegratorMethod::ExponentialMidpoint) {
        const Vec3 b = segment_field(*g.seg, t + dt / 2.0);
        psi = midpoint_step_op(gamma, b, dt) * psi;
      } else {
        const Vec3 b1 = segment_field(*g.seg, t);
        const Vec3 b2 = segment_field(*g.seg, t + dt / 2.0);
        const Vec3 b3 = segment_field(*g.seg, t + dt);
        const Spinor k1 = schrodinger_rhs(gamma, b1, psi);
        const Spinor k2 = schrodinger_rhs(gamma, b2, psi + (dt / 2.0) * k1);
        const Spinor k3 = schrodinger_rhs(gamma, b2, psi + (dt / 2.0) * k2);
        const Spinor k4 = schrodinger_rhs(gamma, b3, psi + dt * k3);
        psi += (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
      }
      t += dt;
      ++local.steps;
    }
  }

  local.norm_drift = std::abs(psi.norm() - 1.0);
  if (local.norm_drift >= 1e-9) {
    std::ostringstream msg;
    msg << "integrate: norm drift " << local.norm_drift
        << " exceeds 1e-9; reduce the step size";
    throw physics_error(msg.str());
  }
  if (local.norm_drift > 0.0) {
    psi /= psi.norm();  // renormalize exactly once, at exit
    local.renormalized = true;
  }
  if (stats) *stats = local;
  return psi;
}

PolarizationVector bloch_integrate(const FieldProfile& profile,
                                   const PolarizationVector& initial,
                                   const IntegratorConfig& config,
                                   double gamma, IntegrationStats* stats) {
  Vec3 p = initial.vec();
  const double p0 = p.norm();
  IntegrationStats local;
  for (const auto& g : build_grid(profile, config, gamma)) {
    double t = g.seg->t_start;
    for (std::uint64_t i = 0; i < g.n; ++i) {
      const double dt = g.dt;
      if (config.method == IntegratorMethod::ExponentialMidpoint) {
        const Vec3 b = segment_field(*g.seg, t + dt / 2.0);
        const double mag = b.norm();
        if (mag > 0.0) {
          // Rodrigues rotation of P about B by -gamma*|B|*dt (same sense as
          // the quantum propagator).
          const Vec3 n = b / mag;
          const double a = -gamma * mag * dt;
          p = p * std::cos(a) + n.cross(p) * std::sin(a) +
              n * (n.dot(p)) * (1.0 - std::cos(a));
        }
      } else {
        const Vec3 b1 = segment_field(*g.seg, t);
        const Vec3 b2 = segment_field(*g.seg, t + dt / 2.0);
        const Vec3 b3 = segment_field(*g.seg, t + dt);
        const Vec3 k1 = bloch_rhs(gamma, b1, p);
        const Vec3 k2 = bloch_rhs(gamma, b2, p + (dt / 2.0) * k1);
        const Vec3 k3 = bloch_rhs(gamma, b2, p + (dt / 2.0) * k2);
        const Vec3 k4 = bloch_rhs(gamma, b3, p + dt * k3);
        p += (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
      }
      t += dt;
      ++local.steps;
    }
  }

  if (p0 > 0.0) {
    local.norm_drift = std::abs(p.norm() / p0 - 1.0);
    if (local.norm_drift >= 1e-9) {
      std::ostringstream msg;
      msg << "bloch_integrate: norm drift " << local.norm_drift
          << " exceeds 1e-9; reduce the step size";
      throw physics_error(msg.str());
    }
    if (local.norm_drift > 0.0) {
      p *= p0 / p.norm();
      local.renormalized = true;
    }
  }
  if (stats) *stats = local;
  return {p.x(), p.y(), p.z()};
}

FieldProfile field_profile_of(const Beamline& beamline, double t_origin,
                              const OracleOptions& opts) {
  beamline.validate();
  if (opts.dc_width <= 0.0) {
    throw physics_error("oracle dc_width must be positive");
  }
  const auto schedule = element_schedule(beamline, t_origin);
  const double v = beamline.beam.velocity;
  const double gamma = beamline.constants.gamma_n;
  const Vec3 guide{0.0, 0.0, beamline.guide_field};

  FieldProfile profile;
  auto add_drift = [&](double a, double b) {
    if (b - a <= 0.0) return;
    FieldSegment s;
    s.t_start = a;
    s.t_end = b;
    s.static_field = guide;
    profile.segments.push_back(s);
  };

  double t = schedule.front().exit_time;
  const double half_dc = opts.dc_width / v / 2.0;
  for (std::size_t i = 1; i < schedule.size(); ++i) {
    const ScheduleEntry& entry = schedule[i];
    const Element& el = *entry.element;
    switch (el.type) {
      case ElementType::Polarizer:
        throw geometry_error("field_profile_of: polarizer not at the head");
      case ElementType::Analyzer:
        add_drift(t, entry.entry_time);
        t = entry.exit_time;
        break;
      case ElementType::PiHalfRotator:
      case ElementType::DCFlipper: {
        if (!el.enabled) {
          break;  // no field, no width: pure drift continues
        }
        // A thin rotation becomes a short segment [t0-w/2, t0+w/2] of a pure
        // axis-aligned field solved from angle = -gamma*|B|*dt (sign of B
        // chosen so the rotation sense matches rotation_propagator).
        const double dt = 2.0 * half_dc;
        add_drift(t, entry.entry_time - half_dc);
        FieldSegment s;
        s.t_start = entry.entry_time - half_dc;
        s.t_end = entry.entry_time + half_dc;
        s.static_field = -el.angle / (gamma * dt) * el.axis;
        if (s.t_start < t - 1e-15) {
          throw geometry_error(
              "oracle dc_width overlaps the previous element; reduce "
              "dc_width");
        }
        profile.segments.push_back(s);
        t = entry.entry_time + half_dc;
        break;
      }
      case ElementType::RFFlipper: {
        add_drift(t, entry.entry_time);
        FieldSegment s;
        s.t_start = entry.entry_time;
        s.t_end = entry.exit_time;
        s.static_field = Vec3{0.0, 0.0, beamline.rf_local_field(el)};
        if (el.enabled) {
          s.has_rf = true;
          s.rf_b1 = beamline.rf_b1(el);
          s.rf_axis = Vec3{1.0, 0.0, 0.0};
          s.rf_omega = el.frequency;
          s.rf_phase = el.rf_phase;
        }
        profile.segments.push_back(s);
        t = entry.exit_time;
        break;
      }
    }
  }
  profile.validate();
  return profile;
}

PropagationResult oracle_propagate(const Beamline& beamline, double t_origin,
                                   const OracleOptions& opts) {
  const FieldProfile profile = field_profile_of(beamline, t_origin, opts);
  const Element& polarizer = beamline.elements.front();
  const Element& analyzer = beamline.elements.back();

  IntegratorConfig cfg;
  cfg.method = opts.method;
  cfg.step_scale = opts.step_scale;  // per-segment auto steps

  const Spinor psi0 = spinor_from_direction(polarizer.direction);
  const Spinor psi =
      integrate(profile, psi0, cfg, beamline.constants.gamma_n);
  const double projection = projection_intensity(psi, analyzer.direction);
  const double p_eff = beamline.beam.incident_polarization;
  const double intensity = 0.5 + p_eff * (projection - 0.5);
  return {psi, intensity};
}

}  // namespace polsim
