#include "polsim/predict.hpp"

#include <cmath>
#include <numbers>
#include <vector>

#include "polsim/errors.hpp"

namespace polsim {
namespace {

constexpr double kPi = std::numbers::pi;

// First-degree polynomial in the translator displacement dx. Every step of the
// phase trace is affine in dx, so the final phase is exactly alpha0 + m*dx.
struct Affine {
  double c0 = 0.0;  // value at dx = 0
  double c1 = 0.0;  // derivative with respect to dx
  Affine operator+(const Affine& o) const { return {c0 + o.c0, c1 + o.c1}; }
  Affine operator-(const Affine& o) const { return {c0 - o.c0, c1 - o.c1}; }
  Affine operator-() const { return {-c0, -c1}; }
  Affine operator*(double s) const { return {c0 * s, c1 * s}; }
};

bool in_xy_plane(const Vec3& a) { return std::abs(a.z()) < 1e-9 * a.norm(); }

double azimuth(const Vec3& a) { return std::atan2(a.y(), a.x()); }

void require(bool ok, const char* what) {
  if (!ok) throw physics_error(std::string("phase predictor: ") + what);
}

struct CanonicalLayout {
  const Element* rotator_in;
  const Element* rotator_out;
  std::vector<const Element*> middle;  // flippers between the rotators
};

// The closed form covers the canonical layout: polarizer (+z), pi/2 rotator
// with an xy-plane axis, a run of flippers, a second pi/2 rotator, analyzer
// (+z). Everything in between keeps the spin in the equatorial plane, which is
// what makes the phase trace exact.
CanonicalLayout canonical_layout(const Beamline& bl) {
  bl.validate();
  const auto& els = bl.elements;
  require(els.size() >= 5, "layout needs polarizer, two pi/2 rotators, at "
                           "least one flipper, and an analyzer");
  require((els.front().direction.normalized() - Vec3{0, 0, 1}).norm() < 1e-9,
          "polarizer must point along +z");
  require((els.back().direction.normalized() - Vec3{0, 0, 1}).norm() < 1e-9,
          "analyzer must point along +z");
  const Element& rin = els[1];
  const Element& rout = els[els.size() - 2];
  for (const Element* r : {&rin, &rout}) {
    require(r->type == ElementType::PiHalfRotator,
            "second and second-to-last elements must be pi/2 rotators");
    require(r->enabled, "pi/2 rotators must be enabled");
    require(in_xy_plane(r->axis), "rotator axes must lie in the xy plane");
    require(std::abs(r->angle - kPi / 2) < 1e-9, "rotator angle must be pi/2");
  }
  CanonicalLayout lay{&rin, &rout, {}};
  for (std::size_t i = 2; i + 2 < els.size(); ++i) {
    const Element& e = els[i];
    require(e.type == ElementType::DCFlipper || e.type == ElementType::RFFlipper,
            "between the rotators only DC and RF flippers are allowed");
    if (e.type == ElementType::DCFlipper && e.enabled) {
      require(in_xy_plane(e.axis), "DC flipper axis must lie in the xy plane");
      require(std::abs(e.angle - kPi) < 1e-9, "DC flipper angle must be pi");
    }
    lay.middle.push_back(&e);
  }
  return lay;
}

// Trace the equatorial relative phase chi = arg(c+/c-) through the layout.
// Rules (exact for resonant full flips):
//   drift over T in field B:          chi += gamma*B*T
//   DC pi flip, axis azimuth beta:    chi -> -2*beta - chi
//   RF full flip, coil midpoint t_m:  chi -> 2*(w*t_m + phi) - chi
// The final projection is (1 + cos(chi + beta_out + pi/2)) / 2.
PhasePrediction trace_phase(const Beamline& bl, const CanonicalLayout& lay,
                            const std::string& group) {
  const double v = bl.beam.velocity;
  const double wl = bl.constants.gamma_n * bl.guide_field;

  auto entry_time = [&](const Element& e) -> Affine {
    const bool moves = e.translator_group && *e.translator_group == group;
    return {(e.position + bl.offset_of(e)) / v, moves ? 1.0 / v : 0.0};
  };

  Affine chi{kPi / 2 - azimuth(lay.rotator_in->axis), 0.0};
  Affine t = entry_time(*lay.rotator_in);
  for (const Element* e : lay.middle) {
    const Affine t_in = entry_time(*e);
    chi = chi + (t_in - t) * wl;  // guide-field drift up to the element
    if (e->type == ElementType::DCFlipper) {
      if (e->enabled) chi = Affine{-2 * azimuth(e->axis), 0.0} - chi;
      t = t_in;
    } else {
      const double tau = e->coil_length / v;
      if (e->enabled) {
        // Resonant-flip reflection about the drive phase at the coil midpoint.
        const Affine t_mid = t_in + Affine{tau / 2, 0.0};
        chi = (t_mid * e->frequency + Affine{e->rf_phase, 0.0}) * 2.0 - chi;
      } else {
        // Idle coil: plain precession in its static field.
        chi = chi + Affine{bl.constants.gamma_n * bl.rf_local_field(*e) * tau, 0.0};
      }
      t = t_in + Affine{tau, 0.0};
    }
  }
  chi = chi + (entry_time(*lay.rotator_out) - t) * wl;

  Affine alpha = chi + Affine{azimuth(lay.rotator_out->axis) + kPi / 2, 0.0};
  if (alpha.c1 < 0) alpha = -alpha;  // canonical positive fringe frequency
  return {std::remainder(alpha.c0, 2 * kPi) <= -kPi
              ? kPi
              : std::remainder(alpha.c0, 2 * kPi),
          alpha.c1};
}

}  // namespace

PhasePrediction predict_phase_larmor(const Beamline& beamline,
                                     const std::string& translator_group) {
  const CanonicalLayout lay = canonical_layout(beamline);
  bool translated_dc = false;
  for (const Element* e : lay.middle) {
    if (e->type == ElementType::RFFlipper) {
      require(!e->enabled,
              "Larmor prediction applies only with all RF flippers idle");
    } else if (e->enabled && e->translator_group &&
               *e->translator_group == translator_group) {
      translated_dc = true;
    }
  }
  if (!translated_dc) {
    throw geometry_error(
        "phase predictor: the translator group must move an enabled DC "
        "flipper, otherwise the Larmor fringe does not sweep");
  }
  return trace_phase(beamline, lay, translator_group);
}

PhasePrediction predict_phase_zerofield(const Beamline& beamline,
                                        const std::string& translator_group) {
  const CanonicalLayout lay = canonical_layout(beamline);
  std::vector<const Element*> rf;
  const Element* dc = nullptr;
  for (const Element* e : lay.middle) {
    if (e->type == ElementType::RFFlipper) {
      require(e->enabled,
              "zero-field prediction applies with both RF flippers driven");
      rf.push_back(e);
    } else if (e->enabled) {
      require(dc == nullptr, "zero-field layout uses a single DC flipper");
      dc = e;
    }
  }
  require(rf.size() == 2, "zero-field layout uses exactly two RF flippers");
  require(dc != nullptr, "zero-field layout needs the DC flipper active");
  auto in_group = [&](const Element* e) {
    return e->translator_group && *e->translator_group == translator_group;
  };
  // The fringe sweeps with the drive clock only if the second coil and the
  // DC flipper ride the translator together while the first coil stays put.
  if (in_group(rf.front()) || !in_group(rf.back()) || !in_group(dc)) {
    throw geometry_error(
        "phase predictor: zero-field translation must move the second RF "
        "coil and the DC flipper together, leaving the first coil fixed");
  }
  return trace_phase(beamline, lay, translator_group);
}

PhasePrediction phase_prediction(const Beamline& beamline,
                                 Configuration configuration,
                                 const std::string& translator_group) {
  return configuration == Configuration::LarmorOnly
             ? predict_phase_larmor(beamline, translator_group)
             : predict_phase_zerofield(beamline, translator_group);
}

}  // namespace polsim
