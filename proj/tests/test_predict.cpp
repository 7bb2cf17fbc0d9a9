#include <doctest.h>

#include <cmath>
#include <numbers>

#include "polsim/elements.hpp"
#include "polsim/errors.hpp"
#include "polsim/predict.hpp"

using namespace polsim;
using doctest::Approx;

namespace {

Beamline larmor_beamline(double guide) {
  Beamline bl = default_beamline(guide);
  apply_configuration(bl, Configuration::LarmorOnly);
  return bl;
}

Beamline zerofield_beamline(double drive_hz, double guide = 10.59e-4) {
  Beamline bl = default_beamline(guide);
  apply_configuration(bl, Configuration::ZeroField);
  for (Element& e : bl.elements) {
    if (e.type == ElementType::RFFlipper) {
      e.frequency = 2 * std::numbers::pi * drive_hz;
    }
  }
  return bl;
}

}  // namespace

TEST_CASE("larmor fringe frequency is 2*gamma*B0/v") {
  for (const double guide : {10.90e-4, 10.79e-4, 10.58e-4}) {
    const Beamline bl = larmor_beamline(guide);
    const PhasePrediction p = predict_phase_larmor(bl);
    const double expected =
        2 * bl.constants.gamma_n * guide / bl.beam.velocity;
    CHECK(p.slope_per_offset == Approx(expected).epsilon(1e-12));
  }
  // Headline period at 10.79 G: 31.62 mm of translation.
  const PhasePrediction p = predict_phase_larmor(larmor_beamline(10.79e-4));
  CHECK(2 * std::numbers::pi / p.slope_per_offset ==
        Approx(0.031619).epsilon(1e-4));
}

TEST_CASE("zero-field fringe frequency is 2*omega/v") {
  // Each resonant flip reflects the equatorial phase about the drive clock,
  // so moving the imprint by dt advances the relative phase by 2*omega*dt:
  // the fringe wavenumber is 2*omega/v, twice the drive's own phase gradient
  // omega/v. At a 30.0 kHz drive that means a 33.17 mm period (a one-quantum
  // slope omega/v would give 66.33 mm, which the traced propagators exclude).
  for (const double drive_hz : {30.0e3, 30.9e3}) {
    const Beamline bl = zerofield_beamline(drive_hz);
    const PhasePrediction p = predict_phase_zerofield(bl);
    const double expected =
        2 * (2 * std::numbers::pi * drive_hz) / bl.beam.velocity;
    CHECK(p.slope_per_offset == Approx(expected).epsilon(1e-12));
  }
  const PhasePrediction p = predict_phase_zerofield(zerofield_beamline(30.0e3));
  CHECK(2 * std::numbers::pi / p.slope_per_offset ==
        Approx(1990.0 / 60000.0).epsilon(1e-12));
}

TEST_CASE("zero-field fringe frequency ignores the guide field") {
  const PhasePrediction ref = predict_phase_zerofield(zerofield_beamline(30.0e3));
  for (const double guide : {10.90e-4, 10.79e-4, 10.69e-4, 10.58e-4}) {
    const PhasePrediction p =
        predict_phase_zerofield(zerofield_beamline(30.0e3, guide));
    CHECK(p.slope_per_offset == Approx(ref.slope_per_offset).epsilon(1e-14));
    // In the balanced default geometry the drift legs cancel around the
    // flips, so even the fringe position is guide-independent.
    CHECK(std::abs(p.alpha0 - ref.alpha0) < 1e-12);
  }
}

TEST_CASE("zero-field slope is set by the clock, not the coil positions") {
  Beamline bl = zerofield_beamline(30.0e3);
  const double ref = predict_phase_zerofield(bl).slope_per_offset;
  bl.elements[3].position = 0.45;  // second coil
  bl.elements[4].position = 0.75;  // flipper
  const PhasePrediction moved = predict_phase_zerofield(bl);
  CHECK(moved.slope_per_offset == Approx(ref).epsilon(1e-14));
  CHECK(moved.alpha0 != Approx(predict_phase_zerofield(zerofield_beamline(30.0e3)).alpha0));
}

TEST_CASE("predictions are canonicalized") {
  for (const double drive_hz : {29.0e3, 30.0e3, 31.8e3}) {
    const PhasePrediction p = predict_phase_zerofield(zerofield_beamline(drive_hz));
    CHECK(p.slope_per_offset > 0);
    CHECK(p.alpha0 > -std::numbers::pi);
    CHECK(p.alpha0 <= std::numbers::pi);
    const double proj = predicted_projection(p, 0.0);
    CHECK(proj >= 0.0);
    CHECK(proj <= 1.0);
  }
}

TEST_CASE("each prediction demands its own configuration") {
  Beamline zf = zerofield_beamline(30.0e3);
  CHECK_THROWS_AS(predict_phase_larmor(zf), physics_error);
  Beamline lm = larmor_beamline(10.79e-4);
  CHECK_THROWS_AS(predict_phase_zerofield(lm), physics_error);
  // Dispatch helper picks the matching branch.
  CHECK_NOTHROW(phase_prediction(zf, Configuration::ZeroField));
  CHECK_NOTHROW(phase_prediction(lm, Configuration::LarmorOnly));
}

TEST_CASE("the translator group must move the right elements") {
  // Larmor: moving nothing that flips leaves the fringe static.
  Beamline lm = larmor_beamline(10.79e-4);
  lm.elements[4].enabled = false;
  CHECK_THROWS_AS(predict_phase_larmor(lm), geometry_error);

  // Zero-field: the first coil must stay fixed.
  Beamline zf = zerofield_beamline(30.0e3);
  zf.elements[2].translator_group = "g1";
  CHECK_THROWS_AS(predict_phase_zerofield(zf), geometry_error);

  // Zero-field: the flipper must ride along.
  zf = zerofield_beamline(30.0e3);
  zf.elements[4].translator_group.reset();
  CHECK_THROWS_AS(predict_phase_zerofield(zf), geometry_error);
}

TEST_CASE("layout preconditions are enforced") {
  Beamline bl = larmor_beamline(10.79e-4);
  bl.elements[0].direction = Vec3{1, 0, 0};
  CHECK_THROWS_AS(predict_phase_larmor(bl), physics_error);

  bl = larmor_beamline(10.79e-4);
  bl.elements[1].angle = std::numbers::pi / 3;
  CHECK_THROWS_AS(predict_phase_larmor(bl), physics_error);

  bl = larmor_beamline(10.79e-4);
  bl.elements[1].axis = Vec3{0, 0, 1};  // rotator axis out of the xy plane
  CHECK_THROWS_AS(predict_phase_larmor(bl), physics_error);

  bl = larmor_beamline(10.79e-4);
  bl.elements[4].angle = std::numbers::pi / 2;  // flipper must be a pi flip
  CHECK_THROWS_AS(predict_phase_larmor(bl), physics_error);

  bl = larmor_beamline(10.79e-4);
  bl.elements.insert(bl.elements.begin() + 3, make_pi_half_rotator(0.4));
  CHECK_THROWS_AS(predict_phase_larmor(bl), physics_error);
}
