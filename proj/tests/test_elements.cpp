#include <doctest.h>

#include <cmath>
#include <numbers>

#include "polsim/elements.hpp"
#include "polsim/errors.hpp"

using namespace polsim;
using doctest::Approx;

TEST_CASE("default beamline has the canonical layout") {
  const Beamline bl = default_beamline();
  REQUIRE(bl.elements.size() == 7);
  CHECK(bl.elements[0].type == ElementType::Polarizer);
  CHECK(bl.elements[1].type == ElementType::PiHalfRotator);
  CHECK(bl.elements[2].type == ElementType::RFFlipper);
  CHECK(bl.elements[3].type == ElementType::RFFlipper);
  CHECK(bl.elements[4].type == ElementType::DCFlipper);
  CHECK(bl.elements[5].type == ElementType::PiHalfRotator);
  CHECK(bl.elements[6].type == ElementType::Analyzer);
  // The movable pair: second RF coil and the DC flipper share one carriage.
  CHECK(bl.elements[3].translator_group == std::string("g1"));
  CHECK(bl.elements[4].translator_group == std::string("g1"));
  CHECK_FALSE(bl.elements[2].translator_group.has_value());
  CHECK(bl.translator_offsets.at("g1") == 0.0);
  // Both drives resonant with the guide field.
  const double res = bl.constants.gamma_n * bl.guide_field;
  CHECK(bl.elements[2].frequency == Approx(res).epsilon(1e-15));
  CHECK(bl.elements[3].frequency == Approx(res).epsilon(1e-15));
  CHECK_NOTHROW(bl.validate());
}

TEST_CASE("flight schedule converts positions to arrival times") {
  Beamline bl = default_beamline();
  auto sched = element_schedule(bl);
  REQUIRE(sched.size() == 7);
  // 0.5 m at 1990 m/s.
  CHECK(sched[3].entry_time == Approx(0.5 / 1990.0).epsilon(1e-15));
  CHECK(sched[3].entry_time == Approx(251.26e-6).epsilon(1e-4));
  // An RF coil occupies coil_length / v of flight time; thin elements none.
  CHECK(sched[3].exit_time - sched[3].entry_time ==
        Approx(0.02 / 1990.0).epsilon(1e-15));
  CHECK(sched[4].exit_time == sched[4].entry_time);

  // Moving the carriage by +10 mm delays the group's arrival by dx / v.
  bl.translator_offsets["g1"] = 0.010;
  auto moved = element_schedule(bl);
  CHECK(moved[3].entry_time - sched[3].entry_time ==
        Approx(0.010 / 1990.0).epsilon(1e-12));
  CHECK(moved[3].entry_time - sched[3].entry_time ==
        Approx(5.0251e-6).epsilon(1e-4));
  CHECK(moved[4].entry_time - sched[4].entry_time ==
        Approx(0.010 / 1990.0).epsilon(1e-12));
  // Ungrouped elements stay put.
  CHECK(moved[2].entry_time == sched[2].entry_time);

  // t_origin shifts every time uniformly.
  auto shifted = element_schedule(bl, 1.25e-3);
  for (std::size_t i = 0; i < shifted.size(); ++i) {
    CHECK(shifted[i].entry_time - moved[i].entry_time ==
          Approx(1.25e-3).epsilon(1e-12));
  }
}

TEST_CASE("schedule rejects translations that overlap or reorder elements") {
  Beamline bl = default_beamline();
  bl.translator_offsets["g1"] = -0.25;  // second coil would pass the first
  CHECK_THROWS_AS(element_schedule(bl), geometry_error);
  bl.translator_offsets["g1"] = -0.19;  // order kept, but coils touch in time
  CHECK_THROWS_AS(element_schedule(bl), geometry_error);
  bl.translator_offsets["g1"] = -0.17;
  CHECK_NOTHROW(element_schedule(bl));
}

TEST_CASE("validate enforces the polarizer/analyzer frame") {
  Beamline bl = default_beamline();
  bl.elements.erase(bl.elements.begin());
  CHECK_THROWS_AS(bl.validate(), geometry_error);

  bl = default_beamline();
  bl.elements.pop_back();
  CHECK_THROWS_AS(bl.validate(), geometry_error);

  bl = default_beamline();
  bl.elements.insert(bl.elements.begin() + 3, make_polarizer(0.4));
  CHECK_THROWS_AS(bl.validate(), geometry_error);

  bl = default_beamline();
  bl.elements[2].position = 0.95;  // decreasing positions
  CHECK_THROWS_AS(bl.validate(), geometry_error);
}

TEST_CASE("validate enforces beam and coil parameter ranges") {
  Beamline bl = default_beamline();
  bl.beam.velocity = -10;
  CHECK_THROWS_AS(bl.validate(), config_error);

  bl = default_beamline();
  bl.beam.incident_polarization = 1.2;
  CHECK_THROWS_AS(bl.validate(), config_error);

  bl = default_beamline();
  bl.elements[2].coil_length = 0.0;
  CHECK_THROWS_AS(bl.validate(), config_error);

  bl = default_beamline();
  bl.elements[2].b1 = 0.0;
  CHECK_THROWS_AS(bl.validate(), config_error);
  bl.elements[2].enabled = false;  // harmless once the coil is idle
  CHECK_NOTHROW(bl.validate());

  bl = default_beamline();
  bl.elements[2].frequency = 0.0;
  CHECK_THROWS_AS(bl.validate(), config_error);
}

TEST_CASE("wavelength and velocity must agree within one percent") {
  Beamline bl = default_beamline();
  bl.beam.wavelength = 1.99e-10;  // implies ~1988 m/s, consistent with 1990
  CHECK_NOTHROW(bl.validate());
  bl.beam.velocity = 2200.0;
  CHECK_THROWS_AS(bl.validate(), config_error);
  CHECK(velocity_from_wavelength(1.99e-10) == Approx(1988.0).epsilon(2e-3));
}

TEST_CASE("rf_b1 defaults to the flip-tuned amplitude") {
  const Beamline bl = default_beamline();
  const Element& rf = bl.elements[2];
  const double tau = rf.coil_length / bl.beam.velocity;
  // Auto value satisfies the flip condition (gamma*b1/2) * tau = pi.
  CHECK(bl.constants.gamma_n * bl.rf_b1(rf) / 2 * tau ==
        Approx(std::numbers::pi).epsilon(1e-12));
  Element custom = rf;
  custom.b1 = 1e-4;
  CHECK(bl.rf_b1(custom) == 1e-4);
}

TEST_CASE("rf_local_field falls back to the guide field") {
  Beamline bl = default_beamline(10.59e-4);
  CHECK(bl.rf_local_field(bl.elements[2]) == 10.59e-4);
  bl.elements[2].local_static_field = 11.1e-4;
  CHECK(bl.rf_local_field(bl.elements[2]) == 11.1e-4);
}

TEST_CASE("apply_configuration gates the RF coils only") {
  Beamline bl = default_beamline();
  apply_configuration(bl, Configuration::LarmorOnly);
  CHECK_FALSE(bl.elements[2].enabled);
  CHECK_FALSE(bl.elements[3].enabled);
  CHECK(bl.elements[4].enabled);
  CHECK(bl.elements[1].enabled);
  apply_configuration(bl, Configuration::ZeroField);
  CHECK(bl.elements[2].enabled);
  CHECK(bl.elements[3].enabled);
  CHECK(bl.elements[4].enabled);
}
