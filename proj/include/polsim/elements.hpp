#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "polsim/constants.hpp"
#include "polsim/spinor.hpp"

namespace polsim {

struct BeamParameters {
  std::optional<double> wavelength;  // m; consistency with velocity checked to 1%
  double velocity = kDefaultVelocity;            // m/s
  double incident_polarization = kDefaultPolarization;  // (0, 1]
};

enum class ElementType { Polarizer, PiHalfRotator, DCFlipper, RFFlipper, Analyzer };

// Flat element record; the fields used depend on `type`.
struct Element {
  ElementType type = ElementType::Polarizer;
  double position = 0.0;  // m along the beam; coil entry for an RF flipper
  std::optional<std::string> translator_group;

  Vec3 direction{0, 0, 1};  // Polarizer / Analyzer

  Vec3 axis{1, 0, 0};   // PiHalfRotator / DCFlipper rotation axis
  double angle = 0.0;   // rad
  bool enabled = true;  // DCFlipper / RFFlipper

  // RFFlipper
  double frequency = 0.0;  // drive omega, rad/s
  double rf_phase = 0.0;   // phi, rad
  std::optional<double> b1;  // T; empty = auto-tune to the flip condition w1*tau = pi
  double coil_length = 0.02;  // m
  std::optional<double> local_static_field;  // T; empty = guide field
};

Element make_polarizer(double position, const Vec3& direction = {0, 0, 1});
Element make_analyzer(double position, const Vec3& direction = {0, 0, 1});
Element make_pi_half_rotator(double position, const Vec3& axis = {0, 1, 0},
                             double angle = 1.5707963267948966);
Element make_dc_flipper(double position, const Vec3& axis = {1, 0, 0},
                        double angle = 3.141592653589793, bool enabled = true,
                        std::optional<std::string> group = std::nullopt);
Element make_rf_flipper(double position, double frequency_rad, double rf_phase = 0.0,
                        std::optional<double> b1 = std::nullopt,
                        double coil_length = 0.02,
                        std::optional<double> local_static_field = std::nullopt,
                        bool enabled = true,
                        std::optional<std::string> group = std::nullopt);

struct Beamline {
  BeamParameters beam;
  PhysicalConstants constants;
  double guide_field = kDefaultGuideField;  // B0, tesla, along +z
  std::vector<Element> elements;            // position-ordered; polarizer..analyzer
  std::map<std::string, double> translator_offsets;  // group id -> displacement, m

  // Static field inside an RF coil: explicit local_static_field or B0.
  double rf_local_field(const Element& rf) const;
  // Drive amplitude: explicit b1 or the flip-mode value 2*pi/(gamma*tau) giving
  // w1*tau = pi at the nominal velocity (w1 = gamma*b1/2).
  double rf_b1(const Element& rf) const;
  double offset_of(const Element& e) const;

  // Structural checks: ordering, polarizer/analyzer at the ends, positive
  // lengths, wavelength/velocity consistency. Throws geometry_error/config_error.
  void validate() const;
};

struct ScheduleEntry {
  const Element* element;
  double entry_time;  // s
  double exit_time;   // s; equals entry_time except for RF coils
};

// Flight schedule: entry = t_origin + (position + group offset)/velocity.
// Throws geometry_error when translated elements overlap or reorder.
std::vector<ScheduleEntry> element_schedule(const Beamline& beamline,
                                            double t_origin = 0.0);

// Measurement configurations: LarmorOnly runs with the RF coils idle and the
// DC flipper active (guide-field precession sets the fringe period); ZeroField
// runs with the RF coils driven as well, so the fringe period is set by the
// drive clock instead of the guide field.
enum class Configuration { LarmorOnly, ZeroField };

// Toggle element enables in place: RF flippers on only in ZeroField; DC
// flippers and rotators on in both.
void apply_configuration(Beamline& beamline, Configuration configuration);

// The canonical beamline: polarizer 0, pi/2 rotator (y) 0.1, RF coil 0.3,
// RF coil 0.5, DC flipper (x, pi) 0.7 with the second coil in translator group
// "g1", pi/2 rotator (y) 0.9, analyzer 1.0; both flipper drives resonant with
// the coil's static field. Both RF flippers are phase-locked to one clock
// (rf_phase 0). The order — both RF coils, then the DC flipper — makes the
// detected intensity independent of the neutron's arrival time, which a
// continuous-beam measurement requires.
Beamline default_beamline(double guide_field_tesla = kDefaultGuideField);

}  // namespace polsim
