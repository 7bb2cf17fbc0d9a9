#include "polsim/elements.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

#include "polsim/errors.hpp"

namespace polsim {

Element make_polarizer(double position, const Vec3& direction) {
  Element e;
  e.type = ElementType::Polarizer;
  e.position = position;
  e.direction = direction;
  return e;
}

Element make_analyzer(double position, const Vec3& direction) {
  Element e = make_polarizer(position, direction);
  e.type = ElementType::Analyzer;
  return e;
}

Element make_pi_half_rotator(double position, const Vec3& axis, double angle) {
  Element e;
  e.type = ElementType::PiHalfRotator;
  e.position = position;
  e.axis = axis;
  e.angle = angle;
  return e;
}

Element make_dc_flipper(double position, const Vec3& axis, double angle, bool enabled,
                        std::optional<std::string> group) {
  Element e;
  e.type = ElementType::DCFlipper;
  e.position = position;
  e.axis = axis;
  e.angle = angle;
  e.enabled = enabled;
  e.translator_group = std::move(group);
  return e;
}

Element make_rf_flipper(double position, double frequency_rad, double rf_phase,
                        std::optional<double> b1, double coil_length,
                        std::optional<double> local_static_field, bool enabled,
                        std::optional<std::string> group) {
  Element e;
  e.type = ElementType::RFFlipper;
  e.position = position;
  e.frequency = frequency_rad;
  e.rf_phase = rf_phase;
  e.b1 = b1;
  e.coil_length = coil_length;
  e.local_static_field = local_static_field;
  e.enabled = enabled;
  e.translator_group = std::move(group);
  return e;
}

double Beamline::rf_local_field(const Element& rf) const {
  return rf.local_static_field.value_or(guide_field);
}

double Beamline::rf_b1(const Element& rf) const {
  if (rf.b1) return *rf.b1;
  const double tau = rf.coil_length / beam.velocity;
  return 2 * std::numbers::pi / (constants.gamma_n * tau);
}

double Beamline::offset_of(const Element& e) const {
  if (!e.translator_group) return 0.0;
  auto it = translator_offsets.find(*e.translator_group);
  return it == translator_offsets.end() ? 0.0 : it->second;
}

void Beamline::validate() const {
  if (beam.velocity <= 0) throw config_error("beam velocity must be positive");
  if (beam.wavelength) {
    if (*beam.wavelength <= 0) throw config_error("beam wavelength must be positive");
    const double v = velocity_from_wavelength(*beam.wavelength);
    if (std::abs(v - beam.velocity) > 0.01 * v) {
      std::ostringstream os;
      os << "beam wavelength " << *beam.wavelength << " m implies velocity " << v
         << " m/s, inconsistent with configured velocity " << beam.velocity
         << " m/s beyond 1%";
      throw config_error(os.str());
    }
  }
  if (beam.incident_polarization <= 0 || beam.incident_polarization > 1) {
    throw config_error("incident polarization must lie in (0, 1]");
  }
  if (guide_field < 0) throw config_error("guide field is a magnitude along +z");
  if (elements.size() < 2 || elements.front().type != ElementType::Polarizer ||
      elements.back().type != ElementType::Analyzer) {
    throw geometry_error("beamline must start with a polarizer and end with an analyzer");
  }
  for (std::size_t i = 0; i < elements.size(); ++i) {
    const Element& e = elements[i];
    if ((e.type == ElementType::Polarizer) != (i == 0)) {
      throw geometry_error("exactly one polarizer allowed, and only first");
    }
    if ((e.type == ElementType::Analyzer) != (i + 1 == elements.size())) {
      throw geometry_error("exactly one analyzer allowed, and only last");
    }
    if (e.type == ElementType::RFFlipper) {
      if (e.coil_length <= 0) throw config_error("coil_length must be positive");
      if (e.enabled && e.frequency <= 0) {
        throw config_error("enabled RF flipper requires a positive drive frequency");
      }
      if (e.b1 && *e.b1 == 0.0 && e.enabled) {
        throw config_error("enabled RF flipper with b1 = 0 cannot flip");
      }
      if (e.local_static_field && *e.local_static_field < 0) {
        throw config_error("local_static_field is a magnitude");
      }
    }
  }
  for (std::size_t i = 1; i < elements.size(); ++i) {
    if (elements[i].position < elements[i - 1].position) {
      throw geometry_error("element positions must be non-decreasing along the beam");
    }
  }
}

std::vector<ScheduleEntry> element_schedule(const Beamline& beamline, double t_origin) {
  beamline.validate();
  const double v = beamline.beam.velocity;
  std::vector<ScheduleEntry> schedule;
  schedule.reserve(beamline.elements.size());
  for (const Element& e : beamline.elements) {
    const double entry = t_origin + (e.position + beamline.offset_of(e)) / v;
    const double exit =
        e.type == ElementType::RFFlipper ? entry + e.coil_length / v : entry;
    schedule.push_back({&e, entry, exit});
  }
  for (std::size_t i = 1; i < schedule.size(); ++i) {
    if (schedule[i].entry_time < schedule[i - 1].exit_time - 1e-15) {
      std::ostringstream os;
      os << "translated elements overlap or reorder: element " << i - 1
         << " exits at " << schedule[i - 1].exit_time << " s but element " << i
         << " enters at " << schedule[i].entry_time << " s";
      throw geometry_error(os.str());
    }
  }
  return schedule;
}

void apply_configuration(Beamline& beamline, Configuration configuration) {
  const bool rf_on = configuration == Configuration::ZeroField;
  for (Element& e : beamline.elements) {
    switch (e.type) {
      case ElementType::RFFlipper:
        e.enabled = rf_on;
        break;
      case ElementType::DCFlipper:
      case ElementType::PiHalfRotator:
        e.enabled = true;
        break;
      default:
        break;
    }
  }
}

Beamline default_beamline(double guide_field_tesla) {
  Beamline bl;
  bl.guide_field = guide_field_tesla;
  const double resonance = bl.constants.gamma_n * guide_field_tesla;  // rad/s
  bl.elements = {
      make_polarizer(0.0),
      make_pi_half_rotator(0.1),
      make_rf_flipper(0.3, resonance),
      make_rf_flipper(0.5, resonance, 0.0, std::nullopt, 0.02, std::nullopt, true,
                      std::string("g1")),
      make_dc_flipper(0.7, {1, 0, 0}, std::numbers::pi, true, std::string("g1")),
      make_pi_half_rotator(0.9),
      make_analyzer(1.0),
  };
  bl.translator_offsets["g1"] = 0.0;
  return bl;
}

}  // namespace polsim
