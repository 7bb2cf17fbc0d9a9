#include "polsim/config.hpp"

#include <fstream>
#include <json.hpp>
#include <numbers>
#include <sstream>

#include "polsim/errors.hpp"

namespace polsim {
namespace {

using nlohmann::json;

void check_keys(const json& obj, std::initializer_list<const char*> allowed,
                const std::string& where) {
  for (const auto& [key, value] : obj.items()) {
    bool ok = false;
    for (const char* a : allowed) {
      if (key == a) {
        ok = true;
        break;
      }
    }
    if (!ok) {
      throw config_error("unknown key \"" + key + "\" in " + where);
    }
  }
}

double get_number(const json& obj, const char* key, const std::string& where) {
  const json& v = obj.at(key);
  if (!v.is_number()) {
    throw config_error("key \"" + std::string(key) + "\" in " + where +
                       " must be a number");
  }
  return v.get<double>();
}

Vec3 get_vec3(const json& obj, const char* key, const std::string& where) {
  const json& v = obj.at(key);
  if (!v.is_array() || v.size() != 3 || !v[0].is_number() ||
      !v[1].is_number() || !v[2].is_number()) {
    throw config_error("key \"" + std::string(key) + "\" in " + where +
                       " must be a 3-element numeric array [x, y, z]");
  }
  return Vec3{v[0].get<double>(), v[1].get<double>(), v[2].get<double>()};
}

json vec3_json(const Vec3& v) { return json::array({v.x(), v.y(), v.z()}); }

Element parse_element(const json& e, double guide_field, double gamma,
                      std::size_t index) {
  const std::string where = "elements[" + std::to_string(index) + "]";
  check_keys(e,
             {"type", "position_m", "direction", "axis", "angle_rad", "enabled",
              "frequency_hz", "rf_phase_rad", "b1_tesla", "coil_length_m",
              "local_static_field_tesla", "translator_group"},
             where);
  if (!e.contains("type")) {
    throw config_error(where + " needs a \"type\"");
  }
  const std::string type = e.at("type").get<std::string>();
  if (!e.contains("position_m")) {
    throw config_error(where + " needs a \"position_m\"");
  }
  const double pos = get_number(e, "position_m", where);

  auto group = [&]() -> std::optional<std::string> {
    if (!e.contains("translator_group")) return std::nullopt;
    return e.at("translator_group").get<std::string>();
  };

  Element out;
  if (type == "polarizer" || type == "analyzer") {
    out = type == "polarizer" ? make_polarizer(pos) : make_analyzer(pos);
    if (e.contains("direction")) out.direction = get_vec3(e, "direction", where);
    for (const char* bad : {"axis", "angle_rad", "enabled", "frequency_hz",
                            "rf_phase_rad", "b1_tesla", "coil_length_m",
                            "local_static_field_tesla", "translator_group"}) {
      if (e.contains(bad)) {
        throw config_error("key \"" + std::string(bad) + "\" does not apply to a " +
                           type + " (" + where + ")");
      }
    }
  } else if (type == "pi_half_rotator" || type == "dc_flipper") {
    out = type == "pi_half_rotator" ? make_pi_half_rotator(pos)
                                    : make_dc_flipper(pos);
    if (e.contains("axis")) out.axis = get_vec3(e, "axis", where);
    if (e.contains("angle_rad")) out.angle = get_number(e, "angle_rad", where);
    if (e.contains("enabled")) out.enabled = e.at("enabled").get<bool>();
    out.translator_group = group();
    for (const char* bad : {"direction", "frequency_hz", "rf_phase_rad",
                            "b1_tesla", "coil_length_m",
                            "local_static_field_tesla"}) {
      if (e.contains(bad)) {
        throw config_error("key \"" + std::string(bad) + "\" does not apply to a " +
                           type + " (" + where + ")");
      }
    }
  } else if (type == "rf_flipper") {
    out = make_rf_flipper(pos, 0.0);
    if (e.contains("local_static_field_tesla")) {
      out.local_static_field = get_number(e, "local_static_field_tesla", where);
    }
    // Default drive: resonant with the coil's static field.
    out.frequency =
        e.contains("frequency_hz")
            ? 2 * std::numbers::pi * get_number(e, "frequency_hz", where)
            : gamma * out.local_static_field.value_or(guide_field);
    if (e.contains("rf_phase_rad")) {
      out.rf_phase = get_number(e, "rf_phase_rad", where);
    }
    if (e.contains("b1_tesla")) out.b1 = get_number(e, "b1_tesla", where);
    if (e.contains("coil_length_m")) {
      out.coil_length = get_number(e, "coil_length_m", where);
    }
    if (e.contains("enabled")) out.enabled = e.at("enabled").get<bool>();
    out.translator_group = group();
    for (const char* bad : {"direction", "axis", "angle_rad"}) {
      if (e.contains(bad)) {
        throw config_error("key \"" + std::string(bad) +
                           "\" does not apply to an rf_flipper (" + where + ")");
      }
    }
  } else {
    throw config_error("unknown element type \"" + type + "\" in " + where +
                       " (expected polarizer, pi_half_rotator, dc_flipper, "
                       "rf_flipper, or analyzer)");
  }
  return out;
}

json element_json(const Element& e) {
  json out;
  switch (e.type) {
    case ElementType::Polarizer:
      out["type"] = "polarizer";
      out["direction"] = vec3_json(e.direction);
      break;
    case ElementType::Analyzer:
      out["type"] = "analyzer";
      out["direction"] = vec3_json(e.direction);
      break;
    case ElementType::PiHalfRotator:
      out["type"] = "pi_half_rotator";
      out["axis"] = vec3_json(e.axis);
      out["angle_rad"] = e.angle;
      out["enabled"] = e.enabled;
      break;
    case ElementType::DCFlipper:
      out["type"] = "dc_flipper";
      out["axis"] = vec3_json(e.axis);
      out["angle_rad"] = e.angle;
      out["enabled"] = e.enabled;
      break;
    case ElementType::RFFlipper:
      out["type"] = "rf_flipper";
      out["frequency_hz"] = e.frequency / (2 * std::numbers::pi);
      out["rf_phase_rad"] = e.rf_phase;
      out["coil_length_m"] = e.coil_length;
      out["enabled"] = e.enabled;
      if (e.b1) out["b1_tesla"] = *e.b1;
      if (e.local_static_field) {
        out["local_static_field_tesla"] = *e.local_static_field;
      }
      break;
  }
  out["position_m"] = e.position;
  if (e.translator_group) out["translator_group"] = *e.translator_group;
  return out;
}

Configuration parse_configuration(const std::string& s) {
  if (s == "larmor") return Configuration::LarmorOnly;
  if (s == "zero_field") return Configuration::ZeroField;
  throw config_error("unknown scan.configuration \"" + s +
                     "\" (expected \"larmor\" or \"zero_field\")");
}

SweptParameter parse_swept(const std::string& s) {
  if (s == "translator_offset") return SweptParameter::TranslatorOffset;
  if (s == "guide_field") return SweptParameter::GuideField;
  if (s == "rf_frequency") return SweptParameter::RfFrequency;
  throw config_error("unknown scan.swept \"" + s +
                     "\" (expected \"translator_offset\", \"guide_field\", or "
                     "\"rf_frequency\")");
}

ScanSpec parse_scan(const json& s, std::uint64_t default_seed) {
  check_keys(s,
             {"configuration", "swept", "start", "stop", "points",
              "counts_per_point", "rng_seed", "velocity_spread",
              "translator_group"},
             "scan");
  ScanSpec spec;
  if (s.contains("configuration")) {
    spec.configuration =
        parse_configuration(s.at("configuration").get<std::string>());
  }
  if (s.contains("swept")) {
    spec.swept = parse_swept(s.at("swept").get<std::string>());
  }
  // The translator sweep has a canonical default range; other sweeps must
  // state theirs.
  if (spec.swept == SweptParameter::TranslatorOffset) {
    spec.start = 0.0;
    spec.stop = 0.08;
  } else if (!s.contains("start") || !s.contains("stop")) {
    throw config_error("scan.start and scan.stop are required when sweeping " +
                       swept_name(spec.swept));
  }
  if (s.contains("start")) spec.start = get_number(s, "start", "scan");
  if (s.contains("stop")) spec.stop = get_number(s, "stop", "scan");
  spec.points = 81;
  if (s.contains("points")) {
    spec.points = s.at("points").get<int>();
  }
  if (s.contains("counts_per_point")) {
    spec.counts_per_point = get_number(s, "counts_per_point", "scan");
  }
  spec.rng_seed = default_seed;
  if (s.contains("rng_seed")) {
    spec.rng_seed = s.at("rng_seed").get<std::uint64_t>();
  }
  if (s.contains("velocity_spread")) {
    spec.velocity_spread = get_number(s, "velocity_spread", "scan");
  }
  if (s.contains("translator_group")) {
    spec.translator_group = s.at("translator_group").get<std::string>();
  }
  return spec;
}

}  // namespace

std::string configuration_name(Configuration c) {
  return c == Configuration::LarmorOnly ? "larmor" : "zero_field";
}

std::string engine_name(Engine e) {
  return e == Engine::Analytic ? "analytic" : "oracle";
}

RunConfig parse_config(const std::string& json_text) {
  json root;
  try {
    root = json::parse(json_text);
  } catch (const json::parse_error& err) {
    throw config_error(std::string("config is not valid JSON: ") + err.what());
  }
  if (!root.is_object()) throw config_error("config root must be an object");
  check_keys(root,
             {"beam", "guide_field_tesla", "elements", "scan", "engine",
              "oracle", "output", "seed"},
             "the top level");

  RunConfig rc;
  if (root.contains("seed")) rc.seed = root.at("seed").get<std::uint64_t>();

  // Beam.
  double wavelength_angstrom = kDefaultWavelength * 1e10;
  bool wavelength_given = false;
  bool velocity_given = false;
  double velocity = kDefaultVelocity;
  double polarization = kDefaultPolarization;
  if (root.contains("beam")) {
    const json& b = root.at("beam");
    check_keys(b, {"wavelength_angstrom", "velocity_mps", "polarization"},
               "beam");
    if (b.contains("wavelength_angstrom")) {
      wavelength_angstrom = get_number(b, "wavelength_angstrom", "beam");
      wavelength_given = true;
    }
    if (b.contains("velocity_mps")) {
      velocity = get_number(b, "velocity_mps", "beam");
      velocity_given = true;
    }
    if (b.contains("polarization")) {
      polarization = get_number(b, "polarization", "beam");
    }
  }
  if (wavelength_given && !velocity_given) {
    velocity = velocity_from_wavelength(wavelength_angstrom * 1e-10);
  }

  const double guide_field =
      root.contains("guide_field_tesla")
          ? get_number(root, "guide_field_tesla", "the top level")
          : kDefaultGuideField;

  if (root.contains("elements")) {
    const json& els = root.at("elements");
    if (!els.is_array()) throw config_error("\"elements\" must be an array");
    rc.beamline.guide_field = guide_field;
    PhysicalConstants constants;
    for (std::size_t i = 0; i < els.size(); ++i) {
      rc.beamline.elements.push_back(
          parse_element(els[i], guide_field, constants.gamma_n, i));
      if (rc.beamline.elements.back().translator_group) {
        rc.beamline.translator_offsets.emplace(
            *rc.beamline.elements.back().translator_group, 0.0);
      }
    }
  } else {
    rc.beamline = default_beamline(guide_field);
  }
  rc.beamline.beam.velocity = velocity;
  rc.beamline.beam.incident_polarization = polarization;
  if (wavelength_given || !velocity_given) {
    rc.beamline.beam.wavelength = wavelength_angstrom * 1e-10;
  }

  if (root.contains("scan")) {
    rc.scan = parse_scan(root.at("scan"), rc.seed);
  }

  if (root.contains("engine")) {
    const std::string e = root.at("engine").get<std::string>();
    if (e == "analytic") {
      rc.engine = Engine::Analytic;
    } else if (e == "oracle") {
      rc.engine = Engine::Oracle;
    } else {
      throw config_error("unknown engine \"" + e +
                         "\" (expected \"analytic\" or \"oracle\")");
    }
  }

  if (root.contains("oracle")) {
    const json& o = root.at("oracle");
    check_keys(o, {"step_scale", "dc_width_m", "method"}, "oracle");
    if (o.contains("step_scale")) {
      rc.oracle.step_scale = get_number(o, "step_scale", "oracle");
      if (rc.oracle.step_scale <= 0) {
        throw config_error("oracle.step_scale must be positive");
      }
    }
    if (o.contains("dc_width_m")) {
      rc.oracle.dc_width = get_number(o, "dc_width_m", "oracle");
    }
    if (o.contains("method")) {
      const std::string m = o.at("method").get<std::string>();
      if (m == "rk4") {
        rc.oracle.method = IntegratorMethod::RungeKutta4;
      } else if (m == "exponential_midpoint") {
        rc.oracle.method = IntegratorMethod::ExponentialMidpoint;
      } else {
        throw config_error("unknown oracle.method \"" + m +
                           "\" (expected \"rk4\" or \"exponential_midpoint\")");
      }
    }
  }

  if (root.contains("output")) {
    const json& o = root.at("output");
    check_keys(o, {"csv_path", "report_path"}, "output");
    if (o.contains("csv_path")) rc.csv_path = o.at("csv_path").get<std::string>();
    if (o.contains("report_path")) {
      rc.report_path = o.at("report_path").get<std::string>();
    }
  }

  rc.beamline.validate();
  if (rc.scan) {
    if (rc.scan->points < 8) throw config_error("scan needs at least 8 points");
    bool group_known =
        rc.beamline.translator_offsets.count(rc.scan->translator_group) > 0;
    if (rc.scan->swept == SweptParameter::TranslatorOffset && !group_known) {
      throw config_error("scan sweeps translator group \"" +
                         rc.scan->translator_group +
                         "\" but no element belongs to it");
    }
  }

  // Normalized echo: every value resolved, defaults included.
  json echo;
  json beam_echo;
  if (rc.beamline.beam.wavelength) {
    beam_echo["wavelength_angstrom"] = *rc.beamline.beam.wavelength * 1e10;
  }
  beam_echo["velocity_mps"] = rc.beamline.beam.velocity;
  beam_echo["polarization"] = rc.beamline.beam.incident_polarization;
  echo["beam"] = beam_echo;
  echo["guide_field_tesla"] = rc.beamline.guide_field;
  echo["elements"] = json::array();
  for (const Element& e : rc.beamline.elements) {
    echo["elements"].push_back(element_json(e));
  }
  if (rc.scan) {
    json s;
    s["configuration"] = configuration_name(rc.scan->configuration);
    s["swept"] = swept_name(rc.scan->swept);
    s["start"] = rc.scan->start;
    s["stop"] = rc.scan->stop;
    s["points"] = rc.scan->points;
    if (rc.scan->counts_per_point) {
      s["counts_per_point"] = *rc.scan->counts_per_point;
    }
    s["rng_seed"] = rc.scan->rng_seed;
    if (rc.scan->velocity_spread) {
      s["velocity_spread"] = *rc.scan->velocity_spread;
    }
    s["translator_group"] = rc.scan->translator_group;
    echo["scan"] = s;
  }
  echo["engine"] = engine_name(rc.engine);
  echo["oracle"] = {{"step_scale", rc.oracle.step_scale},
                    {"dc_width_m", rc.oracle.dc_width},
                    {"method", rc.oracle.method == IntegratorMethod::RungeKutta4
                                   ? "rk4"
                                   : "exponential_midpoint"}};
  echo["seed"] = rc.seed;
  for (const auto& [key, value] : echo.items()) {
    rc.metadata_lines.push_back(key + " = " + value.dump());
  }
  return rc;
}

RunConfig parse_config_file(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw config_error("cannot open config file: " + path);
  std::ostringstream ss;
  ss << f.rdbuf();
  return parse_config(ss.str());
}

RunConfig default_run_config() { return parse_config("{}"); }

}  // namespace polsim
