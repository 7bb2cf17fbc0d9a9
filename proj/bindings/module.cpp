// Python bindings for the simulator's main operations: build a beamline,
// propagate, sweep, predict, and fit.
#include <pybind11/complex.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <array>
#include <complex>
#include <vector>

#include "polsim/config.hpp"
#include "polsim/elements.hpp"
#include "polsim/errors.hpp"
#include "polsim/experiment.hpp"
#include "polsim/fit.hpp"
#include "polsim/oracle.hpp"
#include "polsim/predict.hpp"
#include "polsim/propagate.hpp"
#include "polsim/spinor.hpp"

namespace py = pybind11;
using namespace polsim;

namespace {

Vec3 to_vec3(const std::array<double, 3>& a) { return {a[0], a[1], a[2]}; }

Configuration to_configuration(const std::string& name) {
  if (name == "larmor") return Configuration::LarmorOnly;
  if (name == "zero_field") return Configuration::ZeroField;
  throw config_error("unknown configuration \"" + name +
                     "\" (expected \"larmor\" or \"zero_field\")");
}

Engine to_engine(const std::string& name) {
  if (name == "analytic") return Engine::Analytic;
  if (name == "oracle") return Engine::Oracle;
  throw config_error("unknown engine \"" + name +
                     "\" (expected \"analytic\" or \"oracle\")");
}

py::dict fit_dict(const FitResult& f) {
  py::dict d;
  d["offset"] = f.offset;
  d["offset_err"] = f.offset_err;
  d["amplitude"] = f.amplitude;
  d["amplitude_err"] = f.amplitude_err;
  d["k"] = f.k;
  d["k_err"] = f.k_err;
  d["phase"] = f.phase;
  d["phase_err"] = f.phase_err;
  d["contrast"] = f.contrast;
  d["reduced_chi2"] = f.reduced_chi2;
  d["n_points"] = f.n_points;
  return d;
}

}  // namespace

PYBIND11_MODULE(_polsim, m) {
  m.doc() = "spin-1/2 polarimeter beamline simulator (native core)";

  m.attr("gamma_n") = PhysicalConstants{}.gamma_n;
  m.attr("default_velocity") = kDefaultVelocity;
  m.attr("default_guide_field") = kDefaultGuideField;

  py::register_exception<config_error>(m, "ConfigError");

  py::class_<Beamline>(m, "Beamline")
      .def_readwrite("guide_field", &Beamline::guide_field)
      .def_property(
          "velocity", [](const Beamline& b) { return b.beam.velocity; },
          [](Beamline& b, double v) { b.beam.velocity = v; })
      .def_property(
          "incident_polarization",
          [](const Beamline& b) { return b.beam.incident_polarization; },
          [](Beamline& b, double p) { b.beam.incident_polarization = p; })
      .def("set_translator",
           [](Beamline& b, const std::string& group, double dx) {
             b.translator_offsets[group] = dx;
           },
           py::arg("group"), py::arg("offset_m"))
      .def("set_rf_frequency_hz",
           [](Beamline& b, double hz) {
             for (Element& e : b.elements) {
               if (e.type == ElementType::RFFlipper) {
                 e.frequency = 2 * 3.14159265358979323846 * hz;
               }
             }
           },
           py::arg("frequency_hz"))
      .def("apply_configuration",
           [](Beamline& b, const std::string& name) {
             apply_configuration(b, to_configuration(name));
           },
           py::arg("configuration"));

  m.def("default_beamline", &default_beamline,
        py::arg("guide_field_tesla") = kDefaultGuideField);

  m.def("beamline_from_config",
        [](const std::string& json_text) {
          return parse_config(json_text).beamline;
        },
        py::arg("json_text"),
        "Parse a JSON run configuration and return its beamline");

  m.def("larmor_frequency",
        [](double b) { return larmor_frequency(b); },
        py::arg("field_tesla"));

  m.def("rotation_propagator",
        [](const std::array<double, 3>& axis, double angle) {
          const SpinOperator u = rotation_propagator(to_vec3(axis), angle);
          return std::array<std::array<std::complex<double>, 2>, 2>{
              {{u(0, 0), u(0, 1)}, {u(1, 0), u(1, 1)}}};
        },
        py::arg("axis"), py::arg("angle"));

  m.def("polarization_of",
        [](std::complex<double> up, std::complex<double> down) {
          const PolarizationVector p = polarization_of(Spinor{up, down});
          return std::array<double, 3>{p.px, p.py, p.pz};
        },
        py::arg("c_plus"), py::arg("c_minus"));

  m.def("propagate",
        [](const Beamline& bl, const std::string& engine, double t_origin) {
          const PropagationResult r = to_engine(engine) == Engine::Analytic
                                          ? propagate(bl, t_origin)
                                          : oracle_propagate(bl, t_origin);
          const PolarizationVector p = polarization_of(r.state);
          return py::make_tuple(r.intensity,
                                std::array<double, 3>{p.px, p.py, p.pz});
        },
        py::arg("beamline"), py::arg("engine") = "analytic",
        py::arg("t_origin") = 0.0,
        "Returns (intensity, final polarization vector)");

  m.def("run_translator_scan",
        [](const Beamline& bl, const std::string& configuration, double start,
           double stop, int points, const std::string& engine) {
          ScanSpec spec;
          spec.configuration = to_configuration(configuration);
          spec.swept = SweptParameter::TranslatorOffset;
          spec.start = start;
          spec.stop = stop;
          spec.points = points;
          std::vector<std::pair<double, double>> out;
          for (const ScanPoint& p :
               run_scan(bl, spec, to_engine(engine)).points) {
            out.emplace_back(p.swept_value, p.ideal_intensity);
          }
          return out;
        },
        py::arg("beamline"), py::arg("configuration"), py::arg("start") = 0.0,
        py::arg("stop") = 0.08, py::arg("points") = 81,
        py::arg("engine") = "analytic",
        "Ideal-intensity translator sweep as a list of (offset, intensity)");

  m.def("predict_phase",
        [](const Beamline& bl, const std::string& configuration) {
          const PhasePrediction p =
              phase_prediction(bl, to_configuration(configuration));
          return py::make_tuple(p.alpha0, p.slope_per_offset);
        },
        py::arg("beamline"), py::arg("configuration"),
        "Returns (alpha0, slope_per_offset) of the fringe phase");

  m.def("fit_sinusoid",
        [](const std::vector<double>& xs, const std::vector<double>& ys,
           const std::vector<double>& sigmas) {
          return fit_dict(fit_sinusoid(xs, ys, sigmas));
        },
        py::arg("xs"), py::arg("ys"),
        py::arg("sigmas") = std::vector<double>{});
}
