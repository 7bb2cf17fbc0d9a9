#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <vector>

#include "polsim/elements.hpp"
#include "polsim/errors.hpp"
#include "polsim/experiment.hpp"
#include "polsim/fit.hpp"

using namespace polsim;
using doctest::Approx;

namespace {

ScanSpec translator_spec(Configuration cfg, int points = 41) {
  ScanSpec spec;
  spec.configuration = cfg;
  spec.swept = SweptParameter::TranslatorOffset;
  spec.start = 0.0;
  spec.stop = 0.08;
  spec.points = points;
  return spec;
}

std::vector<double> intensities(const ScanResult& r) {
  std::vector<double> out;
  for (const auto& p : r.points) out.push_back(p.ideal_intensity);
  return out;
}

std::vector<double> positions(const ScanResult& r) {
  std::vector<double> out;
  for (const auto& p : r.points) out.push_back(p.swept_value);
  return out;
}

}  // namespace

TEST_CASE("scan results carry the sweep identity") {
  const Beamline bl = default_beamline();
  const ScanResult r = run_scan(bl, translator_spec(Configuration::ZeroField, 9));
  CHECK(r.swept == "translator_offset");
  CHECK(r.configuration == Configuration::ZeroField);
  CHECK(r.engine == Engine::Analytic);
  REQUIRE(r.points.size() == 9);
  CHECK(r.points.front().swept_value == 0.0);
  CHECK(r.points.back().swept_value == Approx(0.08).epsilon(1e-15));
  for (const auto& p : r.points) {
    CHECK_FALSE(p.counts.has_value());
    CHECK(p.ideal_intensity >= 0.0);
    CHECK(p.ideal_intensity <= 1.0);
  }
}

TEST_CASE("oracle and analytic engines agree on an undriven sweep") {
  // With the RF coils idle every field the neutron sees is static, where the
  // rotating-wave model is exact; the engines must agree to numerical noise.
  const Beamline bl = default_beamline();
  ScanSpec spec = translator_spec(Configuration::LarmorOnly, 9);
  spec.stop = 0.03;
  OracleOptions opts;
  opts.dc_width = 1e-6;  // keep the thin rotations thin
  const ScanResult ana = run_scan(bl, spec, Engine::Analytic);
  const ScanResult orc = run_scan(bl, spec, Engine::Oracle, opts);
  for (std::size_t i = 0; i < ana.points.size(); ++i) {
    CHECK(std::abs(ana.points[i].ideal_intensity -
                   orc.points[i].ideal_intensity) < 1e-4);
  }
}

TEST_CASE("zero-field intensity is flat under a guide-field sweep") {
  // The coils are resolved against the base beamline before the sweep, so
  // changing the guide field leaves their interiors resonant; the balanced
  // drift legs then cancel the outside precession entirely.
  const Beamline bl = default_beamline(10.59e-4);
  ScanSpec spec;
  spec.configuration = Configuration::ZeroField;
  spec.swept = SweptParameter::GuideField;
  spec.start = 10.0e-4;
  spec.stop = 11.2e-4;
  spec.points = 9;
  Beamline moved = bl;
  moved.translator_offsets["g1"] = 0.0123;  // arbitrary fringe position
  const std::vector<double> ii = intensities(run_scan(moved, spec));
  const auto [lo, hi] = std::minmax_element(ii.begin(), ii.end());
  CHECK(*hi - *lo < 1e-9);

  // The Larmor fringe, by contrast, moves with the guide field.
  spec.configuration = Configuration::LarmorOnly;
  const std::vector<double> larmor = intensities(run_scan(moved, spec));
  const auto [llo, lhi] = std::minmax_element(larmor.begin(), larmor.end());
  CHECK(*lhi - *llo > 0.1);
}

TEST_CASE("rf-frequency sweep drives every coil in hertz") {
  const Beamline bl = default_beamline(10.59e-4);
  ScanSpec spec;
  spec.configuration = Configuration::ZeroField;
  spec.swept = SweptParameter::RfFrequency;
  spec.start = 29.0e3;
  spec.stop = 33.0e3;
  spec.points = 9;
  const ScanResult r = run_scan(bl, spec);
  CHECK(r.swept == "rf_frequency");
  for (const auto& p : r.points) {
    CHECK(p.ideal_intensity >= 0.0);
    CHECK(p.ideal_intensity <= 1.0);
  }
}

TEST_CASE("synthesized counts are a pure function of seed and index") {
  const double a = synthesize_counts(0.7, 1000, 42, 3);
  const double b = synthesize_counts(0.7, 1000, 42, 3);
  CHECK(a == b);
  CHECK(synthesize_counts(0.7, 1000, 42, 4) != a);  // independent stream
  CHECK(synthesize_counts(0.7, 1000, 43, 3) != a);
  CHECK(synthesize_counts(0.0, 1000, 42, 3) == 0.0);
  CHECK(synthesize_counts(0.7, 0.0, 42, 3) == 0.0);

  // Sample moments: mean 500 over 2000 independent points.
  double sum = 0.0;
  for (int i = 0; i < 2000; ++i) sum += synthesize_counts(0.5, 1000, 7, i);
  CHECK(sum / 2000 == Approx(500.0).epsilon(0.02));
}

TEST_CASE("scans with counts are reproducible and seed-sensitive") {
  const Beamline bl = default_beamline();
  ScanSpec spec = translator_spec(Configuration::LarmorOnly, 11);
  spec.counts_per_point = 1000;
  spec.rng_seed = 42;
  const ScanResult r1 = run_scan(bl, spec);
  const ScanResult r2 = run_scan(bl, spec);
  bool any_difference = false;
  for (std::size_t i = 0; i < r1.points.size(); ++i) {
    REQUIRE(r1.points[i].counts.has_value());
    CHECK(*r1.points[i].counts == *r2.points[i].counts);
  }
  spec.rng_seed = 43;
  const ScanResult r3 = run_scan(bl, spec);
  for (std::size_t i = 0; i < r1.points.size(); ++i) {
    any_difference |= (*r1.points[i].counts != *r3.points[i].counts);
  }
  CHECK(any_difference);
}

TEST_CASE("a velocity spread washes out contrast but keeps the period") {
  const Beamline bl = default_beamline();
  ScanSpec spec = translator_spec(Configuration::LarmorOnly, 81);
  const ScanResult sharp = run_scan(bl, spec);
  spec.velocity_spread = 0.02;
  const ScanResult spread = run_scan(bl, spec);

  const FitResult f_sharp = fit_sinusoid(positions(sharp), intensities(sharp));
  const FitResult f_spread = fit_sinusoid(positions(spread), intensities(spread));
  CHECK(f_spread.amplitude < 0.9 * f_sharp.amplitude);
  CHECK(f_spread.k == Approx(f_sharp.k).epsilon(0.01));
}

TEST_CASE("gauss-hermite rule integrates gaussian moments") {
  const auto nodes = gauss_hermite_16();
  REQUIRE(nodes.size() == 16);
  double w_sum = 0.0, x2 = 0.0, x4 = 0.0;
  for (const auto& n : nodes) {
    w_sum += n.w;
    x2 += n.w * n.x * n.x;
    x4 += n.w * n.x * n.x * n.x * n.x;
  }
  const double root_pi = std::sqrt(std::numbers::pi);
  CHECK(w_sum == Approx(root_pi).epsilon(1e-12));
  CHECK(x2 == Approx(root_pi / 2).epsilon(1e-12));
  CHECK(x4 == Approx(root_pi * 3 / 4).epsilon(1e-12));
  // Symmetric nodes with positive weights.
  for (std::size_t i = 0; i < nodes.size(); ++i) {
    CHECK(nodes[i].w > 0);
    CHECK(nodes[i].x == Approx(-nodes[nodes.size() - 1 - i].x).epsilon(1e-12));
  }
}

TEST_CASE("scan validation rejects malformed sweeps") {
  const Beamline bl = default_beamline();
  ScanSpec spec = translator_spec(Configuration::LarmorOnly);
  spec.points = 4;
  CHECK_THROWS_AS(run_scan(bl, spec), config_error);

  spec = translator_spec(Configuration::LarmorOnly);
  spec.stop = spec.start;
  CHECK_THROWS_AS(run_scan(bl, spec), config_error);

  spec = translator_spec(Configuration::LarmorOnly);
  spec.counts_per_point = -5;
  CHECK_THROWS_AS(run_scan(bl, spec), config_error);

  spec = translator_spec(Configuration::LarmorOnly);
  spec.velocity_spread = 0.5;
  CHECK_THROWS_AS(run_scan(bl, spec), config_error);
}

TEST_CASE("the oracle engine refuses clearly infeasible step counts") {
  const Beamline bl = default_beamline();
  ScanSpec spec = translator_spec(Configuration::ZeroField, 81);
  OracleOptions opts;
  opts.step_scale = 1e-6;  // ~3e9 steps per point: hopeless
  CHECK_THROWS_AS(run_scan(bl, spec, Engine::Oracle, opts), resource_error);
}
