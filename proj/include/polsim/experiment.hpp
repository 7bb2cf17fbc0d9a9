#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "polsim/elements.hpp"
#include "polsim/oracle.hpp"

namespace polsim {

enum class Engine { Analytic, Oracle };

enum class SweptParameter { TranslatorOffset, GuideField, RfFrequency };

// CSV/metadata name of a swept parameter.
std::string swept_name(SweptParameter p);

struct ScanSpec {
  Configuration configuration = Configuration::LarmorOnly;
  SweptParameter swept = SweptParameter::TranslatorOffset;
  double start = 0.0;  // m | T | Hz depending on `swept`
  double stop = 0.0;
  int points = 0;  // >= 8
  std::optional<double> counts_per_point;  // mean detector counts; empty = ideal only
  std::uint64_t rng_seed = 0;
  std::optional<double> velocity_spread;  // fractional sigma_v / v
  std::string translator_group = "g1";
};

struct ScanPoint {
  double swept_value = 0.0;
  double ideal_intensity = 0.0;
  std::optional<double> counts;
};

struct ScanResult {
  std::string swept;  // swept_name(spec.swept)
  Configuration configuration = Configuration::LarmorOnly;
  Engine engine = Engine::Analytic;
  std::vector<ScanPoint> points;
};

// Sweep one parameter across [start, stop] with `points` samples. Each point
// rebuilds the beamline from `base`: the configuration toggles the element
// enables, then the swept parameter is applied (translator offset in metres,
// guide field in tesla, RF drive frequency in hertz). RF coil drive amplitude
// and local static field are resolved once against the base beamline, so a
// guide-field sweep detunes the coils rather than silently retuning them.
// Optional velocity spread averages the ideal intensity over a 16-node
// Gauss-Hermite grid of the velocity distribution. Optional counts_per_point
// adds Poisson counts from a per-point deterministic stream. The oracle engine
// estimates its total step count first and refuses clearly infeasible runs.
ScanResult run_scan(const Beamline& base, const ScanSpec& spec,
                    Engine engine = Engine::Analytic,
                    const OracleOptions& oracle_opts = {});

// Poisson draw with mean mean_counts * intensity from a stream derived from
// (seed, point index) only — deterministic regardless of evaluation order.
// Non-positive means give zero counts.
double synthesize_counts(double intensity, double mean_counts,
                         std::uint64_t seed, std::uint64_t point_index);

// 16-node Gauss-Hermite rule: integral of exp(-x^2) f(x) dx = sum w_i f(x_i).
struct QuadratureNode {
  double x;
  double w;
};
std::vector<QuadratureNode> gauss_hermite_16();

}  // namespace polsim
