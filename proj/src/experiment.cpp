#include "polsim/experiment.hpp"

#include <Eigen/Dense>
#include <cmath>
#include <numbers>
#include <random>
#include <sstream>

#include "polsim/errors.hpp"
#include "polsim/propagate.hpp"

namespace polsim {
namespace {

void validate_spec(const ScanSpec& spec) {
  if (spec.points < 8) {
    throw config_error("scan needs at least 8 points");
  }
  if (!(spec.stop > spec.start) && !(spec.stop < spec.start)) {
    throw config_error("scan range must have distinct start and stop");
  }
  if (spec.counts_per_point && *spec.counts_per_point < 0) {
    throw config_error("counts_per_point must be non-negative");
  }
  if (spec.velocity_spread &&
      (*spec.velocity_spread < 0 || *spec.velocity_spread >= 0.2)) {
    throw config_error("velocity_spread is a fractional sigma in [0, 0.2)");
  }
}

// Freeze the RF coils against the base beamline: auto-tuned drive amplitudes
// and resonance-following local fields become explicit numbers, so sweeping
// the guide field or the velocity afterwards detunes the coils the way it
// would in hardware.
void resolve_coils(Beamline& bl) {
  for (Element& e : bl.elements) {
    if (e.type != ElementType::RFFlipper) continue;
    e.local_static_field = bl.rf_local_field(e);
    e.b1 = bl.rf_b1(e);
  }
}

void apply_swept(Beamline& bl, const ScanSpec& spec, double value) {
  switch (spec.swept) {
    case SweptParameter::TranslatorOffset:
      bl.translator_offsets[spec.translator_group] = value;
      break;
    case SweptParameter::GuideField:
      bl.guide_field = value;
      break;
    case SweptParameter::RfFrequency:
      for (Element& e : bl.elements) {
        if (e.type == ElementType::RFFlipper) {
          e.frequency = 2 * std::numbers::pi * value;
        }
      }
      break;
  }
}

double ideal_intensity(const Beamline& bl, Engine engine,
                       const OracleOptions& opts) {
  return engine == Engine::Analytic ? propagate(bl).intensity
                                    : oracle_propagate(bl, 0.0, opts).intensity;
}

// Average the intensity over the Maxwellian-like velocity distribution
// v ~ N(v0, (rel*v0)^2) with a Gauss-Hermite rule: v_i = v0 (1 + sqrt(2) rel x_i).
double spread_intensity(const Beamline& bl, Engine engine,
                        const OracleOptions& opts, double rel) {
  const double v0 = bl.beam.velocity;
  double acc = 0.0;
  double wsum = 0.0;
  for (const QuadratureNode& node : gauss_hermite_16()) {
    const double v = v0 * (1.0 + std::numbers::sqrt2 * rel * node.x);
    if (v <= 0) continue;  // truncate the unphysical tail
    Beamline sample = bl;
    sample.beam.velocity = v;
    sample.beam.wavelength.reset();  // nominal consistency already checked
    acc += node.w * ideal_intensity(sample, engine, opts);
    wsum += node.w;
  }
  return acc / wsum;
}

void guard_oracle_cost(const Beamline& base, const ScanSpec& spec,
                       const OracleOptions& opts) {
  // One point integrates the whole flight at the default step; estimate the
  // total before starting instead of hanging.
  Beamline probe = base;
  apply_configuration(probe, spec.configuration);
  resolve_coils(probe);
  apply_swept(probe, spec, spec.start);
  const FieldProfile profile = field_profile_of(probe, 0.0, opts);
  double per_point = 0.0;  // mirrors the per-segment auto-step policy
  for (const FieldSegment& seg : profile.segments) {
    const double w =
        limiting_angular_frequency(seg, probe.constants.gamma_n);
    const double span = seg.t_end - seg.t_start;
    const double step =
        (w > 0 ? 2 * std::numbers::pi / w / 200.0 : span / 200.0) *
        opts.step_scale;
    per_point += span / step;
  }
  const double factor = spec.velocity_spread ? 16.0 : 1.0;
  const double total = per_point * factor * spec.points;
  constexpr double kMaxSteps = 2e9;
  if (total > kMaxSteps) {
    std::ostringstream os;
    os << "oracle scan would take about " << total
       << " integrator steps (limit " << kMaxSteps
       << "); raise oracle step_scale, reduce the number of points, or use "
          "the analytic engine";
    throw resource_error(os.str());
  }
}

}  // namespace

std::string swept_name(SweptParameter p) {
  switch (p) {
    case SweptParameter::TranslatorOffset:
      return "translator_offset";
    case SweptParameter::GuideField:
      return "guide_field";
    case SweptParameter::RfFrequency:
      return "rf_frequency";
  }
  return "unknown";
}

ScanResult run_scan(const Beamline& base, const ScanSpec& spec, Engine engine,
                    const OracleOptions& oracle_opts) {
  validate_spec(spec);
  if (engine == Engine::Oracle) guard_oracle_cost(base, spec, oracle_opts);

  ScanResult result;
  result.swept = swept_name(spec.swept);
  result.configuration = spec.configuration;
  result.engine = engine;
  result.points.reserve(static_cast<std::size_t>(spec.points));

  const double dv = (spec.stop - spec.start) / (spec.points - 1);
  for (int i = 0; i < spec.points; ++i) {
    const double value = spec.start + dv * i;
    Beamline bl = base;
    apply_configuration(bl, spec.configuration);
    resolve_coils(bl);
    apply_swept(bl, spec, value);

    ScanPoint point;
    point.swept_value = value;
    point.ideal_intensity =
        spec.velocity_spread && *spec.velocity_spread > 0
            ? spread_intensity(bl, engine, oracle_opts, *spec.velocity_spread)
            : ideal_intensity(bl, engine, oracle_opts);
    if (spec.counts_per_point) {
      point.counts =
          synthesize_counts(point.ideal_intensity, *spec.counts_per_point,
                            spec.rng_seed, static_cast<std::uint64_t>(i));
    }
    result.points.push_back(point);
  }
  return result;
}

double synthesize_counts(double intensity, double mean_counts,
                         std::uint64_t seed, std::uint64_t point_index) {
  const double mean = mean_counts * intensity;
  if (!(mean > 0)) return 0.0;
  // splitmix64 of (seed, index) seeds an independent stream per point, making
  // the draw a pure function of (seed, index).
  std::uint64_t z = seed + 0x9e3779b97f4a7c15ULL * (point_index + 1);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  z ^= z >> 31;
  std::mt19937_64 rng(z);
  std::poisson_distribution<long long> dist(mean);
  return static_cast<double>(dist(rng));
}

std::vector<QuadratureNode> gauss_hermite_16() {
  // Golub-Welsch on the Hermite Jacobi matrix: off-diagonal sqrt(i/2),
  // weights mu0 * (first eigenvector component)^2 with mu0 = sqrt(pi).
  constexpr int n = 16;
  Eigen::MatrixXd jacobi = Eigen::MatrixXd::Zero(n, n);
  for (int i = 1; i < n; ++i) {
    jacobi(i, i - 1) = jacobi(i - 1, i) = std::sqrt(i / 2.0);
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(jacobi);
  std::vector<QuadratureNode> nodes(n);
  for (int i = 0; i < n; ++i) {
    nodes[static_cast<std::size_t>(i)] = {
        eig.eigenvalues()[i],
        std::sqrt(std::numbers::pi) *
            eig.eigenvectors()(0, i) * eig.eigenvectors()(0, i)};
  }
  return nodes;
}

}  // namespace polsim
