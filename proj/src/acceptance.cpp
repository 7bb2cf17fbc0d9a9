#include "polsim/acceptance.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <numbers>
#include <ostream>
#include <random>
#include <sstream>

#include "polsim/csv.hpp"
#include "polsim/errors.hpp"
#include "polsim/experiment.hpp"
#include "polsim/fit.hpp"
#include "polsim/oracle.hpp"
#include "polsim/propagate.hpp"
#include "polsim/spinor.hpp"

namespace polsim {
namespace {

constexpr double kTwoPi = 2 * std::numbers::pi;
const PhysicalConstants kConst{};

// Guide fields (tesla) of the Larmor study and its regression extension.
const std::vector<double> kFourFields = {10.90e-4, 10.79e-4, 10.69e-4,
                                         10.58e-4};
const std::vector<double> kSevenFields = {10.0e-4, 10.2e-4, 10.4e-4, 10.6e-4,
                                          10.8e-4, 11.0e-4, 11.2e-4};
// Drive frequencies (kHz) of the zero-field study, run at this guide field.
const std::vector<double> kDriveKhz = {30.9, 30.6, 30.3, 30.0};
constexpr double kZfGuide = 10.59e-4;

std::string num(double v, int prec = 8) {
  std::ostringstream os;
  os << std::setprecision(prec) << v;
  return os.str();
}

std::string gauss(double tesla) { return num(tesla * 1e4, 4) + " G"; }

struct Criterion {
  CriterionOutcome out;
  Criterion(int id, std::string title) {
    out.id = id;
    out.title = std::move(title);
    out.pass = true;
  }
  void check(bool ok, const std::string& line) {
    out.pass = out.pass && ok;
    out.details.push_back((ok ? "ok:   " : "FAIL: ") + line);
  }
  void note(const std::string& line) { out.details.push_back("note: " + line); }
};

ScanSpec translator_spec(Configuration c) {
  ScanSpec s;
  s.configuration = c;
  s.swept = SweptParameter::TranslatorOffset;
  s.start = 0.0;
  s.stop = 0.08;
  s.points = 81;
  return s;
}

std::vector<double> xs_of(const ScanResult& r) {
  std::vector<double> xs;
  xs.reserve(r.points.size());
  for (const auto& p : r.points) xs.push_back(p.swept_value);
  return xs;
}

FitResult fit_ideal(const ScanResult& r) {
  std::vector<double> ys;
  ys.reserve(r.points.size());
  for (const auto& p : r.points) ys.push_back(p.ideal_intensity);
  return fit_sinusoid(xs_of(r), ys);
}

FitResult fit_counts(const ScanResult& r) {
  std::vector<double> ys;
  std::vector<double> sigmas;
  for (const auto& p : r.points) {
    ys.push_back(p.counts.value());
    sigmas.push_back(std::sqrt(std::max(p.counts.value(), 1.0)));
  }
  return fit_sinusoid(xs_of(r), ys, sigmas);
}

// Zero-field beamline: canonical layout at the zero-field guide value with
// both coils driven at `drive_hz` (coil static fields stay at the guide value).
Beamline zf_beamline(double drive_hz) {
  Beamline bl = default_beamline(kZfGuide);
  for (Element& e : bl.elements) {
    if (e.type == ElementType::RFFlipper) e.frequency = kTwoPi * drive_hz;
  }
  return bl;
}

// Coils pinned on their own resonance at `pin_tesla` while the guide field
// elsewhere is `guide_tesla` — the guide-field-independence setup.
Beamline pinned_beamline(double pin_tesla, double guide_tesla) {
  Beamline bl = default_beamline(pin_tesla);
  for (Element& e : bl.elements) {
    if (e.type == ElementType::RFFlipper) {
      e.local_static_field = bl.rf_local_field(e);
      e.b1 = bl.rf_b1(e);
    }
  }
  bl.guide_field = guide_tesla;
  return bl;
}

CriterionOutcome criterion_1() {
  Criterion c(1, "Larmor slope law: fitted k = 2*gamma*B0/v (0.1%) at four "
                 "guide fields");
  for (double b0 : kFourFields) {
    Beamline bl = default_beamline(b0);
    const ScanResult scan =
        run_scan(bl, translator_spec(Configuration::LarmorOnly));
    const FitResult fit = fit_ideal(scan);
    const double target = 2 * kConst.gamma_n * b0 / bl.beam.velocity;
    const double rel = std::abs(fit.k / target - 1.0);
    c.check(rel <= 1e-3, "B0 = " + gauss(b0) + ": fitted k = " + num(fit.k) +
                             " rad/m vs 2*w_L/v = " + num(target) +
                             " rad/m (rel err " + num(rel, 3) + ")");
    if (std::abs(b0 - 10.79e-4) < 1e-12) {
      const double period = kTwoPi / fit.k;
      const double rel_p = std::abs(period / 0.03162 - 1.0);
      c.check(rel_p <= 1e-3, "period at 10.79 G = " + num(period) +
                                 " m vs 0.03162 m (rel err " + num(rel_p, 3) +
                                 ")");
    }
  }
  return c.out;
}

CriterionOutcome criterion_2() {
  Criterion c(2, "Larmor regression: k vs B0 slope = 2*gamma/v (0.5% "
                 "noiseless; 2 sigma at 1000 counts/point)");
  const double v = kDefaultVelocity;
  const double target = 2 * kConst.gamma_n / v;

  std::vector<double> ks;
  for (double b0 : kSevenFields) {
    Beamline bl = default_beamline(b0);
    ks.push_back(
        fit_ideal(run_scan(bl, translator_spec(Configuration::LarmorOnly))).k);
  }
  const LinearFit noiseless = linear_fit(kSevenFields, ks);
  const double rel = std::abs(noiseless.slope / target - 1.0);
  c.check(rel <= 5e-3,
          "noiseless slope = " + num(noiseless.slope) +
              " rad/(m T) vs 2*gamma/v = " + num(target) + " (rel err " +
              num(rel, 3) + ")");

  std::vector<double> ks_n, kerrs;
  for (std::size_t i = 0; i < kSevenFields.size(); ++i) {
    Beamline bl = default_beamline(kSevenFields[i]);
    ScanSpec spec = translator_spec(Configuration::LarmorOnly);
    spec.counts_per_point = 1000;
    spec.rng_seed = 42 + i;
    const FitResult fit = fit_counts(run_scan(bl, spec));
    ks_n.push_back(fit.k);
    kerrs.push_back(fit.k_err);
  }
  const LinearFit noisy = linear_fit(kSevenFields, ks_n, kerrs);
  const double pull = std::abs(noisy.slope - target) / noisy.slope_err;
  c.check(pull <= 2.0, "Poisson slope = " + num(noisy.slope) + " +/- " +
                           num(noisy.slope_err, 3) + " rad/(m T), |delta|/sigma = " +
                           num(pull, 3) + " (<= 2)");
  return c.out;
}

CriterionOutcome criterion_3() {
  Criterion c(3, "zero-field slope law as stated: fitted k = w_R/v (0.1%) at "
                 "B0 = 10.59 G");
  for (double f_khz : kDriveKhz) {
    Beamline bl = zf_beamline(f_khz * 1e3);
    const ScanResult scan =
        run_scan(bl, translator_spec(Configuration::ZeroField));
    const FitResult fit = fit_ideal(scan);
    const double stated = kTwoPi * f_khz * 1e3 / bl.beam.velocity;
    const double rel = std::abs(fit.k / stated - 1.0);
    c.check(rel <= 1e-3, "f_R = " + num(f_khz, 4) + " kHz: fitted k = " +
                             num(fit.k) + " rad/m vs stated w_R/v = " +
                             num(stated) + " rad/m (rel err " + num(rel, 3) +
                             ")");
    if (std::abs(f_khz - 30.0) < 1e-12) {
      const double period = kTwoPi / fit.k;
      const double rel_p = std::abs(period / 0.06633 - 1.0);
      c.check(rel_p <= 1e-3, "period at 30.0 kHz = " + num(period) +
                                 " m vs 0.06633 m (rel err " + num(rel_p, 3) +
                                 ")");
    }
  }
  c.note("every unitary engine puts the fringe at 2*w_R/v: a full flip "
         "exchanges one drive quantum per spin component with opposite "
         "signs, so the interfering components separate by 2*hbar*w_R; the "
         "measured period is v*pi/w_R (33.17 mm at 30.0 kHz)");
  return c.out;
}

CriterionOutcome criterion_4() {
  Criterion c(4, "zero-field regression as stated: k vs w_R slope = 1/v "
                 "(0.5%), intercept ~ 0");
  std::vector<double> omegas, ks;
  for (double f_khz : kDriveKhz) {
    Beamline bl = zf_beamline(f_khz * 1e3);
    omegas.push_back(kTwoPi * f_khz * 1e3);
    ks.push_back(
        fit_ideal(run_scan(bl, translator_spec(Configuration::ZeroField))).k);
  }
  const LinearFit lf = linear_fit(omegas, ks);
  const double v = kDefaultVelocity;
  const double rel = std::abs(lf.slope / (1.0 / v) - 1.0);
  c.check(rel <= 5e-3, "slope = " + num(lf.slope) + " s/m vs stated 1/v = " +
                           num(1.0 / v) + " s/m (rel err " + num(rel, 3) + ")");
  const double tol_b = std::max(2 * lf.intercept_err, 1e-6 * std::abs(ks[0]));
  c.check(std::abs(lf.intercept) <= tol_b,
          "intercept = " + num(lf.intercept, 3) + " +/- " +
              num(lf.intercept_err, 3) + " rad/m (target: consistent with 0)");
  c.note("measured slope is 2/v = " + num(2.0 / v) +
         " s/m, twice the stated value, for the reason recorded under "
         "criterion 3");
  return c.out;
}

CriterionOutcome criterion_5() {
  Criterion c(5, "guide-field independence: identical zero-field curves at "
                 "four B0 (1e-6), k spread < 1e-6; < 0.5% with Poisson");
  std::vector<ScanResult> scans;
  std::vector<double> ks;
  for (double b0 : kFourFields) {
    Beamline bl = pinned_beamline(kZfGuide, b0);
    scans.push_back(run_scan(bl, translator_spec(Configuration::ZeroField)));
    ks.push_back(fit_ideal(scans.back()).k);
  }
  double dev = 0.0;
  for (std::size_t i = 1; i < scans.size(); ++i) {
    for (std::size_t j = 0; j < scans[i].points.size(); ++j) {
      dev = std::max(dev, std::abs(scans[i].points[j].ideal_intensity -
                                   scans[0].points[j].ideal_intensity));
    }
  }
  c.check(dev < 1e-6,
          "max pointwise curve deviation across B0 = " + num(dev, 3));
  const auto [kmin, kmax] = std::minmax_element(ks.begin(), ks.end());
  const double spread = (*kmax - *kmin) / (0.5 * (*kmax + *kmin));
  c.check(spread < 1e-6, "fitted k relative spread = " + num(spread, 3));

  std::vector<double> ks_n;
  for (std::size_t i = 0; i < kFourFields.size(); ++i) {
    Beamline bl = pinned_beamline(kZfGuide, kFourFields[i]);
    ScanSpec spec = translator_spec(Configuration::ZeroField);
    spec.counts_per_point = 1000;
    spec.rng_seed = 101 + i;
    ks_n.push_back(fit_counts(run_scan(bl, spec)).k);
  }
  const auto [nmin, nmax] = std::minmax_element(ks_n.begin(), ks_n.end());
  const double spread_n = (*nmax - *nmin) / (0.5 * (*nmax + *nmin));
  c.check(spread_n < 5e-3,
          "fitted k relative spread with Poisson counts = " + num(spread_n, 3));
  return c.out;
}

struct NamedScan {
  std::string label;
  Beamline beamline;
  Configuration configuration;
};

CriterionOutcome criterion_6() {
  Criterion c(6, "engine equivalence on the study scans: |I_analytic - "
                 "I_oracle| < 1e-4 resonant, < 1e-3 detuned");
  OracleOptions opts;
  opts.dc_width = 1e-6;  // match the zero-extent DC treatment of the
                         // analytic engine

  std::vector<NamedScan> resonant;
  for (double b0 : kFourFields) {
    resonant.push_back({"Larmor B0 = " + gauss(b0), default_beamline(b0),
                        Configuration::LarmorOnly});
  }
  for (double b0 : kSevenFields) {
    resonant.push_back({"Larmor B0 = " + gauss(b0), default_beamline(b0),
                        Configuration::LarmorOnly});
  }
  for (double b0 : kFourFields) {
    resonant.push_back({"zero-field resonant, B0 = " + gauss(b0),
                        pinned_beamline(kZfGuide, b0),
                        Configuration::ZeroField});
  }
  std::vector<NamedScan> detuned;
  for (double f_khz : kDriveKhz) {
    detuned.push_back({"zero-field f_R = " + num(f_khz, 4) + " kHz",
                       zf_beamline(f_khz * 1e3), Configuration::ZeroField});
  }

  auto bucket_max = [&](const std::vector<NamedScan>& scans,
                        std::string* worst) {
    double max_dev = 0.0;
    for (const NamedScan& ns : scans) {
      const ScanSpec spec = translator_spec(ns.configuration);
      const ScanResult a = run_scan(ns.beamline, spec, Engine::Analytic);
      const ScanResult o = run_scan(ns.beamline, spec, Engine::Oracle, opts);
      for (std::size_t j = 0; j < a.points.size(); ++j) {
        const double d = std::abs(a.points[j].ideal_intensity -
                                  o.points[j].ideal_intensity);
        if (d > max_dev) {
          max_dev = d;
          *worst = ns.label;
        }
      }
    }
    return max_dev;
  };

  std::string worst_res, worst_det;
  const double res = bucket_max(resonant, &worst_res);
  const double det = bucket_max(detuned, &worst_det);
  c.check(res < 1e-4, "resonant scans: max deviation = " + num(res, 3) +
                          " (worst: " + worst_res + "), target < 1e-4");
  c.check(det < 1e-3, "detuned scans: max deviation = " + num(det, 3) +
                          " (worst: " + worst_det + "), target < 1e-3");
  c.note("the analytic coil model drops the counter-rotating drive "
         "component; that is valid for w_1 << w, but the 20 mm coil at these "
         "fields runs at w_1/w ~ 1.6, so the driven scans disagree at order "
         "one while the undriven (Larmor) scans agree to ~5e-5");
  return c.out;
}

CriterionOutcome criterion_7() {
  Criterion c(7, "detuning contrast: contrast(30.0 kHz)/contrast(resonance "
                 "31.8 kHz) matches the two-flipper Rabi product within 1e-3");
  const double b_res = kTwoPi * 31.8e3 / kConst.gamma_n;  // resonance field
  Beamline bl_res = default_beamline(b_res);
  Beamline bl_det = bl_res;
  for (Element& e : bl_det.elements) {
    if (e.type == ElementType::RFFlipper) e.frequency = kTwoPi * 30.0e3;
  }

  double product = 1.0;
  for (const Element& e : bl_det.elements) {
    if (e.type == ElementType::RFFlipper) {
      product *= rabi_flip_probability(e, bl_det);
    }
  }

  const ScanSpec spec = translator_spec(Configuration::ZeroField);
  const double contrast_res = fit_ideal(run_scan(bl_res, spec)).contrast;
  const double contrast_det = fit_ideal(run_scan(bl_det, spec)).contrast;
  const double ratio = contrast_det / contrast_res;
  c.check(std::abs(ratio - product) <= 1e-3,
          "analytic contrast ratio = " + num(ratio) +
              " vs Rabi product = " + num(product) + " (|delta| = " +
              num(std::abs(ratio - product), 3) + ", tol 1e-3)");

  OracleOptions opts;
  opts.dc_width = 1e-6;
  const double oc_res =
      fit_ideal(run_scan(bl_res, spec, Engine::Oracle, opts)).contrast;
  const double oc_det =
      fit_ideal(run_scan(bl_det, spec, Engine::Oracle, opts)).contrast;
  const double oratio = oc_det / oc_res;
  c.check(std::abs(oratio - product) <= 1e-3,
          "oracle contrast ratio = " + num(oratio) +
              " vs Rabi product = " + num(product) + " (|delta| = " +
              num(std::abs(oratio - product), 3) + ")");
  c.note("the no-flip leakage paths interfere at the same fringe frequency "
         "and replenish the analytic amplitude by ~(1-P)*cos(theta), so the "
         "exact analytic ratio sits ~2.6e-3 above the Rabi product; the "
         "oracle adds order-one counter-rotating effects on top");
  return c.out;
}

CriterionOutcome criterion_8() {
  Criterion c(8, "property suites: unitarity, composition, Bloch "
                 "equivalence, fitter coverage, determinism");
  std::mt19937_64 rng(20260817ULL);
  std::uniform_real_distribution<double> uni(-1.0, 1.0);
  auto random_axis = [&]() {
    while (true) {
      Vec3 a{uni(rng), uni(rng), uni(rng)};
      const double n = a.norm();
      if (n > 1e-3 && n <= 1.0) return Vec3(a / n);
    }
  };

  // Unitarity and determinant of the rotation generator.
  double udev = 0.0, ddev = 0.0;
  for (int i = 0; i < 300; ++i) {
    const SpinOperator u = rotation_propagator(random_axis(), 4 * std::numbers::pi * uni(rng));
    udev = std::max(udev,
                    (u.adjoint() * u - SpinOperator::Identity()).cwiseAbs().maxCoeff());
    ddev = std::max(ddev, std::abs(u.determinant() - 1.0));
  }
  c.check(udev <= 1e-12 && ddev <= 1e-12,
          "unitarity over 300 random rotations: max |U*U - 1| = " +
              num(udev, 3) + ", max |det - 1| = " + num(ddev, 3));

  // Same-axis composition law.
  double cdev = 0.0;
  for (int i = 0; i < 100; ++i) {
    const Vec3 n = random_axis();
    const double a = 4 * std::numbers::pi * uni(rng);
    const double b = 4 * std::numbers::pi * uni(rng);
    cdev = std::max(cdev, (rotation_propagator(n, a) * rotation_propagator(n, b) -
                           rotation_propagator(n, a + b))
                              .cwiseAbs()
                              .maxCoeff());
  }
  c.check(cdev <= 1e-10,
          "rotation composition over 100 random draws: max deviation = " +
              num(cdev, 3));

  // Quantum vs classical pictures on random piecewise fields.
  double bdev = 0.0;
  for (int i = 0; i < 50; ++i) {
    FieldProfile profile;
    double t = 0.0;
    const int nseg = 1 + static_cast<int>(rng() % 3);
    for (int s = 0; s < nseg; ++s) {
      FieldSegment seg;
      seg.t_start = t;
      t += 2e-5 + 1e-4 * std::abs(uni(rng));
      seg.t_end = t;
      seg.static_field = Vec3{uni(rng), uni(rng), uni(rng)} * 1.5e-3;
      if (rng() % 2 == 0) {
        seg.has_rf = true;
        seg.rf_b1 = 4e-4 * std::abs(uni(rng));
        seg.rf_axis = random_axis();
        seg.rf_omega = kConst.gamma_n * 1.1e-3 * (0.5 + std::abs(uni(rng)));
        seg.rf_phase = std::numbers::pi * uni(rng);
      }
      profile.segments.push_back(seg);
    }
    const Vec3 dir = random_axis();
    const Spinor psi0 = spinor_from_direction(dir);
    IntegratorConfig cfg;
    const Spinor psi = integrate(profile, psi0, cfg, kConst.gamma_n);
    const PolarizationVector pq = polarization_of(psi);
    const PolarizationVector pc =
        bloch_integrate(profile, {dir.x(), dir.y(), dir.z()}, cfg, kConst.gamma_n);
    bdev = std::max(bdev, (pq.vec() - pc.vec()).norm());
  }
  c.check(bdev <= 1e-7,
          "quantum vs Bloch pictures over 50 random profiles: max |P_q - "
          "P_c| = " + num(bdev, 3));

  // Fitter coverage: 2-sigma interval of k over 200 Poisson realizations.
  const double k_true = 198.8;
  const double phase_true = 0.3;
  std::vector<double> xs(81);
  for (int i = 0; i < 81; ++i) xs[i] = 0.001 * i;
  int covered = 0;
  for (int seed = 1; seed <= 200; ++seed) {
    std::vector<double> ys(81), sig(81);
    for (int i = 0; i < 81; ++i) {
      const double intensity =
          0.5 + 0.49 * std::cos(k_true * xs[i] + phase_true);
      ys[i] = synthesize_counts(intensity, 1000.0,
                                static_cast<std::uint64_t>(seed),
                                static_cast<std::uint64_t>(i));
      sig[i] = std::sqrt(std::max(ys[i], 1.0));
    }
    const FitResult fit = fit_sinusoid(xs, ys, sig);
    if (std::abs(fit.k - k_true) <= 2 * fit.k_err) ++covered;
  }
  const double coverage = covered / 200.0;
  c.check(coverage >= 0.91 && coverage <= 0.99,
          "fitter 2-sigma coverage of k over 200 seeds = " + num(coverage, 4) +
              " (target 0.95 +/- 0.04)");

  // Determinism: a seeded noisy scan serializes byte-identically on re-run.
  Beamline bl = zf_beamline(30.9e3);
  ScanSpec spec = translator_spec(Configuration::ZeroField);
  spec.counts_per_point = 1000;
  spec.rng_seed = 42;
  std::ostringstream csv1, csv2;
  write_scan_csv(csv1, run_scan(bl, spec), {"determinism probe"});
  write_scan_csv(csv2, run_scan(bl, spec), {"determinism probe"});
  c.check(csv1.str() == csv2.str() && !csv1.str().empty(),
          "seeded scan CSV is byte-identical across runs (" +
              std::to_string(csv1.str().size()) + " bytes)");
  return c.out;
}

}  // namespace

CriterionOutcome run_criterion(int id) {
  switch (id) {
    case 1:
      return criterion_1();
    case 2:
      return criterion_2();
    case 3:
      return criterion_3();
    case 4:
      return criterion_4();
    case 5:
      return criterion_5();
    case 6:
      return criterion_6();
    case 7:
      return criterion_7();
    case 8:
      return criterion_8();
    default:
      throw config_error("unknown acceptance criterion " + std::to_string(id) +
                         " (valid: 1..8)");
  }
}

std::vector<CriterionOutcome> run_all_criteria() {
  std::vector<CriterionOutcome> out;
  for (int id = 1; id <= 8; ++id) out.push_back(run_criterion(id));
  return out;
}

void print_outcome(std::ostream& out, const CriterionOutcome& o) {
  out << (o.pass ? "PASS" : "FAIL") << " criterion " << o.id << ": " << o.title
      << "\n";
  for (const std::string& d : o.details) out << "    " << d << "\n";
}

}  // namespace polsim
