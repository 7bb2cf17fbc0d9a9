#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>
#include <vector>

#include "polsim/errors.hpp"
#include "polsim/fit.hpp"

using namespace polsim;
using doctest::Approx;

namespace {

struct Curve {
  std::vector<double> xs, ys;
};

Curve sample(double offset, double amplitude, double k, double phase,
             int n = 81, double x0 = 0.0, double x1 = 0.08) {
  Curve c;
  for (int i = 0; i < n; ++i) {
    const double x = x0 + (x1 - x0) * i / (n - 1);
    c.xs.push_back(x);
    c.ys.push_back(offset + amplitude * std::cos(k * x + phase));
  }
  return c;
}

}  // namespace

TEST_CASE("noiseless sinusoid parameters are recovered to 1e-9") {
  const double k_true = 198.8;  // ~2.5 cycles over the 80 mm span
  const Curve c = sample(0.5, 0.45, k_true, 0.3);
  const FitResult f = fit_sinusoid(c.xs, c.ys);
  CHECK(f.offset == Approx(0.5).epsilon(1e-9));
  CHECK(f.amplitude == Approx(0.45).epsilon(1e-9));
  CHECK(f.k == Approx(k_true).epsilon(1e-9));
  CHECK(f.phase == Approx(0.3).epsilon(1e-9));
  CHECK(f.contrast == Approx(0.9).epsilon(1e-9));
  CHECK(f.n_points == 81);
  CHECK(f.reduced_chi2 < 1e-15);
  const PeriodResult period = extract_period(f);
  CHECK(period.period == Approx(2 * std::numbers::pi / k_true).epsilon(1e-9));
}

TEST_CASE("phase is reported in (-pi, pi] regardless of the input phase") {
  for (const double phase_true : {-2.9, -0.4, 0.0, 1.7, 3.1}) {
    const Curve c = sample(0.5, 0.3, 250.0, phase_true);
    const FitResult f = fit_sinusoid(c.xs, c.ys);
    CHECK(f.phase > -std::numbers::pi);
    CHECK(f.phase <= std::numbers::pi);
    CHECK(std::abs(std::remainder(f.phase - phase_true, 2 * std::numbers::pi)) <
          1e-9);
  }
}

TEST_CASE("fit transforms covariantly under scaling and translation") {
  const Curve c = sample(0.5, 0.2, 300.0, 1.1);
  const FitResult base = fit_sinusoid(c.xs, c.ys);

  // Scaling y scales offset and amplitude.
  std::vector<double> scaled;
  for (double y : c.ys) scaled.push_back(3.0 * y);
  const FitResult fs = fit_sinusoid(c.xs, scaled);
  CHECK(fs.offset == Approx(3 * base.offset).epsilon(1e-10));
  CHECK(fs.amplitude == Approx(3 * base.amplitude).epsilon(1e-10));
  CHECK(fs.k == Approx(base.k).epsilon(1e-10));

  // Shifting x rolls the phase by -k*s.
  const double s = 0.013;
  std::vector<double> shifted;
  for (double x : c.xs) shifted.push_back(x + s);
  const FitResult ft = fit_sinusoid(shifted, c.ys);
  CHECK(ft.k == Approx(base.k).epsilon(1e-9));
  CHECK(std::abs(std::remainder(ft.phase - (base.phase - base.k * s),
                                2 * std::numbers::pi)) < 1e-8);
}

TEST_CASE("poisson-weighted fit recovers the frequency within errors") {
  const double k_true = 198.8;
  std::mt19937_64 rng(4242);
  const Curve c = sample(0.5, 0.45, k_true, 0.3);
  std::vector<double> counts, sigmas;
  for (double y : c.ys) {
    std::poisson_distribution<long long> pd(1000.0 * y);
    const double n = static_cast<double>(pd(rng));
    counts.push_back(n);
    sigmas.push_back(std::sqrt(std::max(n, 1.0)));
  }
  const FitResult f = fit_sinusoid(c.xs, counts, sigmas);
  CHECK(std::abs(f.k - k_true) < 4 * f.k_err);
  CHECK(f.k == Approx(k_true).epsilon(0.01));
  CHECK(f.reduced_chi2 > 0.3);
  CHECK(f.reduced_chi2 < 3.0);
}

TEST_CASE("flat data yields a no-oscillation error") {
  std::vector<double> xs, ys;
  for (int i = 0; i < 41; ++i) {
    xs.push_back(i * 0.002);
    ys.push_back(0.5);
  }
  CHECK_THROWS_AS(fit_sinusoid(xs, ys), fit_error);
}

TEST_CASE("fit input validation") {
  const Curve c = sample(0.5, 0.4, 200.0, 0.0, 7);  // too few points
  CHECK_THROWS_AS(fit_sinusoid(c.xs, c.ys), fit_error);

  // Fewer than ~3/4 of a cycle across the span cannot pin a period.
  const Curve s = sample(0.5, 0.4, 20.0, 0.8);  // 0.25 cycles over 80 mm
  CHECK_THROWS_AS(fit_sinusoid(s.xs, s.ys), fit_error);

  const Curve g = sample(0.5, 0.4, 200.0, 0.0);
  std::vector<double> bad_sigmas(g.xs.size(), 1.0);
  bad_sigmas[3] = 0.0;
  CHECK_THROWS_AS(fit_sinusoid(g.xs, g.ys, bad_sigmas), fit_error);
}

TEST_CASE("extract_period rejects a non-positive frequency") {
  FitResult f;
  f.k = 0.0;
  CHECK_THROWS_AS(extract_period(f), fit_error);
}

TEST_CASE("linear fit is exact on a line and propagates weights") {
  std::vector<double> xs{1, 2, 3, 4, 5}, ys;
  for (double x : xs) ys.push_back(2.5 * x - 0.7);
  const LinearFit f = linear_fit(xs, ys);
  CHECK(f.slope == Approx(2.5).epsilon(1e-12));
  CHECK(f.intercept == Approx(-0.7).epsilon(1e-12));

  // With explicit errors the parameter errors follow the weights: doubling
  // every sigma doubles both parameter errors.
  std::vector<double> e1(xs.size(), 0.1), e2(xs.size(), 0.2);
  ys[2] += 0.05;  // break exactness so chi2 > 0
  const LinearFit a = linear_fit(xs, ys, e1);
  const LinearFit b = linear_fit(xs, ys, e2);
  CHECK(b.slope_err == Approx(2 * a.slope_err).epsilon(1e-12));
  CHECK(b.intercept_err == Approx(2 * a.intercept_err).epsilon(1e-12));
  CHECK(a.reduced_chi2 == Approx(4 * b.reduced_chi2).epsilon(1e-12));

  CHECK_THROWS_AS(linear_fit({1, 2}, {1, 2}), fit_error);
  CHECK_THROWS_AS(linear_fit({1, 1, 1}, {1, 2, 3}), fit_error);
}

TEST_CASE("fitted k scales linearly with the underlying field") {
  // k = 2*gamma*B/v: feeding curves generated at proportional k values must
  // return proportional fits (the analysis chain preserves the linear law).
  const double k0 = 150.0;
  std::vector<double> fitted;
  for (const double scale : {1.0, 1.1, 1.2, 1.3}) {
    const Curve c = sample(0.5, 0.4, k0 * scale, 0.2);
    fitted.push_back(fit_sinusoid(c.xs, c.ys).k);
  }
  for (std::size_t i = 0; i < fitted.size(); ++i) {
    CHECK(fitted[i] == Approx(k0 * (1.0 + 0.1 * i)).epsilon(1e-9));
  }
}
