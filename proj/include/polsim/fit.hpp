#pragma once

#include <vector>

namespace polsim {

// Least-squares parameters of y = offset + amplitude * cos(k*x + phase).
struct FitResult {
  double offset = 0.0;
  double amplitude = 0.0;  // >= 0
  double k = 0.0;          // rad per unit x, > 0
  double phase = 0.0;      // rad, in (-pi, pi]
  double offset_err = 0.0;
  double amplitude_err = 0.0;
  double k_err = 0.0;
  double phase_err = 0.0;
  double reduced_chi2 = 0.0;  // SSR / (n - 4); weighted when sigmas given
  double contrast = 0.0;      // amplitude / offset (NaN when offset <= 0)
  std::size_t n_points = 0;
};

// Fit a sinusoid to (xs, ys), optionally weighted by per-point standard
// deviations. Strategy: scan a k grid at resolution 1/4 cycle over the span
// (from 3/4 of a cycle per span up to the Nyquist rate of the closest point
// pair), solve the linear subproblem (offset, in-phase, quadrature) at each k,
// then refine the best k by golden-section on the residual. Parameter errors
// come from the Jacobian at the optimum; unweighted fits are scaled by the
// residual variance.
//
// Errors: fewer than 8 points; span shorter than 3/4 of the fitted period;
// amplitude consistent with zero at two standard errors ("no oscillation
// detected").
FitResult fit_sinusoid(const std::vector<double>& xs,
                       const std::vector<double>& ys,
                       const std::vector<double>& sigmas = {});

struct PeriodResult {
  double period = 0.0;  // 2*pi/k, same unit as x
  double period_err = 0.0;
};

// Propagate the fitted k and its error to a period. k <= 0 is an error.
PeriodResult extract_period(const FitResult& fit);

struct LinearFit {
  double slope = 0.0;
  double intercept = 0.0;
  double slope_err = 0.0;
  double intercept_err = 0.0;
  double reduced_chi2 = 0.0;  // SSR / (n - 2)
};

// Weighted straight-line fit; needs >= 3 points and at least two distinct xs.
LinearFit linear_fit(const std::vector<double>& xs,
                     const std::vector<double>& ys,
                     const std::vector<double>& y_errors = {});

}  // namespace polsim
