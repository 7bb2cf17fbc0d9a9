#include "polsim/fit.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>

#include "polsim/errors.hpp"

namespace polsim {
namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kTwoPi = 2 * std::numbers::pi;

struct Series {
  Eigen::VectorXd x;
  Eigen::VectorXd y;
  Eigen::VectorXd w;  // 1/sigma per point (1 when unweighted)
  bool weighted = false;
  double span = 0.0;
  double min_spacing = 0.0;  // smallest nonzero gap between sorted xs
};

Series make_series(const std::vector<double>& xs, const std::vector<double>& ys,
                   const std::vector<double>& sigmas) {
  if (xs.size() != ys.size()) {
    throw fit_error("fit: xs and ys differ in length");
  }
  if (!sigmas.empty() && sigmas.size() != xs.size()) {
    throw fit_error("fit: sigmas length does not match the data");
  }
  Series s;
  const auto n = static_cast<Eigen::Index>(xs.size());
  s.x = Eigen::Map<const Eigen::VectorXd>(xs.data(), n);
  s.y = Eigen::Map<const Eigen::VectorXd>(ys.data(), n);
  s.w = Eigen::VectorXd::Ones(n);
  if (!sigmas.empty()) {
    s.weighted = true;
    for (Eigen::Index i = 0; i < n; ++i) {
      if (sigmas[static_cast<std::size_t>(i)] <= 0) {
        throw fit_error("fit: sigmas must be positive");
      }
      s.w[i] = 1.0 / sigmas[static_cast<std::size_t>(i)];
    }
  }
  std::vector<double> sorted(xs);
  std::sort(sorted.begin(), sorted.end());
  s.span = sorted.back() - sorted.front();
  s.min_spacing = std::numeric_limits<double>::infinity();
  for (std::size_t i = 1; i < sorted.size(); ++i) {
    const double d = sorted[i] - sorted[i - 1];
    if (d > 0) s.min_spacing = std::min(s.min_spacing, d);
  }
  return s;
}

struct LinearSolve {
  double c = 0.0;  // offset
  double a = 0.0;  // in-phase amplitude (cos)
  double b = 0.0;  // quadrature amplitude (sin)
  double ssr = std::numeric_limits<double>::infinity();
};

// For fixed k the model y = c + a cos(kx) + b sin(kx) is linear: solve the
// weighted normal equations and report the weighted residual.
LinearSolve solve_at_k(const Series& s, double k) {
  const Eigen::Index n = s.x.size();
  Eigen::MatrixXd m(n, 3);
  m.col(0) = s.w;
  m.col(1) = (k * s.x.array()).cos() * s.w.array();
  m.col(2) = (k * s.x.array()).sin() * s.w.array();
  const Eigen::VectorXd rhs = s.y.array() * s.w.array();
  const Eigen::Vector3d p =
      (m.transpose() * m).ldlt().solve(m.transpose() * rhs);
  LinearSolve out;
  out.c = p[0];
  out.a = p[1];
  out.b = p[2];
  out.ssr = (m * p - rhs).squaredNorm();
  return out;
}

}  // namespace

FitResult fit_sinusoid(const std::vector<double>& xs,
                       const std::vector<double>& ys,
                       const std::vector<double>& sigmas) {
  if (xs.size() < 8) {
    throw fit_error("fit_sinusoid: needs at least 8 points");
  }
  const Series s = make_series(xs, ys, sigmas);
  if (s.span <= 0) {
    throw fit_error("fit_sinusoid: all xs are identical");
  }

  // Candidate fringe frequencies: 3/4 cycle over the span up to Nyquist,
  // sampled every quarter cycle per span.
  const double k_lo = kTwoPi * 0.75 / s.span;
  const double k_hi = std::isfinite(s.min_spacing)
                          ? kPi / s.min_spacing
                          : k_lo * 4;
  if (k_hi <= k_lo) {
    throw fit_error("fit_sinusoid: scan span too short to bracket a period");
  }
  const double dk = kTwoPi / (4.0 * s.span);
  double best_k = k_lo;
  double best_ssr = std::numeric_limits<double>::infinity();
  for (double k = k_lo; k <= k_hi + dk / 2; k += dk) {
    const double ssr = solve_at_k(s, k).ssr;
    if (ssr < best_ssr) {
      best_ssr = ssr;
      best_k = k;
    }
  }

  // Golden-section refinement of SSR(k) on the bracketing grid cell.
  double lo = std::max(k_lo, best_k - dk);
  double hi = std::min(k_hi, best_k + dk);
  const double gr = (std::sqrt(5.0) - 1.0) / 2.0;
  double k1 = hi - gr * (hi - lo);
  double k2 = lo + gr * (hi - lo);
  double f1 = solve_at_k(s, k1).ssr;
  double f2 = solve_at_k(s, k2).ssr;
  for (int it = 0; it < 200 && (hi - lo) > 1e-14 * best_k; ++it) {
    if (f1 < f2) {
      hi = k2;
      k2 = k1;
      f2 = f1;
      k1 = hi - gr * (hi - lo);
      f1 = solve_at_k(s, k1).ssr;
    } else {
      lo = k1;
      k1 = k2;
      f1 = f2;
      k2 = lo + gr * (hi - lo);
      f2 = solve_at_k(s, k2).ssr;
    }
  }
  const double k_fit = (lo + hi) / 2;
  if (k_fit <= k_lo * (1.0 + 1e-9)) {
    std::ostringstream os;
    os << "fit_sinusoid: scan span " << s.span
       << " covers less than three quarters of the fitted period "
       << kTwoPi / k_fit << "; extend the sweep";
    throw fit_error(os.str());
  }
  const LinearSolve lin = solve_at_k(s, k_fit);

  FitResult r;
  r.n_points = xs.size();
  r.k = k_fit;
  r.offset = lin.c;
  r.amplitude = std::hypot(lin.a, lin.b);
  // c + a cos(kx) + b sin(kx) = c + A cos(kx + phase) with A cos(phase) = a,
  // A sin(phase) = -b.
  r.phase = std::atan2(-lin.b, lin.a);
  if (r.phase <= -kPi) r.phase = kPi;

  // Errors from the Jacobian of (offset, amplitude, k, phase) at the optimum.
  const Eigen::Index n = s.x.size();
  Eigen::MatrixXd jac(n, 4);
  for (Eigen::Index i = 0; i < n; ++i) {
    const double u = k_fit * s.x[i] + r.phase;
    jac(i, 0) = s.w[i];
    jac(i, 1) = std::cos(u) * s.w[i];
    jac(i, 2) = -r.amplitude * s.x[i] * std::sin(u) * s.w[i];
    jac(i, 3) = -r.amplitude * std::sin(u) * s.w[i];
  }
  Eigen::Matrix4d cov = (jac.transpose() * jac).inverse();
  const double dof = static_cast<double>(n) - 4.0;
  r.reduced_chi2 = dof > 0 ? lin.ssr / dof : 0.0;
  if (!s.weighted) cov *= r.reduced_chi2;  // scale by residual variance
  r.offset_err = std::sqrt(std::max(0.0, cov(0, 0)));
  r.amplitude_err = std::sqrt(std::max(0.0, cov(1, 1)));
  r.k_err = std::sqrt(std::max(0.0, cov(2, 2)));
  r.phase_err = std::sqrt(std::max(0.0, cov(3, 3)));
  r.contrast = r.offset > 0 ? r.amplitude / r.offset
                            : std::numeric_limits<double>::quiet_NaN();

  const double scale = s.y.cwiseAbs().maxCoeff();
  if (r.amplitude < 2 * r.amplitude_err + 1e-12 * scale) {
    throw fit_error(
        "fit_sinusoid: no oscillation detected (amplitude consistent with "
        "zero at two standard errors)");
  }
  return r;
}

PeriodResult extract_period(const FitResult& fit) {
  if (fit.k <= 0) throw fit_error("extract_period: fitted k must be positive");
  PeriodResult p;
  p.period = kTwoPi / fit.k;
  p.period_err = p.period * (fit.k_err / fit.k);
  return p;
}

LinearFit linear_fit(const std::vector<double>& xs,
                     const std::vector<double>& ys,
                     const std::vector<double>& y_errors) {
  if (xs.size() < 3) throw fit_error("linear_fit: needs at least 3 points");
  const Series s = make_series(xs, ys, y_errors);
  if (s.span <= 0) throw fit_error("linear_fit: all xs are identical");

  const Eigen::Index n = s.x.size();
  Eigen::MatrixXd m(n, 2);
  m.col(0) = s.x.array() * s.w.array();
  m.col(1) = s.w;
  const Eigen::VectorXd rhs = s.y.array() * s.w.array();
  const Eigen::Vector2d p =
      (m.transpose() * m).ldlt().solve(m.transpose() * rhs);
  const double ssr = (m * p - rhs).squaredNorm();

  Eigen::Matrix2d cov = (m.transpose() * m).inverse();
  LinearFit out;
  out.slope = p[0];
  out.intercept = p[1];
  out.reduced_chi2 = ssr / (static_cast<double>(n) - 2.0);
  if (!s.weighted) cov *= out.reduced_chi2;
  out.slope_err = std::sqrt(std::max(0.0, cov(0, 0)));
  out.intercept_err = std::sqrt(std::max(0.0, cov(1, 1)));
  return out;
}

}  // namespace polsim
