#include "npd/rates.hpp"

#include <Eigen/Dense>

#include <cmath>
#include <vector>

namespace npd {
namespace {

RateFit least_squares(std::span<const double> t, std::span<const double> y,
                      const FitWindow& window, FitModel model) {
  if (t.size() != y.size()) throw FitError("fit: t and y differ in length");
  if (!(window.t_start < window.t_end)) throw FitError("fit: window start must precede its end");
  std::vector<double> xs, ys;
  for (std::size_t i = 0; i < t.size(); ++i) {
    if (t[i] < window.t_start || t[i] > window.t_end) continue;
    if (!std::isfinite(y[i])) throw FitError("fit: non-finite sample in window");
    if (model == FitModel::power_law) {
      if (!(y[i] > 0.0)) throw FitError("fit_power_law: non-positive sample in window");
      ys.push_back(std::log(y[i]));
    } else {
      ys.push_back(y[i]);
    }
    xs.push_back(std::log1p(t[i]));
  }
  const auto n = static_cast<Eigen::Index>(xs.size());
  if (n < window.min_points || n < 2) {
    throw FitError("fit: window holds " + std::to_string(n) + " samples, need " +
                   std::to_string(window.min_points));
  }
  Eigen::MatrixXd design(n, 2);
  const Eigen::VectorXd rhs = Eigen::Map<const Eigen::VectorXd>(ys.data(), n);
  design.col(0).setOnes();
  design.col(1) = Eigen::Map<const Eigen::VectorXd>(xs.data(), n);
  const Eigen::Vector2d coef = design.colPivHouseholderQr().solve(rhs);
  const Eigen::VectorXd resid = design * coef - rhs;

  RateFit fit;
  fit.prefactor_log = coef(0);
  fit.exponent = coef(1);
  fit.rms_residual = std::sqrt(resid.squaredNorm() / static_cast<double>(n));
  fit.points = static_cast<int>(n);
  fit.window = window;
  fit.model = model;
  return fit;
}

}  // namespace

FitWindow FitWindow::default_for(double run_t_end) {
  return {0.3 * run_t_end, 0.9 * run_t_end, 5};
}

RateFit fit_power_law(std::span<const double> t, std::span<const double> y,
                      const FitWindow& window) {
  return least_squares(t, y, window, FitModel::power_law);
}

RateFit fit_log_law(std::span<const double> t, std::span<const double> y,
                    const FitWindow& window) {
  return least_squares(t, y, window, FitModel::log_law);
}

Verdict verdict(const RateFit& fit, double predicted, double tolerance, VerdictMode mode) {
  if (!(tolerance > 0.0)) throw std::invalid_argument("verdict: tolerance must be positive");
  Verdict v{false, fit.exponent, predicted, tolerance, mode};
  switch (mode) {
    case VerdictMode::two_sided:
      v.pass = std::abs(fit.exponent - predicted) <= tolerance;
      break;
    case VerdictMode::upper_bound:
      v.pass = fit.exponent <= predicted + tolerance;
      break;
    case VerdictMode::lower_bound:
      v.pass = fit.exponent >= predicted - tolerance;
      break;
  }
  return v;
}

std::string to_string(VerdictMode mode) {
  switch (mode) {
    case VerdictMode::two_sided: return "two-sided";
    case VerdictMode::upper_bound: return "upper-bound";
    case VerdictMode::lower_bound: return "lower-bound";
  }
  return "?";
}

VerdictMode verdict_mode_from_string(const std::string& s) {
  if (s == "two-sided") return VerdictMode::two_sided;
  if (s == "upper-bound") return VerdictMode::upper_bound;
  if (s == "lower-bound") return VerdictMode::lower_bound;
  throw std::invalid_argument("unknown verdict mode '" + s + "'");
}

std::string to_string(FitModel model) {
  return model == FitModel::power_law ? "power-law" : "log-law";
}

}  // namespace npd
