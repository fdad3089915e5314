#pragma once

#include <span>
#include <stdexcept>
#include <string>

namespace npd {

class FitError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct FitWindow {
  double t_start = 0.0;
  double t_end = 0.0;
  int min_points = 5;

  /// Late enough to skip transients, early enough to avoid periodic-image
  /// contamination: [0.3, 0.9] * t_end of the run.
  static FitWindow default_for(double run_t_end);
};

enum class FitModel { power_law, log_law };

struct RateFit {
  /// Slope: the power-law exponent, or the coefficient of log(1 + t).
  double exponent = 0.0;
  /// Intercept (log prefactor for power laws, offset for log laws).
  double prefactor_log = 0.0;
  double rms_residual = 0.0;
  int points = 0;
  FitWindow window;
  FitModel model = FitModel::power_law;
};

/// Least squares of log y against log(t + 1) over samples with t in the window.
RateFit fit_power_law(std::span<const double> t, std::span<const double> y,
                      const FitWindow& window);

/// Least squares of y against log(1 + t).
RateFit fit_log_law(std::span<const double> t, std::span<const double> y,
                    const FitWindow& window);

enum class VerdictMode { two_sided, upper_bound, lower_bound };

struct Verdict {
  bool pass = false;
  double measured = 0.0;
  double predicted = 0.0;
  double tolerance = 0.0;
  VerdictMode mode = VerdictMode::two_sided;
};

/// two_sided: |measured - predicted| <= tol; upper_bound: measured <= predicted
/// + tol; lower_bound: measured >= predicted - tol.
Verdict verdict(const RateFit& fit, double predicted, double tolerance, VerdictMode mode);

std::string to_string(VerdictMode mode);
VerdictMode verdict_mode_from_string(const std::string& s);
std::string to_string(FitModel model);

}  // namespace npd
