#pragma once

#include "npd/heat.hpp"
#include "npd/model.hpp"

#include <array>
#include <limits>
#include <optional>
#include <vector>

namespace npd {

class InvalidStateError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Squared homogeneous Sobolev norm ||Lambda^k c||_2^2 by Parseval. The zero
/// mode counts only for k = 0; k < 0 requires a mean-zero field.
double sobolev_norm(const SpectralField& c, double k);

inline constexpr double kInfinity = std::numeric_limits<double>::infinity();

/// Quadrature L^p norm for p in {1, 2, 3, 4, 6, inf}.
double lp_norm(const RealField& c, double p);
/// Pointwise Euclidean magnitude of a vector field.
RealField magnitude(const RealVector& v);

/// Integral of c log c over the box, or over |x| <= radius around the box
/// center. Samples at or below 1e-30 * max(c) contribute zero. Throws
/// InvalidStateError if any sample is below -positivity_tolerance.
double entropy(const RealField& c, double positivity_tolerance,
               std::optional<double> region_radius = std::nullopt);

/// exp(-2 E / (3 ||c||_1)).
double exp_entropy(const RealField& c, double positivity_tolerance);

/// Integral of |x|^6 c^2 with |x| the minimum-image distance to the box center.
double moment6(const RealField& c);

struct IdentityResiduals {
  /// <d_t rho, Lambda^-2 rho> + D||rho||^2 + D z^2 ||sqrt(sigma) grad phi||^2 + ||u||^2.
  double energy = 0.0;
  /// (1/2) d_t(||rho||^2 + z^2 ||sigma||^2) + D||grad rho||^2 + D z^2 ||grad sigma||^2
  ///   + D z^2 ||rho sqrt(sigma)||^2.
  double l2 = 0.0;
};

/// Relative residuals of the two exact energy identities, each normalized by
/// the sum of the absolute values of its terms (0 when all terms vanish).
IdentityResiduals identity_residuals(const NpdState& state,
                                     const std::vector<SpectralField>& tendencies);

/// Largest |sigma_hat(xi)| / (C (||sigma_0||_1 + |xi| sqrt(t))) over all modes,
/// where sigma_hat is the continuum transform L^3 * coeff and |xi| = |k| / L.
double shell_bound_check(const SpectralField& sigma, double t, double constant,
                         double sigma0_l1);

/// Ratios of ||grad phi|| to the right-hand sides of the four elliptic
/// estimates for -Laplacian(phi) = rho:
///   ||grad phi||_2   / (||rho||_1^{2/3} ||rho||_2^{1/3})
///   ||grad phi||_6   / ||rho||_2
///   ||grad phi||_inf / (||grad phi||_2^{1/4} ||rho||_2^{3/4} + ||rho||_4)
///   ||grad phi||_inf / (||rho||_2 + ||grad rho||_2)
/// All zero when rho vanishes.
std::array<double, 4> elliptic_ratios(const SpectralField& rho);

struct DiagOptions {
  int k_max = 2;
  double local_radius = 0.0;  // <= 0 selects L / 8
  bool moments = true;
  bool residuals = true;
  double positivity_tolerance = kInfinity;
  double shell_constant = 1.1;
  double sigma0_l1 = 0.0;
  const HeatBaseline* baseline = nullptr;
};

inline constexpr std::array<double, 5> kSigmaNormOrders{1.0, 2.0, 3.0, 4.0, 6.0};

struct DiagRecord {
  double t = 0.0;
  std::vector<double> mass;
  double charge_total = 0.0;
  std::vector<std::vector<double>> sobolev_sq;  // [species][k], k = 0..k_max
  std::array<double, 5> sigma_lp{};             // orders in kSigmaNormOrders
  double rho_l2sq = 0.0;
  double u_l2sq = 0.0;
  double u_inf = 0.0;
  double gradphi_l2 = 0.0;
  double gradphi_inf = 0.0;
  std::vector<double> entropy;
  double entropy_total = 0.0;
  std::vector<double> exp_entropy;
  std::vector<double> moment6;
  std::vector<double> local_entropy;
  std::vector<double> min_c;
  double residual_energy = 0.0;
  double residual_l2 = 0.0;
  double shell_ratio_max = 0.0;
  std::array<double, 4> elliptic{};
  std::vector<std::vector<double>> sharpness;  // [species][k], empty without a baseline
};

/// Measures every diagnostic on one state snapshot.
DiagRecord measure(const NpdState& state, const DiagOptions& options);

}  // namespace npd
