#pragma once

#include "npd/model.hpp"
#include "npd/spectral.hpp"

#include <cmath>
#include <numbers>
#include <random>

namespace npd::testing {

inline constexpr double kPi = std::numbers::pi;

inline GridPtr grid(double length, int n) { return Grid::make({length, n, 2.0 / 3.0}); }

/// Random real field whose modes all satisfy |k_j| <= cutoff (Nyquist excluded).
inline SpectralField random_band_limited(const GridPtr& g, std::mt19937_64& rng, int cutoff,
                                         bool mean_zero = false) {
  std::normal_distribution<double> normal;
  RealField f = RealField::zeros(g);
  for (Eigen::Index i = 0; i < g->real_size(); ++i) f.values(i) = normal(rng);
  SpectralField s = forward_transform(f);
  for (Eigen::Index i = 0; i < g->spectral_size(); ++i) {
    const auto k = g->wavevector(i);
    if (std::abs(k[0]) > cutoff || std::abs(k[1]) > cutoff || std::abs(k[2]) > cutoff ||
        k[0] == -g->n() / 2 || k[1] == -g->n() / 2 || k[2] == -g->n() / 2) {
      s.coeffs(i) = 0.0;
    }
  }
  if (mean_zero) s.coeffs(0) = 0.0;
  return s;
}

inline RealField cosine_mode(const GridPtr& g, double amplitude, int axis) {
  const double l = g->length();
  return sample(g, [=](double x, double y, double z) {
    const double c[3] = {x, y, z};
    return amplitude * std::cos(2.0 * kPi * c[axis] / l);
  });
}

/// Two opposite-signed Gaussian species displaced along x.
inline NpdState dipole(const GridPtr& g, double amplitude, double width, double offset,
                       double diffusivity = 1.0) {
  InitialCondition ic;
  ic.diffusivity = diffusivity;
  ic.species = {{1.0, {{amplitude, {offset, 0.0, 0.0}, width}}},
                {-1.0, {{amplitude, {-offset, 0.0, 0.0}, width}}}};
  return make_initial_state(ic, g).state;
}

inline double relative_difference(const SpectralField& a, const SpectralField& b) {
  const double scale = std::sqrt(l2_norm_squared(a));
  return std::sqrt(l2_norm_squared(a - b)) / (scale > 0.0 ? scale : 1.0);
}

}  // namespace npd::testing
