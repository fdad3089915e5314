#pragma once

#include "npd/model.hpp"

#include <vector>

namespace npd {

/// Initial data of a paired NPD run, propagated by the exact heat semigroup.
struct HeatBaseline {
  std::vector<SpectralField> initial;
  double diffusivity = 1.0;
  double initial_time = 0.0;

  static HeatBaseline from_state(const NpdState& state);
};

/// Coefficients c(k, t) = c(k, 0) exp(-4 pi^2 D |k|^2 t / L^2); t is measured
/// from the baseline's initial time.
std::vector<SpectralField> heat_evolve(const HeatBaseline& baseline, double t);
SpectralField heat_evolve(const SpectralField& initial, double diffusivity, double t);

/// ||Lambda^k (c_i - heat_i)||_2^2 for k = 0..k_max, indexed [species][k].
std::vector<std::vector<double>> sharpness_norms(const NpdState& state,
                                                 const HeatBaseline& baseline, int k_max);

}  // namespace npd
