#include "npd/heat.hpp"

#include "npd/diagnostics.hpp"
#include "npd/spectral.hpp"

namespace npd {

HeatBaseline HeatBaseline::from_state(const NpdState& state) {
  return {state.concentrations, state.params.diffusivity, state.time};
}

SpectralField heat_evolve(const SpectralField& initial, double diffusivity, double t) {
  if (t < 0.0) throw std::invalid_argument("heat_evolve: t must be non-negative");
  if (t == 0.0) return initial;
  const RealArray factor = (-diffusivity * t * initial.grid->k_squared()).exp();
  return {initial.grid, initial.coeffs * factor.cast<Complex>()};
}

std::vector<SpectralField> heat_evolve(const HeatBaseline& baseline, double t) {
  std::vector<SpectralField> out;
  out.reserve(baseline.initial.size());
  for (const auto& c : baseline.initial) out.push_back(heat_evolve(c, baseline.diffusivity, t));
  return out;
}

std::vector<std::vector<double>> sharpness_norms(const NpdState& state,
                                                 const HeatBaseline& baseline, int k_max) {
  if (k_max < 0 || k_max > 3) throw std::invalid_argument("sharpness_norms: k_max must be in [0, 3]");
  if (baseline.initial.size() != state.concentrations.size()) {
    throw GridMismatch("sharpness_norms: species count differs from the baseline");
  }
  const auto heat = heat_evolve(baseline, state.time - baseline.initial_time);
  std::vector<std::vector<double>> out(state.concentrations.size());
  for (std::size_t i = 0; i < heat.size(); ++i) {
    require_same_grid(state.concentrations[i].grid, heat[i].grid);
    const SpectralField diff = state.concentrations[i] - heat[i];
    for (int k = 0; k <= k_max; ++k) out[i].push_back(sobolev_norm(diff, k));
  }
  return out;
}

}  // namespace npd
