#pragma once

#include "npd/grid.hpp"

#include <optional>
#include <string>
#include <vector>

namespace npd {

class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Valences z_i and the common diffusivity D. The dynamics assume equal
/// |z_i|; `allow_unequal_valence` only relaxes the load-time check.
struct SpeciesParams {
  std::vector<double> valences;
  double diffusivity = 1.0;
  bool allow_unequal_valence = false;

  int count() const { return static_cast<int>(valences.size()); }
  /// Common |z_i| (the first species' magnitude).
  double valence_magnitude() const;
  /// Throws ConfigError on an empty species list, D <= 0 or unequal |z_i|.
  void validate() const;
};

struct NpdState {
  double time = 0.0;
  std::vector<SpectralField> concentrations;
  SpeciesParams params;

  const GridPtr& grid() const { return concentrations.front().grid; }
  int species_count() const { return static_cast<int>(concentrations.size()); }
};

/// Quantities slaved to the concentrations: rho = sum z_i c_i, sigma = sum c_i,
/// -Laplacian(phi) = rho, and the Darcy velocity u = -P(rho grad phi).
struct DerivedFields {
  SpectralField rho;
  SpectralField sigma;
  SpectralField phi;
  SpectralVector u;
  std::optional<SpectralField> pressure;
};

DerivedFields derive_fields(const NpdState& state, bool with_pressure = false);

/// Full tendency dc_i/dt = -div(u c_i) + D Laplacian(c_i) + z_i D div(c_i grad phi).
std::vector<SpectralField> compute_rhs(const NpdState& state);

/// Everything except the diffusion term, plus grid extrema observed while
/// assembling it (the integrator uses these for its guards).
struct NonlinearTendency {
  std::vector<SpectralField> tendency;
  double min_concentration = 0.0;
  double max_concentration = 0.0;
  double max_speed = 0.0;
  double max_grad_phi = 0.0;
};

NonlinearTendency nonlinear_tendency(const NpdState& state);

/// derive_fields and compute_rhs from one shared assembly, plus the
/// physical-space fields built along the way.
struct Evaluation {
  DerivedFields fields;
  std::vector<SpectralField> rhs;
  std::vector<RealField> concentrations;
  RealVector grad_phi;
  RealVector u;
};

Evaluation evaluate(const NpdState& state);

struct GaussianBump {
  double amplitude = 0.0;  // peak value
  std::array<double, 3> center{0.0, 0.0, 0.0};
  double width = 1.0;  // standard deviation

  bool operator==(const GaussianBump&) const = default;
};

struct SpeciesSpec {
  double valence = 0.0;
  std::vector<GaussianBump> bumps;

  bool operator==(const SpeciesSpec&) const = default;
};

struct InitialCondition {
  std::vector<SpeciesSpec> species;
  double diffusivity = 1.0;
  bool allow_unequal_valence = false;
};

struct InitialState {
  NpdState state;
  /// Factor applied to the last species to make the total charge vanish.
  double neutralization_factor = 1.0;
  std::vector<std::string> warnings;
};

/// Samples the Gaussian sums (minimum-image distance to each center) and
/// rescales the last species so that the integral of rho is zero.
InitialState make_initial_state(const InitialCondition& ic, const GridPtr& grid);

/// Throws ConfigError if the total charge cannot be neutralized by a positive
/// rescaling of the last species.
double neutralization_factor(const std::vector<double>& valences,
                             const std::vector<double>& masses);

}  // namespace npd
