#pragma once

#include "npd/grid.hpp"
#include "npd/model.hpp"
#include "npd/rates.hpp"

#include <array>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

namespace npd::io {

/// One predicted rate to test against a series column. `column` may contain
/// "{i}", which expands to every species index (1-based).
struct ClaimSpec {
  std::string id;
  std::string column;
  FitModel model = FitModel::power_law;
  double predicted = 0.0;
  double tolerance = 0.1;
  VerdictMode mode = VerdictMode::two_sided;
  /// Multiply predicted and tolerance by the total initial mass.
  bool scale_by_initial_mass = false;

  bool operator==(const ClaimSpec&) const = default;
};

/// Decay, growth and comparison rates checked by `fit` when no claims are given.
std::vector<ClaimSpec> default_claims();

struct FitSpec {
  /// Unset selects [0.3, 0.9] * t_end of the series.
  std::optional<std::array<double, 2>> window;
  int min_points = 5;
  std::vector<ClaimSpec> claims;

  bool operator==(const FitSpec&) const = default;
};

struct StepperSettings {
  std::optional<double> dt;  // unset means "auto": from cfl_dt
  double dt_max = 0.25;
  double t_end = 1.0;
  double cfl_safety = 0.5;
  /// Relative to the largest initial concentration.
  double positivity_tolerance = 1e-8;

  bool operator==(const StepperSettings&) const = default;
};

struct DiagnosticsSettings {
  int k_max = 2;
  double cadence = 0.25;
  double local_radius = 0.0;  // 0 selects L / 8
  bool moments = true;
  bool residuals = true;
  double shell_constant = 1.1;

  bool operator==(const DiagnosticsSettings&) const = default;
};

struct OutputSettings {
  std::string directory = "out";
  std::vector<double> checkpoint_times;

  bool operator==(const OutputSettings&) const = default;
};

struct RunConfig {
  GridSpec grid;
  double diffusivity = 1.0;
  bool allow_unequal_valence = false;
  std::vector<SpeciesSpec> species;
  StepperSettings stepper;
  DiagnosticsSettings diagnostics;
  FitSpec fits;
  OutputSettings output;
  std::int64_t seed = 0;

  InitialCondition initial_condition() const;
};

bool operator==(const RunConfig& a, const RunConfig& b);

/// Parses and validates a JSON configuration. Unknown keys, type mismatches
/// and invariant violations raise ConfigError naming the key path.
RunConfig parse_config(const std::string& text);
RunConfig load_config(const std::filesystem::path& path);

/// Normalized JSON with every default filled in; parse_config of the result
/// reproduces the same RunConfig.
std::string dump_config(const RunConfig& config);

/// FNV-1a 64-bit hash of the normalized dump, as 16 hex digits.
std::string config_hash(const RunConfig& config);

FitSpec parse_fit_spec(const std::string& text);
FitSpec load_fit_spec(const std::filesystem::path& path);
std::string dump_fit_spec(const FitSpec& spec);

std::string read_text_file(const std::filesystem::path& path);

}  // namespace npd::io
