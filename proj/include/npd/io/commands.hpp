#pragma once

#include "npd/io/config.hpp"
#include "npd/io/series.hpp"
#include "npd/rates.hpp"

#include <filesystem>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

namespace npd::io {

inline constexpr const char* kCodeVersion = "1.0.0";

/// Default output root when --out is not given.
inline constexpr const char* kOutputRootEnv = "NPD_OUTPUT_ROOT";

enum ExitCode : int { kExitOk = 0, kExitGateFailed = 1, kExitConfigError = 2, kExitAborted = 3 };

struct CommandOptions {
  /// Empty: $NPD_OUTPUT_ROOT/<output.directory>, or output.directory alone.
  std::filesystem::path out_dir;
  int threads = 0;  // 0 = hardware concurrency
  /// One FFT thread and FFTW_ESTIMATE plans, so repeated runs are bitwise identical.
  bool deterministic = false;
  std::optional<std::filesystem::path> resume;
};

std::filesystem::path resolve_output_dir(const RunConfig& config, const CommandOptions& options);

/// Time step for a run: the configured dt, or cfl_dt reduced so that it
/// divides the diagnostics cadence. Throws ConfigError when an explicit dt
/// does not divide the cadence.
double choose_dt(const RunConfig& config, const NpdState& state);

/// Files written by `run` into the output directory.
struct RunFiles {
  static constexpr const char* series = "series.csv";
  static constexpr const char* summary = "summary.json";
  static constexpr const char* failure = "failure.json";
  static constexpr const char* config = "config.json";
  static constexpr const char* initial = "initial.ckpt";
  static constexpr const char* final_state = "final.ckpt";
};

/// Name of the checkpoint written at time t: checkpoint_t<t>.ckpt.
std::string checkpoint_name(double t);

struct ClaimResult {
  std::string id;
  std::string column;
  bool skipped = false;
  std::string note;
  RateFit fit;
  Verdict verdict;
};

/// Fits and judges every claim; "{i}" columns expand per species.
std::vector<ClaimResult> evaluate_claims(const SeriesTable& table, const FitSpec& spec);

/// Integrates the configured scenario, writing series.csv (+ meta), checkpoints,
/// summary.json and, on abort, failure.json.
int cmd_run(const RunConfig& config, const CommandOptions& options, std::ostream& log);

/// Appends heat_hksq_<k>_c<i> columns (norms of the heat-evolved initial data at
/// each recorded t) and writes <series stem>_baseline.csv next to the series.
int cmd_baseline(const RunConfig& config, const std::filesystem::path& series,
                 std::ostream& log);

/// Writes a JSON report and prints a verdict table; nonzero if any claim fails.
int cmd_fit(const std::filesystem::path& series, const FitSpec& spec,
            const std::filesystem::path& report, std::ostream& log);

/// Short burst: identity residuals, mass and charge drift, self-convergence
/// order and elliptic ratios; nonzero if any gate fails.
int cmd_check(const RunConfig& config, const CommandOptions& options, std::ostream& log);

/// Emits whitespace-separated data extracts and matplotlib scripts.
int cmd_plot(const std::filesystem::path& series, const std::filesystem::path& out_dir,
             std::ostream& log);

}  // namespace npd::io
