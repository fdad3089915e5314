#include "npd/io/commands.hpp"
#include "npd/io/config.hpp"

#include <CLI11.hpp>

#include <iostream>

namespace fs = std::filesystem;

int main(int argc, char** argv) {
  CLI::App app{"Pseudo-spectral Nernst-Planck-Darcy simulator"};
  app.require_subcommand(1);

  std::string config_path;
  std::string out_dir;
  int threads = 0;
  bool deterministic = false;
  std::string resume;
  std::string series;
  std::string fit_spec;
  std::string report;

  const auto add_common = [&](CLI::App* cmd) {
    cmd->add_option("--config", config_path, "Run configuration (JSON)")->required()->check(CLI::ExistingFile);
    cmd->add_option("--out", out_dir, "Output directory (default: $NPD_OUTPUT_ROOT/<output.directory>)");
    cmd->add_option("--threads", threads, "FFT threads, 0 = all cores")->check(CLI::NonNegativeNumber);
    cmd->add_flag("--deterministic", deterministic, "Single thread and fixed FFT plans");
  };

  CLI::App* run = app.add_subcommand("run", "Integrate a scenario and record diagnostics");
  add_common(run);
  run->add_option("--resume", resume, "Continue from a checkpoint")->check(CLI::ExistingFile);

  CLI::App* baseline = app.add_subcommand("baseline", "Append heat-baseline norms to a series");
  baseline->add_option("--config", config_path, "Run configuration (JSON)")->required()->check(CLI::ExistingFile);
  baseline->add_option("--series", series, "series.csv written by run")->required()->check(CLI::ExistingFile);

  CLI::App* fit = app.add_subcommand("fit", "Fit decay and growth rates and judge them");
  fit->add_option("--series", series, "Time series CSV")->required()->check(CLI::ExistingFile);
  fit->add_option("--fit-spec", fit_spec, "Claims and window (JSON); default claims otherwise")->check(CLI::ExistingFile);
  fit->add_option("--report", report, "Report path (default: fit_report.json next to the series)");

  CLI::App* check = app.add_subcommand("check", "Short burst with identity, conservation and order gates");
  add_common(check);

  CLI::App* plot = app.add_subcommand("plot", "Emit data extracts and matplotlib scripts");
  plot->add_option("--series", series, "Time series CSV")->required()->check(CLI::ExistingFile);
  plot->add_option("--out", out_dir, "Directory for extracts and scripts (default: <series dir>/plots)");

  CLI11_PARSE(app, argc, argv);

  npd::io::CommandOptions options;
  options.out_dir = out_dir;
  options.threads = threads;
  options.deterministic = deterministic;
  if (!resume.empty()) options.resume = resume;

  try {
    if (*run) {
      const auto config = npd::io::load_config(config_path);
      return npd::io::cmd_run(config, options, std::cout);
    }
    if (*baseline) {
      return npd::io::cmd_baseline(npd::io::load_config(config_path), series, std::cout);
    }
    if (*fit) {
      npd::io::FitSpec spec;
      spec.claims = npd::io::default_claims();
      if (!fit_spec.empty()) spec = npd::io::load_fit_spec(fit_spec);
      const fs::path report_path =
          report.empty() ? fs::path(series).parent_path() / "fit_report.json" : fs::path(report);
      return npd::io::cmd_fit(series, spec, report_path, std::cout);
    }
    if (*check) return npd::io::cmd_check(npd::io::load_config(config_path), options, std::cout);
    if (*plot) {
      const fs::path dir = out_dir.empty() ? fs::path(series).parent_path() / "plots" : fs::path(out_dir);
      return npd::io::cmd_plot(series, dir, std::cout);
    }
  } catch (const npd::ConfigError& e) {
    std::cerr << e.what() << "\n";
    return npd::io::kExitConfigError;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << "\n";
    return npd::io::kExitConfigError;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return npd::io::kExitAborted;
  }
  return npd::io::kExitOk;
}
