#include "npd/io/commands.hpp"

#include "npd/diagnostics.hpp"
#include "npd/heat.hpp"
#include "npd/integrator.hpp"
#include "npd/io/checkpoint.hpp"
#include "npd/spectral.hpp"

#include <json.hpp>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <iomanip>
#include <sstream>
#include <thread>

namespace npd::io {
namespace {

using ojson = nlohmann::ordered_json;
namespace fs = std::filesystem;

constexpr double kTimeMatch = 1e-9;

// The JSON library writes NaN as null; keep that explicit.
ojson number_json(double v) { return std::isfinite(v) ? ojson(v) : ojson(nullptr); }

void write_json(const fs::path& path, const ojson& j) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << j.dump(2) << "\n";
}

PlanEffort configure_fft(const CommandOptions& options) {
  int threads = options.threads;
  if (threads <= 0) threads = static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));
  if (options.deterministic) threads = 1;
  set_fft_threads(threads);
  return options.deterministic ? PlanEffort::estimate : PlanEffort::measure;
}

double max_concentration(const NpdState& state) {
  double m = 0.0;
  for (const auto& c : state.concentrations) m = std::max(m, inverse_transform(c).values.maxCoeff());
  return m;
}

double sigma_l1(const NpdState& state) {
  return lp_norm(inverse_transform(derive_fields(state).sigma), 1.0);
}

double rho_l1(const NpdState& state) {
  return lp_norm(inverse_transform(derive_fields(state).rho), 1.0);
}

StepperConfig stepper_for(const RunConfig& config, double duration, double dt,
                          double positivity_abs) {
  StepperConfig sc;
  sc.dt = dt;
  sc.t_end = duration;
  sc.cfl_safety = config.stepper.cfl_safety;
  sc.dt_max = config.stepper.dt_max;
  sc.positivity_tolerance = positivity_abs;
  return sc;
}

DiagOptions diag_options(const RunConfig& config, double positivity_abs, double sigma0,
                         const HeatBaseline* baseline) {
  DiagOptions o;
  o.k_max = config.diagnostics.k_max;
  o.local_radius = config.diagnostics.local_radius;
  o.moments = config.diagnostics.moments;
  o.residuals = config.diagnostics.residuals;
  o.positivity_tolerance = positivity_abs;
  o.shell_constant = config.diagnostics.shell_constant;
  o.sigma0_l1 = sigma0;
  o.baseline = baseline;
  return o;
}

ojson claims_json(const std::vector<ClaimResult>& results) {
  ojson arr = ojson::array();
  for (const auto& r : results) {
    ojson j;
    j["id"] = r.id;
    j["column"] = r.column;
    j["skipped"] = r.skipped;
    if (r.skipped) {
      j["note"] = r.note;
    } else {
      j["model"] = to_string(r.fit.model);
      j["exponent"] = number_json(r.fit.exponent);
      j["prefactor_log"] = number_json(r.fit.prefactor_log);
      j["rms_residual"] = number_json(r.fit.rms_residual);
      j["points"] = r.fit.points;
      j["window"] = {r.fit.window.t_start, r.fit.window.t_end};
      j["predicted"] = r.verdict.predicted;
      j["tolerance"] = r.verdict.tolerance;
      j["mode"] = to_string(r.verdict.mode);
      j["pass"] = r.verdict.pass;
    }
    arr.push_back(j);
  }
  return arr;
}

void print_claims(const std::vector<ClaimResult>& results, std::ostream& log) {
  log << std::left << std::setw(22) << "claim" << std::setw(18) << "column" << std::right
      << std::setw(11) << "measured" << std::setw(11) << "predicted" << std::setw(8) << "tol"
      << "  " << std::left << std::setw(12) << "mode" << "verdict\n";
  for (const auto& r : results) {
    log << std::left << std::setw(22) << r.id << std::setw(18) << r.column;
    if (r.skipped) {
      log << "skipped: " << r.note << "\n";
      continue;
    }
    log << std::right << std::fixed << std::setprecision(4) << std::setw(11)
        << r.verdict.measured << std::setw(11) << r.verdict.predicted << std::setw(8)
        << r.verdict.tolerance << "  " << std::left << std::setw(12) << to_string(r.verdict.mode)
        << (r.verdict.pass ? "PASS" : "FAIL") << "\n";
    log << std::defaultfloat << std::setprecision(6);
  }
}

ojson row_json(const SeriesTable& table, std::size_t row) {
  ojson j;
  for (std::size_t c = 0; c < table.columns.size(); ++c) {
    j[table.columns[c]] = number_json(table.rows[row][c]);
  }
  return j;
}

int species_in(const SeriesTable& table) {
  int n = 0;
  while (table.has_column("mass_" + std::to_string(n + 1))) ++n;
  return n;
}

std::string expand(const std::string& pattern, int i) {
  std::string out = pattern;
  const auto pos = out.find("{i}");
  if (pos != std::string::npos) out.replace(pos, 3, std::to_string(i));
  return out;
}

}  // namespace

fs::path resolve_output_dir(const RunConfig& config, const CommandOptions& options) {
  if (!options.out_dir.empty()) return options.out_dir;
  const fs::path dir = config.output.directory;
  if (dir.is_absolute()) return dir;
  if (const char* root = std::getenv(kOutputRootEnv); root && *root) return fs::path(root) / dir;
  return dir;
}

double choose_dt(const RunConfig& config, const NpdState& state) {
  const double cadence = config.diagnostics.cadence;
  if (config.stepper.dt) {
    const double dt = *config.stepper.dt;
    const double k = std::round(cadence / dt);
    if (k < 1.0 || std::abs(k * dt - cadence) > kTimeMatch * cadence) {
      throw ConfigError("config error at stepper.dt: must divide diagnostics.cadence (" +
                        format_number(cadence) + ")");
    }
    return dt;
  }
  const double bound = cfl_dt(state, stepper_for(config, 1.0, 1.0, kInfinity));
  return cadence / std::ceil(cadence / bound - kTimeMatch);
}

std::string checkpoint_name(double t) { return "checkpoint_t" + format_number(t) + ".ckpt"; }

std::vector<ClaimResult> evaluate_claims(const SeriesTable& table, const FitSpec& spec) {
  std::vector<ClaimResult> out;
  const std::vector<double> t = table.column("t");
  FitWindow window = FitWindow::default_for(t.empty() ? 0.0 : t.back());
  if (spec.window) window = {(*spec.window)[0], (*spec.window)[1], spec.min_points};
  window.min_points = spec.min_points;
  const int n = species_in(table);
  double mass0 = 0.0;
  for (int i = 1; i <= n && !table.rows.empty(); ++i) {
    mass0 += table.rows.front()[table.column_index("mass_" + std::to_string(i))];
  }

  for (const ClaimSpec& claim : spec.claims) {
    std::vector<std::string> columns;
    if (claim.column.find("{i}") != std::string::npos) {
      for (int i = 1; i <= n; ++i) columns.push_back(expand(claim.column, i));
    } else {
      columns.push_back(claim.column);
    }
    const double scale = claim.scale_by_initial_mass ? mass0 : 1.0;
    for (const auto& column : columns) {
      ClaimResult r;
      r.id = claim.id;
      r.column = column;
      if (!table.has_column(column)) {
        r.skipped = true;
        r.note = "column missing";
        out.push_back(r);
        continue;
      }
      try {
        const std::vector<double> y = table.column(column);
        r.fit = claim.model == FitModel::power_law ? fit_power_law(t, y, window)
                                                   : fit_log_law(t, y, window);
        r.verdict = verdict(r.fit, claim.predicted * scale, claim.tolerance * std::abs(scale),
                            claim.mode);
      } catch (const std::exception& e) {
        r.skipped = true;
        r.note = e.what();
      }
      out.push_back(r);
    }
  }
  return out;
}

int cmd_run(const RunConfig& config, const CommandOptions& options, std::ostream& log) {
  const auto wall_start = std::chrono::steady_clock::now();
  const fs::path dir = resolve_output_dir(config, options);
  fs::create_directories(dir);
  const PlanEffort effort = configure_fft(options);
  {
    std::ofstream out(dir / RunFiles::config, std::ios::binary | std::ios::trunc);
    out << dump_config(config);
  }
  const std::string hash = config_hash(config);
  const GridPtr grid = Grid::make(config.grid, effort);

  NpdState initial;
  NpdState state;
  double neutralization = 1.0;
  std::vector<std::string> warnings;
  if (options.resume) {
    initial = read_checkpoint(dir / RunFiles::initial, grid);
    state = read_checkpoint(*options.resume, grid);
    log << "resuming from " << options.resume->string() << " at t = " << state.time << "\n";
  } else {
    InitialState init = make_initial_state(config.initial_condition(), grid);
    neutralization = init.neutralization_factor;
    warnings = std::move(init.warnings);
    state = std::move(init.state);
    initial = state;
    write_checkpoint(dir / RunFiles::initial, initial);
  }
  for (const auto& w : warnings) log << "warning: " << w << "\n";

  const HeatBaseline baseline = HeatBaseline::from_state(initial);
  const double positivity_abs = config.stepper.positivity_tolerance * max_concentration(initial);
  const double duration = config.stepper.t_end - state.time;
  if (duration < -kTimeMatch) {
    throw ConfigError("config error at stepper.t_end: resume point lies beyond t_end");
  }
  const double dt = choose_dt(config, initial);
  const int observe_every = static_cast<int>(std::lround(config.diagnostics.cadence / dt));
  StepperConfig sc = stepper_for(config, std::max(duration, 0.0), dt, positivity_abs);
  if (sc.t_end > 0.0 && sc.dt > sc.t_end) sc.dt = sc.t_end;
  // Positivity is judged on the record below, so a violation surfaces as the
  // monitor's abort rather than as an entropy domain error.
  const DiagOptions diag = diag_options(config, kInfinity, sigma_l1(initial), &baseline);

  const fs::path series_path = dir / RunFiles::series;
  const int n = state.species_count();
  std::optional<SeriesWriter> writer;
  if (options.resume) {
    writer.emplace(SeriesWriter::resume(series_path, state.time));
  } else {
    writer.emplace(series_path, series_columns(n, config.diagnostics.k_max, true));
  }
  write_meta(series_path, {hash, kCodeVersion, config.grid, n, config.diagnostics.k_max,
                           initial.time});

  for (double ct : config.output.checkpoint_times) {
    const double k = std::round(ct / config.diagnostics.cadence);
    if (std::abs(k * config.diagnostics.cadence - ct) > kTimeMatch * std::max(1.0, ct) &&
        std::abs(ct - config.stepper.t_end) > kTimeMatch) {
      log << "warning: checkpoint time " << ct << " is not a diagnostics time and is skipped\n";
    }
  }

  const int total_records = step_count(sc.t_end, sc.dt) / observe_every + 1;
  int records = 0;
  double last_recorded = -kInfinity;
  const auto observe = [&](const NpdState& s) {
    const DiagRecord rec = measure(s, diag);
    const double lo = *std::min_element(rec.min_c.begin(), rec.min_c.end());
    if (lo < -positivity_abs) {
      std::ostringstream msg;
      msg << "positivity violated at t = " << s.time << ": min c = " << lo << " < -"
          << positivity_abs;
      throw PositivityError(msg.str(), s.time, lo);
    }
    writer->append(series_row(rec, config.diagnostics.k_max, true));
    last_recorded = s.time;
    ++records;
    for (double ct : config.output.checkpoint_times) {
      if (std::abs(s.time - ct) <= kTimeMatch * std::max(1.0, ct)) {
        write_checkpoint(dir / checkpoint_name(ct), s);
      }
    }
    if (total_records >= 10 && records % (total_records / 10) == 0) {
      log << "t = " << s.time << " (" << records << "/" << total_records << " records)\n";
    }
  };

  ojson summary;
  summary["status"] = "ok";
  summary["config_hash"] = hash;
  summary["code_version"] = kCodeVersion;
  summary["config"] = ojson::parse(dump_config(config));
  ojson run;
  run["dt"] = sc.dt;
  run["observe_every"] = observe_every;
  run["steps"] = step_count(sc.t_end, sc.dt);
  run["positivity_tolerance_abs"] = positivity_abs;
  run["neutralization_factor"] = neutralization;
  run["warnings"] = warnings;
  run["deterministic"] = options.deterministic;
  run["resumed_from"] = options.resume ? ojson(options.resume->string()) : ojson(nullptr);

  int status = kExitOk;
  try {
    const NpdState final_state = run_until(state, sc, observe, observe_every);
    if (final_state.time > last_recorded + kTimeMatch) observe(final_state);
    write_checkpoint(dir / RunFiles::final_state, final_state);
  } catch (const std::exception& e) {
    ojson failure;
    failure["message"] = e.what();
    if (const auto* p = dynamic_cast<const PositivityError*>(&e)) {
      failure["kind"] = "positivity";
      failure["time"] = p->time();
      failure["min_value"] = p->min_value();
    } else if (const auto* b = dynamic_cast<const BlowUpError*>(&e)) {
      failure["kind"] = "blow-up";
      failure["time"] = b->time();
    } else if (dynamic_cast<const StabilityError*>(&e)) {
      failure["kind"] = "stability";
    } else if (dynamic_cast<const InvalidStateError*>(&e)) {
      failure["kind"] = "invalid-state";
    } else {
      throw;
    }
    failure["last_recorded_t"] = number_json(last_recorded);
    write_json(dir / RunFiles::failure, failure);
    summary["status"] = "failed";
    summary["failure"] = failure;
    log << "run aborted: " << e.what() << "\n";
    status = kExitAborted;
  }
  writer.reset();

  run["records"] = records;
  run["elapsed_seconds"] =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - wall_start).count();
  summary["run"] = run;
  const SeriesTable table = read_series(series_path);
  if (!table.rows.empty()) summary["final"] = row_json(table, table.rows.size() - 1);
  const auto claims = evaluate_claims(table, config.fits);
  summary["fits"] = claims_json(claims);
  write_json(dir / RunFiles::summary, summary);
  log << "wrote " << records << " records to " << series_path.string() << "\n";
  return status;
}

int cmd_baseline(const RunConfig& config, const fs::path& series, std::ostream& log) {
  const fs::path dir = series.parent_path();
  const NpdState initial = read_checkpoint(dir / RunFiles::initial);
  if (!(initial.grid()->spec() == config.grid)) {
    throw ConfigError("config error at grid: differs from the checkpointed initial data");
  }
  const HeatBaseline baseline = HeatBaseline::from_state(initial);
  SeriesTable table = read_series(series);
  const int n = initial.species_count();
  const int k_max = config.diagnostics.k_max;
  std::vector<std::vector<std::vector<double>>> cols(
      k_max + 1, std::vector<std::vector<double>>(n));
  for (const auto& row : table.rows) {
    const auto heat = heat_evolve(baseline, row[0] - baseline.initial_time);
    for (int k = 0; k <= k_max; ++k) {
      for (int i = 0; i < n; ++i) cols[k][i].push_back(sobolev_norm(heat[i], k));
    }
  }
  for (int k = 0; k <= k_max; ++k) {
    for (int i = 0; i < n; ++i) {
      table.add_column("heat_hksq_" + std::to_string(k) + "_c" + std::to_string(i + 1), cols[k][i]);
    }
  }
  fs::path out = dir / (series.stem().string() + "_baseline.csv");
  write_series(out, table);
  if (fs::exists(meta_path(series))) {
    fs::copy_file(meta_path(series), meta_path(out), fs::copy_options::overwrite_existing);
  }
  log << "wrote " << table.rows.size() << " rows with heat baseline columns to " << out.string()
      << "\n";
  return kExitOk;
}

int cmd_fit(const fs::path& series, const FitSpec& spec, const fs::path& report,
            std::ostream& log) {
  const SeriesTable table = read_series(series);
  const auto results = evaluate_claims(table, spec);
  print_claims(results, log);
  bool all_pass = true;
  int judged = 0;
  for (const auto& r : results) {
    if (r.skipped) continue;
    ++judged;
    all_pass = all_pass && r.verdict.pass;
  }
  ojson j;
  j["series"] = series.string();
  j["fit_spec"] = ojson::parse(dump_fit_spec(spec));
  j["claims"] = claims_json(results);
  j["judged"] = judged;
  j["all_pass"] = all_pass && judged > 0;
  write_json(report, j);
  return all_pass && judged > 0 ? kExitOk : kExitGateFailed;
}

int cmd_check(const RunConfig& config, const CommandOptions& options, std::ostream& log) {
  const fs::path dir = resolve_output_dir(config, options);
  fs::create_directories(dir);
  const GridPtr grid = Grid::make(config.grid, configure_fft(options));
  const InitialState init = make_initial_state(config.initial_condition(), grid);
  const NpdState& s0 = init.state;
  const double positivity_abs = config.stepper.positivity_tolerance * max_concentration(s0);
  const double dt = choose_dt(config, s0);
  constexpr int kBurstSteps = 8;
  StepperConfig sc = stepper_for(config, kBurstSteps * dt, dt, positivity_abs);
  DiagOptions diag = diag_options(config, positivity_abs, sigma_l1(s0), nullptr);
  diag.moments = false;
  const double rho0 = rho_l1(s0);

  std::vector<DiagRecord> recs;
  run_until(s0, sc, [&](const NpdState& s) { recs.push_back(measure(s, diag)); });

  double res_e = 0.0, res_l = 0.0, mass_drift = 0.0, charge = 0.0;
  std::array<double, 4> ell_sup{};
  for (const auto& r : recs) {
    res_e = std::max(res_e, r.residual_energy);
    res_l = std::max(res_l, r.residual_l2);
    charge = std::max(charge, std::abs(r.charge_total) / rho0);
    for (std::size_t i = 0; i < r.mass.size(); ++i) {
      mass_drift = std::max(mass_drift, std::abs(r.mass[i] / recs.front().mass[i] - 1.0));
    }
    for (int j = 0; j < 4; ++j) ell_sup[j] = std::max(ell_sup[j], r.elliptic[j]);
  }
  bool ell_ok = true;
  double ell_growth = 0.0;
  for (int j = 0; j < 4; ++j) {
    const double initial = recs.front().elliptic[j];
    ell_ok = ell_ok && std::isfinite(ell_sup[j]) && ell_sup[j] <= 10.0 * initial;
    if (initial > 0.0) ell_growth = std::max(ell_growth, ell_sup[j] / initial);
  }

  const ConvergenceStudy conv = self_convergence(s0, dt, 2);
  const bool at_roundoff = conv.coarse_difference <= 1e-12 * conv.solution_norm;
  const bool order_ok = at_roundoff || conv.order >= 3.7;

  struct Gate {
    const char* name;
    double value;
    double limit;
    bool pass;
  };
  const std::vector<Gate> gates{
      {"energy identity residual", res_e, 1e-6, res_e <= 1e-6},
      {"L2 identity residual", res_l, 1e-6, res_l <= 1e-6},
      {"relative mass drift", mass_drift, 1e-9, mass_drift <= 1e-9},
      {"|charge| / ||rho0||_1", charge, 1e-9, charge <= 1e-9},
      {"self-convergence order", conv.order, 3.7, order_ok},
      {"elliptic ratio sup / initial", ell_growth, 10.0, ell_ok},
  };
  ojson j;
  j["config_hash"] = config_hash(config);
  j["dt"] = dt;
  j["burst_steps"] = kBurstSteps;
  bool all = true;
  for (const auto& g : gates) {
    log << std::left << std::setw(32) << g.name << std::setw(14) << g.value << "limit "
        << std::setw(10) << g.limit << (g.pass ? "PASS" : "FAIL") << "\n";
    j["gates"][g.name] = {{"value", number_json(g.value)}, {"limit", g.limit}, {"pass", g.pass}};
    all = all && g.pass;
  }
  if (at_roundoff) log << "note: time-integration error is at roundoff; order not resolved\n";
  j["convergence"] = {{"order", number_json(conv.order)},
                      {"coarse_difference", conv.coarse_difference},
                      {"fine_difference", conv.fine_difference},
                      {"at_roundoff", at_roundoff}};
  j["elliptic_sup"] = {ell_sup[0], ell_sup[1], ell_sup[2], ell_sup[3]};
  j["elliptic_initial"] = {recs.front().elliptic[0], recs.front().elliptic[1],
                           recs.front().elliptic[2], recs.front().elliptic[3]};
  j["pass"] = all;
  write_json(dir / "check_report.json", j);
  return all ? kExitOk : kExitGateFailed;
}

namespace {

void write_extract(const fs::path& path, const SeriesTable& table,
                   const std::vector<std::string>& columns) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << "#";
  for (const auto& c : columns) out << " " << c;
  out << "\n";
  std::vector<int> idx;
  for (const auto& c : columns) idx.push_back(table.column_index(c));
  for (const auto& row : table.rows) {
    for (std::size_t i = 0; i < idx.size(); ++i) out << (i ? " " : "") << format_number(row[idx[i]]);
    out << "\n";
  }
}

void write_text(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << text;
}

const char* kScriptHead = R"py(import os
import numpy as np
import matplotlib
matplotlib.use("Agg")
import matplotlib.pyplot as plt

here = os.path.dirname(os.path.abspath(__file__))


def load(name):
    path = os.path.join(here, name)
    with open(path) as f:
        names = f.readline()[1:].split()
    data = np.atleast_2d(np.loadtxt(path))
    return names, data

)py";

const char* kNormsScript = R"py(names, data = load("norms.dat")
t = data[:, 0]
slopes = {"l2sq": -1.5, "hksq_1": -2.5, "hksq_2": -3.5, "hksq_3": -4.5}
fig, ax = plt.subplots()
for j, name in enumerate(names[1:], start=1):
    ax.loglog(t + 1, data[:, j], label=name)
for prefix, slope in slopes.items():
    cols = [j for j, n in enumerate(names) if n.startswith(prefix + "_c")]
    if cols:
        y = data[:, cols[0]]
        ax.loglog(t + 1, y[-1] * ((t + 1) / (t[-1] + 1)) ** slope, "k--", lw=0.8)
        ax.annotate("slope %g" % slope, (t[-1] + 1, y[-1]), fontsize=7)
ax.set_xlabel("t + 1")
ax.set_ylabel("squared norm")
ax.legend(fontsize=7)
fig.savefig(os.path.join(here, "norms.png"), dpi=150)
)py";

const char* kEntropyScript = R"py(names, data = load("entropy.dat")
fig, ax = plt.subplots()
x = np.log1p(data[:, 0])
for j, name in enumerate(names[1:], start=1):
    ax.plot(x, data[:, j], label=name)
ax.set_xlabel("log(1 + t)")
ax.set_ylabel("entropy")
ax.legend(fontsize=7)
fig.savefig(os.path.join(here, "entropy.png"), dpi=150)
)py";

const char* kMomentsScript = R"py(names, data = load("moments.dat")
t = data[:, 0]
fig, ax = plt.subplots()
for j, name in enumerate(names[1:], start=1):
    y = data[:, j]
    if np.all(np.isfinite(y)) and np.all(y > 0):
        ax.loglog(t + 1, y, label=name)
for slope in (1.5, 2.5):
    ax.loglog(t + 1, data[-1, 1] * ((t + 1) / (t[-1] + 1)) ** slope, "k--", lw=0.8)
ax.set_xlabel("t + 1")
ax.legend(fontsize=7)
fig.savefig(os.path.join(here, "moments.png"), dpi=150)
)py";

const char* kResidualsScript = R"py(names, data = load("residuals.dat")
t = data[:, 0]
fig, ax = plt.subplots()
for j, name in enumerate(names[1:], start=1):
    y = np.abs(data[:, j])
    ax.semilogy(t, np.where(y > 0, y, np.nan), label=name)
ax.set_xlabel("t")
ax.legend(fontsize=7)
fig.savefig(os.path.join(here, "residuals.png"), dpi=150)
)py";

}  // namespace

int cmd_plot(const fs::path& series, const fs::path& out_dir, std::ostream& log) {
  const SeriesTable table = read_series(series);
  fs::create_directories(out_dir);
  const auto pick = [&](const std::vector<std::string>& prefixes) {
    std::vector<std::string> cols{"t"};
    for (const auto& c : table.columns) {
      for (const auto& p : prefixes) {
        if (c.rfind(p, 0) == 0) {
          cols.push_back(c);
          break;
        }
      }
    }
    return cols;
  };
  const std::vector<std::pair<std::string, std::vector<std::string>>> extracts{
      {"norms", pick({"l2sq_c", "hksq_", "sharp_"})},
      {"entropy", pick({"entropy_", "local_entropy_"})},
      {"moments", pick({"moment6_", "exp_entropy_"})},
      {"residuals", pick({"R_energy", "R_L2", "shell_ratio_max", "ell_ratio_"})},
  };
  const std::vector<std::pair<std::string, const char*>> scripts{
      {"norms", kNormsScript},
      {"entropy", kEntropyScript},
      {"moments", kMomentsScript},
      {"residuals", kResidualsScript},
  };
  for (const auto& [name, cols] : extracts) write_extract(out_dir / (name + ".dat"), table, cols);
  for (const auto& [name, body] : scripts) {
    write_text(out_dir / ("plot_" + name + ".py"), std::string(kScriptHead) + body);
  }
  log << "wrote data extracts and plot scripts to " << out_dir.string() << "\n";
  return kExitOk;
}

}  // namespace npd::io
