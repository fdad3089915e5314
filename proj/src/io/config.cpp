#include "npd/io/config.hpp"

#include <json.hpp>

#include <cmath>
#include <cstdio>
#include <fstream>
#include <initializer_list>
#include <numbers>
#include <sstream>

namespace npd::io {
namespace {

using json = nlohmann::json;
using ojson = nlohmann::ordered_json;

[[noreturn]] void fail(const std::string& path, const std::string& message) {
  throw ConfigError("config error at " + (path.empty() ? std::string("<root>") : path) + ": " +
                    message);
}

std::string join(const std::string& path, const std::string& key) {
  return path.empty() ? key : path + "." + key;
}

std::string index(const std::string& path, std::size_t i) {
  return path + "[" + std::to_string(i) + "]";
}

void require_object(const json& node, const std::string& path,
                    std::initializer_list<const char*> allowed) {
  if (!node.is_object()) fail(path, "expected an object");
  for (const auto& item : node.items()) {
    bool known = false;
    for (const char* key : allowed) known = known || item.key() == key;
    if (!known) fail(join(path, item.key()), "unknown key");
  }
}

const json* find(const json& node, const char* key) {
  const auto it = node.find(key);
  return it == node.end() ? nullptr : &*it;
}

double number(const json& v, const std::string& path) {
  if (!v.is_number()) fail(path, "expected a number");
  const double x = v.get<double>();
  if (!std::isfinite(x)) fail(path, "expected a finite number");
  return x;
}

double number_or(const json& node, const char* key, const std::string& path, double fallback) {
  const json* v = find(node, key);
  return v ? number(*v, join(path, key)) : fallback;
}

std::int64_t integer_or(const json& node, const char* key, const std::string& path,
                        std::int64_t fallback) {
  const json* v = find(node, key);
  if (!v) return fallback;
  if (!v->is_number_integer()) fail(join(path, key), "expected an integer");
  return v->get<std::int64_t>();
}

bool boolean_or(const json& node, const char* key, const std::string& path, bool fallback) {
  const json* v = find(node, key);
  if (!v) return fallback;
  if (!v->is_boolean()) fail(join(path, key), "expected true or false");
  return v->get<bool>();
}

std::string string_or(const json& node, const char* key, const std::string& path,
                      const std::string& fallback) {
  const json* v = find(node, key);
  if (!v) return fallback;
  if (!v->is_string()) fail(join(path, key), "expected a string");
  return v->get<std::string>();
}

std::vector<double> numbers(const json& v, const std::string& path) {
  if (!v.is_array()) fail(path, "expected an array of numbers");
  std::vector<double> out;
  for (std::size_t i = 0; i < v.size(); ++i) out.push_back(number(v[i], index(path, i)));
  return out;
}

json parse_json(const std::string& text) {
  try {
    return json::parse(text);
  } catch (const json::parse_error& e) {
    throw ConfigError(std::string("config error: malformed JSON: ") + e.what());
  }
}

GridSpec parse_grid(const json& node, const std::string& path) {
  require_object(node, path, {"box_length", "resolution", "dealias_fraction"});
  GridSpec g;
  g.box_length = number_or(node, "box_length", path, g.box_length);
  g.resolution = static_cast<int>(integer_or(node, "resolution", path, g.resolution));
  g.dealias_fraction = number_or(node, "dealias_fraction", path, g.dealias_fraction);
  if (!(g.box_length > 0.0)) fail(join(path, "box_length"), "must be positive");
  if (g.resolution < 8 || g.resolution % 2 != 0) {
    fail(join(path, "resolution"), "must be an even integer >= 8");
  }
  if (!(g.dealias_fraction > 0.0 && g.dealias_fraction <= 1.0)) {
    fail(join(path, "dealias_fraction"), "must lie in (0, 1]");
  }
  return g;
}

GaussianBump parse_bump(const json& node, const std::string& path) {
  require_object(node, path, {"amplitude", "center", "width"});
  GaussianBump b;
  b.amplitude = number_or(node, "amplitude", path, b.amplitude);
  b.width = number_or(node, "width", path, b.width);
  if (const json* c = find(node, "center")) {
    const auto xs = numbers(*c, join(path, "center"));
    if (xs.size() != 3) fail(join(path, "center"), "expected three coordinates");
    b.center = {xs[0], xs[1], xs[2]};
  }
  if (!(b.amplitude >= 0.0)) fail(join(path, "amplitude"), "must be non-negative");
  if (!(b.width > 0.0)) fail(join(path, "width"), "must be positive");
  return b;
}

std::vector<SpeciesSpec> parse_species(const json& node, const std::string& path) {
  if (!node.is_array()) fail(path, "expected an array");
  std::vector<SpeciesSpec> out;
  for (std::size_t i = 0; i < node.size(); ++i) {
    const std::string p = index(path, i);
    require_object(node[i], p, {"valence", "bumps"});
    SpeciesSpec s;
    const json* z = find(node[i], "valence");
    if (!z) fail(join(p, "valence"), "missing");
    s.valence = number(*z, join(p, "valence"));
    if (const json* bumps = find(node[i], "bumps")) {
      if (!bumps->is_array()) fail(join(p, "bumps"), "expected an array");
      for (std::size_t b = 0; b < bumps->size(); ++b) {
        s.bumps.push_back(parse_bump((*bumps)[b], index(join(p, "bumps"), b)));
      }
    }
    out.push_back(std::move(s));
  }
  return out;
}

StepperSettings parse_stepper(const json& node, const std::string& path) {
  require_object(node, path, {"dt", "dt_max", "t_end", "cfl_safety", "positivity_tolerance"});
  StepperSettings s;
  if (const json* dt = find(node, "dt")) {
    if (dt->is_string()) {
      if (dt->get<std::string>() != "auto") fail(join(path, "dt"), "expected a number or \"auto\"");
    } else {
      s.dt = number(*dt, join(path, "dt"));
      if (!(*s.dt > 0.0)) fail(join(path, "dt"), "must be positive");
    }
  }
  s.dt_max = number_or(node, "dt_max", path, s.dt_max);
  s.t_end = number_or(node, "t_end", path, s.t_end);
  s.cfl_safety = number_or(node, "cfl_safety", path, s.cfl_safety);
  s.positivity_tolerance = number_or(node, "positivity_tolerance", path, s.positivity_tolerance);
  if (!(s.dt_max > 0.0)) fail(join(path, "dt_max"), "must be positive");
  if (!(s.t_end >= 0.0)) fail(join(path, "t_end"), "must be non-negative");
  if (!(s.cfl_safety > 0.0 && s.cfl_safety <= 1.0)) fail(join(path, "cfl_safety"), "must lie in (0, 1]");
  if (!(s.positivity_tolerance >= 0.0)) {
    fail(join(path, "positivity_tolerance"), "must be non-negative");
  }
  return s;
}

DiagnosticsSettings parse_diagnostics(const json& node, const std::string& path) {
  require_object(node, path,
                 {"k_max", "cadence", "local_radius", "moments", "residuals", "shell_constant"});
  DiagnosticsSettings d;
  d.k_max = static_cast<int>(integer_or(node, "k_max", path, d.k_max));
  d.cadence = number_or(node, "cadence", path, d.cadence);
  d.local_radius = number_or(node, "local_radius", path, d.local_radius);
  d.moments = boolean_or(node, "moments", path, d.moments);
  d.residuals = boolean_or(node, "residuals", path, d.residuals);
  d.shell_constant = number_or(node, "shell_constant", path, d.shell_constant);
  if (d.k_max < 0 || d.k_max > 3) fail(join(path, "k_max"), "must lie in [0, 3]");
  if (!(d.cadence > 0.0)) fail(join(path, "cadence"), "must be positive");
  if (!(d.local_radius >= 0.0)) fail(join(path, "local_radius"), "must be non-negative");
  if (!(d.shell_constant > 0.0)) fail(join(path, "shell_constant"), "must be positive");
  return d;
}

ClaimSpec parse_claim(const json& node, const std::string& path) {
  require_object(node, path,
                 {"id", "column", "model", "predicted", "tolerance", "mode", "scale_by_initial_mass"});
  ClaimSpec c;
  c.id = string_or(node, "id", path, "");
  c.column = string_or(node, "column", path, "");
  if (c.id.empty()) fail(join(path, "id"), "must be a non-empty string");
  if (c.column.empty()) fail(join(path, "column"), "must be a non-empty string");
  const std::string model = string_or(node, "model", path, "power-law");
  if (model == "power-law") {
    c.model = FitModel::power_law;
  } else if (model == "log-law") {
    c.model = FitModel::log_law;
  } else {
    fail(join(path, "model"), "expected \"power-law\" or \"log-law\"");
  }
  const json* predicted = find(node, "predicted");
  if (!predicted) fail(join(path, "predicted"), "missing");
  c.predicted = number(*predicted, join(path, "predicted"));
  c.tolerance = number_or(node, "tolerance", path, c.tolerance);
  if (!(c.tolerance > 0.0)) fail(join(path, "tolerance"), "must be positive");
  try {
    c.mode = verdict_mode_from_string(string_or(node, "mode", path, "two-sided"));
  } catch (const std::invalid_argument&) {
    fail(join(path, "mode"), "expected \"two-sided\", \"upper-bound\" or \"lower-bound\"");
  }
  c.scale_by_initial_mass = boolean_or(node, "scale_by_initial_mass", path, false);
  return c;
}

FitSpec parse_fits(const json& node, const std::string& path) {
  require_object(node, path, {"window", "min_points", "claims"});
  FitSpec f;
  if (const json* w = find(node, "window"); w && !w->is_null()) {
    const auto xs = numbers(*w, join(path, "window"));
    if (xs.size() != 2) fail(join(path, "window"), "expected [t_start, t_end]");
    if (!(xs[0] < xs[1]) || xs[0] < 0.0) {
      fail(join(path, "window"), "t_start must be non-negative and precede t_end");
    }
    f.window = std::array<double, 2>{xs[0], xs[1]};
  }
  f.min_points = static_cast<int>(integer_or(node, "min_points", path, f.min_points));
  if (f.min_points < 5) fail(join(path, "min_points"), "must be at least 5");
  if (const json* claims = find(node, "claims")) {
    if (!claims->is_array()) fail(join(path, "claims"), "expected an array");
    for (std::size_t i = 0; i < claims->size(); ++i) {
      f.claims.push_back(parse_claim((*claims)[i], index(join(path, "claims"), i)));
    }
  } else {
    f.claims = default_claims();
  }
  return f;
}

OutputSettings parse_output(const json& node, const std::string& path) {
  require_object(node, path, {"directory", "checkpoint_times"});
  OutputSettings o;
  o.directory = string_or(node, "directory", path, o.directory);
  if (o.directory.empty()) fail(join(path, "directory"), "must be non-empty");
  if (const json* times = find(node, "checkpoint_times")) {
    o.checkpoint_times = numbers(*times, join(path, "checkpoint_times"));
    for (std::size_t i = 0; i < o.checkpoint_times.size(); ++i) {
      if (o.checkpoint_times[i] < 0.0 || (i > 0 && o.checkpoint_times[i] <= o.checkpoint_times[i - 1])) {
        fail(join(path, "checkpoint_times"), "must be non-negative and strictly increasing");
      }
    }
  }
  return o;
}

void check_compatibility(const RunConfig& c) {
  if (c.species.empty()) fail("species", "at least one species is required");
  SpeciesParams params;
  params.diffusivity = c.diffusivity;
  params.allow_unequal_valence = c.allow_unequal_valence;
  std::vector<double> masses;
  for (const auto& s : c.species) {
    params.valences.push_back(s.valence);
    double m = 0.0;
    for (const auto& b : s.bumps) {
      m += b.amplitude * std::pow(2.0 * std::numbers::pi, 1.5) * b.width * b.width * b.width;
    }
    masses.push_back(m);
  }
  try {
    params.validate();
    neutralization_factor(params.valences, masses);
  } catch (const ConfigError& e) {
    throw ConfigError(std::string("config error at ") + e.what());
  }
}

ojson claim_json(const ClaimSpec& c) {
  ojson j;
  j["id"] = c.id;
  j["column"] = c.column;
  j["model"] = to_string(c.model);
  j["predicted"] = c.predicted;
  j["tolerance"] = c.tolerance;
  j["mode"] = to_string(c.mode);
  j["scale_by_initial_mass"] = c.scale_by_initial_mass;
  return j;
}

ojson fits_json(const FitSpec& f) {
  ojson j;
  j["window"] = f.window ? ojson::array({(*f.window)[0], (*f.window)[1]}) : ojson(nullptr);
  j["min_points"] = f.min_points;
  j["claims"] = ojson::array();
  for (const auto& c : f.claims) j["claims"].push_back(claim_json(c));
  return j;
}

}  // namespace

std::vector<ClaimSpec> default_claims() {
  using M = VerdictMode;
  const auto pl = FitModel::power_law;
  return {
      {"l2-decay", "l2sq_c{i}", pl, -1.5, 0.2, M::two_sided, false},
      {"gradient-decay", "hksq_1_c{i}", pl, -2.5, 0.3, M::two_sided, false},
      {"h2-decay", "hksq_2_c{i}", pl, -3.5, 0.4, M::two_sided, false},
      {"heat-diff-l2", "sharp_0_c{i}", pl, -2.0, 0.2, M::upper_bound, false},
      {"heat-diff-h1", "sharp_1_c{i}", pl, -3.0, 0.3, M::upper_bound, false},
      {"entropy-log-growth", "entropy_total", FitModel::log_law, -1.5, 0.45, M::two_sided, true},
      {"exp-entropy-growth", "exp_entropy_{i}", pl, 1.0, 0.2, M::lower_bound, false},
      {"moment-growth", "moment6_{i}", pl, 2.5, 0.2, M::upper_bound, false},
  };
}

InitialCondition RunConfig::initial_condition() const {
  return {species, diffusivity, allow_unequal_valence};
}

bool operator==(const RunConfig& a, const RunConfig& b) {
  return a.grid == b.grid && a.diffusivity == b.diffusivity &&
         a.allow_unequal_valence == b.allow_unequal_valence && a.species == b.species &&
         a.stepper == b.stepper && a.diagnostics == b.diagnostics && a.fits == b.fits &&
         a.output == b.output && a.seed == b.seed;
}

RunConfig parse_config(const std::string& text) {
  const json root = parse_json(text);
  require_object(root, "",
                 {"grid", "diffusivity", "allow_unequal_valence", "species", "stepper",
                  "diagnostics", "fits", "output", "seed"});
  RunConfig c;
  if (const json* g = find(root, "grid")) c.grid = parse_grid(*g, "grid");
  c.diffusivity = number_or(root, "diffusivity", "", c.diffusivity);
  if (!(c.diffusivity > 0.0)) fail("diffusivity", "must be positive");
  c.allow_unequal_valence = boolean_or(root, "allow_unequal_valence", "", false);
  const json* species = find(root, "species");
  if (!species) fail("species", "missing");
  c.species = parse_species(*species, "species");
  c.stepper = parse_stepper(find(root, "stepper") ? root["stepper"] : json::object(), "stepper");
  c.diagnostics = parse_diagnostics(
      find(root, "diagnostics") ? root["diagnostics"] : json::object(), "diagnostics");
  c.fits = parse_fits(find(root, "fits") ? root["fits"] : json::object(), "fits");
  c.output = parse_output(find(root, "output") ? root["output"] : json::object(), "output");
  c.seed = integer_or(root, "seed", "", 0);
  check_compatibility(c);
  if (c.stepper.dt && c.stepper.t_end > 0.0 && *c.stepper.dt > c.stepper.t_end) {
    fail("stepper.dt", "must not exceed stepper.t_end");
  }
  return c;
}

std::string read_text_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

RunConfig load_config(const std::filesystem::path& path) {
  return parse_config(read_text_file(path));
}

std::string dump_config(const RunConfig& c) {
  ojson j;
  j["grid"] = {{"box_length", c.grid.box_length},
               {"resolution", c.grid.resolution},
               {"dealias_fraction", c.grid.dealias_fraction}};
  j["diffusivity"] = c.diffusivity;
  j["allow_unequal_valence"] = c.allow_unequal_valence;
  j["species"] = ojson::array();
  for (const auto& s : c.species) {
    ojson sj;
    sj["valence"] = s.valence;
    sj["bumps"] = ojson::array();
    for (const auto& b : s.bumps) {
      ojson bj;
      bj["amplitude"] = b.amplitude;
      bj["center"] = {b.center[0], b.center[1], b.center[2]};
      bj["width"] = b.width;
      sj["bumps"].push_back(bj);
    }
    j["species"].push_back(sj);
  }
  ojson st;
  st["dt"] = c.stepper.dt ? ojson(*c.stepper.dt) : ojson("auto");
  st["dt_max"] = c.stepper.dt_max;
  st["t_end"] = c.stepper.t_end;
  st["cfl_safety"] = c.stepper.cfl_safety;
  st["positivity_tolerance"] = c.stepper.positivity_tolerance;
  j["stepper"] = st;
  ojson d;
  d["k_max"] = c.diagnostics.k_max;
  d["cadence"] = c.diagnostics.cadence;
  d["local_radius"] = c.diagnostics.local_radius;
  d["moments"] = c.diagnostics.moments;
  d["residuals"] = c.diagnostics.residuals;
  d["shell_constant"] = c.diagnostics.shell_constant;
  j["diagnostics"] = d;
  j["fits"] = fits_json(c.fits);
  j["output"] = {{"directory", c.output.directory},
                 {"checkpoint_times", c.output.checkpoint_times}};
  j["seed"] = c.seed;
  return j.dump(2) + "\n";
}

std::string config_hash(const RunConfig& config) {
  std::uint64_t h = 14695981039346656037ull;
  for (const unsigned char ch : dump_config(config)) {
    h ^= ch;
    h *= 1099511628211ull;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

FitSpec parse_fit_spec(const std::string& text) { return parse_fits(parse_json(text), ""); }

FitSpec load_fit_spec(const std::filesystem::path& path) {
  return parse_fit_spec(read_text_file(path));
}

std::string dump_fit_spec(const FitSpec& spec) { return fits_json(spec).dump(2) + "\n"; }

}  // namespace npd::io
