#include "support.hpp"

#include "npd/io/checkpoint.hpp"
#include "npd/io/commands.hpp"
#include "npd/io/config.hpp"
#include "npd/io/series.hpp"

#include <doctest.h>
#include <json.hpp>

#include <filesystem>
#include <fstream>
#include <sstream>

using namespace npd;
using namespace npd::io;
using namespace npd::testing;
namespace fs = std::filesystem;
using json = nlohmann::json;

namespace {

const char* kMinimal = R"({
  "grid": {"box_length": 12.0, "resolution": 16},
  "species": [
    {"valence": 1, "bumps": [{"amplitude": 0.5, "center": [1, 0, 0], "width": 1.5}]},
    {"valence": -1, "bumps": [{"amplitude": 0.5, "center": [-1, 0, 0], "width": 1.5}]}
  ]
})";

json minimal() { return json::parse(kMinimal); }

RunConfig small_run(double t_end) {
  json j = minimal();
  j["stepper"] = {{"t_end", t_end}, {"dt", 0.25}};
  j["diagnostics"] = {{"cadence", 0.25}};
  return parse_config(j.dump());
}

std::string error_of(const std::string& text) {
  try {
    parse_config(text);
  } catch (const ConfigError& e) {
    return e.what();
  }
  return "";
}

struct TempDir {
  fs::path path;
  explicit TempDir(const std::string& name) : path(fs::temp_directory_path() / ("npd_test_" + name)) {
    fs::remove_all(path);
    fs::create_directories(path);
  }
  ~TempDir() { fs::remove_all(path); }
};

std::string slurp(const fs::path& p) { return read_text_file(p); }

json load_json(const fs::path& p) { return json::parse(slurp(p)); }

}  // namespace

TEST_CASE("config parsing") {
  SUBCASE("minimal config takes every default") {
    RunConfig c = parse_config(kMinimal);
    CHECK(c.grid.resolution == 16);
    CHECK(c.grid.dealias_fraction == doctest::Approx(2.0 / 3.0));
    CHECK(c.diffusivity == 1.0);
    CHECK_FALSE(c.stepper.dt.has_value());
    CHECK(c.stepper.positivity_tolerance == 1e-8);
    CHECK(c.diagnostics.k_max == 2);
    CHECK(c.fits.claims == default_claims());
    const json dumped = json::parse(dump_config(c));
    for (const char* key : {"grid", "diffusivity", "allow_unequal_valence", "species", "stepper",
                            "diagnostics", "fits", "output", "seed"}) {
      CHECK(dumped.contains(key));
    }
    CHECK(dumped["stepper"]["dt"] == "auto");
    CHECK(dumped["stepper"].contains("dt_max"));
    CHECK(dumped["diagnostics"].contains("shell_constant"));
  }
  SUBCASE("normalized dump round trips") {
    RunConfig c = small_run(3.0);
    c.output.checkpoint_times = {1.0, 2.0};
    c.fits.window = std::array<double, 2>{0.5, 2.5};
    RunConfig again = parse_config(dump_config(c));
    CHECK(again == c);
    CHECK(dump_config(again) == dump_config(c));
    CHECK(config_hash(again) == config_hash(c));
    CHECK(config_hash(c).size() == 16);
    again.diffusivity = 2.0;
    CHECK(config_hash(again) != config_hash(c));
  }
  SUBCASE("negative diffusivity names the key") {
    json j = minimal();
    j["diffusivity"] = -1.0;
    CHECK(error_of(j.dump()).find("diffusivity") != std::string::npos);
  }
  SUBCASE("single charged species is rejected") {
    json j = minimal();
    j["species"].erase(1);
    const std::string e = error_of(j.dump());
    CHECK(e.find("rho") != std::string::npos);
  }
  SUBCASE("zero species") {
    json j = minimal();
    j["species"] = json::array();
    CHECK(error_of(j.dump()).find("species") != std::string::npos);
  }
  SUBCASE("unknown keys") {
    json j = minimal();
    j["grid"]["spacing"] = 0.1;
    CHECK(error_of(j.dump()).find("grid.spacing") != std::string::npos);
    j = minimal();
    j["colour"] = "blue";
    CHECK(error_of(j.dump()).find("colour") != std::string::npos);
  }
  SUBCASE("type mismatch carries the array path") {
    json j = minimal();
    j["species"][1]["bumps"][0]["width"] = "wide";
    CHECK(error_of(j.dump()).find("species[1].bumps[0].width") != std::string::npos);
  }
  SUBCASE("invariants") {
    json j = minimal();
    j["grid"]["resolution"] = 15;
    CHECK(error_of(j.dump()).find("grid.resolution") != std::string::npos);
    j = minimal();
    j["species"][1]["valence"] = -2;
    CHECK_FALSE(error_of(j.dump()).empty());
    j["allow_unequal_valence"] = true;
    CHECK_NOTHROW(parse_config(j.dump()));
    CHECK_FALSE(error_of("{not json").empty());
  }
  SUBCASE("explicit dt") {
    json j = minimal();
    j["stepper"] = {{"dt", 0.125}};
    RunConfig c = parse_config(j.dump());
    REQUIRE(c.stepper.dt.has_value());
    CHECK(*c.stepper.dt == 0.125);
  }
}

TEST_CASE("fit spec") {
  FitSpec s = parse_fit_spec(R"({"window": [15, 50], "claims": [
      {"id": "l2", "column": "l2sq_c{i}", "predicted": -1.5, "tolerance": 0.2},
      {"id": "ent", "column": "entropy_total", "model": "log-law", "predicted": -1.5,
       "tolerance": 0.45, "scale_by_initial_mass": true}]})");
  REQUIRE(s.window.has_value());
  CHECK((*s.window)[1] == 50.0);
  REQUIRE(s.claims.size() == 2);
  CHECK(s.claims[1].model == FitModel::log_law);
  CHECK(s.claims[0].mode == VerdictMode::two_sided);
  CHECK(parse_fit_spec(dump_fit_spec(s)) == s);
  CHECK_THROWS_AS(parse_fit_spec(R"({"claims": [{"id": "x", "column": "t"}]})"), ConfigError);
  CHECK(parse_fit_spec("{}").claims == default_claims());
}

TEST_CASE("series files") {
  TempDir tmp("series");
  const fs::path p = tmp.path / "s.csv";
  const auto cols = series_columns(2, 2, true);
  CHECK(cols.front() == "t");
  CHECK(std::find(cols.begin(), cols.end(), "hksq_2_c2") != cols.end());
  CHECK(std::find(cols.begin(), cols.end(), "sharp_0_c1") != cols.end());
  CHECK(std::find(cols.begin(), cols.end(), "local_entropy_2") != cols.end());
  CHECK(series_columns(2, 2, false).size() < cols.size());

  std::mt19937_64 rng(5);
  std::normal_distribution<double> normal;
  std::vector<std::vector<double>> rows;
  {
    SeriesWriter w(p, cols);
    for (int r = 0; r < 6; ++r) {
      std::vector<double> row(cols.size());
      for (double& v : row) v = std::exp(20.0 * normal(rng)) * normal(rng);
      row[0] = 0.25 * r;
      row[3] = std::nan("");
      w.append(row);
      rows.push_back(row);
    }
    std::vector<double> stale(cols.size(), 0.0);
    CHECK_THROWS(w.append(stale));
  }
  SeriesTable t = read_series(p);
  CHECK(t.columns == cols);
  REQUIRE(t.rows.size() == 6);
  for (std::size_t r = 0; r < rows.size(); ++r) {
    for (std::size_t c = 0; c < cols.size(); ++c) {
      if (c == 3) {
        CHECK(std::isnan(t.rows[r][c]));
      } else {
        CHECK(t.rows[r][c] == rows[r][c]);
      }
    }
  }
  CHECK(format_number(std::numeric_limits<double>::infinity()) == "inf");
  CHECK(format_number(0.1) == "0.1");

  {
    SeriesWriter w = SeriesWriter::resume(p, 0.75);
    std::vector<double> row = rows[4];
    row[1] = 42.0;
    w.append(row);
  }
  t = read_series(p);
  REQUIRE(t.rows.size() == 4);
  CHECK(t.rows[3][1] == 42.0);
  CHECK(t.column("t")[2] == 0.5);
  CHECK_THROWS_AS(t.column("nope"), std::out_of_range);

  SeriesMeta m{"abc", kCodeVersion, {12.0, 16, 2.0 / 3.0}, 2, 2, 0.0};
  write_meta(p, m);
  SeriesMeta back = read_meta(p);
  CHECK(back.config_hash == "abc");
  CHECK(back.grid == m.grid);
  CHECK(back.k_max == 2);

  std::ofstream(tmp.path / "bad.csv") << "t,a\n0,1\n0,2\n";
  CHECK_THROWS(read_series(tmp.path / "bad.csv"));
  std::ofstream(tmp.path / "ragged.csv") << "t,a\n0,1\n1\n";
  CHECK_THROWS(read_series(tmp.path / "ragged.csv"));
}

TEST_CASE("checkpoints") {
  TempDir tmp("ckpt");
  NpdState s = dipole(grid(12.0, 16), 0.5, 1.5, 1.0, 0.7);
  s.time = 3.25;
  const fs::path p = tmp.path / "a.ckpt";
  write_checkpoint(p, s);
  NpdState back = read_checkpoint(p);
  CHECK(back.time == 3.25);
  CHECK(back.params.valences == s.params.valences);
  CHECK(back.params.diffusivity == 0.7);
  CHECK(back.grid()->spec() == s.grid()->spec());
  for (int i = 0; i < 2; ++i) CHECK((back.concentrations[i].coeffs == s.concentrations[i].coeffs).all());
  CHECK_NOTHROW(read_checkpoint(p, s.grid()));
  CHECK_THROWS_AS(read_checkpoint(p, grid(12.0, 32)), CheckpointError);

  std::string bytes = slurp(p);
  CHECK(bytes.size() == 8 + 4 * 6 + 8 * 4 + 8 * 2 + 2 * 16 * 16 * 9 * 16);

  std::string corrupt = bytes;
  corrupt[0] = 'X';
  std::ofstream(tmp.path / "magic.ckpt", std::ios::binary) << corrupt;
  CHECK_THROWS_AS(read_checkpoint(tmp.path / "magic.ckpt"), CheckpointError);
  std::ofstream(tmp.path / "short.ckpt", std::ios::binary) << bytes.substr(0, bytes.size() - 5);
  CHECK_THROWS_AS(read_checkpoint(tmp.path / "short.ckpt"), CheckpointError);
  std::ofstream(tmp.path / "long.ckpt", std::ios::binary) << bytes << "x";
  CHECK_THROWS_AS(read_checkpoint(tmp.path / "long.ckpt"), CheckpointError);
  CHECK(checkpoint_name(2.5) == "checkpoint_t2.5.ckpt");
}

TEST_CASE("time step selection") {
  RunConfig c = small_run(1.0);
  NpdState s = make_initial_state(c.initial_condition(), Grid::make(c.grid)).state;
  CHECK(choose_dt(c, s) == 0.25);
  c.stepper.dt = 0.3;
  CHECK_THROWS_AS(choose_dt(c, s), ConfigError);
  c.stepper.dt.reset();
  c.stepper.dt_max = 0.1;
  const double dt = choose_dt(c, s);
  CHECK(dt <= 0.1);
  CHECK(std::abs(std::round(0.25 / dt) * dt - 0.25) < 1e-12);
}

TEST_CASE("run command") {
  TempDir tmp("run");
  std::ostringstream log;
  CommandOptions o;
  o.deterministic = true;

  SUBCASE("t_end = 0 records the initial state only") {
    o.out_dir = tmp.path / "zero";
    CHECK(cmd_run(small_run(0.0), o, log) == kExitOk);
    SeriesTable t = read_series(o.out_dir / RunFiles::series);
    REQUIRE(t.rows.size() == 1);
    CHECK(t.rows[0][0] == 0.0);
  }

  SUBCASE("dipole run, artifacts, resume and determinism") {
    RunConfig c = small_run(4.0);
    c.output.checkpoint_times = {2.0};
    o.out_dir = tmp.path / "a";
    REQUIRE(cmd_run(c, o, log) == kExitOk);
    for (const char* f : {RunFiles::series, RunFiles::summary, RunFiles::config, RunFiles::initial,
                          RunFiles::final_state}) {
      CHECK(fs::exists(o.out_dir / f));
    }
    CHECK(fs::exists(o.out_dir / checkpoint_name(2.0)));
    CHECK(fs::exists(meta_path(o.out_dir / RunFiles::series)));
    CHECK_FALSE(fs::exists(o.out_dir / RunFiles::failure));
    CHECK(parse_config(slurp(o.out_dir / RunFiles::config)) == c);

    const json summary = load_json(o.out_dir / RunFiles::summary);
    CHECK(summary["status"] == "ok");
    CHECK(summary["config_hash"] == config_hash(c));
    CHECK(summary["run"]["records"] == 17);

    SeriesTable t = read_series(o.out_dir / RunFiles::series);
    REQUIRE(t.rows.size() == 17);
    const auto rho = t.column("rho_l2sq");
    for (std::size_t i = 2; i < rho.size(); ++i) CHECK(rho[i] < rho[i - 1]);
    const auto m1 = t.column("mass_1");
    for (double m : m1) CHECK(std::abs(m - m1[0]) <= 1e-12 * m1[0]);
    for (double r : t.column("R_energy")) CHECK(r < 1e-6);

    CommandOptions again = o;
    again.out_dir = tmp.path / "b";
    REQUIRE(cmd_run(c, again, log) == kExitOk);
    CHECK(slurp(o.out_dir / RunFiles::series) == slurp(again.out_dir / RunFiles::series));

    again.resume = again.out_dir / checkpoint_name(2.0);
    REQUIRE(cmd_run(c, again, log) == kExitOk);
    CHECK(slurp(o.out_dir / RunFiles::series) == slurp(again.out_dir / RunFiles::series));

    SUBCASE("baseline, fit and plot") {
      const fs::path series = o.out_dir / RunFiles::series;
      REQUIRE(cmd_baseline(c, series, log) == kExitOk);
      SeriesTable b = read_series(o.out_dir / "series_baseline.csv");
      CHECK(b.column("heat_hksq_1_c2")[0] == doctest::Approx(b.column("hksq_1_c2")[0]).epsilon(1e-14));
      const auto heat = b.column("heat_hksq_0_c1");
      for (std::size_t i = 1; i < heat.size(); ++i) CHECK(heat[i] <= heat[i - 1]);

      FitSpec spec;
      spec.window = std::array<double, 2>{1.0, 4.0};
      spec.claims = {{"mass", "mass_{i}", FitModel::power_law, 0.0, 0.01, VerdictMode::two_sided, false}};
      CHECK(cmd_fit(series, spec, tmp.path / "fit.json", log) == kExitOk);
      const json report = load_json(tmp.path / "fit.json");
      CHECK(report["claims"].size() == 2);
      CHECK(report["all_pass"] == true);
      spec.claims[0].predicted = 1.0;
      CHECK(cmd_fit(series, spec, tmp.path / "fit2.json", log) == kExitGateFailed);
      spec.claims = {{"ghost", "no_such_column", FitModel::power_law, 0.0, 0.1, VerdictMode::two_sided, false}};
      CHECK(cmd_fit(series, spec, tmp.path / "fit3.json", log) == kExitGateFailed);

      const fs::path plots = tmp.path / "plots";
      CHECK(cmd_plot(series, plots, log) == kExitOk);
      for (const char* f : {"norms.dat", "entropy.dat", "moments.dat", "residuals.dat",
                            "plot_norms.py", "plot_entropy.py"}) {
        CHECK(fs::exists(plots / f));
      }
    }
  }

  SUBCASE("positivity abort writes a failure record") {
    json j = minimal();
    j["species"][0]["bumps"][0]["width"] = 0.6;
    j["species"][1]["bumps"][0]["width"] = 0.6;
    j["stepper"] = {{"t_end", 1.0}, {"dt", 0.25}, {"positivity_tolerance", 0.0}};
    RunConfig c = parse_config(j.dump());
    o.out_dir = tmp.path / "neg";
    CHECK(cmd_run(c, o, log) == kExitAborted);
    REQUIRE(fs::exists(o.out_dir / RunFiles::failure));
    const json f = load_json(o.out_dir / RunFiles::failure);
    CHECK(f["kind"] == "positivity");
    CHECK(f["min_value"].get<double>() < 0.0);
    CHECK(load_json(o.out_dir / RunFiles::summary)["status"] == "failed");
  }

  SUBCASE("output root from the environment") {
    RunConfig c = small_run(0.0);
    c.output.directory = "nested";
    ::setenv(kOutputRootEnv, tmp.path.c_str(), 1);
    CHECK(resolve_output_dir(c, CommandOptions{}) == tmp.path / "nested");
    ::unsetenv(kOutputRootEnv);
    CHECK(resolve_output_dir(c, CommandOptions{}) == fs::path("nested"));
  }
}

TEST_CASE("check command") {
  TempDir tmp("check");
  std::ostringstream log;
  CommandOptions o;
  o.out_dir = tmp.path;
  o.deterministic = true;
  CHECK(cmd_check(small_run(1.0), o, log) == kExitOk);
  const json r = load_json(tmp.path / "check_report.json");
  CHECK(r.contains("gates"));
}
