#include "npd/io/series.hpp"

#include "npd/io/config.hpp"

#include <json.hpp>

#include <charconv>
#include <cmath>
#include <sstream>
#include <stdexcept>

namespace npd::io {
namespace {

std::string order_name(double p) {
  return std::to_string(static_cast<int>(p));
}

std::vector<std::string> split(const std::string& line) {
  std::vector<std::string> out;
  std::string field;
  std::istringstream in(line);
  while (std::getline(in, field, ',')) out.push_back(field);
  if (!line.empty() && line.back() == ',') out.emplace_back();
  return out;
}

double parse_number(const std::string& s, std::size_t line) {
  double v = 0.0;
  const char* first = s.data();
  const char* last = s.data() + s.size();
  const auto res = std::from_chars(first, last, v);
  if (res.ec != std::errc() || res.ptr != last) {
    throw std::runtime_error("series line " + std::to_string(line) + ": bad number '" + s + "'");
  }
  return v;
}

}  // namespace

std::vector<std::string> series_columns(int species, int k_max, bool sharpness) {
  std::vector<std::string> c{"t"};
  const auto per_species = [&](const std::string& prefix) {
    for (int i = 1; i <= species; ++i) c.push_back(prefix + std::to_string(i));
  };
  per_species("mass_");
  c.push_back("charge_total");
  per_species("l2sq_c");
  for (int k = 1; k <= k_max; ++k) per_species("hksq_" + std::to_string(k) + "_c");
  for (double p : kSigmaNormOrders) c.push_back("lp_sigma_" + order_name(p));
  for (const char* name : {"rho_l2sq", "u_l2sq", "u_inf", "gradphi_l2", "gradphi_inf"}) {
    c.push_back(name);
  }
  per_species("entropy_");
  c.push_back("entropy_total");
  per_species("exp_entropy_");
  per_species("moment6_");
  per_species("local_entropy_");
  for (const char* name : {"R_energy", "R_L2", "shell_ratio_max"}) c.push_back(name);
  for (int j = 1; j <= 4; ++j) c.push_back("ell_ratio_" + std::to_string(j));
  if (sharpness) {
    for (int k = 0; k <= k_max; ++k) per_species("sharp_" + std::to_string(k) + "_c");
  }
  per_species("min_c_");
  return c;
}

std::vector<double> series_row(const DiagRecord& r, int k_max, bool sharpness) {
  const std::size_t n = r.mass.size();
  std::vector<double> row{r.t};
  row.insert(row.end(), r.mass.begin(), r.mass.end());
  row.push_back(r.charge_total);
  for (int k = 0; k <= k_max; ++k) {
    for (std::size_t i = 0; i < n; ++i) row.push_back(r.sobolev_sq[i][k]);
  }
  row.insert(row.end(), r.sigma_lp.begin(), r.sigma_lp.end());
  for (double v : {r.rho_l2sq, r.u_l2sq, r.u_inf, r.gradphi_l2, r.gradphi_inf}) row.push_back(v);
  row.insert(row.end(), r.entropy.begin(), r.entropy.end());
  row.push_back(r.entropy_total);
  row.insert(row.end(), r.exp_entropy.begin(), r.exp_entropy.end());
  row.insert(row.end(), r.moment6.begin(), r.moment6.end());
  row.insert(row.end(), r.local_entropy.begin(), r.local_entropy.end());
  for (double v : {r.residual_energy, r.residual_l2, r.shell_ratio_max}) row.push_back(v);
  row.insert(row.end(), r.elliptic.begin(), r.elliptic.end());
  if (sharpness) {
    if (r.sharpness.size() != n) throw std::invalid_argument("series_row: record has no sharpness norms");
    for (int k = 0; k <= k_max; ++k) {
      for (std::size_t i = 0; i < n; ++i) row.push_back(r.sharpness[i][k]);
    }
  }
  row.insert(row.end(), r.min_c.begin(), r.min_c.end());
  return row;
}

std::string format_number(double value) {
  if (std::isnan(value)) return "nan";
  if (std::isinf(value)) return value > 0 ? "inf" : "-inf";
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, value);
  return std::string(buf, res.ptr);
}

std::filesystem::path meta_path(const std::filesystem::path& series) {
  std::filesystem::path p = series;
  p += ".meta.json";
  return p;
}

void write_meta(const std::filesystem::path& series, const SeriesMeta& meta) {
  nlohmann::ordered_json j;
  j["config_hash"] = meta.config_hash;
  j["code_version"] = meta.code_version;
  j["grid"] = {{"box_length", meta.grid.box_length},
               {"resolution", meta.grid.resolution},
               {"dealias_fraction", meta.grid.dealias_fraction}};
  j["species"] = meta.species;
  j["k_max"] = meta.k_max;
  j["start_time"] = meta.start_time;
  std::ofstream out(meta_path(series), std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + meta_path(series).string());
  out << j.dump(2) << "\n";
}

SeriesMeta read_meta(const std::filesystem::path& series) {
  const auto j = nlohmann::json::parse(read_text_file(meta_path(series)));
  SeriesMeta m;
  m.config_hash = j.at("config_hash").get<std::string>();
  m.code_version = j.at("code_version").get<std::string>();
  m.grid.box_length = j.at("grid").at("box_length").get<double>();
  m.grid.resolution = j.at("grid").at("resolution").get<int>();
  m.grid.dealias_fraction = j.at("grid").at("dealias_fraction").get<double>();
  m.species = j.at("species").get<int>();
  m.k_max = j.at("k_max").get<int>();
  m.start_time = j.at("start_time").get<double>();
  return m;
}

SeriesWriter::SeriesWriter(const std::filesystem::path& path, std::vector<std::string> columns)
    : out_(path, std::ios::binary | std::ios::trunc), columns_(std::move(columns)) {
  if (!out_) throw std::runtime_error("cannot write " + path.string());
  for (std::size_t i = 0; i < columns_.size(); ++i) out_ << (i ? "," : "") << columns_[i];
  out_ << "\n";
  out_.flush();
}

SeriesWriter SeriesWriter::resume(const std::filesystem::path& path, double t_resume) {
  SeriesTable table = read_series(path);
  std::erase_if(table.rows, [&](const std::vector<double>& row) { return row[0] >= t_resume; });
  SeriesWriter w(path, table.columns);
  for (const auto& row : table.rows) w.append(row);
  return w;
}

void SeriesWriter::append(const std::vector<double>& row) {
  if (row.size() != columns_.size()) {
    throw std::invalid_argument("series row has " + std::to_string(row.size()) +
                                " values for " + std::to_string(columns_.size()) + " columns");
  }
  if (!(row[0] > last_t_)) throw std::invalid_argument("series rows must have increasing t");
  last_t_ = row[0];
  for (std::size_t i = 0; i < row.size(); ++i) out_ << (i ? "," : "") << format_number(row[i]);
  out_ << "\n";
  out_.flush();
}

int SeriesTable::column_index(const std::string& name) const {
  for (std::size_t i = 0; i < columns.size(); ++i) {
    if (columns[i] == name) return static_cast<int>(i);
  }
  return -1;
}

std::vector<double> SeriesTable::column(const std::string& name) const {
  const int c = column_index(name);
  if (c < 0) throw std::out_of_range("series has no column '" + name + "'");
  std::vector<double> out;
  out.reserve(rows.size());
  for (const auto& row : rows) out.push_back(row[c]);
  return out;
}

void SeriesTable::add_column(const std::string& name, const std::vector<double>& values) {
  if (values.size() != rows.size()) throw std::invalid_argument("add_column: length mismatch");
  if (has_column(name)) throw std::invalid_argument("add_column: duplicate column " + name);
  columns.push_back(name);
  for (std::size_t r = 0; r < rows.size(); ++r) rows[r].push_back(values[r]);
}

SeriesTable read_series(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + path.string());
  SeriesTable t;
  std::string line;
  if (!std::getline(in, line)) throw std::runtime_error(path.string() + ": empty series");
  t.columns = split(line);
  if (t.columns.empty() || t.columns[0] != "t") {
    throw std::runtime_error(path.string() + ": first column must be t");
  }
  std::size_t lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    const auto fields = split(line);
    if (fields.size() != t.columns.size()) {
      throw std::runtime_error("series line " + std::to_string(lineno) + ": expected " +
                               std::to_string(t.columns.size()) + " fields");
    }
    std::vector<double> row;
    row.reserve(fields.size());
    for (const auto& f : fields) row.push_back(parse_number(f, lineno));
    if (!t.rows.empty() && !(row[0] > t.rows.back()[0])) {
      throw std::runtime_error("series line " + std::to_string(lineno) + ": t not increasing");
    }
    t.rows.push_back(std::move(row));
  }
  return t;
}

void write_series(const std::filesystem::path& path, const SeriesTable& table) {
  SeriesWriter w(path, table.columns);
  for (const auto& row : table.rows) w.append(row);
}

}  // namespace npd::io
