#pragma once

#include "npd/diagnostics.hpp"
#include "npd/grid.hpp"

#include <filesystem>
#include <fstream>
#include <limits>
#include <string>
#include <vector>

namespace npd::io {

/// Column names for a run with `species` species, Sobolev orders 0..k_max
/// and optional sharpness columns. Species and orders in names are 1-based
/// and 0-based respectively: mass_1, l2sq_c1, hksq_1_c1, sharp_0_c1, ...
std::vector<std::string> series_columns(int species, int k_max, bool sharpness);

/// One CSV row in the column order of series_columns.
std::vector<double> series_row(const DiagRecord& record, int k_max, bool sharpness);

/// Shortest round-trip decimal form ("nan", "inf", "-inf" for non-finite values).
std::string format_number(double value);

struct SeriesMeta {
  std::string config_hash;
  std::string code_version;
  GridSpec grid;
  int species = 0;
  int k_max = 0;
  double start_time = 0.0;
};

/// Metadata lives next to the CSV as <series>.meta.json.
std::filesystem::path meta_path(const std::filesystem::path& series);
void write_meta(const std::filesystem::path& series, const SeriesMeta& meta);
SeriesMeta read_meta(const std::filesystem::path& series);

/// Appends rows to a CSV time series; rows must have strictly increasing t.
class SeriesWriter {
 public:
  /// Truncates `path` and writes the header.
  SeriesWriter(const std::filesystem::path& path, std::vector<std::string> columns);
  /// Keeps rows of an existing file with t < t_resume and continues after them.
  static SeriesWriter resume(const std::filesystem::path& path, double t_resume);

  void append(const std::vector<double>& row);
  const std::vector<std::string>& columns() const { return columns_; }

 private:
  SeriesWriter() = default;
  std::ofstream out_;
  std::vector<std::string> columns_;
  double last_t_ = -std::numeric_limits<double>::infinity();
};

struct SeriesTable {
  std::vector<std::string> columns;
  std::vector<std::vector<double>> rows;

  /// -1 when absent.
  int column_index(const std::string& name) const;
  bool has_column(const std::string& name) const { return column_index(name) >= 0; }
  /// Throws std::out_of_range when absent.
  std::vector<double> column(const std::string& name) const;
  void add_column(const std::string& name, const std::vector<double>& values);
};

/// Throws std::runtime_error on ragged rows, bad numbers or non-increasing t.
SeriesTable read_series(const std::filesystem::path& path);
void write_series(const std::filesystem::path& path, const SeriesTable& table);

}  // namespace npd::io
