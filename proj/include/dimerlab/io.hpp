#pragma once

#include <filesystem>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include <json.hpp>

namespace dimerlab {

/// Version string baked in at build time (project version plus git describe).
std::string_view version();

using CsvCell = std::variant<double, long long, std::string>;

/// One header row, fixed column order; doubles are written with 12 significant digits.
struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<CsvCell>> rows;

  void add_row(std::vector<CsvCell> row);
  std::string render() const;
};

std::string format_double(double value);

/// Writes via a temporary file in the same directory and renames it over `path`,
/// so readers never observe a partial file. Creates parent directories.
void write_atomic(const std::filesystem::path& path, std::string_view contents);

void write_csv(const std::filesystem::path& path, const CsvTable& table);
void write_json(const std::filesystem::path& path, const nlohmann::json& value);

}  // namespace dimerlab
