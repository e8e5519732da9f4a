#include "dimerlab/io.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <system_error>
#include <unistd.h>

#include "dimerlab/errors.hpp"

#ifndef DIMERLAB_VERSION
#define DIMERLAB_VERSION "unknown"
#endif

namespace dimerlab {

std::string_view version() { return DIMERLAB_VERSION; }

std::string format_double(double value) {
  if (std::isnan(value)) return "nan";
  if (std::isinf(value)) return value > 0 ? "inf" : "-inf";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.12g", value == 0.0 ? 0.0 : value);  // no "-0"
  return buf;
}

void CsvTable::add_row(std::vector<CsvCell> row) {
  if (row.size() != header.size()) throw ValidationError("CSV row width does not match the header");
  rows.push_back(std::move(row));
}

std::string CsvTable::render() const {
  std::ostringstream out;
  for (std::size_t k = 0; k < header.size(); ++k) out << (k ? "," : "") << header[k];
  out << '\n';
  for (const auto& row : rows) {
    for (std::size_t k = 0; k < row.size(); ++k) {
      if (k) out << ',';
      std::visit(
          [&](const auto& v) {
            using T = std::decay_t<decltype(v)>;
            if constexpr (std::is_same_v<T, double>) {
              out << format_double(v);
            } else {
              out << v;
            }
          },
          row[k]);
    }
    out << '\n';
  }
  return out.str();
}

void write_atomic(const std::filesystem::path& path, std::string_view contents) {
  namespace fs = std::filesystem;
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  fs::path tmp = path;
  tmp += ".tmp." + std::to_string(::getpid());
  {
    std::ofstream f(tmp, std::ios::binary | std::ios::trunc);
    if (!f) throw Error("cannot open " + tmp.string() + " for writing");
    f.write(contents.data(), static_cast<std::streamsize>(contents.size()));
    f.flush();
    if (!f) {
      std::error_code ec;
      fs::remove(tmp, ec);
      throw Error("failed writing " + tmp.string());
    }
  }
  std::error_code ec;
  fs::rename(tmp, path, ec);
  if (ec) {
    fs::remove(tmp, ec);
    throw Error("cannot rename output into place: " + path.string());
  }
}

void write_csv(const std::filesystem::path& path, const CsvTable& table) {
  write_atomic(path, table.render());
}

void write_json(const std::filesystem::path& path, const nlohmann::json& value) {
  write_atomic(path, value.dump(2) + "\n");
}

}  // namespace dimerlab
