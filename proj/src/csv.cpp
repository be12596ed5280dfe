#include "oscavg/csv.hpp"

#include <charconv>
#include <cstdio>
#include <fstream>
#include <sstream>

namespace oscavg {

std::string format_full(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.16e", v);
  return buf;
}

void write_csv(const std::filesystem::path& path, const CsvTable& table) {
  for (const auto& row : table.rows) {
    if (row.size() != table.header.size()) {
      throw Error("write_csv: row width " + std::to_string(row.size()) +
                  " does not match header width " + std::to_string(table.header.size()));
    }
  }
  std::ofstream out(path);
  if (!out) throw Error("write_csv: cannot open " + path.string() + " for writing");
  for (std::size_t i = 0; i < table.header.size(); ++i) {
    if (i > 0) out << ',';
    out << table.header[i];
  }
  out << '\n';
  for (const auto& row : table.rows) {
    for (std::size_t i = 0; i < row.size(); ++i) {
      if (i > 0) out << ',';
      out << format_full(row[i]);
    }
    out << '\n';
  }
  out.flush();
  if (!out) throw Error("write_csv: write failed for " + path.string());
}

CsvTable read_csv(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error("read_csv: cannot open " + path.string());
  CsvTable table;
  std::string line;
  if (!std::getline(in, line)) throw Error("read_csv: " + path.string() + " is empty");
  if (!line.empty() && line.back() == '\r') line.pop_back();
  {
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) table.header.push_back(cell);
  }
  if (table.header.empty()) throw Error("read_csv: " + path.string() + " has an empty header");
  std::size_t lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    std::vector<double> row;
    std::size_t pos = 0;
    while (true) {
      const std::size_t comma = line.find(',', pos);
      const std::string_view cell =
          std::string_view(line).substr(pos, comma == std::string::npos ? comma : comma - pos);
      double v = 0.0;
      auto [end, ec] = std::from_chars(cell.data(), cell.data() + cell.size(), v);
      if (ec != std::errc() || end != cell.data() + cell.size()) {
        throw Error("read_csv: " + path.string() + " line " + std::to_string(lineno) +
                    ": malformed number '" + std::string(cell) + "'");
      }
      row.push_back(v);
      if (comma == std::string::npos) break;
      pos = comma + 1;
    }
    if (row.size() != table.header.size()) {
      throw Error("read_csv: " + path.string() + " line " + std::to_string(lineno) +
                  ": width mismatch");
    }
    table.rows.push_back(std::move(row));
  }
  return table;
}

}  // namespace oscavg
