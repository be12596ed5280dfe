#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "oscavg/errors.hpp"

namespace oscavg {

/// Full-precision decimal form of v (17 significant digits, %.16e).
/// Reading the text back with a correctly rounding parser reproduces v
/// bitwise.
[[nodiscard]] std::string format_full(double v);

struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<double>> rows;  ///< each row.size() == header.size()
};

/// Writes header plus full-precision numeric rows.  Throws Error on I/O
/// failure or a row/header width mismatch.
void write_csv(const std::filesystem::path& path, const CsvTable& table);

/// Reads a file written by write_csv.  Throws Error on malformed input.
[[nodiscard]] CsvTable read_csv(const std::filesystem::path& path);

}  // namespace oscavg
