#pragma once

#include <istream>
#include <optional>
#include <string>
#include <vector>

namespace mtginf::detail {

using CsvRow = std::vector<std::string>;

/// Splits RFC-4180-style CSV (quoted fields, doubled quotes). Blank lines are
/// skipped; surrounding whitespace is trimmed from unquoted fields.
std::vector<CsvRow> parse_csv(std::istream& in);

/// Throws IoError if the file cannot be opened.
std::vector<CsvRow> read_csv_file(const std::string& path);

std::optional<double> parse_double(const std::string& field);

}  // namespace mtginf::detail
