// csv.hpp - CSV and JSON artifact I/O for the command-line tool.

#pragma once

#include "json.hpp"

#include <filesystem>
#include <span>
#include <string>
#include <vector>

namespace qcr::cli {

/// Doubles are written with 17 significant digits.
std::string format_double(double v);

/// Header row plus one row per index of the (equal-length) columns.
void write_columns(const std::filesystem::path& path, std::span<const std::string> header,
                   std::span<const std::vector<double>> columns);

void write_text(const std::filesystem::path& path, const std::string& text);
void write_json(const std::filesystem::path& path, const nlohmann::ordered_json& j);

struct TwoColumns {
    std::vector<double> x;
    std::vector<double> y;
};

/// Reads a two-column numeric CSV. A first line that does not parse as
/// numbers is treated as a header; blank lines and '#' comments are skipped.
/// Malformed input raises config_error naming the line.
TwoColumns read_two_columns(const std::filesystem::path& path);

}  // namespace qcr::cli
