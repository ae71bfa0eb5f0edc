#pragma once

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

namespace qmcabc::csv {

/// Shortest round-trip-safe text: 17 significant digits ("inf"/"nan" for non-finite values).
std::string format_double(double x);
double parse_double(std::string_view text);

struct Table {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;

  std::size_t column(std::string_view name) const;
};

Table read(const std::filesystem::path& path);
std::vector<std::string> split_line(std::string_view line);
std::string join(const std::vector<std::string>& fields);

}  // namespace qmcabc::csv
