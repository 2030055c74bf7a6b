#pragma once

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

namespace tdc::detail {

/// Writes `bytes` to a sibling temporary and renames it over `path`.
void write_file_atomic(const std::filesystem::path& path, std::string_view bytes);

std::string read_file(const std::filesystem::path& path);

/// Splits one CSV record. Double-quoted fields may contain commas and "" escapes.
std::vector<std::string> split_csv_line(std::string_view line);

/// Quotes a field if it contains a comma, quote or newline.
std::string csv_escape(std::string_view field);

/// Lines of a text file with trailing '\r' removed; blank lines are kept so
/// that line numbers stay meaningful.
std::vector<std::string> read_lines(const std::filesystem::path& path);

double parse_double(std::string_view text, std::string_view what);
long long parse_int(std::string_view text, std::string_view what);

std::string trim(std::string_view text);

}  // namespace tdc::detail
