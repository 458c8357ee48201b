#pragma once

#include <cstddef>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace cdengine {

// Header-led tab-separated table. Lines starting with '#' are comments.
struct TsvTable {
  std::filesystem::path source;
  std::vector<std::string> comments;
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;
  std::vector<std::size_t> line_numbers;  // 1-based, parallel to rows

  // Index of the named column, or nullopt.
  std::optional<std::size_t> column(std::string_view name) const;
  std::size_t require_column(std::string_view name) const;
};

TsvTable read_tsv(const std::filesystem::path& path);
TsvTable parse_tsv(std::string_view text, const std::filesystem::path& source = "<memory>");

std::vector<std::string_view> split(std::string_view line, char sep);
std::string join(const std::vector<std::string>& parts, std::string_view sep);

std::optional<long long> parse_int(std::string_view s);
std::optional<double> parse_double(std::string_view s);

// Shortest round-trip representation; identical on every run.
std::string format_double(double v);
// Empty cell marks a missing / undefined value.
std::string format_optional(const std::optional<double>& v);

void write_tsv(const std::filesystem::path& path, const std::vector<std::string>& comments,
               const std::vector<std::string>& header,
               const std::vector<std::vector<std::string>>& rows);

std::string read_file(const std::filesystem::path& path);

}  // namespace cdengine
