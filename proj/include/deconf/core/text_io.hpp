#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <string>
#include <string_view>
#include <vector>

namespace deconf::text {

// Shortest form is not required; 17 significant digits round-trips doubles.
std::string format_real(double value);

double parse_real(std::string_view token);
long long parse_int(std::string_view token);

std::vector<std::string_view> split(std::string_view line, char delimiter);
std::string_view trim(std::string_view s);

//! Header block of `# key=value` lines preceding a delimited-text body.
struct Header
{
  std::map<std::string, std::string> entries;

  const std::string& at(const std::string& key) const;
  bool contains(const std::string& key) const { return entries.count(key) > 0; }
};

// Parses "# key=value"; returns false for anything else.
bool parse_header_line(std::string_view line, Header& header);

// Writes through a temporary sibling then renames over `path`.
void write_atomic(const std::filesystem::path& path, const std::string& contents);

std::string read_file(const std::filesystem::path& path);

// FNV-1a, rendered as 16 hex digits. Stable across platforms and runs.
std::string digest(std::string_view bytes);

} // namespace deconf::text
