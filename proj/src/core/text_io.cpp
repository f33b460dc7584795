#include "deconf/core/text_io.hpp"

#include "deconf/core/types.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

namespace deconf::text {

std::string
format_real(double value)
{
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", value);
  return buf;
}

double
parse_real(std::string_view token)
{
  token = trim(token);
  double value = 0.0;
  auto [ptr, ec] = std::from_chars(token.data(), token.data() + token.size(), value);
  if (ec != std::errc() || ptr != token.data() + token.size())
    throw Error("invalid real '" + std::string(token) + "'");
  return value;
}

long long
parse_int(std::string_view token)
{
  token = trim(token);
  long long value = 0;
  auto [ptr, ec] = std::from_chars(token.data(), token.data() + token.size(), value);
  if (ec != std::errc() || ptr != token.data() + token.size())
    throw Error("invalid integer '" + std::string(token) + "'");
  return value;
}

std::vector<std::string_view>
split(std::string_view line, char delimiter)
{
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (true) {
    auto pos = line.find(delimiter, start);
    if (pos == std::string_view::npos) {
      out.push_back(line.substr(start));
      return out;
    }
    out.push_back(line.substr(start, pos - start));
    start = pos + 1;
  }
}

std::string_view
trim(std::string_view s)
{
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t' || s.front() == '\r'))
    s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r'))
    s.remove_suffix(1);
  return s;
}

const std::string&
Header::at(const std::string& key) const
{
  auto it = entries.find(key);
  if (it == entries.end())
    throw Error("header is missing key '" + key + "'");
  return it->second;
}

bool
parse_header_line(std::string_view line, Header& header)
{
  if (line.empty() || line.front() != '#')
    return false;
  line.remove_prefix(1);
  auto eq = line.find('=');
  if (eq == std::string_view::npos)
    return false;
  header.entries[std::string(trim(line.substr(0, eq)))] = std::string(trim(line.substr(eq + 1)));
  return true;
}

void
write_atomic(const std::filesystem::path& path, const std::string& contents)
{
  if (path.has_parent_path())
    std::filesystem::create_directories(path.parent_path());
  auto tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out)
      throw Error("cannot open '" + tmp.string() + "' for writing");
    out << contents;
    if (!out.flush())
      throw Error("write to '" + tmp.string() + "' failed");
  }
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  if (ec)
    throw Error("cannot rename '" + tmp.string() + "': " + ec.message());
}

std::string
read_file(const std::filesystem::path& path)
{
  std::ifstream in(path, std::ios::binary);
  if (!in)
    throw Error("cannot open '" + path.string() + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::string
digest(std::string_view bytes)
{
  std::uint64_t h = 14695981039346656037ULL;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 1099511628211ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

} // namespace deconf::text
