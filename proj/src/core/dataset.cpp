#include "deconf/core/dataset.hpp"

#include "deconf/core/text_io.hpp"

#include <cmath>
#include <sstream>

namespace deconf {

namespace {

constexpr std::string_view kColumns = "x,y,v,a,m,u,x2,y2,v2,r,done";
constexpr std::size_t kNumColumns = 11;

std::string
shape_name(const FieldShape& shape)
{
  if (shape.has_m && shape.has_u)
    return "m,u";
  if (shape.has_m)
    return "m";
  if (shape.has_u)
    return "u";
  return "";
}

FieldShape
shape_from_name(std::string_view name)
{
  FieldShape shape;
  for (auto tok : text::split(name, ',')) {
    tok = text::trim(tok);
    if (tok == "m")
      shape.has_m = true;
    else if (tok == "u")
      shape.has_u = true;
    else if (!tok.empty())
      throw Error("unknown optional field '" + std::string(tok) + "'");
  }
  return shape;
}

void
append_optional(std::string& out, const std::optional<int>& value)
{
  if (value)
    out += std::to_string(*value);
}

} // namespace

void
OfflineDataset::validate() const
{
  if (transitions.empty())
    throw Error("empty dataset");
  if (auto required = required_shape(scenario); required && *required != shape)
    throw Error("field shape '" + shape_name(shape) + "' does not match scenario " +
                std::string(to_string(scenario)));
  for (std::size_t i = 0; i < transitions.size(); ++i) {
    const auto& t = transitions[i];
    if (t.m.has_value() != shape.has_m || t.u.has_value() != shape.has_u)
      throw Error("row " + std::to_string(i) + ": optional fields do not match declared shape");
    if (!std::isfinite(t.r))
      throw Error("row " + std::to_string(i) + ": reward is not finite");
    if (t.a < 0 || static_cast<std::size_t>(t.a) >= num_actions)
      throw Error("row " + std::to_string(i) + ": action index out of range");
  }
}

std::size_t
count_episode_ends(const OfflineDataset& dataset)
{
  const auto& ts = dataset.transitions;
  if (ts.empty())
    return 0;
  std::size_t ends = 1;
  for (std::size_t i = 0; i + 1 < ts.size(); ++i)
    if (ts[i].done || !(ts[i].s_next == ts[i + 1].s))
      ++ends;
  return ends;
}

std::string
serialize_dataset(const OfflineDataset& dataset)
{
  dataset.validate();
  std::string out;
  out.reserve(dataset.size() * 200 + 256);
  out += "# scenario=" + std::string(to_string(dataset.scenario)) + "\n";
  out += "# seed=" + std::to_string(dataset.seed) + "\n";
  out += "# config_digest=" + dataset.generator_config_digest + "\n";
  out += "# n=" + std::to_string(dataset.size()) + "\n";
  out += "# actions=" + std::to_string(dataset.num_actions) + "\n";
  out += "# fields=" + shape_name(dataset.shape) + "\n";
  out += "# columns=" + std::string(kColumns) + "\n";
  for (const auto& t : dataset.transitions) {
    out += text::format_real(t.s.x) + ',' + text::format_real(t.s.y) + ',' +
           text::format_real(t.s.v) + ',' + std::to_string(t.a) + ',';
    append_optional(out, t.m);
    out += ',';
    append_optional(out, t.u);
    out += ',' + text::format_real(t.s_next.x) + ',' + text::format_real(t.s_next.y) + ',' +
           text::format_real(t.s_next.v) + ',' + text::format_real(t.r) + ',' +
           (t.done ? "1" : "0") + '\n';
  }
  return out;
}

OfflineDataset
parse_dataset(const std::string& contents)
{
  OfflineDataset ds;
  text::Header header;
  std::istringstream in(contents);
  std::string line;
  std::size_t line_no = 0;
  bool in_body = false;
  std::size_t declared_n = 0;

  auto fail = [&](const std::string& what) -> void {
    throw Error("dataset line " + std::to_string(line_no) + ": " + what);
  };

  while (std::getline(in, line)) {
    ++line_no;
    if (!in_body && !line.empty() && line.front() == '#') {
      if (!text::parse_header_line(line, header))
        fail("malformed header");
      continue;
    }
    if (!in_body) {
      in_body = true;
      try {
        ds.scenario = scenario_from_string(header.at("scenario"));
        ds.seed = static_cast<std::uint64_t>(text::parse_int(header.at("seed")));
        ds.generator_config_digest = header.at("config_digest");
        declared_n = static_cast<std::size_t>(text::parse_int(header.at("n")));
        ds.num_actions = static_cast<std::size_t>(text::parse_int(header.at("actions")));
        ds.shape = shape_from_name(header.at("fields"));
        if (header.at("columns") != kColumns)
          fail("unexpected column list");
      } catch (const Error& e) {
        fail(e.what());
      }
      ds.transitions.reserve(declared_n);
    }
    if (line.empty())
      fail("empty row");
    auto cells = text::split(line, ',');
    if (cells.size() != kNumColumns)
      fail("expected " + std::to_string(kNumColumns) + " cells, got " +
           std::to_string(cells.size()));
    Transition t;
    try {
      t.s = { text::parse_real(cells[0]), text::parse_real(cells[1]), text::parse_real(cells[2]) };
      t.a = static_cast<int>(text::parse_int(cells[3]));
      if (!text::trim(cells[4]).empty())
        t.m = static_cast<int>(text::parse_int(cells[4]));
      if (!text::trim(cells[5]).empty())
        t.u = static_cast<int>(text::parse_int(cells[5]));
      t.s_next = { text::parse_real(cells[6]), text::parse_real(cells[7]), text::parse_real(cells[8]) };
      t.r = text::parse_real(cells[9]);
      auto done = text::parse_int(cells[10]);
      if (done != 0 && done != 1)
        fail("done flag must be 0 or 1");
      t.done = done == 1;
    } catch (const Error& e) {
      fail(e.what());
    }
    if (t.m.has_value() != ds.shape.has_m || t.u.has_value() != ds.shape.has_u)
      fail("shape mismatch: optional fields do not match scenario " +
           std::string(to_string(ds.scenario)));
    ds.transitions.push_back(t);
  }
  if (!in_body)
    throw Error("empty dataset");
  if (ds.transitions.size() != declared_n)
    fail("truncated: header declares " + std::to_string(declared_n) + " rows, found " +
         std::to_string(ds.transitions.size()));
  // A file cut mid-row leaves no trailing newline on its final line.
  if (!contents.empty() && contents.back() != '\n')
    throw Error("dataset line " + std::to_string(line_no) + ": truncated row");
  ds.validate();
  return ds;
}

void
save_dataset(const OfflineDataset& dataset, const std::filesystem::path& path)
{
  text::write_atomic(path, serialize_dataset(dataset));
}

OfflineDataset
load_dataset(const std::filesystem::path& path)
{
  return parse_dataset(text::read_file(path));
}

} // namespace deconf
