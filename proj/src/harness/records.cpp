#include "deconf/harness/records.hpp"

#include "deconf/core/text_io.hpp"

#include <algorithm>
#include <sstream>
#include <tuple>

namespace deconf::harness {

namespace {

constexpr std::string_view kCsvHeader = "scenario,algo,mode,seed,step,mean_return";

} // namespace

std::string
algo_label(Algo algo, DeconfoundMode mode)
{
  std::string label(to_string(algo));
  if (mode == DeconfoundMode::Reweight)
    label += "_RW";
  else if (mode == DeconfoundMode::Resample)
    label += "_RS";
  return label;
}

void
sort_records(std::vector<EvalRecord>& records)
{
  std::stable_sort(records.begin(), records.end(), [](const EvalRecord& a, const EvalRecord& b) {
    return std::tuple(to_string(a.algo), a.seed, a.step, static_cast<int>(a.mode), std::string_view(a.scenario)) <
           std::tuple(to_string(b.algo), b.seed, b.step, static_cast<int>(b.mode), std::string_view(b.scenario));
  });
}

std::string
serialize_records(std::vector<EvalRecord> records)
{
  sort_records(records);
  std::string out(kCsvHeader);
  out += '\n';
  for (const auto& r : records) {
    if (r.scenario.find(',') != std::string::npos)
      throw Error("scenario name '" + r.scenario + "' contains the delimiter");
    out += r.scenario + ',' + std::string(to_string(r.algo)) + ',' + std::string(to_string(r.mode)) + ',' +
           std::to_string(r.seed) + ',' + std::to_string(r.step) + ',' + text::format_real(r.mean_return) + '\n';
  }
  return out;
}

std::vector<EvalRecord>
parse_records(const std::string& contents)
{
  std::istringstream in(contents);
  std::string line;
  if (!std::getline(in, line) || text::trim(line) != kCsvHeader)
    throw Error("evaluation file lacks the header '" + std::string(kCsvHeader) + "'");
  std::vector<EvalRecord> records;
  std::size_t lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (text::trim(line).empty())
      continue;
    auto fields = text::split(text::trim(line), ',');
    if (fields.size() != 6)
      throw Error("evaluation file line " + std::to_string(lineno) + ": expected 6 fields");
    EvalRecord r;
    r.scenario = std::string(fields[0]);
    r.algo = algo_from_string(fields[1]);
    r.mode = mode_from_string(fields[2]);
    auto seed = text::parse_int(fields[3]);
    auto step = text::parse_int(fields[4]);
    if (seed < 0 || step < 0)
      throw Error("evaluation file line " + std::to_string(lineno) + ": negative seed or step");
    r.seed = static_cast<std::uint64_t>(seed);
    r.step = static_cast<std::size_t>(step);
    r.mean_return = text::parse_real(fields[5]);
    records.push_back(std::move(r));
  }
  return records;
}

void
save_records(const std::vector<EvalRecord>& records, const std::filesystem::path& path)
{
  text::write_atomic(path, serialize_records(records));
}

std::vector<EvalRecord>
load_records(const std::filesystem::path& path)
{
  return parse_records(text::read_file(path));
}

} // namespace deconf::harness
