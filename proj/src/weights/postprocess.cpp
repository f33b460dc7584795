#include "deconf/weights/postprocess.hpp"

#include "deconf/core/text_io.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

namespace deconf::weights {

WeightVector
postprocess_weights(std::vector<double> raw, ClipBounds bounds, RatioKind kind)
{
  if (!(bounds.low >= 0.0) || !(bounds.low <= bounds.high))
    throw Error("clip bounds must satisfy 0 <= low <= high");
  WeightVector w;
  w.kind = kind;
  w.bounds = bounds;
  w.clipped.resize(raw.size());
  std::size_t clipped = 0;
  double sum = 0.0;
  for (std::size_t i = 0; i < raw.size(); ++i) {
    double r = raw[i];
    if (!(r >= 0.0) || std::isinf(r))
      throw Error("weight " + std::to_string(i) + " is negative or not finite");
    sum += r;
    double c = std::clamp(r, bounds.low, bounds.high);
    if (c != r)
      ++clipped;
    w.clipped[i] = c;
  }
  w.mean_raw = raw.empty() ? 0.0 : sum / static_cast<double>(raw.size());
  w.fraction_clipped = raw.empty() ? 0.0 : static_cast<double>(clipped) / static_cast<double>(raw.size());
  w.raw = std::move(raw);
  return w;
}

SamplingDistribution
resample_distribution(const WeightVector& weights)
{
  const auto& c = weights.clipped;
  if (c.empty())
    throw Error("cannot resample from an empty weight vector");
  double total = std::accumulate(c.begin(), c.end(), 0.0);
  if (!(total > 0.0))
    throw Error("cannot resample: all weights are zero");
  if (std::all_of(c.begin(), c.end(), [&](double x) { return x == c.front(); }))
    return UniformSampling{ c.size() };
  CategoricalSampling cat;
  cat.probabilities.resize(c.size());
  for (std::size_t i = 0; i < c.size(); ++i)
    cat.probabilities[i] = c[i] / total;
  return cat;
}

std::string
serialize_weights(const WeightVector& w)
{
  std::string out;
  out += "# ratio_kind=" + std::string(to_string(w.kind)) + "\n";
  out += "# clip_low=" + text::format_real(w.bounds.low) + "\n";
  out += "# clip_high=" + text::format_real(w.bounds.high) + "\n";
  out += "# raw_mean=" + text::format_real(w.mean_raw) + "\n";
  out += "# fraction_clipped=" + text::format_real(w.fraction_clipped) + "\n";
  out += "# flagged=" + std::to_string(w.flagged) + "\n";
  out += std::string("# quality_warning=") + (w.quality_warning ? "1" : "0") + "\n";
  out += "# n=" + std::to_string(w.raw.size()) + "\n";
  for (double r : w.raw)
    out += text::format_real(r) + '\n';
  return out;
}

WeightVector
parse_weights(const std::string& contents)
{
  text::Header header;
  std::vector<double> raw;
  std::istringstream in(contents);
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.front() == '#') {
      text::parse_header_line(line, header);
      continue;
    }
    if (text::trim(line).empty())
      continue;
    try {
      raw.push_back(text::parse_real(text::trim(line)));
    } catch (const Error& e) {
      throw Error("weights line " + std::to_string(line_no) + ": " + e.what());
    }
  }
  if (header.contains("n") && static_cast<std::size_t>(text::parse_int(header.at("n"))) != raw.size())
    throw Error("weights file truncated: header declares " + header.at("n") + " rows, found " +
                std::to_string(raw.size()));
  ClipBounds bounds{ text::parse_real(header.at("clip_low")), text::parse_real(header.at("clip_high")) };
  auto w = postprocess_weights(std::move(raw), bounds, ratio_kind_from_string(header.at("ratio_kind")));
  if (header.contains("flagged"))
    w.flagged = static_cast<std::size_t>(text::parse_int(header.at("flagged")));
  if (header.contains("quality_warning"))
    w.quality_warning = header.at("quality_warning") == "1";
  return w;
}

void
save_weights(const WeightVector& weights, const std::filesystem::path& path)
{
  text::write_atomic(path, serialize_weights(weights));
}

WeightVector
load_weights(const std::filesystem::path& path)
{
  return parse_weights(text::read_file(path));
}

} // namespace deconf::weights
