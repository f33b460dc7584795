#include "deconf/harness/report.hpp"

#include "deconf/core/text_io.hpp"

#include <algorithm>
#include <limits>

namespace deconf::harness {

std::vector<CurvePoint>
seed_average(const std::vector<EvalRecord>& records)
{
  std::map<std::size_t, std::pair<double, std::size_t>> by_step;
  for (const auto& r : records) {
    auto& acc = by_step[r.step];
    acc.first += r.mean_return;
    acc.second += 1;
  }
  std::vector<CurvePoint> curve;
  curve.reserve(by_step.size());
  for (const auto& [step, acc] : by_step)
    curve.push_back({ step, acc.first / static_cast<double>(acc.second) });
  return curve;
}

double
best_of_averages(const std::vector<EvalRecord>& records)
{
  auto curve = seed_average(records);
  if (curve.empty())
    throw Error("no evaluation records to summarize");
  double best = -std::numeric_limits<double>::infinity();
  for (const auto& p : curve)
    best = std::max(best, p.mean_return);
  return best;
}

double
final_average(const std::vector<EvalRecord>& records)
{
  auto curve = seed_average(records);
  if (curve.empty())
    throw Error("no evaluation records to summarize");
  return curve.back().mean_return;
}

double
best_part_average(const std::vector<EvalRecord>& records, std::size_t parts)
{
  auto curve = seed_average(records);
  if (curve.empty())
    throw Error("no evaluation records to summarize");
  if (parts == 0)
    throw Error("part count must be positive");
  parts = std::min(parts, curve.size());
  double best = -std::numeric_limits<double>::infinity();
  for (std::size_t p = 0; p < parts; ++p) {
    std::size_t lo = p * curve.size() / parts;
    std::size_t hi = (p + 1) * curve.size() / parts;
    double sum = 0.0;
    for (std::size_t i = lo; i < hi; ++i)
      sum += curve[i].mean_return;
    best = std::max(best, sum / static_cast<double>(hi - lo));
  }
  return best;
}

void
ReportTable::set(const std::string& setting, const std::string& label, ReportCell cell)
{
  expect(setting, label);
  cells[{ setting, label }] = cell;
}

void
ReportTable::expect(const std::string& setting, const std::string& label)
{
  if (std::find(settings.begin(), settings.end(), setting) == settings.end())
    settings.push_back(setting);
  if (std::find(labels.begin(), labels.end(), label) == labels.end())
    labels.push_back(label);
}

bool
ReportTable::complete() const
{
  for (const auto& s : settings)
    for (const auto& l : labels) {
      auto it = cells.find({ s, l });
      if (it == cells.end() || !it->second.best)
        return false;
    }
  return true;
}

ReportCell
summarize(const std::vector<EvalRecord>& records, Algo algo)
{
  if (records.empty())
    return {};
  ReportCell cell;
  cell.best = algo == Algo::BC ? best_part_average(records) : best_of_averages(records);
  cell.final = final_average(records);
  return cell;
}

std::string
render_table(const ReportTable& table)
{
  std::string out;
  auto block = [&](const char* title, auto pick) {
    out += std::string("# ") + title + "\nsetting";
    for (const auto& l : table.labels)
      out += ',' + l;
    out += '\n';
    for (const auto& s : table.settings) {
      out += s;
      for (const auto& l : table.labels) {
        auto it = table.cells.find({ s, l });
        std::optional<double> v;
        if (it != table.cells.end())
          v = pick(it->second);
        out += ',' + (v ? text::format_real(*v) : std::string("FAILED"));
      }
      out += '\n';
    }
  };
  block("best", [](const ReportCell& c) { return c.best; });
  out += '\n';
  block("final", [](const ReportCell& c) { return c.final; });
  return out;
}

std::string
render_curves(const std::vector<EvalRecord>& records)
{
  std::map<std::string, std::vector<EvalRecord>> groups;
  for (const auto& r : records) {
    std::string key = algo_label(r.algo, r.mode);
    if (!r.scenario.empty())
      key = r.scenario + '/' + key;
    groups[key].push_back(r);
  }
  std::string out;
  bool first = true;
  for (const auto& [label, group] : groups) {
    if (!first)
      out += '\n';
    first = false;
    out += "# curve=" + label + "\nstep,mean_return\n";
    for (const auto& p : seed_average(group))
      out += std::to_string(p.step) + ',' + text::format_real(p.mean_return) + '\n';
  }
  return out;
}

} // namespace deconf::harness
