#pragma once

#include "deconf/harness/records.hpp"

#include <map>
#include <optional>
#include <string>
#include <vector>

namespace deconf::harness {

struct CurvePoint
{
  std::size_t step = 0;
  double mean_return = 0.0; // averaged over seeds
};

// Seed-averaged return per step, ascending in step. Steps missing for some
// seeds are averaged over the seeds that reported them.
std::vector<CurvePoint> seed_average(const std::vector<EvalRecord>& records);

// Maximum over steps of the seed-averaged return.
double best_of_averages(const std::vector<EvalRecord>& records);

// Seed-averaged return at the last step.
double final_average(const std::vector<EvalRecord>& records);

//! Baseline convention for non-learning agents: split the seed-averaged
//! curve into `parts` consecutive parts, average within each, take the
//! largest part average.
double best_part_average(const std::vector<EvalRecord>& records, std::size_t parts = 10);

struct ReportCell
{
  std::optional<double> best; // absent when the run failed
  std::optional<double> final;
};

//! Rows are environment settings, columns are algorithm labels.
struct ReportTable
{
  std::vector<std::string> settings;
  std::vector<std::string> labels;
  std::map<std::pair<std::string, std::string>, ReportCell> cells;

  void set(const std::string& setting, const std::string& label, ReportCell cell);
  // Registers the row and column without a value; renders as FAILED.
  void expect(const std::string& setting, const std::string& label);
  bool complete() const;
};

// Cell of one (setting, label) run: best_part_average for BC, else
// best_of_averages. Empty records give a failed cell.
ReportCell summarize(const std::vector<EvalRecord>& records, Algo algo);

//! `setting,<label>...` rows with best returns, then a second block with the
//! final-step returns. Missing cells print FAILED.
std::string render_table(const ReportTable& table);

//! One block per curve: `# curve=<label>` followed by `step,mean_return`
//! rows, blocks separated by a blank line.
std::string render_curves(const std::vector<EvalRecord>& records);

} // namespace deconf::harness
