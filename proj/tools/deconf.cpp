// Command-line driver for the deconfounded offline RL pipeline.

#include "deconf/core/config.hpp"
#include "deconf/core/text_io.hpp"
#include "deconf/harness/pipeline.hpp"
#include "deconf/harness/report.hpp"

#include <CLI11.hpp>

#include <filesystem>
#include <iostream>

namespace fs = std::filesystem;
using namespace deconf;

namespace {

constexpr int kConfigFailure = 2;
constexpr int kStageFailure = 3;

struct Options
{
  std::vector<std::string> configs;
  std::optional<std::uint64_t> seed;
  std::string out = "out";
  std::string cache;
  std::vector<std::string> record_files;
  std::vector<std::string> expect;
};

std::vector<ExperimentConfig>
load_configs(const Options& opt)
{
  if (opt.configs.empty())
    throw ConfigError("--config is required");
  std::vector<ExperimentConfig> out;
  for (const auto& path : opt.configs) {
    auto c = load_config(path);
    if (opt.seed)
      c.seeds = { *opt.seed };
    out.push_back(std::move(c));
  }
  return out;
}

harness::Pipeline
single_pipeline(const Options& opt)
{
  auto configs = load_configs(opt);
  if (configs.size() != 1)
    throw ConfigError("this subcommand takes exactly one --config");
  fs::path cache = opt.cache.empty() ? fs::path(opt.out) / "cache" : fs::path(opt.cache);
  return harness::Pipeline(configs.front(), cache, [](const std::string& msg) { std::cerr << msg << '\n'; });
}

void
write_report(const harness::ReportTable& table, const std::vector<harness::EvalRecord>& records, const fs::path& out)
{
  text::write_atomic(out / "report.csv", harness::render_table(table));
  text::write_atomic(out / "curves.csv", harness::render_curves(records));
  std::cout << harness::render_table(table);
}

int
run_all(const Options& opt)
{
  auto configs = load_configs(opt);
  fs::path out(opt.out);
  fs::path cache = opt.cache.empty() ? out / "cache" : fs::path(opt.cache);
  fs::create_directories(out);
  harness::ReportTable table;
  std::vector<harness::EvalRecord> all;
  for (const auto& c : configs) {
    const auto setting = harness::setting_label(c);
    const auto label = harness::algo_label(c.algo, c.train.mode);
    table.expect(setting, label);
    try {
      harness::Pipeline p(c, cache, [](const std::string& msg) { std::cerr << msg << '\n'; });
      auto records = p.run();
      table.set(setting, label, p.cell(records));
      all.insert(all.end(), records.begin(), records.end());
    } catch (const harness::StageError& e) {
      std::cerr << c.name << ": " << e.what() << '\n';
    }
  }
  harness::save_records(all, out / "records.csv");
  write_report(table, all, out);
  return table.complete() ? 0 : kStageFailure;
}

int
report(const Options& opt)
{
  fs::path out(opt.out);
  std::vector<std::string> files = opt.record_files;
  if (files.empty())
    files.push_back((out / "records.csv").string());
  std::vector<harness::EvalRecord> all;
  for (const auto& f : files) {
    auto r = harness::load_records(f);
    all.insert(all.end(), r.begin(), r.end());
  }
  std::map<std::pair<std::string, std::string>, std::vector<harness::EvalRecord>> groups;
  std::map<std::string, Algo> algo_of;
  for (const auto& r : all) {
    auto label = harness::algo_label(r.algo, r.mode);
    groups[{ r.scenario, label }].push_back(r);
    algo_of[label] = r.algo;
  }
  harness::ReportTable table;
  for (const auto& [key, records] : groups)
    table.set(key.first, key.second, harness::summarize(records, algo_of[key.second]));
  for (const auto& label : opt.expect)
    for (const auto& setting : std::vector<std::string>(table.settings))
      table.expect(setting, label);
  fs::create_directories(out);
  write_report(table, all, out);
  return table.complete() ? 0 : kStageFailure;
}

int
dispatch(const std::string& command, const Options& opt)
{
  if (command == "run")
    return run_all(opt);
  if (command == "report")
    return report(opt);

  auto p = single_pipeline(opt);
  fs::path out(opt.out);
  fs::create_directories(out);
  const auto& c = p.config();
  if (command == "gen-data") {
    const auto& d = p.dataset();
    save_dataset(d, out / "dataset.txt");
    std::cout << "dataset: " << d.size() << " transitions, " << count_episode_ends(d) << " episodes\n";
  } else if (command == "fit-density") {
    weights::save_bundle(p.density(), out / "density");
    std::cout << "density: " << to_string(c.ratio) << " model written to " << (out / "density").string() << '\n';
  } else if (command == "weights") {
    if (c.train.mode == DeconfoundMode::None)
      throw ConfigError("weights need train.mode reweight or resample");
    const auto& w = p.weights();
    weights::save_weights(w, out / "weights.txt");
    std::cout << "weights: mean " << w.mean_raw << ", clipped " << w.fraction_clipped << ", floored " << w.flagged
              << (w.quality_warning ? " (quality warning)" : "") << '\n';
  } else if (command == "train") {
    std::vector<harness::EvalRecord> all;
    for (auto seed : c.seeds) {
      auto run = p.train(seed);
      harness::save_agent(run.agent, out / ("agent-" + std::to_string(seed)));
      all.insert(all.end(), run.records.begin(), run.records.end());
    }
    harness::save_records(all, out / "records.csv");
    std::cout << "train: " << c.seeds.size() << " seed(s), " << all.size() << " evaluations\n";
  } else if (command == "eval") {
    std::vector<harness::EvalRecord> records;
    for (auto seed : c.seeds) {
      auto agent = harness::load_agent(out / ("agent-" + std::to_string(seed)));
      double ret = harness::evaluate_policy(c, agent.greedy(), seed, agent.steps);
      records.push_back({ harness::setting_label(c), c.algo, c.train.mode, seed, agent.steps, ret });
      std::cout << "seed " << seed << " step " << agent.steps << ": mean return " << ret << '\n';
    }
    harness::save_records(records, out / "eval.csv");
  }
  return 0;
}

} // namespace

int
main(int argc, char** argv)
{
  CLI::App app{ "Deconfounded offline RL experiments" };
  app.require_subcommand(1);
  Options opt;
  app.add_option("--config", opt.configs, "Experiment config (JSON); run accepts several")->take_all();
  app.add_option("--seed", opt.seed, "Train only this seed");
  app.add_option("--out", opt.out, "Output directory")->capture_default_str();
  app.add_option("--cache", opt.cache, "Stage cache directory (default <out>/cache)");

  std::string command;
  const std::vector<std::pair<std::string, std::string>> commands{
    { "gen-data", "Generate the offline dataset" },
    { "fit-density", "Fit the density models for the ratio" },
    { "weights", "Estimate and clip the deconfounding weights" },
    { "train", "Train every seed, evaluating along the way" },
    { "eval", "Evaluate saved agents" },
    { "report", "Summarize evaluation records" },
    { "run", "Full pipeline and report for one or more configs" },
  };
  for (const auto& [name, help] : commands) {
    auto* sub = app.add_subcommand(name, help);
    sub->fallthrough();
    sub->callback([&command, name = name] { command = name; });
    if (name == "report") {
      sub->add_option("records", opt.record_files, "Evaluation CSV files (default <out>/records.csv)");
      sub->add_option("--expect", opt.expect, "Labels every setting must have, e.g. CQL_RW");
    }
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? 0 : kConfigFailure;
  }

  try {
    return dispatch(command, opt);
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kConfigFailure;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kStageFailure;
  }
}
