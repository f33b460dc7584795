#pragma once

#include "deconf/core/config.hpp"
#include "deconf/core/dataset.hpp"
#include "deconf/env/pendulum.hpp"
#include "deconf/harness/records.hpp"
#include "deconf/harness/report.hpp"
#include "deconf/rl/trainer.hpp"
#include "deconf/weights/ratios.hpp"

#include <filesystem>
#include <functional>
#include <optional>
#include <string>
#include <vector>

namespace deconf::harness {

// Bumped whenever a stage's output for a fixed config changes.
inline constexpr std::string_view kCodeVersion = "deconf-1";

//! Failure inside a named pipeline stage.
class StageError : public Error
{
public:
  StageError(std::string stage, const std::string& message)
    : Error("stage " + stage + " failed: " + message)
    , stage_(std::move(stage))
  {
  }

  const std::string& stage() const { return stage_; }

private:
  std::string stage_;
};

struct StageEvent
{
  std::string stage;
  std::string digest;
  bool cached = false;
  double seconds = 0.0;
};

// Scenario name with its environment settings, e.g.
// "EmotionalPendulum(p_fail=0.2;odds=4;v_T=1;I_p=0.7)".
std::string setting_label(const ExperimentConfig& config);

// Mean return of `policy` over `episodes` online episodes. The episode RNG
// depends only on (seed, step), so agents evaluated at the same step see
// the same initial states and noise.
double evaluate_policy(const ExperimentConfig& config,
                       const env::Policy& policy,
                       std::uint64_t seed,
                       std::size_t step);

void save_agent(const rl::TrainedAgent& agent, const std::filesystem::path& dir);
rl::TrainedAgent load_agent(const std::filesystem::path& dir);

struct SeedRun
{
  rl::TrainedAgent agent;
  std::vector<EvalRecord> records;
};

//! gen-data -> fit-density -> weights -> train/eval for one config. Each
//! stage result is memoized in memory and, when a cache directory is set,
//! stored under `<cache>/<stage>-<digest>/` keyed by the config fields the
//! stage depends on.
class Pipeline
{
public:
  using Log = std::function<void(const std::string&)>;

  explicit Pipeline(ExperimentConfig config, std::filesystem::path cache_dir = {}, Log log = {});

  const ExperimentConfig& config() const { return config_; }
  const std::vector<StageEvent>& events() const { return events_; }

  std::string data_key() const;
  std::string density_key() const;
  std::string weights_key() const;
  std::string train_key(std::uint64_t seed) const;

  const OfflineDataset& dataset();
  const weights::DensityBundle& density();
  const weights::WeightVector& weights();
  // Trains one seed, evaluating every eval_interval steps (and at step 0).
  SeedRun train(std::uint64_t seed);
  // All configured seeds, records sorted.
  std::vector<EvalRecord> run();
  // Cell for this config's algorithm and mode from its records.
  ReportCell cell(const std::vector<EvalRecord>& records) const;

private:
  template<class T, class Load, class Compute, class Save>
  T stage(const std::string& name, const std::string& key, Load load, Compute compute, Save save);

  ExperimentConfig config_;
  std::filesystem::path cache_;
  Log log_;
  std::vector<StageEvent> events_;
  std::optional<OfflineDataset> dataset_;
  std::optional<weights::DensityBundle> density_;
  std::optional<weights::WeightVector> weights_;
};

} // namespace deconf::harness
