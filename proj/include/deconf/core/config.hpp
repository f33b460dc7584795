#pragma once

#include "deconf/core/types.hpp"

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

namespace deconf {

enum class Algo
{
  DQN,
  DDQN,
  SAC,
  CQL,
  BC
};

std::string_view to_string(Algo algo);
Algo algo_from_string(std::string_view name);

enum class CenterMethod
{
  KMeans,
  Random
};

std::string_view to_string(CenterMethod method);
CenterMethod center_method_from_string(std::string_view name);

enum class OptimizerKind
{
  Sgd,
  Adam
};

//! Environment hyperparameters. `odds` and `irrational_prob` are odds1 and
//! I_p1 for the Emotional tasks, odds2 and I_p2 for the Windy tasks.
struct EnvSettings
{
  std::optional<double> p_fail = 0.2;
  double odds = 4.0;
  std::optional<double> v_threshold = 1.0;
  double irrational_prob = 0.7;
};

struct CrossValidationSettings
{
  std::vector<std::size_t> k_grid;
  std::vector<double> lambda_grid;
  std::vector<double> sigma_x_grid;
  std::vector<double> sigma_y_grid;
  std::size_t folds = 0; // 0 disables cross-validation
  std::size_t sample_cap = 5000;
};

struct DensitySettings
{
  std::size_t k = 200;
  double lambda = 0.1;
  std::optional<double> sigma_x; // median heuristic when absent
  std::optional<double> sigma_y;
  CenterMethod centers = CenterMethod::KMeans;
  std::size_t center_sample_cap = 10000;
  double jitter_theta = 0.5;
  double jitter_v = 5.0;
  double discrete_scale = 1.0; // spacing of discrete codes before jittering
  bool policy_lscde = false; // jittered LSCDE for P(a|s) instead of cell frequencies
  std::size_t policy_cells = 64;
  double clip_low = 0.1;
  double clip_high = 10.0;
  CrossValidationSettings cv;
};

struct TrainConfig
{
  double gamma = 0.99;
  double learning_rate = 3e-4;
  std::size_t batch_size = 256;
  std::size_t target_sync_interval = 1000;
  double alpha_ent = 0.2;
  double cql_weight = 1.0;
  std::size_t total_steps = 30000;
  DeconfoundMode mode = DeconfoundMode::None;
  OptimizerKind optimizer = OptimizerKind::Adam;
  double reward_scale = 1.0;
  std::vector<std::size_t> hidden{ 64, 64 };
};

struct ExperimentConfig
{
  std::string name = "experiment";
  Scenario scenario = Scenario::EmotionalPendulum;
  EnvSettings env;
  std::size_t dataset_size = 50000;
  std::uint64_t data_seed = 0;
  DensitySettings density;
  RatioKind ratio = RatioKind::RewardOnly;
  Algo algo = Algo::DQN;
  TrainConfig train;
  std::size_t eval_interval = 1000;
  std::size_t eval_episodes = 20;
  std::vector<std::uint64_t> seeds{ 0, 1, 2 };

  // Throws ConfigError on out-of-range or scenario-inconsistent values.
  void validate() const;
};

std::string to_json(const ExperimentConfig& config);
ExperimentConfig config_from_json(const std::string& text);
ExperimentConfig load_config(const std::filesystem::path& path);

} // namespace deconf
