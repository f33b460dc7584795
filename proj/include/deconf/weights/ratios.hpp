#pragma once

#include "deconf/core/config.hpp"
#include "deconf/density/lscde.hpp"
#include "deconf/weights/features.hpp"
#include "deconf/weights/postprocess.hpp"

#include <filesystem>
#include <optional>

namespace deconf::weights {

//! P(a | s) over every action code. Default: smoothed action frequencies
//! per state cell. Alternative: jittered LSCDE of the action code given s,
//! read at the integer codes and renormalized.
class PolicyModel
{
public:
  static PolicyModel fit_cells(const OfflineDataset& dataset, std::size_t cells, std::uint64_t seed);
  static PolicyModel fit_lscde(const OfflineDataset& dataset, const DensitySettings& settings, std::uint64_t seed);

  std::size_t num_actions() const { return num_actions_; }
  std::vector<double> probabilities(const StateVec& s) const;

  nlohmann::json to_json() const;
  static PolicyModel from_json(const nlohmann::json& j);

private:
  std::size_t num_actions_ = 0;
  std::optional<StatePartition> partition_;
  DiscreteConditional table_;
  std::optional<density::LscdeModel> lscde_;
  Standardizer scaler_;
};

//! Fitted components for one ratio kind.
//!   full / reward-only / next-state-only: outcome density P(outcome | s, m, a)
//!     and the policy P(a | s).
//!   backdoor: P(u | s) and P(u | s, a) on a shared state partition.
struct DensityBundle
{
  RatioKind kind = RatioKind::Full;
  std::size_t num_actions = kNumActions;
  std::optional<FeatureMap> features;
  std::optional<density::LscdeModel> outcome_model;
  std::optional<PolicyModel> policy_model;
  std::optional<StatePartition> u_partition;
  std::optional<DiscreteConditional> u_given_s;
  std::optional<DiscreteConditional> u_given_sa;
};

DensityBundle fit_density_bundle(const OfflineDataset& dataset,
                                 RatioKind kind,
                                 const DensitySettings& settings,
                                 std::uint64_t seed);

void save_bundle(const DensityBundle& bundle, const std::filesystem::path& dir);
DensityBundle load_bundle(const std::filesystem::path& dir);

inline constexpr double kRatioFloor = 1e-12;
// Share of floored denominators above which a quality warning is raised.
inline constexpr double kFlaggedWarningShare = 0.05;

// sum_a' P(o | s, m, a') P(a' | s) / P(o | s, m, a) with o = (s', r), r or s'.
WeightVector estimate_d1(const OfflineDataset& dataset, const DensityBundle& bundle, ClipBounds bounds = {});
WeightVector estimate_d1_reward_only(const OfflineDataset& dataset, const DensityBundle& bundle, ClipBounds bounds = {});
WeightVector estimate_d1_nextstate_only(const OfflineDataset& dataset,
                                        const DensityBundle& bundle,
                                        ClipBounds bounds = {});

// P(u | s) / P(u | s, a).
WeightVector estimate_d2(const OfflineDataset& dataset, const DensityBundle& bundle, ClipBounds bounds = {});

// Dispatches on bundle.kind.
WeightVector estimate_weights(const OfflineDataset& dataset, const DensityBundle& bundle, ClipBounds bounds = {});

} // namespace deconf::weights
