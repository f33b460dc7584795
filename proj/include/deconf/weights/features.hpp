#pragma once

#include "deconf/core/dataset.hpp"
#include "deconf/density/jitter.hpp"
#include "deconf/weights/discrete_conditional.hpp"

namespace deconf::weights {

//! Maps transitions to the (conditioning, outcome) coordinates of the
//! outcome density P(outcome | s, m, a).
//!
//! Conditioning: standardized s, then the m and a codes. Outcome: standardized
//! r, s' or (s', r) depending on the ratio kind. On tabular data s, s' and r are
//! integer codes and are jittered like m and a. Discrete codes are placed at
//! multiples of `discrete_scale` and jittered there.
struct FeatureMap
{
  RatioKind kind = RatioKind::RewardOnly;
  bool tabular = false;
  double discrete_scale = 1.0;
  Standardizer state;
  Standardizer next_state;
  Standardizer reward;

  static FeatureMap fit(const OfflineDataset& dataset, RatioKind kind, double discrete_scale);

  std::size_t state_dim() const { return state.dim(); }
  std::size_t dim_x() const { return state_dim() + 2; }
  std::size_t dim_y() const;

  // Query coordinates; discrete codes are used as-is (no jitter).
  void conditioning(const StateVec& s, int m, int a, double* out) const;
  void outcome(const Transition& t, double* out) const;

  nlohmann::json to_json() const;
  static FeatureMap from_json(const nlohmann::json& j);
};

struct TrainingSet
{
  density::Matrix X;
  density::Matrix Y;
};

// Fit-time coordinates with fresh jitter on every discrete entry.
TrainingSet training_features(const OfflineDataset& dataset,
                              const FeatureMap& features,
                              const density::JitterConfig& jitter,
                              std::uint64_t seed);

} // namespace deconf::weights
