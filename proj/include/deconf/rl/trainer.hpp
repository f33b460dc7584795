#pragma once

#include "deconf/core/config.hpp"
#include "deconf/core/dataset.hpp"
#include "deconf/rl/approximators.hpp"
#include "deconf/weights/postprocess.hpp"

#include <functional>
#include <optional>

namespace deconf::rl {

//! Networks produced by training. Value-based agents act greedily on Q;
//! SAC and BC act greedily on the policy head.
struct TrainedAgent
{
  Algo algo = Algo::DQN;
  QApproximator q;
  std::optional<PolicyHead> policy;
  std::size_t steps = 0;

  std::size_t act(const StateVec& s) const;
  std::function<std::size_t(const StateVec&)> greedy() const;
};

// Called at step 0 and after every `interval` updates.
struct EvalHook
{
  std::size_t interval = 0;
  std::function<void(std::size_t step, const TrainedAgent& agent)> callback;
};

// Network input dimension for a dataset: 1 for tabular state codes, else 3.
std::size_t input_dim_for(const OfflineDataset& dataset);

//! Minimizes mean(f + h) (mode none), mean(d f + h) under uniform sampling
//! (reweight) or mean(f + h) under sampling proportional to d (resample).
//! Deterministic given the seed. Throws on a non-finite loss.
TrainedAgent train(const OfflineDataset& dataset,
                   const weights::WeightVector* weights,
                   Algo algo,
                   const TrainConfig& cfg,
                   std::uint64_t seed,
                   const EvalHook& hook = {});

// Maximum-likelihood softmax policy for the dataset actions.
PolicyHead behavior_cloning(const OfflineDataset& dataset, const TrainConfig& cfg, std::uint64_t seed);

// Share of rows whose action equals the policy's greedy action.
double action_accuracy(const PolicyHead& policy, const OfflineDataset& dataset, std::span<const std::size_t> rows);

} // namespace deconf::rl
