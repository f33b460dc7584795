#pragma once

#include "deconf/core/dataset.hpp"
#include "deconf/density/kmeans.hpp"

#include <json.hpp>

#include <cstdint>
#include <vector>

namespace deconf::weights {

//! Per-column affine standardization; constant columns keep scale 1.
struct Standardizer
{
  density::Vector mean;
  density::Vector scale;

  static Standardizer fit(const density::Matrix& data);
  static Standardizer identity(std::size_t dim);

  std::size_t dim() const { return static_cast<std::size_t>(mean.size()); }
  void apply(const double* in, double* out) const;
  density::Matrix apply(const density::Matrix& data) const;
};

// Row-per-transition matrices of s (x, y, v) or, for tabular data, the state code.
density::Matrix state_matrix(const OfflineDataset& dataset, bool next = false);

//! Partition of the state space into cells: k-means on standardized
//! continuous states, or one cell per code for tabular states.
class StatePartition
{
public:
  static StatePartition fit(const OfflineDataset& dataset, std::size_t cells, std::uint64_t seed);
  static StatePartition codes(std::size_t num_states);

  std::size_t size() const { return num_cells_; }
  std::size_t cell(const StateVec& s) const;

  nlohmann::json to_json() const;
  static StatePartition from_json(const nlohmann::json& j);

private:
  bool by_code_ = false;
  std::size_t num_cells_ = 0;
  Standardizer scaler_;
  density::Matrix centers_;
};

//! Smoothed frequency table P(value | cell, context): (count + smoothing) /
//! (total + smoothing * num_values).
class DiscreteConditional
{
public:
  DiscreteConditional() = default;
  DiscreteConditional(std::size_t num_cells, std::size_t num_contexts, std::size_t num_values, double smoothing = 1.0);

  void add(std::size_t cell, std::size_t context, std::size_t value);
  double probability(std::size_t cell, std::size_t context, std::size_t value) const;

  std::size_t num_values() const { return num_values_; }
  std::size_t num_contexts() const { return num_contexts_; }

  nlohmann::json to_json() const;
  static DiscreteConditional from_json(const nlohmann::json& j);

private:
  std::size_t index(std::size_t cell, std::size_t context) const;

  std::size_t num_cells_ = 0;
  std::size_t num_contexts_ = 0;
  std::size_t num_values_ = 0;
  double smoothing_ = 1.0;
  std::vector<double> counts_; // [cell][context][value]
  std::vector<double> totals_; // [cell][context]
};

} // namespace deconf::weights
